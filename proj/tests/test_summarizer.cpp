// SPDX-License-Identifier: Apache-2.0
/*
Copyright (C) 2026 The vaefp Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <set>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace vaefp;
namespace vt = vaefp::testing;

namespace {

ForensicEvent ev(double t, std::string sc, std::int64_t ret = 0, std::int64_t pid = 1, std::int64_t bytes = 0,
                 std::string c = "a") {
	return {t, std::move(c), std::move(sc), pid, ret, bytes};
}

std::size_t syscall_dim(std::string_view name) {
	return static_cast<std::size_t>(SyscallTaxonomy::standard().feature_index(name));
}

std::size_t category_dim(SyscallCategory c) {
	return kTrackedSyscalls.size() + static_cast<std::size_t>(c);
}

std::size_t aggregate_dim(std::size_t i) {
	return kTrackedSyscalls.size() + kCategoryCount + i;
}

} // namespace

TEST(WindowEvents, HalfOpenBoundary) {
	const auto groups = window_events({ev(0, "fork"), ev(29.9, "fork"), ev(30.0, "fork")}, 30);
	ASSERT_EQ(groups.size(), 2u);
	EXPECT_EQ(groups[0].key.interval_index, 0);
	ASSERT_EQ(groups[0].events.size(), 2u);
	EXPECT_EQ(groups[0].events[1].timestamp, 29.9);
	EXPECT_EQ(groups[1].key.interval_index, 1);
	ASSERT_EQ(groups[1].events.size(), 1u);
	EXPECT_EQ(groups[1].events[0].timestamp, 30.0);
	EXPECT_EQ(groups[1].key.start, 30.0);
}

TEST(WindowEvents, GapsComeOutEmpty) {
	const auto groups = window_events({ev(5, "fork"), ev(65, "fork")}, 30);
	ASSERT_EQ(groups.size(), 3u);
	for (std::int64_t k = 0; k < 3; ++k) {
		EXPECT_EQ(groups[k].key.interval_index, k);
		EXPECT_EQ(groups[k].key.start, 30.0 * k);
	}
	EXPECT_EQ(groups[0].events.size(), 1u);
	EXPECT_TRUE(groups[1].events.empty());
	EXPECT_EQ(groups[2].events.size(), 1u);
}

TEST(WindowEvents, EmptyInput) {
	EXPECT_TRUE(window_events({}, 30).empty());
}

TEST(WindowEvents, Errors) {
	EXPECT_THROW(window_events({ev(1, "fork")}, 0), InvalidConfig);
	EXPECT_THROW(window_events({ev(1, "fork"), ev(0.5, "fork")}, 30), OutOfOrderTimestamp);
	EXPECT_THROW(window_events({ev(1, "fork"), ev(2, "fork", 0, 1, 0, "b")}, 30), ForeignEvent);
}

TEST(WindowEvents, EveryEventLandsInItsWindow) {
	const auto events = vt::baseline_events(12, 10);
	std::size_t total = 0;
	for (const auto& g : window_events(events, 30)) {
		EXPECT_EQ(g.key.start, g.key.interval_index * 30.0);
		for (const auto& e : g.events) {
			EXPECT_GE(e.timestamp, g.key.start);
			EXPECT_LT(e.timestamp, g.key.start + 30.0);
		}
		total += g.events.size();
	}
	EXPECT_EQ(total, events.size());
}

TEST(SummarizeInterval, CountsSyscallsAndCategories) {
	const auto key = make_key("a", 0, 30);
	const auto v = summarize_interval(key, {ev(1, "openat"), ev(2, "openat"), ev(3, "close"), ev(4, "openat"),
	                                        ev(5, "close")});
	EXPECT_EQ(v.features[syscall_dim("openat")], 3.0);
	EXPECT_EQ(v.features[syscall_dim("close")], 2.0);
	EXPECT_EQ(v.features[category_dim(SyscallCategory::FileDirAccessEvents)], 5.0);
	EXPECT_EQ(v.features[aggregate_dim(0)], 5.0);
	double sum = 0.0;
	for (double f : v.features) {
		sum += f;
	}
	// 5 syscall hits + 5 category hits + total 5 + 1 distinct pid.
	EXPECT_EQ(sum, 16.0);
}

TEST(SummarizeInterval, EmptyGroupIsZero) {
	const auto v = summarize_interval(make_key("a", 4, 30), {});
	EXPECT_EQ(v.features, std::vector<double>(80, 0.0));
	EXPECT_EQ(v.key.start, 120.0);
	EXPECT_EQ(v.schema_version, 1);
}

TEST(SummarizeInterval, ErrorReturnsAndAggregates) {
	const auto v = summarize_interval(
	    make_key("a", 0, 30), {ev(1, "openat", 0, 3, 10), ev(2, "openat", -2, 4, 0), ev(3, "read", 4, 3, 512)});
	EXPECT_EQ(v.features[aggregate_dim(1)], 1.0);
	EXPECT_EQ(v.features[aggregate_dim(2)], 2.0);
	EXPECT_EQ(v.features[aggregate_dim(3)], 522.0);
	// Untracked syscalls count toward the aggregates only.
	EXPECT_EQ(v.features[aggregate_dim(0)], 3.0);
	EXPECT_EQ(v.features[category_dim(SyscallCategory::FileDirAccessEvents)], 2.0);
}

TEST(SummarizeInterval, AbiVariantsCountAsBase) {
	const auto v = summarize_interval(make_key("a", 0, 30), {ev(1, "__x64_sys_execve"), ev(2, "execve")});
	EXPECT_EQ(v.features[syscall_dim("execve")], 2.0);
}

TEST(SummarizeInterval, ForeignEvents) {
	const auto key = make_key("a", 1, 30);
	EXPECT_THROW(summarize_interval(key, {ev(31, "fork", 0, 1, 0, "b")}), ForeignEvent);
	EXPECT_THROW(summarize_interval(key, {ev(29, "fork")}), ForeignEvent);
	EXPECT_THROW(summarize_interval(key, {ev(60, "fork")}), ForeignEvent);
}

TEST(SummarizeInterval, PermutationInvariant) {
	auto events = vt::baseline_events(21, 1);
	const auto key = make_key("nginx-1", 0, 30);
	const auto ref = summarize_interval(key, events);
	std::mt19937_64 gen(5);
	for (int i = 0; i < 5; ++i) {
		std::shuffle(events.begin(), events.end(), gen);
		EXPECT_EQ(summarize_interval(key, events), ref);
	}
}

TEST(SummarizeInterval, AdditiveOverDisjointSets) {
	const auto events = vt::baseline_events(22, 1);
	const auto key = make_key("nginx-1", 0, 30);
	std::vector<ForensicEvent> a, b;
	for (std::size_t i = 0; i < events.size(); ++i) {
		(i % 3 == 0 ? a : b).push_back(events[i]);
	}
	const auto whole = summarize_interval(key, events).features;
	const auto va = summarize_interval(key, a).features;
	const auto vb = summarize_interval(key, b).features;
	for (std::size_t i = 0; i < whole.size(); ++i) {
		if (i == aggregate_dim(2)) {
			continue; // distinct pids is a set size, not a sum
		}
		EXPECT_EQ(whole[i], va[i] + vb[i]) << i;
	}
}

TEST(SummarizeTrace, DimensionAndOrdering) {
	EXPECT_EQ(feature_dimension(), 80u);
	const auto names = feature_names();
	ASSERT_EQ(names.size(), 80u);
	EXPECT_EQ(names[76], "total_events");
	EXPECT_EQ(names[79], "total_arg_bytes");
	EXPECT_TRUE(std::is_sorted(names.begin(), names.begin() + 66));

	auto events = vt::baseline_events(23, 4, "b");
	const auto more = vt::baseline_events(24, 3, "a");
	events.insert(events.end(), more.begin(), more.end());
	std::stable_sort(events.begin(), events.end(),
	                 [](const auto& x, const auto& y) { return x.timestamp < y.timestamp; });
	const auto vectors = summarize_trace(events);
	ASSERT_EQ(vectors.size(), 7u);
	EXPECT_EQ(vectors[0].key.container_id, "a");
	EXPECT_EQ(vectors[3].key.container_id, "b");
	EXPECT_EQ(vectors[3].key.interval_index, 0);
	for (const auto& v : vectors) {
		EXPECT_EQ(v.features.size(), 80u);
		for (double f : v.features) {
			EXPECT_GE(f, 0.0);
		}
	}
}

TEST(VectorRecord, RoundTrip) {
	auto v = summarize_interval(make_key("web", 3, 30), {ev(95, "openat", -2, 9, 77, "web")});
	v.features[5] = 0.1;
	const auto line = serialize_vector(v);
	EXPECT_EQ(parse_vector(line), v);
	EXPECT_THROW(parse_vector("{\"c\":\"x\"}"), MalformedRecord);
}

TEST(Scaler, FitsElementwiseExtrema) {
	const std::vector<std::vector<double>> rows = {{0, 10}, {4, 20}};
	const auto s = fit_scaler(std::span<const std::vector<double>>(rows));
	EXPECT_EQ(s.min, (std::vector<double>{0, 10}));
	EXPECT_EQ(s.max, (std::vector<double>{4, 20}));
	EXPECT_EQ(transform(s, std::vector<double>{2, 15}), (std::vector<double>{0.5, 0.5}));
}

TEST(Scaler, DegenerateFeatureMapsToZero) {
	MinMaxScaler s{{3}, {3}};
	EXPECT_EQ(transform(s, std::vector<double>{3})[0], 0.0);
	EXPECT_EQ(transform(s, std::vector<double>{7})[0], 0.0);
	EXPECT_EQ(inverse_transform(s, std::vector<double>{0.4})[0], 3.0);
}

TEST(Scaler, OutOfRangeIsNotClipped) {
	MinMaxScaler s{{0}, {10}};
	EXPECT_EQ(transform(s, std::vector<double>{20})[0], 2.0);
	EXPECT_EQ(transform(s, std::vector<double>{-5})[0], -0.5);
}

TEST(Scaler, Errors) {
	const std::vector<std::vector<double>> none;
	EXPECT_THROW(fit_scaler(std::span<const std::vector<double>>(none)), EmptyDataset);
	const std::vector<std::vector<double>> ragged = {{1, 2}, {1}};
	EXPECT_THROW(fit_scaler(std::span<const std::vector<double>>(ragged)), DimensionMismatch);
	MinMaxScaler s{{0, 0}, {1, 1}};
	EXPECT_THROW(transform(s, std::vector<double>{1}), DimensionMismatch);
	EXPECT_THROW(inverse_transform(s, std::vector<double>{1, 2, 3}), DimensionMismatch);
}

TEST(Scaler, RoundTripOnRealData) {
	const auto vectors = summarize_trace(vt::baseline_events(25, 40));
	const auto s = fit_scaler(std::span<const ActivityVector>(vectors));
	for (const auto& v : vectors) {
		const auto y = transform(s, v);
		const auto back = inverse_transform(s, y);
		for (std::size_t i = 0; i < y.size(); ++i) {
			EXPECT_GE(y[i], 0.0);
			EXPECT_LE(y[i], 1.0);
			if (s.max[i] > s.min[i]) {
				EXPECT_LE(std::abs(back[i] - v.features[i]), 1e-9 * std::max(1.0, std::abs(v.features[i])));
			} else {
				EXPECT_EQ(back[i], s.min[i]);
			}
		}
	}
}
