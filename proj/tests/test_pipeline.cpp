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

#include <gtest/gtest.h>

#include "support.hpp"

using namespace vaefp;
namespace vt = vaefp::testing;

namespace {

std::vector<ForensicEvent> merge(std::vector<std::vector<ForensicEvent>> parts) {
	std::vector<ForensicEvent> out;
	for (auto& p : parts) {
		out.insert(out.end(), p.begin(), p.end());
	}
	std::stable_sort(out.begin(), out.end(),
	                 [](const ForensicEvent& a, const ForensicEvent& b) { return a.timestamp < b.timestamp; });
	return out;
}

ModelBundle rebound(const std::string& container) {
	auto b = vt::baseline_bundle();
	b.container_id = container;
	return b;
}

std::vector<ForensicEvent> flood_events(const std::string& container, double duration, double off = 240) {
	ScenarioConfig cfg;
	cfg.seed = vt::kFloodSeed;
	cfg.duration = duration;
	cfg.container_id = container;
	cfg.flood_off_s = off;
	return gen_httpflood_scenario(cfg).events;
}

} // namespace

TEST(Bench, BothPipelinesSeeTheSameStream) {
	const auto stream = build_interval_stream(flood_events("nginx-1", 600));
	const auto r = run_bench(stream, {vt::baseline_bundle()}, PublisherConfig{});
	EXPECT_EQ(r.standard.intervals, stream.size());
	EXPECT_EQ(r.adaptive.intervals, stream.size());
	EXPECT_EQ(r.standard.events, r.adaptive.events);
	std::size_t events = 0;
	for (const auto& g : stream.groups) {
		events += g.events.size();
	}
	EXPECT_EQ(r.standard.events, events);
}

TEST(Bench, RatiosAreByteQuotients) {
	const auto stream = build_interval_stream(flood_events("nginx-1", 600));
	const auto r = run_bench(stream, {vt::baseline_bundle()}, PublisherConfig{});
	ASSERT_TRUE(r.bytes_ratio);
	EXPECT_EQ(*r.bytes_ratio, static_cast<double>(r.adaptive.bytes) / static_cast<double>(r.standard.bytes));
	ASSERT_TRUE(r.time_ratio);
	EXPECT_EQ(*r.time_ratio, r.adaptive.wall_seconds / r.standard.wall_seconds);
	EXPECT_EQ(r.receipt_bytes, r.adaptive.bytes);
	EXPECT_GE(r.adaptive.unstable_intervals, 4u);

	const auto j = cost_report_json(r);
	EXPECT_EQ(j["standard"]["bytes"], r.standard.bytes);
	EXPECT_EQ(j["adaptive"]["unstable_intervals"], r.adaptive.unstable_intervals);
	EXPECT_EQ(j["bytes_ratio"], *r.bytes_ratio);
}

TEST(Bench, StandardBytesMatchFullBulkEncoding) {
	const auto stream = build_interval_stream(vt::baseline_events(vt::kStableTraceSeed, 5));
	std::uint64_t expected = 0;
	for (const auto& g : stream.groups) {
		expected += encode_bulk_request(standard_documents(g.key, g.events, {})).size();
	}
	MemorySink sink;
	const auto cost = run_standard(stream, sink, {});
	EXPECT_EQ(cost.bytes, expected);
	EXPECT_EQ(sink.bytes_written(), expected);
}

TEST(Bench, AllUnstableCostsAtLeastStandard) {
	// Flood with no quiet phase: every interval is under attack.
	const auto stream = build_interval_stream(flood_events("nginx-1", 180, 0));
	const auto r = run_bench(stream, {vt::baseline_bundle()}, PublisherConfig{});
	ASSERT_EQ(r.adaptive.unstable_intervals, stream.size());
	EXPECT_GE(r.adaptive.bytes, r.standard.bytes);
	EXPECT_GE(*r.bytes_ratio, 1.0);
}

TEST(Bench, EmptyStreamHasNoRatio) {
	const auto r = run_bench(IntervalStream{}, {vt::baseline_bundle()}, PublisherConfig{});
	EXPECT_FALSE(r.bytes_ratio);
	EXPECT_EQ(r.standard.bytes, 0u);
	EXPECT_TRUE(cost_report_json(r)["bytes_ratio"].is_null());
}

TEST(RunAdaptive, MultiContainerMatchesSequential) {
	const auto events = merge({vt::baseline_events(vt::kStableTraceSeed, 10, "web-a"), flood_events("web-b", 300),
	                           vt::baseline_events(vt::kStableTraceSeed + 1, 10, "web-c")});
	const auto stream = build_interval_stream(events);
	ASSERT_EQ(stream.size(), 30u);

	PublisherConfig cfg;
	Publisher together(cfg);
	for (const auto* c : {"web-a", "web-b", "web-c"}) {
		together.models().install(rebound(c));
	}
	MemorySink joint_sink(WireFormat::Records);
	const auto joint = run_adaptive(stream, together, &joint_sink);

	std::uint64_t sequential_bytes = 0;
	for (const auto* c : {"web-a", "web-b", "web-c"}) {
		IntervalStream one;
		for (std::size_t i = 0; i < stream.size(); ++i) {
			if (stream.groups[i].key.container_id == c) {
				one.groups.push_back(stream.groups[i]);
				one.vectors.push_back(stream.vectors[i]);
			}
		}
		Publisher alone(cfg);
		alone.models().install(rebound(c));
		MemorySink sink(WireFormat::Records);
		const auto recs = run_adaptive(one, alone, &sink);
		sequential_bytes += sink.bytes_written();
		std::size_t j = 0;
		for (std::size_t i = 0; i < stream.size(); ++i) {
			if (stream.groups[i].key.container_id != c) {
				continue;
			}
			EXPECT_EQ(serialize_assess_record(joint[i]), serialize_assess_record(recs[j])) << c << " " << j;
			++j;
		}
	}
	EXPECT_EQ(joint_sink.bytes_written(), sequential_bytes);
}

TEST(RunAdaptive, FloodSeparatesFromQuiet) {
	ScenarioConfig cfg;
	cfg.seed = vt::kFloodSeed;
	cfg.duration = 1500;
	const auto stream = build_interval_stream(gen_httpflood_scenario(cfg).events);
	const auto windows = flood_windows(cfg);
	Publisher p(PublisherConfig{});
	p.models().install(vt::baseline_bundle());
	const auto records = run_adaptive(stream, p);
	double min_attack = std::numeric_limits<double>::infinity();
	double max_quiet = 0.0;
	for (const auto& r : records) {
		const bool attack = std::any_of(windows.begin(), windows.end(), [&](const PhaseWindow& w) {
			return r.key.start >= w.start_s && r.key.start < w.end_s;
		});
		ASSERT_TRUE(r.recon_error);
		if (attack) {
			EXPECT_TRUE(r.unstable()) << r.key.interval_index;
			min_attack = std::min(min_attack, *r.recon_error);
		} else {
			max_quiet = std::max(max_quiet, *r.recon_error);
		}
	}
	EXPECT_GT(min_attack, 10.0 * max_quiet);
}

TEST(RunAdaptive, SpoolsWhenSinkIsDown) {
	vt::TempDir dir("pipe");
	Spool spool(dir.path());
	MemorySink sink;
	sink.close();
	const auto stream = build_interval_stream(flood_events("nginx-1", 300));
	Publisher p(PublisherConfig{});
	p.models().install(vt::baseline_bundle());
	const auto records = run_adaptive(stream, p, &sink, &spool);
	EXPECT_EQ(records.size(), stream.size());
	EXPECT_EQ(spool.pending().size(), stream.size());
	Publisher q(PublisherConfig{});
	q.models().install(vt::baseline_bundle());
	EXPECT_THROW(run_adaptive(stream, q, &sink), SinkUnavailable);
}

TEST(AssessRecord, Serialization) {
	AssessRecord r;
	r.key = make_key("web", 4, 30);
	r.events = 12;
	r.mode = PublishMode::LatentPlusForensics;
	r.recon_error = 2.5;
	r.r_th = 0.5;
	const auto j = nlohmann::json::parse(serialize_assess_record(r));
	EXPECT_EQ(j["c"], "web");
	EXPECT_EQ(j["k"], 4);
	EXPECT_EQ(j["start"], 120.0);
	EXPECT_EQ(j["events"], 12);
	EXPECT_EQ(j["recon_error"], 2.5);
	EXPECT_EQ(j["verdict"], "unstable");
	EXPECT_EQ(j["mode"], "latent_plus_forensics");
	AssessRecord none;
	none.key = r.key;
	EXPECT_EQ(nlohmann::json::parse(serialize_assess_record(none))["verdict"], "none");
}
