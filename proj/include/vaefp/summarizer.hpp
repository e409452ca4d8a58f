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

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "taxonomy.hpp"
#include "trace.hpp"

namespace vaefp {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kDefaultIntervalSeconds = 30.0;
inline constexpr std::size_t kAggregateCount = 4;

struct IntervalKey {
	std::string container_id;
	std::int64_t interval_index = 0;
	double start = 0.0;
	double length = kDefaultIntervalSeconds;

	bool operator==(const IntervalKey&) const = default;
};

inline IntervalKey make_key(std::string container_id, std::int64_t index, double length) {
	return {std::move(container_id), index, static_cast<double>(index) * length, length};
}

struct ActivityVector {
	IntervalKey key;
	std::vector<double> features;
	int schema_version = kSchemaVersion;

	bool operator==(const ActivityVector&) const = default;
};

struct IntervalGroup {
	IntervalKey key;
	std::vector<ForensicEvent> events;
};

// Feature layout: tracked syscalls (alphabetical), the ten categories,
// then total events, error returns, distinct pids, summed arg bytes.
inline std::size_t feature_dimension(const SyscallTaxonomy& taxonomy = SyscallTaxonomy::standard()) {
	return taxonomy.tracked_count() + kCategoryCount + kAggregateCount;
}

inline std::vector<std::string> feature_names(const SyscallTaxonomy& taxonomy = SyscallTaxonomy::standard()) {
	std::vector<std::string> names = taxonomy.sorted_names();
	for (std::size_t c = 0; c < kCategoryCount; ++c) {
		names.emplace_back(kCategoryNames[c]);
	}
	for (const char* agg : {"total_events", "error_returns", "distinct_pids", "total_arg_bytes"}) {
		names.emplace_back(agg);
	}
	return names;
}

inline std::int64_t interval_index_of(double t, double interval_len) {
	return static_cast<std::int64_t>(std::floor(t / interval_len));
}

// Buckets one container's time-ordered stream into half-open windows
// [k*L, (k+1)*L). Gaps between occupied windows come out as empty groups.
inline std::vector<IntervalGroup> window_events(const std::vector<ForensicEvent>& events, double interval_len) {
	if (!(interval_len > 0.0) || !std::isfinite(interval_len)) {
		throw InvalidConfig("interval length must be > 0");
	}
	std::vector<IntervalGroup> groups;
	if (events.empty()) {
		return groups;
	}
	const std::string& container = events.front().container_id;
	for (std::size_t i = 0; i < events.size(); ++i) {
		const auto& e = events[i];
		if (e.container_id != container) {
			throw ForeignEvent("window_events expects a single container, saw '" + e.container_id + "' after '" +
			                   container + "'");
		}
		if (i > 0 && e.timestamp < events[i - 1].timestamp) {
			throw OutOfOrderTimestamp(i);
		}
		const auto k = interval_index_of(e.timestamp, interval_len);
		if (groups.empty()) {
			groups.push_back({make_key(container, k, interval_len), {}});
		}
		while (groups.back().key.interval_index < k) {
			groups.push_back({make_key(container, groups.back().key.interval_index + 1, interval_len), {}});
		}
		groups.back().events.push_back(e);
	}
	return groups;
}

// Splits a mixed trace into per-container streams, preserving order.
inline std::map<std::string, std::vector<ForensicEvent>> split_by_container(const std::vector<ForensicEvent>& events) {
	std::map<std::string, std::vector<ForensicEvent>> out;
	for (const auto& e : events) {
		out[e.container_id].push_back(e);
	}
	return out;
}

inline ActivityVector summarize_interval(const IntervalKey& key, const std::vector<ForensicEvent>& events,
                                         const SyscallTaxonomy& taxonomy = SyscallTaxonomy::standard()) {
	const std::size_t tracked = taxonomy.tracked_count();
	const std::size_t cat_base = tracked;
	const std::size_t agg_base = tracked + kCategoryCount;

	ActivityVector v;
	v.key = key;
	v.features.assign(feature_dimension(taxonomy), 0.0);
	std::unordered_set<std::int64_t> pids;
	for (const auto& e : events) {
		if (e.container_id != key.container_id) {
			throw ForeignEvent("event for '" + e.container_id + "' in interval of '" + key.container_id + "'");
		}
		if (interval_index_of(e.timestamp, key.length) != key.interval_index) {
			throw ForeignEvent("event at t=" + std::to_string(e.timestamp) + " outside interval " +
			                   std::to_string(key.interval_index));
		}
		const std::string base = base_syscall_name(e.syscall);
		if (int idx = taxonomy.feature_index(base); idx >= 0) {
			v.features[static_cast<std::size_t>(idx)] += 1.0;
		}
		if (auto cat = taxonomy.classify(base); cat != SyscallCategory::Untracked) {
			v.features[cat_base + static_cast<std::size_t>(cat)] += 1.0;
		}
		v.features[agg_base + 0] += 1.0;
		if (e.result < 0) {
			v.features[agg_base + 1] += 1.0;
		}
		pids.insert(e.pid);
		v.features[agg_base + 3] += static_cast<double>(e.arg_bytes);
	}
	v.features[agg_base + 2] = static_cast<double>(pids.size());
	return v;
}

// Windows and summarizes every container in a trace. Output is ordered by
// container id, then interval index.
inline std::vector<ActivityVector> summarize_trace(const std::vector<ForensicEvent>& events,
                                                   double interval_len = kDefaultIntervalSeconds,
                                                   const SyscallTaxonomy& taxonomy = SyscallTaxonomy::standard()) {
	std::vector<ActivityVector> out;
	for (const auto& [id, stream] : split_by_container(events)) {
		for (const auto& g : window_events(stream, interval_len)) {
			out.push_back(summarize_interval(g.key, g.events, taxonomy));
		}
	}
	return out;
}

inline nlohmann::ordered_json key_to_json(const IntervalKey& key) {
	nlohmann::ordered_json j;
	j["c"] = key.container_id;
	j["k"] = key.interval_index;
	j["start"] = key.start;
	j["len"] = key.length;
	return j;
}

inline IntervalKey key_from_json(const nlohmann::json& j) {
	IntervalKey key;
	key.container_id = j.at("c").get<std::string>();
	key.interval_index = j.at("k").get<std::int64_t>();
	key.start = j.at("start").get<double>();
	key.length = j.at("len").get<double>();
	return key;
}

inline std::string serialize_vector(const ActivityVector& v) {
	auto j = key_to_json(v.key);
	j["v"] = v.schema_version;
	j["f"] = v.features;
	return j.dump();
}

inline ActivityVector parse_vector(std::string_view line) {
	try {
		const auto j = nlohmann::json::parse(line);
		ActivityVector v;
		v.key = key_from_json(j);
		v.schema_version = j.at("v").get<int>();
		v.features = j.at("f").get<std::vector<double>>();
		return v;
	} catch (const nlohmann::json::exception& ex) {
		throw MalformedRecord(1, std::string("activity vector: ") + ex.what());
	}
}

} // namespace vaefp
