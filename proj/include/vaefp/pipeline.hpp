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

#include <chrono>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "publisher.hpp"
#include "sink.hpp"
#include "summarizer.hpp"

namespace vaefp {

// Windowed raw groups and their activity vectors, aligned by position.
struct IntervalStream {
	std::vector<IntervalGroup> groups;
	std::vector<ActivityVector> vectors;

	std::size_t size() const { return groups.size(); }
};

inline IntervalStream build_interval_stream(const std::vector<ForensicEvent>& events,
                                            double interval_len = kDefaultIntervalSeconds,
                                            const SyscallTaxonomy& taxonomy = SyscallTaxonomy::standard()) {
	IntervalStream s;
	for (const auto& [id, stream] : split_by_container(events)) {
		for (auto& g : window_events(stream, interval_len)) {
			s.vectors.push_back(summarize_interval(g.key, g.events, taxonomy));
			s.groups.push_back(std::move(g));
		}
	}
	return s;
}

// Per-interval outcome of the adaptive publisher.
struct AssessRecord {
	IntervalKey key;
	std::size_t events = 0;
	PublishMode mode = PublishMode::AccumulatingNoModel;
	std::optional<double> recon_error;
	std::optional<double> r_th;
	bool training_triggered = false;

	bool unstable() const { return mode == PublishMode::LatentPlusForensics; }
};

inline std::string serialize_assess_record(const AssessRecord& r) {
	std::string out = "{";
	detail::append_key_fields(out, r.key);
	out += ",\"events\":";
	append_int(out, static_cast<std::int64_t>(r.events));
	if (r.recon_error) {
		out += ",\"recon_error\":";
		append_double(out, *r.recon_error);
		out += ",\"r_th\":";
		append_double(out, *r.r_th);
		out += r.unstable() ? ",\"verdict\":\"unstable\"" : ",\"verdict\":\"stable\"";
	} else {
		out += ",\"verdict\":\"none\"";
	}
	out += ",\"mode\":\"";
	out += mode_name(r.mode);
	out += "\"}";
	return out;
}

inline AssessRecord to_record(const PublishAction& a, std::size_t events) {
	AssessRecord r;
	r.key = a.key;
	r.events = events;
	r.mode = a.mode;
	r.training_triggered = a.training_triggered;
	if (a.verdict) {
		r.recon_error = a.verdict->recon_error;
		r.r_th = a.verdict->r_th;
	}
	return r;
}

// Runs every interval through the publisher, one task per container, and
// returns records in stream order. Actions go to `sink` when given;
// undeliverable payloads land in `spool`.
inline std::vector<AssessRecord> run_adaptive(const IntervalStream& stream, Publisher& publisher, Sink* sink = nullptr,
                                              Spool* spool = nullptr) {
	std::map<std::string, std::vector<std::size_t>> by_container;
	for (std::size_t i = 0; i < stream.size(); ++i) {
		by_container[stream.groups[i].key.container_id].push_back(i);
	}
	std::vector<AssessRecord> records(stream.size());
	auto run_one = [&](const std::vector<std::size_t>& indices) {
		for (auto i : indices) {
			const auto action = publisher.process_interval(stream.groups[i], stream.vectors[i]);
			if (sink != nullptr) {
				try {
					emit(action, *sink, spool);
				} catch (const SinkUnavailable&) {
					if (spool == nullptr) {
						throw;
					}
				}
			}
			records[i] = to_record(action, stream.groups[i].events.size());
		}
	};
	if (by_container.size() == 1) {
		run_one(by_container.begin()->second);
		return records;
	}
	std::vector<std::future<void>> tasks;
	for (const auto& [id, indices] : by_container) {
		tasks.push_back(std::async(std::launch::async, run_one, std::cref(indices)));
	}
	for (auto& t : tasks) {
		t.get();
	}
	return records;
}

struct ModeCost {
	std::size_t intervals = 0;
	std::size_t events = 0;
	std::uint64_t bytes = 0;
	double wall_seconds = 0.0;
	std::size_t unstable_intervals = 0;
};

struct CostReport {
	ModeCost standard;
	ModeCost adaptive;
	std::optional<double> bytes_ratio; // adaptive / standard
	std::optional<double> time_ratio;  // adaptive / standard
	std::uint64_t receipt_bytes = 0;   // sum of adaptive emit receipts
};

inline void finalize_ratios(CostReport& r) {
	r.bytes_ratio.reset();
	r.time_ratio.reset();
	if (r.standard.bytes > 0) {
		r.bytes_ratio = static_cast<double>(r.adaptive.bytes) / static_cast<double>(r.standard.bytes);
	}
	if (r.standard.wall_seconds > 0.0) {
		r.time_ratio = r.adaptive.wall_seconds / r.standard.wall_seconds;
	}
}

// Conventional publisher: caches each interval and bulk-ships all of its events.
inline ModeCost run_standard(const IntervalStream& stream, Sink& sink, const IndexNames& idx,
                             std::size_t cache_capacity = 4) {
	ModeCost cost;
	IntervalCache cache(cache_capacity);
	const auto t0 = std::chrono::steady_clock::now();
	for (std::size_t i = 0; i < stream.size(); ++i) {
		const auto& g = stream.groups[i];
		cache.put({g.key, g.events, stream.vectors[i]});
		++cost.intervals;
		cost.events += g.events.size();
		if (g.events.empty()) {
			continue;
		}
		const auto payload = encode_bulk_request(standard_documents(g.key, g.events, idx));
		sink.write(payload);
		cost.bytes += payload.size();
	}
	cost.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	return cost;
}

// Both pipelines over the same interval stream, run one after the other.
// The adaptive side re-summarizes each interval so its timing includes the
// summarizer.
inline CostReport run_bench(const IntervalStream& stream, const std::vector<ModelBundle>& bundles,
                            const PublisherConfig& config, const IndexNames& idx = {}) {
	CostReport report;
	{
		MemorySink sink(WireFormat::Bulk, idx, false);
		report.standard = run_standard(stream, sink, idx, config.cache_capacity);
		report.standard.bytes = sink.bytes_written();
	}
	{
		MemorySink sink(WireFormat::Bulk, idx, false);
		Publisher publisher(config);
		for (const auto& b : bundles) {
			publisher.models().install(b);
		}
		auto& cost = report.adaptive;
		const auto t0 = std::chrono::steady_clock::now();
		for (std::size_t i = 0; i < stream.size(); ++i) {
			const auto& g = stream.groups[i];
			const auto vec = summarize_interval(g.key, g.events);
			const auto action = publisher.process_interval(g, vec);
			report.receipt_bytes += emit(action, sink).bytes;
			++cost.intervals;
			cost.events += g.events.size();
			if (action.mode == PublishMode::LatentPlusForensics) {
				++cost.unstable_intervals;
			}
		}
		cost.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		cost.bytes = sink.bytes_written();
	}
	finalize_ratios(report);
	return report;
}

inline nlohmann::ordered_json cost_report_json(const CostReport& r) {
	auto mode = [](const ModeCost& m) {
		return nlohmann::ordered_json{{"intervals", m.intervals},
		                              {"events", m.events},
		                              {"bytes", m.bytes},
		                              {"wall_seconds", m.wall_seconds},
		                              {"unstable_intervals", m.unstable_intervals}};
	};
	nlohmann::ordered_json j;
	j["standard"] = mode(r.standard);
	j["adaptive"] = mode(r.adaptive);
	j["bytes_ratio"] = r.bytes_ratio ? nlohmann::ordered_json(*r.bytes_ratio) : nlohmann::ordered_json(nullptr);
	j["time_ratio"] = r.time_ratio ? nlohmann::ordered_json(*r.time_ratio) : nlohmann::ordered_json(nullptr);
	return j;
}

} // namespace vaefp
