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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "trace.hpp"

namespace vaefp {

// Untracked syscalls the simulator emits alongside tracked ones.
inline constexpr std::array<std::string_view, 10> kNoiseSyscalls = {
    "read", "write", "mmap", "fstat", "sendfile", "recvfrom", "sendto", "wait4", "gettimeofday", "futex"};

struct PhaseWindow {
	double start_s = 0.0;
	double end_s = 0.0;
	std::string label;
};

struct ScenarioConfig {
	std::uint64_t seed = 1;
	double duration = 600.0;
	std::string container_id = "nginx-1";
	double base_request_rate = 1.0; // index-page fetches per second
	std::vector<PhaseWindow> phase_schedule;
	double flood_factor = 100.0;
	double flood_on_s = 60.0;
	double flood_off_s = 240.0;
};

struct PhaseMarker {
	double t = 0.0;
	std::string label;
	bool operator==(const PhaseMarker&) const = default;
};

struct GeneratedTrace {
	std::vector<ForensicEvent> events;
	std::vector<PhaseMarker> markers; // phase starts, in order
};

namespace sim {

enum class PidRole { Script, Worker, Child };

// One line of a cluster template: emit `lo..hi` events of `syscall`.
struct Step {
	std::string_view syscall;
	int lo;
	int hi;
	PidRole role;
	std::int64_t ret = 0;
	std::int64_t bytes_lo = 0;
	std::int64_t bytes_hi = 0;
};

// A syscall burst fired `rate` times per second during a phase.
struct Mixture {
	std::string_view label;
	double rate;
	std::span<const Step> steps;
};

inline constexpr std::int64_t kScriptPid = 100;
inline constexpr std::int64_t kWorkerPid = 7;

// One index-page fetch: the shell loop forks curl, curl loads its
// libraries and connects, the nginx worker accepts and serves the file.
inline constexpr std::array<Step, 22> kBaselineRequest = {{
    {"clone", 1, 1, PidRole::Script},
    {"execve", 1, 1, PidRole::Child},
    {"arch_prctl", 1, 1, PidRole::Child},
    {"mmap", 10, 16, PidRole::Child},
    {"openat", 14, 20, PidRole::Child, 3},
    {"openat", 0, 3, PidRole::Child, -2},
    {"read", 6, 10, PidRole::Child, 0, 512, 832},
    {"fstat", 4, 8, PidRole::Child},
    {"close", 14, 20, PidRole::Child},
    {"ioctl", 0, 1, PidRole::Child},
    {"socket", 1, 1, PidRole::Child, 5},
    {"connect", 1, 1, PidRole::Child},
    {"accept4", 1, 1, PidRole::Worker, 9},
    {"recvfrom", 1, 1, PidRole::Worker, 0, 70, 90},
    {"openat", 1, 1, PidRole::Worker, 10},
    {"fstat", 1, 1, PidRole::Worker},
    {"sendfile", 1, 1, PidRole::Worker, 0, 612, 615},
    {"close", 2, 2, PidRole::Worker},
    {"gettimeofday", 1, 2, PidRole::Worker},
    {"write", 1, 1, PidRole::Child, 0, 600, 700},
    {"exit", 1, 1, PidRole::Child},
    {"wait4", 1, 1, PidRole::Script},
}};

// Reverse shell: socket back to the attacker, fd plumbing, tty setup.
inline constexpr std::array<Step, 12> kShellConnect = {{
    {"socket", 1, 1, PidRole::Child, 3},
    {"connect", 1, 1, PidRole::Child},
    {"clone", 1, 1, PidRole::Child},
    {"execve", 1, 2, PidRole::Child},
    {"dup2", 3, 3, PidRole::Child},
    {"ioctl", 8, 16, PidRole::Child},
    {"setsid", 1, 1, PidRole::Child},
    {"setpgid", 1, 2, PidRole::Child},
    {"openat", 3, 6, PidRole::Child, 3},
    {"close", 3, 6, PidRole::Child},
    {"read", 2, 6, PidRole::Child, 0, 1, 64},
    {"write", 2, 6, PidRole::Child, 0, 1, 128},
}};

// Interactive commands: each one forks and execs a binary.
inline constexpr std::array<Step, 11> kShellCommands = {{
    {"clone", 1, 1, PidRole::Script},
    {"execve", 1, 1, PidRole::Child},
    {"arch_prctl", 1, 1, PidRole::Child},
    {"mmap", 8, 14, PidRole::Child},
    {"openat", 20, 40, PidRole::Child, 3},
    {"openat", 2, 6, PidRole::Child, -2},
    {"close", 20, 40, PidRole::Child},
    {"ioctl", 1, 3, PidRole::Child},
    {"fstat", 4, 8, PidRole::Child},
    {"write", 1, 4, PidRole::Child, 0, 40, 400},
    {"exit", 1, 1, PidRole::Child},
}};

// Fetching the miner sources: many connections and large transfers to disk.
inline constexpr std::array<Step, 10> kPackageDownload = {{
    {"clone", 1, 1, PidRole::Script},
    {"execve", 1, 1, PidRole::Child},
    {"socket", 2, 4, PidRole::Child, 3},
    {"connect", 2, 4, PidRole::Child},
    {"recvfrom", 20, 40, PidRole::Child, 0, 16384, 65536},
    {"openat", 8, 16, PidRole::Child, 4},
    {"creat", 4, 8, PidRole::Child, 4},
    {"write", 20, 40, PidRole::Child, 0, 16384, 65536},
    {"close", 12, 24, PidRole::Child},
    {"exit", 1, 1, PidRole::Child},
}};

// One compiler driver invocation: cc1, as and ld children, headers
// opened by the hundred, temporaries created and unlinked.
inline constexpr std::array<Step, 14> kCompile = {{
    {"clone", 3, 3, PidRole::Script},
    {"execve", 3, 3, PidRole::Child},
    {"arch_prctl", 3, 3, PidRole::Child},
    {"mmap", 30, 60, PidRole::Child},
    {"openat", 80, 160, PidRole::Child, 3},
    {"openat", 20, 60, PidRole::Child, -2},
    {"read", 60, 120, PidRole::Child, 0, 4096, 65536},
    {"creat", 3, 6, PidRole::Child, 4},
    {"write", 40, 80, PidRole::Child, 0, 4096, 65536},
    {"close", 80, 160, PidRole::Child},
    {"unlink", 3, 6, PidRole::Child},
    {"rename", 1, 2, PidRole::Child},
    {"chmod", 0, 1, PidRole::Child},
    {"exit", 3, 3, PidRole::Child},
}};

// Miner worker threads: clone storm plus constant futex traffic.
inline constexpr std::array<Step, 5> kMinerExecution = {{
    {"clone", 1, 2, PidRole::Child},
    {"futex", 10, 20, PidRole::Child},
    {"socket", 0, 1, PidRole::Child, 3},
    {"connect", 0, 1, PidRole::Child},
    {"sendto", 1, 2, PidRole::Child, 0, 64, 256},
}};

// One flooded request proxied upstream by the nginx worker.
inline constexpr std::array<Step, 7> kFloodRequest = {{
    {"accept4", 1, 1, PidRole::Worker, 9},
    {"recvfrom", 1, 1, PidRole::Worker, 0, 70, 120},
    {"socket", 1, 1, PidRole::Worker, 11},
    {"connect", 1, 1, PidRole::Worker},
    {"sendto", 1, 1, PidRole::Worker, 0, 70, 120},
    {"close", 2, 2, PidRole::Worker},
    {"gettimeofday", 1, 1, PidRole::Worker},
}};

inline constexpr std::array<std::string_view, 6> kCpuminerPhases = {
    "normal", "shell_connect", "shell_commands", "package_download", "compile", "miner_execution"};

inline const std::array<Mixture, 5>& cpuminer_mixtures() {
	static const std::array<Mixture, 5> mixtures = {{
	    {"shell_connect", 0.6, kShellConnect},
	    {"shell_commands", 3.0, kShellCommands},
	    {"package_download", 1.0, kPackageDownload},
	    {"compile", 12.0, kCompile},
	    {"miner_execution", 60.0, kMinerExecution},
	}};
	return mixtures;
}

class ClusterEmitter {
public:
	ClusterEmitter(Rng& rng, std::string container, double duration, std::int64_t first_child_pid)
	    : m_rng(rng), m_container(std::move(container)), m_duration(duration), m_next_child(first_child_pid) {}

	void emit(double t, std::span<const Step> steps, std::vector<ForensicEvent>& out) {
		const std::int64_t child = m_next_child++;
		for (const auto& step : steps) {
			const auto n = m_rng.uniform_int(step.lo, step.hi);
			for (std::int64_t i = 0; i < n; ++i) {
				t += m_rng.uniform(0.00005, 0.0003);
				ForensicEvent e;
				e.timestamp = t;
				e.container_id = m_container;
				e.syscall = std::string(step.syscall);
				e.pid = step.role == PidRole::Script ? kScriptPid
				        : step.role == PidRole::Worker ? kWorkerPid
				                                       : child;
				e.result = step.syscall == "clone" ? child : step.ret;
				e.arg_bytes = step.bytes_hi > 0 ? m_rng.uniform_int(step.bytes_lo, step.bytes_hi) : 0;
				if (t < m_duration) {
					out.push_back(std::move(e));
				}
			}
		}
	}

private:
	Rng& m_rng;
	std::string m_container;
	double m_duration;
	std::int64_t m_next_child;
};

inline void validate_common(const ScenarioConfig& config) {
	if (!std::isfinite(config.duration) || config.duration < 0.0) {
		throw InvalidConfig("duration must be >= 0");
	}
	if (!(config.base_request_rate > 0.0) || !std::isfinite(config.base_request_rate)) {
		throw InvalidConfig("base_request_rate must be > 0");
	}
	if (config.container_id.empty()) {
		throw InvalidConfig("container_id must be non-empty");
	}
}

inline void validate_phases(const ScenarioConfig& config) {
	double prev_end = 0.0;
	for (const auto& p : config.phase_schedule) {
		if (!(p.start_s < p.end_s) || p.start_s < prev_end || p.end_s > config.duration) {
			throw InvalidConfig("phase '" + p.label + "' overlaps or lies outside [0, duration]");
		}
		prev_end = p.end_s;
	}
}

inline void sort_events(std::vector<ForensicEvent>& events) {
	std::stable_sort(events.begin(), events.end(),
	                 [](const ForensicEvent& a, const ForensicEvent& b) { return a.timestamp < b.timestamp; });
}

} // namespace sim

// Nginx fetch loop: one request every 1/rate seconds from a random phase.
// Per-request syscall counts carry the jitter.
inline std::vector<ForensicEvent> gen_baseline(const ScenarioConfig& config) {
	sim::validate_common(config);
	std::vector<ForensicEvent> events;
	if (config.duration == 0.0) {
		return events;
	}
	Rng rng(derive_seed(config.seed, 0));
	sim::ClusterEmitter emitter(rng, config.container_id, config.duration, 1000);
	const double period = 1.0 / config.base_request_rate;
	double t = rng.uniform(0.0, 0.05) * period;
	while (t < config.duration) {
		emitter.emit(t, sim::kBaselineRequest, events);
		t += period;
	}
	sim::sort_events(events);
	return events;
}

inline std::vector<PhaseWindow> default_cpuminer_schedule() {
	return {
	    {0, 300, "normal"},          {300, 390, "shell_connect"}, {390, 510, "shell_commands"},
	    {510, 600, "package_download"}, {600, 780, "compile"},       {780, 900, "miner_execution"},
	};
}

inline GeneratedTrace gen_cpuminer_scenario(const ScenarioConfig& config) {
	sim::validate_common(config);
	const auto& schedule = config.phase_schedule;
	if (schedule.size() != sim::kCpuminerPhases.size()) {
		throw InvalidConfig("cpuminer schedule needs exactly six phases");
	}
	for (std::size_t i = 0; i < schedule.size(); ++i) {
		if (schedule[i].label != sim::kCpuminerPhases[i]) {
			throw InvalidConfig("cpuminer phase " + std::to_string(i) + " must be '" +
			                    std::string(sim::kCpuminerPhases[i]) + "', got '" + schedule[i].label + "'");
		}
	}
	sim::validate_phases(config);

	GeneratedTrace out;
	out.events = gen_baseline(config);
	Rng rng(derive_seed(config.seed, 1));
	sim::ClusterEmitter emitter(rng, config.container_id, config.duration, 20000);
	for (const auto& phase : schedule) {
		out.markers.push_back({phase.start_s, phase.label});
		if (phase.label == "normal") {
			continue;
		}
		const auto& mixes = sim::cpuminer_mixtures();
		const auto mix = std::find_if(mixes.begin(), mixes.end(),
		                              [&](const sim::Mixture& m) { return m.label == phase.label; });
		const double period = 1.0 / mix->rate;
		double t = phase.start_s + rng.uniform(0.0, 0.5) * period;
		while (t < phase.end_s) {
			emitter.emit(t, mix->steps, out.events);
			t += period * rng.uniform(0.5, 1.5);
		}
	}
	sim::sort_events(out.events);
	return out;
}

// Attack windows for a cyclic flood: `off` seconds quiet, then `on` seconds of flood.
inline std::vector<PhaseWindow> flood_windows(const ScenarioConfig& config) {
	std::vector<PhaseWindow> windows;
	const double cycle = config.flood_on_s + config.flood_off_s;
	for (double c = 0.0; c + cycle <= config.duration + 1e-9; c += cycle) {
		windows.push_back({c + config.flood_off_s, c + cycle, "flood"});
	}
	return windows;
}

inline GeneratedTrace gen_httpflood_scenario(const ScenarioConfig& config) {
	sim::validate_common(config);
	if (!(config.flood_on_s > 0.0) || !(config.flood_off_s >= 0.0) || !(config.flood_factor > 0.0)) {
		throw InvalidConfig("flood cycle parameters must be positive");
	}
	const double cycle = config.flood_on_s + config.flood_off_s;
	if (config.duration < cycle) {
		throw InvalidConfig("httpflood needs at least one full cycle (" + std::to_string(cycle) + " s)");
	}

	GeneratedTrace out;
	out.events = gen_baseline(config);
	Rng rng(derive_seed(config.seed, 2));
	sim::ClusterEmitter emitter(rng, config.container_id, config.duration, 20000);
	const double flood_rate = config.base_request_rate * config.flood_factor;
	for (const auto& w : flood_windows(config)) {
		out.markers.push_back({w.start_s, "flood"});
		const auto n = static_cast<std::int64_t>(std::llround((w.end_s - w.start_s) * flood_rate));
		const double spacing = (w.end_s - w.start_s) / static_cast<double>(n);
		for (std::int64_t j = 0; j < n; ++j) {
			const double t = w.start_s + (static_cast<double>(j) + rng.uniform(0.0, 0.5)) * spacing;
			emitter.emit(t, sim::kFloodRequest, out.events);
		}
		if (w.end_s < config.duration) {
			out.markers.push_back({w.end_s, "quiet"});
		}
	}
	sim::sort_events(out.events);
	return out;
}

} // namespace vaefp
