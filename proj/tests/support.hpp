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

// Shared fixtures and independent reference implementations for the tests.
// The reference implementations do not call the code they check.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <vaefp/vaefp.hpp>

namespace vaefp::testing {

// Fixed seeds used across the suite.
inline constexpr std::uint64_t kTrainTraceSeed = 1;
inline constexpr std::uint64_t kCpuminerSeed = 2;
inline constexpr std::uint64_t kFloodSeed = 3;
inline constexpr std::uint64_t kStableTraceSeed = 4;
inline constexpr std::size_t kTrainIntervals = 120;

inline std::vector<ForensicEvent> baseline_events(std::uint64_t seed, std::size_t intervals,
                                                  const std::string& container = "nginx-1") {
	ScenarioConfig cfg;
	cfg.seed = seed;
	cfg.duration = static_cast<double>(intervals) * kDefaultIntervalSeconds;
	cfg.container_id = container;
	return gen_baseline(cfg);
}

// Trained once per process; training takes about a second.
inline const ModelBundle& baseline_bundle() {
	static const ModelBundle bundle = [] {
		const auto stream = build_interval_stream(baseline_events(kTrainTraceSeed, kTrainIntervals));
		return train_bundle("nginx-1", stream.vectors, TrainConfig{}, PolicySpec{});
	}();
	return bundle;
}

// Bulk NDJSON reader written against the wire contract: alternating action
// and source lines, every line newline terminated.
struct ParsedBulkDoc {
	std::string index;
	nlohmann::json source;
};

inline std::vector<ParsedBulkDoc> parse_bulk_reference(const std::string& body) {
	std::vector<std::string> lines;
	std::size_t pos = 0;
	while (pos < body.size()) {
		const auto nl = body.find('\n', pos);
		if (nl == std::string::npos) {
			throw std::runtime_error("bulk body not newline terminated");
		}
		lines.push_back(body.substr(pos, nl - pos));
		pos = nl + 1;
	}
	if (lines.size() % 2 != 0) {
		throw std::runtime_error("odd number of bulk lines");
	}
	std::vector<ParsedBulkDoc> docs;
	for (std::size_t i = 0; i < lines.size(); i += 2) {
		const auto action = nlohmann::json::parse(lines[i]);
		if (action.size() != 1 || !action.contains("index")) {
			throw std::runtime_error("action line is not an index action");
		}
		docs.push_back({action["index"]["_index"].get<std::string>(), nlohmann::json::parse(lines[i + 1])});
	}
	return docs;
}

// KL(N(mu, exp(lv)) || N(0, 1)) evaluated term by term from sigma^2.
inline double kl_reference(const std::vector<double>& mu, const std::vector<double>& lv) {
	long double sum = 0.0L;
	for (std::size_t i = 0; i < mu.size(); ++i) {
		const long double var = std::exp(static_cast<long double>(lv[i]));
		sum += static_cast<long double>(mu[i]) * mu[i] + var - std::log(var) - 1.0L;
	}
	return static_cast<double>(0.5L * sum);
}

// Central difference of the ELBO with respect to every parameter, in
// for_each_tensor order.
inline std::vector<double> numeric_gradient(const VaeModel& model, const std::vector<double>& x,
                                            const std::vector<double>& eps, double kl_weight, double h) {
	std::vector<double> out;
	VaeModel probe = model;
	std::vector<std::vector<double>*> tensors;
	probe.params.for_each_tensor([&](std::vector<double>& t) { tensors.push_back(&t); });
	for (auto* t : tensors) {
		for (auto& p : *t) {
			const double saved = p;
			p = saved + h;
			const double up = elbo_loss_with_noise(probe, x, eps, kl_weight).loss;
			p = saved - h;
			const double down = elbo_loss_with_noise(probe, x, eps, kl_weight).loss;
			p = saved;
			out.push_back((up - down) / (2.0 * h));
		}
	}
	return out;
}

inline std::vector<double> flatten(const VaeParams& p) {
	std::vector<double> out;
	p.for_each_tensor([&](const std::vector<double>& t) { out.insert(out.end(), t.begin(), t.end()); });
	return out;
}

// |a - n| / max(|a|, |n|, floor)
inline double grad_rel_error(double analytic, double numeric, double floor = 1e-6) {
	return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline std::string slurp(const std::filesystem::path& p) {
	std::ifstream in(p, std::ios::binary);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

class TempDir {
public:
	explicit TempDir(const std::string& tag) {
		static std::mt19937_64 gen(std::random_device{}());
		m_path = std::filesystem::temp_directory_path() / ("vaefp-" + tag + "-" + std::to_string(gen()));
		std::filesystem::create_directories(m_path);
	}
	~TempDir() {
		std::error_code ec;
		std::filesystem::remove_all(m_path, ec);
	}
	TempDir(const TempDir&) = delete;
	TempDir& operator=(const TempDir&) = delete;

	const std::filesystem::path& path() const { return m_path; }
	std::filesystem::path operator/(const std::string& name) const { return m_path / name; }

private:
	std::filesystem::path m_path;
};

// Runs a shell command, returning its exit status and captured stdout.
struct CommandResult {
	int status = -1;
	std::string out;
};

inline CommandResult run_command(const std::string& cmd) {
	CommandResult r;
	FILE* pipe = ::popen((cmd + " 2>/dev/null").c_str(), "r");
	if (pipe == nullptr) {
		return r;
	}
	char buf[4096];
	std::size_t n;
	while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
		r.out.append(buf, n);
	}
	const int st = ::pclose(pipe);
	r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
	return r;
}

} // namespace vaefp::testing
