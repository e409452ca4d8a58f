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
#include <span>

#include "error.hpp"
#include "vae.hpp"

namespace vaefp {

struct AdamConfig {
	double learning_rate = 1e-4;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;
};

// One bias-corrected Adam update at step t (t >= 1), elementwise.
inline void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> m,
                      std::span<double> v, const AdamConfig& cfg, std::int64_t t) {
	if (t < 1) {
		throw InvalidConfig("adam step counter must start at 1");
	}
	if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
		throw DimensionMismatch(params.size(), grads.size());
	}
	const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
	const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
	for (std::size_t i = 0; i < params.size(); ++i) {
		const double g = grads[i];
		m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
		v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
		const double m_hat = m[i] / correction1;
		const double v_hat = v[i] / correction2;
		params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
	}
}

struct AdamState {
	VaeParams m;
	VaeParams v;
	std::int64_t t = 0;

	explicit AdamState(const VaeArchitecture& arch) : m(VaeParams::zeros(arch)), v(VaeParams::zeros(arch)) {}
};

inline void adam_step(VaeParams& params, const VaeParams& grads, AdamState& state, const AdamConfig& cfg) {
	++state.t;
	std::vector<std::vector<double>*> p;
	std::vector<const std::vector<double>*> g;
	std::vector<std::vector<double>*> m;
	std::vector<std::vector<double>*> v;
	params.for_each_tensor([&](std::vector<double>& t) { p.push_back(&t); });
	grads.for_each_tensor([&](const std::vector<double>& t) { g.push_back(&t); });
	state.m.for_each_tensor([&](std::vector<double>& t) { m.push_back(&t); });
	state.v.for_each_tensor([&](std::vector<double>& t) { v.push_back(&t); });
	for (std::size_t i = 0; i < p.size(); ++i) {
		adam_step(*p[i], *g[i], *m[i], *v[i], cfg, state.t);
	}
}

} // namespace vaefp
