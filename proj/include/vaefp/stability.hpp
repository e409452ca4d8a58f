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
#include <variant>

#include "error.hpp"
#include "training.hpp"
#include "vae.hpp"

namespace vaefp {

// Fixed threshold chosen from observed errors during an unstable period.
struct HeuristicThreshold {
	double r_th = 1.0;
	bool operator==(const HeuristicThreshold&) const = default;
};

// r_th = r_mean + k * r_sd over the last training epoch.
struct KSigmaThreshold {
	double k = 3.0;
	double r_mean = 0.0;
	double r_sd = 0.0;
	double r_th = 0.0;
	bool operator==(const KSigmaThreshold&) const = default;
};

using ThresholdPolicy = std::variant<HeuristicThreshold, KSigmaThreshold>;

inline double threshold_of(const ThresholdPolicy& p) {
	return std::visit([](const auto& v) { return v.r_th; }, p);
}

inline HeuristicThreshold make_heuristic_threshold(double r_th) {
	if (!(r_th > 0.0) || !std::isfinite(r_th)) {
		throw InvalidConfig("heuristic r_th must be a positive finite value");
	}
	return {r_th};
}

inline KSigmaThreshold fit_threshold_ksigma(double r_mean, double r_sd, double k) {
	if (!(k > 0.0) || !std::isfinite(k)) {
		throw InvalidK(k);
	}
	return {k, r_mean, r_sd, r_mean + k * r_sd};
}

inline KSigmaThreshold fit_threshold_ksigma(const TrainingCurve& curve, double k) {
	return fit_threshold_ksigma(curve.r_mean, curve.r_sd, k);
}

struct StabilityVerdict {
	IntervalKey key;
	double recon_error = 0.0;
	double r_th = 0.0;
	bool stable = true;
	LatentModel latent;

	bool operator==(const StabilityVerdict&) const = default;
};

// Drift iff recon_error > r_th. A NaN error counts as drift.
inline StabilityVerdict assess(const LatentModel& latent, const ThresholdPolicy& policy) {
	StabilityVerdict v;
	v.key = latent.key;
	v.recon_error = latent.recon_error;
	v.r_th = threshold_of(policy);
	v.stable = !std::isnan(latent.recon_error) && latent.recon_error <= v.r_th;
	v.latent = latent;
	return v;
}

} // namespace vaefp
