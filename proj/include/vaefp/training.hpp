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
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "error.hpp"
#include "normalization.hpp"
#include "optimizer.hpp"
#include "rng.hpp"
#include "vae.hpp"

namespace vaefp {

struct TrainConfig {
	double learning_rate = 1e-4;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;
	std::int64_t epochs = 100;
	std::size_t batch_size = 8;
	std::uint64_t seed = 42;
	std::size_t accumulation_target = 120; // summarizer messages before first training
	double kl_weight = 1.0;
	std::vector<std::size_t> hidden = {16, 16, 16};
	std::size_t latent_dim = 10;

	AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }

	void validate() const {
		if (!(learning_rate > 0.0) || !(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0) ||
		    !(epsilon > 0.0)) {
			throw InvalidConfig("optimizer parameters out of range");
		}
		if (epochs < 1 || batch_size < 1 || accumulation_target < 1) {
			throw InvalidConfig("epochs, batch_size and accumulation_target must be >= 1");
		}
		if (!(kl_weight >= 0.0)) {
			throw InvalidConfig("kl_weight must be >= 0");
		}
	}
};

struct TrainingCurve {
	std::vector<double> recon; // per-epoch mean reconstruction error
	std::vector<double> kl;    // per-epoch mean KL
	double r_last = 0.0;
	double r_mean = 0.0;
	double r_sd = 0.0;

	bool operator==(const TrainingCurve&) const = default;
};

struct TrainResult {
	VaeModel model;
	TrainingCurve curve;
};

// Mini-batch training on normalized rows. Weight init, shuffles and noise
// draws all come from streams derived from config.seed.
inline TrainResult train(std::span<const std::vector<double>> dataset, const TrainConfig& config) {
	config.validate();
	if (dataset.size() < config.accumulation_target) {
		throw InsufficientData(dataset.size(), config.accumulation_target);
	}
	VaeArchitecture arch;
	arch.input_dim = dataset.front().size();
	arch.hidden = config.hidden;
	arch.latent_dim = config.latent_dim;
	for (const auto& row : dataset) {
		if (row.size() != arch.input_dim) {
			throw DimensionMismatch(arch.input_dim, row.size());
		}
		detail::require_finite(row, "train");
	}

	TrainResult result{VaeModel::initialized(arch, derive_seed(config.seed, 10)), {}};
	auto& model = result.model;
	auto& curve = result.curve;
	model.meta.seed = config.seed;

	Rng shuffle_rng(derive_seed(config.seed, 11));
	Rng noise_rng(derive_seed(config.seed, 12));
	AdamState state(arch);
	const auto adam = config.adam();
	auto grads = VaeParams::zeros(arch);

	std::vector<std::size_t> order(dataset.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::vector<double> sample_recon(dataset.size());
	std::vector<double> eps(arch.latent_dim);

	for (std::int64_t epoch = 0; epoch < config.epochs; ++epoch) {
		shuffle_rng.shuffle(order);
		double recon_sum = 0.0;
		double kl_sum = 0.0;
		for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
			const std::size_t end = std::min(order.size(), start + config.batch_size);
			const double scale = 1.0 / static_cast<double>(end - start);
			grads.fill(0.0);
			for (std::size_t b = start; b < end; ++b) {
				const auto idx = order[b];
				for (auto& e : eps) {
					e = noise_rng.normal();
				}
				const auto f = forward_with_noise(model, dataset[idx], eps, config.kl_weight);
				accumulate_gradients(model, dataset[idx], f, grads, config.kl_weight, scale);
				sample_recon[idx] = f.terms.recon;
				recon_sum += f.terms.recon;
				kl_sum += f.terms.kl;
			}
			adam_step(model.params, grads, state, adam);
		}
		const double n = static_cast<double>(dataset.size());
		curve.recon.push_back(recon_sum / n);
		curve.kl.push_back(kl_sum / n);
	}

	// Threshold statistics come from the per-sample errors of the final epoch.
	const double n = static_cast<double>(sample_recon.size());
	curve.r_mean = std::accumulate(sample_recon.begin(), sample_recon.end(), 0.0) / n;
	double ss = 0.0;
	for (double r : sample_recon) {
		ss += (r - curve.r_mean) * (r - curve.r_mean);
	}
	curve.r_sd = std::sqrt(ss / n);
	curve.r_last = curve.recon.back();

	model.meta.epochs = config.epochs;
	model.meta.final_recon = curve.recon.back();
	model.meta.final_kl = curve.kl.back();
	return result;
}

inline TrainResult train(std::span<const ActivityVector> dataset, const MinMaxScaler& scaler,
                         const TrainConfig& config) {
	std::vector<std::vector<double>> rows;
	rows.reserve(dataset.size());
	for (const auto& v : dataset) {
		rows.push_back(transform(scaler, v));
	}
	return train(std::span<const std::vector<double>>(rows), config);
}

// Deterministic evaluation: decode at z = mu, no sampling.
inline LatentModel score(const VaeModel& model, const MinMaxScaler& scaler, const ActivityVector& x_in) {
	if (x_in.schema_version != scaler.schema_version) {
		throw SchemaMismatch("vector schema v" + std::to_string(x_in.schema_version) + " vs scaler v" +
		                     std::to_string(scaler.schema_version));
	}
	if (x_in.features.size() != model.arch.input_dim || scaler.dimension() != model.arch.input_dim) {
		throw SchemaMismatch("vector has " + std::to_string(x_in.features.size()) + " features, model expects " +
		                     std::to_string(model.arch.input_dim));
	}
	const auto x = transform(scaler, x_in);
	auto enc = encode(model, x);
	const auto recon = decode(model, enc.mu);
	LatentModel out;
	out.key = x_in.key;
	out.mu = std::move(enc.mu);
	out.logvar = std::move(enc.logvar);
	out.recon_error = reconstruction_error(x, recon);
	if (!std::isfinite(out.recon_error)) {
		out.recon_error = std::numeric_limits<double>::max();
	}
	return out;
}

} // namespace vaefp
