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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "normalization.hpp"
#include "rng.hpp"
#include "summarizer.hpp"

namespace vaefp {

enum class Activation { Tanh };

inline const char* activation_name(Activation) { return "tanh"; }

struct VaeArchitecture {
	std::size_t input_dim = 0;
	std::vector<std::size_t> hidden = {16, 16, 16};
	std::size_t latent_dim = 10;
	Activation activation = Activation::Tanh;

	void validate() const {
		if (input_dim == 0) {
			throw InvalidConfig("input_dim must be >= 1");
		}
		if (latent_dim == 0) {
			throw InvalidConfig("latent_dim must be >= 1");
		}
		if (hidden.empty() || std::find(hidden.begin(), hidden.end(), 0u) != hidden.end()) {
			throw InvalidConfig("hidden layers must be non-empty and positive");
		}
	}

	bool operator==(const VaeArchitecture&) const = default;
};

// Fully connected layer, y = W x + b, W row-major (out x in).
struct Dense {
	std::size_t in = 0;
	std::size_t out = 0;
	std::vector<double> weight;
	std::vector<double> bias;

	Dense() = default;
	Dense(std::size_t in_dim, std::size_t out_dim) : in(in_dim), out(out_dim), weight(in_dim * out_dim), bias(out_dim) {}

	void forward(std::span<const double> x, std::span<double> y) const {
		for (std::size_t r = 0; r < out; ++r) {
			const double* row = weight.data() + r * in;
			double acc = bias[r];
			for (std::size_t c = 0; c < in; ++c) {
				acc += row[c] * x[c];
			}
			y[r] = acc;
		}
	}

	std::vector<double> forward(std::span<const double> x) const {
		std::vector<double> y(out);
		forward(x, y);
		return y;
	}

	bool operator==(const Dense&) const = default;
};

// Every trainable tensor of the VAE. Also reused as the shape of gradients
// and of the optimizer moments.
struct VaeParams {
	std::vector<Dense> encoder;
	Dense mu_head;
	Dense logvar_head;
	std::vector<Dense> decoder;
	Dense output;

	static VaeParams zeros(const VaeArchitecture& arch) {
		VaeParams p;
		std::size_t prev = arch.input_dim;
		for (auto h : arch.hidden) {
			p.encoder.emplace_back(prev, h);
			prev = h;
		}
		p.mu_head = Dense(prev, arch.latent_dim);
		p.logvar_head = Dense(prev, arch.latent_dim);
		prev = arch.latent_dim;
		for (auto h : arch.hidden) {
			p.decoder.emplace_back(prev, h);
			prev = h;
		}
		p.output = Dense(prev, arch.input_dim);
		return p;
	}

	// Visits tensors in a fixed order: per layer weight then bias; encoder,
	// mu head, logvar head, decoder, output.
	template <typename Self, typename F>
	static void visit(Self& self, F&& f) {
		auto layer = [&](auto& d) {
			f(d.weight);
			f(d.bias);
		};
		for (auto& d : self.encoder) {
			layer(d);
		}
		layer(self.mu_head);
		layer(self.logvar_head);
		for (auto& d : self.decoder) {
			layer(d);
		}
		layer(self.output);
	}

	template <typename F>
	void for_each_tensor(F&& f) {
		visit(*this, std::forward<F>(f));
	}
	template <typename F>
	void for_each_tensor(F&& f) const {
		visit(*this, std::forward<F>(f));
	}

	std::size_t parameter_count() const {
		std::size_t n = 0;
		for_each_tensor([&](const std::vector<double>& t) { n += t.size(); });
		return n;
	}

	void fill(double value) {
		for_each_tensor([&](std::vector<double>& t) { std::fill(t.begin(), t.end(), value); });
	}

	bool operator==(const VaeParams&) const = default;
};

struct TrainingMeta {
	std::int64_t epochs = 0;
	double final_recon = 0.0;
	double final_kl = 0.0;
	std::uint64_t seed = 0;

	bool operator==(const TrainingMeta&) const = default;
};

struct VaeModel {
	VaeArchitecture arch;
	VaeParams params;
	TrainingMeta meta;

	static VaeModel zeros(const VaeArchitecture& arch) {
		arch.validate();
		return {arch, VaeParams::zeros(arch), {}};
	}

	// Uniform in +-1/sqrt(fan_in) for weights, zero biases; drawn in tensor order.
	static VaeModel initialized(const VaeArchitecture& arch, std::uint64_t seed) {
		auto m = zeros(arch);
		Rng rng(seed);
		auto init_layer = [&](Dense& d) {
			const double bound = 1.0 / std::sqrt(static_cast<double>(d.in));
			for (auto& w : d.weight) {
				w = rng.uniform(-bound, bound);
			}
		};
		for (auto& d : m.params.encoder) {
			init_layer(d);
		}
		init_layer(m.params.mu_head);
		init_layer(m.params.logvar_head);
		for (auto& d : m.params.decoder) {
			init_layer(d);
		}
		init_layer(m.params.output);
		m.meta.seed = seed;
		return m;
	}

	bool all_finite() const {
		bool ok = true;
		params.for_each_tensor([&](const std::vector<double>& t) {
			ok = ok && std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); });
		});
		return ok;
	}

	bool operator==(const VaeModel&) const = default;
};

struct LatentModel {
	IntervalKey key;
	std::vector<double> mu;
	std::vector<double> logvar;
	double recon_error = 0.0;

	bool operator==(const LatentModel&) const = default;
};

struct EncoderOutput {
	std::vector<double> mu;
	std::vector<double> logvar;
};

namespace detail {

inline void activate(std::vector<double>& v) {
	for (auto& x : v) {
		x = std::tanh(x);
	}
}

// Runs hidden layers, storing every post-activation (index 0 is the input).
inline void run_hidden(const std::vector<Dense>& layers, std::span<const double> x,
                       std::vector<std::vector<double>>& acts) {
	acts.assign(1, std::vector<double>(x.begin(), x.end()));
	for (const auto& d : layers) {
		auto h = d.forward(acts.back());
		activate(h);
		acts.push_back(std::move(h));
	}
}

// Backprop through tanh hidden layers. `grad_out` is dL/d(last activation);
// returns dL/d(input).
inline std::vector<double> back_hidden(const std::vector<Dense>& layers, std::vector<Dense>& grads,
                                       const std::vector<std::vector<double>>& acts, std::vector<double> grad_out) {
	for (std::size_t l = layers.size(); l-- > 0;) {
		const auto& d = layers[l];
		auto& g = grads[l];
		const auto& h = acts[l + 1];
		const auto& input = acts[l];
		std::vector<double> delta(d.out);
		for (std::size_t r = 0; r < d.out; ++r) {
			delta[r] = grad_out[r] * (1.0 - h[r] * h[r]);
		}
		std::vector<double> grad_in(d.in, 0.0);
		for (std::size_t r = 0; r < d.out; ++r) {
			const double* row = d.weight.data() + r * d.in;
			double* grow = g.weight.data() + r * d.in;
			for (std::size_t c = 0; c < d.in; ++c) {
				grow[c] += delta[r] * input[c];
				grad_in[c] += row[c] * delta[r];
			}
			g.bias[r] += delta[r];
		}
		grad_out = std::move(grad_in);
	}
	return grad_out;
}

// Accumulates linear-layer gradients; returns dL/d(input).
inline std::vector<double> back_linear(const Dense& d, Dense& g, std::span<const double> input,
                                       std::span<const double> delta) {
	std::vector<double> grad_in(d.in, 0.0);
	for (std::size_t r = 0; r < d.out; ++r) {
		const double* row = d.weight.data() + r * d.in;
		double* grow = g.weight.data() + r * d.in;
		for (std::size_t c = 0; c < d.in; ++c) {
			grow[c] += delta[r] * input[c];
			grad_in[c] += row[c] * delta[r];
		}
		g.bias[r] += delta[r];
	}
	return grad_in;
}

inline void require_finite(std::span<const double> v, const char* where) {
	for (double x : v) {
		if (!std::isfinite(x)) {
			throw NonFiniteInput(where);
		}
	}
}

} // namespace detail

inline EncoderOutput encode(const VaeModel& model, std::span<const double> x) {
	if (x.size() != model.arch.input_dim) {
		throw DimensionMismatch(model.arch.input_dim, x.size());
	}
	detail::require_finite(x, "encode");
	std::vector<std::vector<double>> acts;
	detail::run_hidden(model.params.encoder, x, acts);
	return {model.params.mu_head.forward(acts.back()), model.params.logvar_head.forward(acts.back())};
}

inline std::vector<double> decode(const VaeModel& model, std::span<const double> z) {
	if (z.size() != model.arch.latent_dim) {
		throw DimensionMismatch(model.arch.latent_dim, z.size());
	}
	std::vector<std::vector<double>> acts;
	detail::run_hidden(model.params.decoder, z, acts);
	return model.params.output.forward(acts.back());
}

// Reparameterized draw z = mu + exp(logvar / 2) * eps, eps ~ N(0, I).
inline std::vector<double> sample_latent(std::span<const double> mu, std::span<const double> logvar, Rng& rng) {
	if (mu.size() != logvar.size()) {
		throw DimensionMismatch(mu.size(), logvar.size());
	}
	std::vector<double> z(mu.size());
	for (std::size_t i = 0; i < mu.size(); ++i) {
		z[i] = mu[i] + std::exp(0.5 * logvar[i]) * rng.normal();
	}
	return z;
}

// KL(N(mu, diag(exp(logvar))) || N(0, I)).
inline double kl_divergence(std::span<const double> mu, std::span<const double> logvar) {
	if (mu.size() != logvar.size()) {
		throw DimensionMismatch(mu.size(), logvar.size());
	}
	detail::require_finite(mu, "kl_divergence");
	detail::require_finite(logvar, "kl_divergence");
	double sum = 0.0;
	for (std::size_t i = 0; i < mu.size(); ++i) {
		// expm1 keeps exp(lv) - lv - 1 accurate near lv = 0
		sum += mu[i] * mu[i] + std::expm1(logvar[i]) - logvar[i];
	}
	return std::max(0.0, 0.5 * sum);
}

// Mean squared error over features.
inline double reconstruction_error(std::span<const double> x, std::span<const double> recon) {
	if (x.size() != recon.size()) {
		throw DimensionMismatch(x.size(), recon.size());
	}
	if (x.empty()) {
		return 0.0;
	}
	double sum = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double d = recon[i] - x[i];
		sum += d * d;
	}
	return sum / static_cast<double>(x.size());
}

struct ElboTerms {
	double loss = 0.0;
	double recon = 0.0;
	double kl = 0.0;
};

// Forward pass with a recorded noise vector, keeping what backprop needs.
struct ForwardTrace {
	std::vector<std::vector<double>> enc_acts;
	std::vector<double> mu;
	std::vector<double> logvar;
	std::vector<double> eps;
	std::vector<double> sigma;
	std::vector<double> z;
	std::vector<std::vector<double>> dec_acts;
	std::vector<double> recon;
	ElboTerms terms;
};

inline ForwardTrace forward_with_noise(const VaeModel& model, std::span<const double> x, std::span<const double> eps,
                                       double kl_weight = 1.0) {
	if (x.size() != model.arch.input_dim) {
		throw DimensionMismatch(model.arch.input_dim, x.size());
	}
	if (eps.size() != model.arch.latent_dim) {
		throw DimensionMismatch(model.arch.latent_dim, eps.size());
	}
	ForwardTrace f;
	detail::run_hidden(model.params.encoder, x, f.enc_acts);
	f.mu = model.params.mu_head.forward(f.enc_acts.back());
	f.logvar = model.params.logvar_head.forward(f.enc_acts.back());
	f.eps.assign(eps.begin(), eps.end());
	f.sigma.resize(f.mu.size());
	f.z.resize(f.mu.size());
	for (std::size_t i = 0; i < f.mu.size(); ++i) {
		f.sigma[i] = std::exp(0.5 * f.logvar[i]);
		f.z[i] = f.mu[i] + f.sigma[i] * eps[i];
	}
	detail::run_hidden(model.params.decoder, f.z, f.dec_acts);
	f.recon = model.params.output.forward(f.dec_acts.back());
	f.terms.recon = reconstruction_error(x, f.recon);
	f.terms.kl = kl_divergence(f.mu, f.logvar);
	f.terms.loss = f.terms.recon + kl_weight * f.terms.kl;
	return f;
}

inline ElboTerms elbo_loss_with_noise(const VaeModel& model, std::span<const double> x, std::span<const double> eps,
                                      double kl_weight = 1.0) {
	return forward_with_noise(model, x, eps, kl_weight).terms;
}

// Negated ELBO for one sample: MSE reconstruction plus weighted KL.
inline ElboTerms elbo_loss(std::span<const double> x, const VaeModel& model, Rng& rng, double kl_weight = 1.0) {
	std::vector<double> eps(model.arch.latent_dim);
	for (auto& e : eps) {
		e = rng.normal();
	}
	return elbo_loss_with_noise(model, x, eps, kl_weight);
}

// Adds d(loss)/d(param) for the recorded forward pass into `grads`, each
// term scaled by `scale`.
inline void accumulate_gradients(const VaeModel& model, std::span<const double> x, const ForwardTrace& f,
                                 VaeParams& grads, double kl_weight = 1.0, double scale = 1.0) {
	const auto& p = model.params;
	const std::size_t dim = x.size();
	const std::size_t latent = f.mu.size();

	std::vector<double> d_recon(dim);
	for (std::size_t i = 0; i < dim; ++i) {
		d_recon[i] = scale * 2.0 * (f.recon[i] - x[i]) / static_cast<double>(dim);
	}
	auto d_dec = detail::back_linear(p.output, grads.output, f.dec_acts.back(), d_recon);
	auto d_z = detail::back_hidden(p.decoder, grads.decoder, f.dec_acts, std::move(d_dec));

	std::vector<double> d_mu(latent);
	std::vector<double> d_logvar(latent);
	for (std::size_t i = 0; i < latent; ++i) {
		d_mu[i] = d_z[i] + scale * kl_weight * f.mu[i];
		d_logvar[i] = d_z[i] * f.eps[i] * 0.5 * f.sigma[i] + scale * kl_weight * 0.5 * std::expm1(f.logvar[i]);
	}
	const auto& h = f.enc_acts.back();
	auto d_h = detail::back_linear(p.mu_head, grads.mu_head, h, d_mu);
	auto d_h_lv = detail::back_linear(p.logvar_head, grads.logvar_head, h, d_logvar);
	for (std::size_t i = 0; i < d_h.size(); ++i) {
		d_h[i] += d_h_lv[i];
	}
	detail::back_hidden(p.encoder, grads.encoder, f.enc_acts, std::move(d_h));
}

// Exact gradients of elbo_loss_with_noise(model, x, eps) for every weight and bias.
inline VaeParams backprop_gradients(const VaeModel& model, std::span<const double> x, std::span<const double> eps,
                                    double kl_weight = 1.0) {
	auto grads = VaeParams::zeros(model.arch);
	const auto f = forward_with_noise(model, x, eps, kl_weight);
	accumulate_gradients(model, x, f, grads, kl_weight);
	return grads;
}

} // namespace vaefp
