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
#include <numbers>
#include <random>
#include <vector>

namespace vaefp {

// Portable random source. The engine (mt19937_64) is bit-exact across
// standard libraries; the std distributions are not, so every transform
// below is spelled out.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : m_engine(seed) {}

	std::uint64_t next_u64() { return m_engine(); }

	// Uniform on [0, 1) with 53 bits of mantissa.
	double uniform() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	// Uniform integer on [lo, hi], rejection-sampled to avoid modulo bias.
	std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
		const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
		if (span == 0) {
			return static_cast<std::int64_t>(m_engine());
		}
		const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
		std::uint64_t r;
		do {
			r = m_engine();
		} while (r >= limit);
		return lo + static_cast<std::int64_t>(r % span);
	}

	bool bernoulli(double p) { return uniform() < p; }

	// Box-Muller; caches the second variate.
	double normal() {
		if (m_has_spare) {
			m_has_spare = false;
			return m_spare;
		}
		double u1 = uniform();
		while (u1 <= 0.0) {
			u1 = uniform();
		}
		const double u2 = uniform();
		const double radius = std::sqrt(-2.0 * std::log(u1));
		const double angle = 2.0 * std::numbers::pi * u2;
		m_spare = radius * std::sin(angle);
		m_has_spare = true;
		return radius * std::cos(angle);
	}

	// Fisher-Yates.
	template <typename T>
	void shuffle(std::vector<T>& items) {
		for (std::size_t i = items.size(); i > 1; --i) {
			const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
			std::swap(items[i - 1], items[j]);
		}
	}

private:
	std::mt19937_64 m_engine;
	double m_spare = 0.0;
	bool m_has_spare = false;
};

// SplitMix64 finalizer, used to derive independent sub-stream seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
	std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
	z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
	z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
	return z ^ (z >> 31);
}

} // namespace vaefp
