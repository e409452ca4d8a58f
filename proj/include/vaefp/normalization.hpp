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
#include <span>
#include <vector>

#include "error.hpp"
#include "summarizer.hpp"

namespace vaefp {

// Per-feature min-max scaler. Immutable once fitted.
struct MinMaxScaler {
	std::vector<double> min;
	std::vector<double> max;
	int schema_version = kSchemaVersion;

	std::size_t dimension() const { return min.size(); }

	bool operator==(const MinMaxScaler&) const = default;
};

inline MinMaxScaler fit_scaler(std::span<const std::vector<double>> rows) {
	if (rows.empty()) {
		throw EmptyDataset();
	}
	MinMaxScaler s;
	s.min = rows.front();
	s.max = rows.front();
	for (const auto& r : rows) {
		if (r.size() != s.min.size()) {
			throw DimensionMismatch(s.min.size(), r.size());
		}
		for (std::size_t i = 0; i < r.size(); ++i) {
			s.min[i] = std::min(s.min[i], r[i]);
			s.max[i] = std::max(s.max[i], r[i]);
		}
	}
	return s;
}

inline MinMaxScaler fit_scaler(std::span<const ActivityVector> dataset) {
	std::vector<std::vector<double>> rows;
	rows.reserve(dataset.size());
	for (const auto& v : dataset) {
		rows.push_back(v.features);
	}
	auto s = fit_scaler(std::span<const std::vector<double>>(rows));
	if (!dataset.empty()) {
		s.schema_version = dataset.front().schema_version;
	}
	return s;
}

// Constant features map to 0. Values outside the fitted range are not clipped.
inline std::vector<double> transform(const MinMaxScaler& s, std::span<const double> x) {
	if (x.size() != s.dimension()) {
		throw DimensionMismatch(s.dimension(), x.size());
	}
	std::vector<double> y(x.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double range = s.max[i] - s.min[i];
		y[i] = range > 0.0 ? (x[i] - s.min[i]) / range : 0.0;
	}
	return y;
}

inline std::vector<double> transform(const MinMaxScaler& s, const ActivityVector& x) {
	return transform(s, std::span<const double>(x.features));
}

inline std::vector<double> inverse_transform(const MinMaxScaler& s, std::span<const double> y) {
	if (y.size() != s.dimension()) {
		throw DimensionMismatch(s.dimension(), y.size());
	}
	std::vector<double> x(y.size());
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double range = s.max[i] - s.min[i];
		x[i] = range > 0.0 ? s.min[i] + y[i] * range : s.min[i];
	}
	return x;
}

} // namespace vaefp
