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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "normalization.hpp"
#include "stability.hpp"
#include "summarizer.hpp"
#include "training.hpp"
#include "vae.hpp"

namespace vaefp {

inline constexpr const char* kModelFormat = "vaefp-model";
inline constexpr int kModelFormatVersion = 1;

// Everything needed to score a container: network, scaler, and threshold.
struct ModelBundle {
	std::string container_id;
	VaeModel model;
	MinMaxScaler scaler;
	TrainingCurve curve;
	ThresholdPolicy policy = KSigmaThreshold{};
	int schema_version = kSchemaVersion;

	bool operator==(const ModelBundle&) const = default;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson policy_to_json(const ThresholdPolicy& p) {
	ojson j;
	if (const auto* h = std::get_if<HeuristicThreshold>(&p)) {
		j["policy"] = "heuristic";
		j["r_th"] = h->r_th;
	} else {
		const auto& k = std::get<KSigmaThreshold>(p);
		j["policy"] = "ksigma";
		j["k"] = k.k;
		j["r_mean"] = k.r_mean;
		j["r_sd"] = k.r_sd;
		j["r_th"] = k.r_th;
	}
	return j;
}

inline ThresholdPolicy policy_from_json(const nlohmann::json& j) {
	const auto kind = j.at("policy").get<std::string>();
	if (kind == "heuristic") {
		return HeuristicThreshold{j.at("r_th").get<double>()};
	}
	if (kind == "ksigma") {
		return KSigmaThreshold{j.at("k").get<double>(), j.at("r_mean").get<double>(), j.at("r_sd").get<double>(),
		                       j.at("r_th").get<double>()};
	}
	throw CorruptModelFile("unknown threshold policy '" + kind + "'");
}

// Named tensors in VaeParams visiting order.
inline std::vector<std::string> tensor_names(const VaeArchitecture& arch) {
	std::vector<std::string> names;
	auto layer = [&](const std::string& prefix) {
		names.push_back(prefix + ".weight");
		names.push_back(prefix + ".bias");
	};
	for (std::size_t i = 0; i < arch.hidden.size(); ++i) {
		layer("encoder." + std::to_string(i));
	}
	layer("mu_head");
	layer("logvar_head");
	for (std::size_t i = 0; i < arch.hidden.size(); ++i) {
		layer("decoder." + std::to_string(i));
	}
	layer("output");
	return names;
}

inline std::vector<std::vector<std::size_t>> tensor_shapes(const VaeParams& p) {
	std::vector<std::vector<std::size_t>> shapes;
	auto layer = [&](const Dense& d) {
		shapes.push_back({d.out, d.in});
		shapes.push_back({d.out});
	};
	for (const auto& d : p.encoder) {
		layer(d);
	}
	layer(p.mu_head);
	layer(p.logvar_head);
	for (const auto& d : p.decoder) {
		layer(d);
	}
	layer(p.output);
	return shapes;
}

} // namespace detail

inline std::string serialize_bundle(const ModelBundle& b) {
	using detail::ojson;
	ojson j;
	j["format"] = kModelFormat;
	j["version"] = kModelFormatVersion;
	j["schema_version"] = b.schema_version;
	j["container"] = b.container_id;
	j["architecture"] = {{"input_dim", b.model.arch.input_dim},
	                     {"hidden", b.model.arch.hidden},
	                     {"latent_dim", b.model.arch.latent_dim},
	                     {"activation", activation_name(b.model.arch.activation)}};
	j["training"] = {{"epochs", b.model.meta.epochs},
	                 {"seed", b.model.meta.seed},
	                 {"final_recon", b.model.meta.final_recon},
	                 {"final_kl", b.model.meta.final_kl}};
	j["curve"] = {{"recon", b.curve.recon},
	              {"kl", b.curve.kl},
	              {"r_last", b.curve.r_last},
	              {"r_mean", b.curve.r_mean},
	              {"r_sd", b.curve.r_sd}};
	j["threshold"] = detail::policy_to_json(b.policy);
	j["scaler"] = {{"schema_version", b.scaler.schema_version}, {"min", b.scaler.min}, {"max", b.scaler.max}};

	const auto names = detail::tensor_names(b.model.arch);
	const auto shapes = detail::tensor_shapes(b.model.params);
	ojson tensors = ojson::array();
	std::size_t i = 0;
	b.model.params.for_each_tensor([&](const std::vector<double>& t) {
		tensors.push_back({{"name", names[i]}, {"shape", shapes[i]}, {"data", t}});
		++i;
	});
	j["tensors"] = std::move(tensors);
	return j.dump() + "\n";
}

// Parses a bundle; `expected_dim` (when nonzero) must match the model input.
inline ModelBundle parse_bundle(const std::string& text, std::size_t expected_dim = 0) {
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(text);
	} catch (const nlohmann::json::exception& ex) {
		throw CorruptModelFile(ex.what());
	}
	ModelBundle b;
	try {
		if (!j.is_object() || j.value("format", "") != kModelFormat) {
			throw CorruptModelFile("not a vaefp model bundle");
		}
		if (j.at("version").get<int>() != kModelFormatVersion) {
			throw CorruptModelFile("unsupported bundle version " + j.at("version").dump());
		}
		b.schema_version = j.at("schema_version").get<int>();
		b.container_id = j.at("container").get<std::string>();

		const auto& a = j.at("architecture");
		b.model.arch.input_dim = a.at("input_dim").get<std::size_t>();
		b.model.arch.hidden = a.at("hidden").get<std::vector<std::size_t>>();
		b.model.arch.latent_dim = a.at("latent_dim").get<std::size_t>();
		if (a.at("activation").get<std::string>() != "tanh") {
			throw CorruptModelFile("unsupported activation");
		}
		if (b.schema_version != kSchemaVersion) {
			throw SchemaMismatch("bundle schema v" + std::to_string(b.schema_version) + ", expected v" +
			                     std::to_string(kSchemaVersion));
		}
		if (expected_dim != 0 && b.model.arch.input_dim != expected_dim) {
			throw SchemaMismatch("bundle input dimension " + std::to_string(b.model.arch.input_dim) +
			                     ", current schema has " + std::to_string(expected_dim));
		}
		try {
			b.model.arch.validate();
		} catch (const InvalidConfig& ex) {
			throw CorruptModelFile(ex.what());
		}

		const auto& t = j.at("training");
		b.model.meta.epochs = t.at("epochs").get<std::int64_t>();
		b.model.meta.seed = t.at("seed").get<std::uint64_t>();
		b.model.meta.final_recon = t.at("final_recon").get<double>();
		b.model.meta.final_kl = t.at("final_kl").get<double>();

		const auto& c = j.at("curve");
		b.curve.recon = c.at("recon").get<std::vector<double>>();
		b.curve.kl = c.at("kl").get<std::vector<double>>();
		b.curve.r_last = c.at("r_last").get<double>();
		b.curve.r_mean = c.at("r_mean").get<double>();
		b.curve.r_sd = c.at("r_sd").get<double>();

		b.policy = detail::policy_from_json(j.at("threshold"));

		const auto& s = j.at("scaler");
		b.scaler.schema_version = s.at("schema_version").get<int>();
		b.scaler.min = s.at("min").get<std::vector<double>>();
		b.scaler.max = s.at("max").get<std::vector<double>>();
		if (b.scaler.min.size() != b.model.arch.input_dim || b.scaler.max.size() != b.model.arch.input_dim) {
			throw CorruptModelFile("scaler dimension does not match architecture");
		}

		b.model.params = VaeParams::zeros(b.model.arch);
		const auto names = detail::tensor_names(b.model.arch);
		const auto shapes = detail::tensor_shapes(b.model.params);
		const auto& tensors = j.at("tensors");
		if (!tensors.is_array() || tensors.size() != names.size()) {
			throw CorruptModelFile("tensor count does not match architecture");
		}
		std::size_t i = 0;
		b.model.params.for_each_tensor([&](std::vector<double>& dst) {
			const auto& tj = tensors[i];
			if (tj.at("name").get<std::string>() != names[i] ||
			    tj.at("shape").get<std::vector<std::size_t>>() != shapes[i]) {
				throw CorruptModelFile("tensor " + std::to_string(i) + " has unexpected name or shape");
			}
			auto data = tj.at("data").get<std::vector<double>>();
			if (data.size() != dst.size()) {
				throw CorruptModelFile("tensor '" + names[i] + "' has wrong element count");
			}
			dst = std::move(data);
			++i;
		});
		if (!b.model.all_finite()) {
			throw CorruptModelFile("non-finite weights");
		}
	} catch (const nlohmann::json::exception& ex) {
		throw CorruptModelFile(ex.what());
	}
	return b;
}

inline void save_model(const std::filesystem::path& path, const ModelBundle& bundle) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw IoError("cannot open '" + path.string() + "' for writing");
	}
	out << serialize_bundle(bundle);
	if (!out) {
		throw IoError("write to '" + path.string() + "' failed");
	}
}

inline ModelBundle load_model(const std::filesystem::path& path, std::size_t expected_dim = feature_dimension()) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw IoError("cannot open model '" + path.string() + "'");
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return parse_bundle(ss.str(), expected_dim);
}

} // namespace vaefp
