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

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <utility>
#include <string>
#include <vector>

#include "error.hpp"
#include "model_io.hpp"
#include "normalization.hpp"
#include "sink.hpp"
#include "stability.hpp"
#include "summarizer.hpp"
#include "training.hpp"

namespace vaefp {

struct CachedInterval {
	IntervalKey key;
	std::vector<ForensicEvent> events;
	ActivityVector vector;
};

// Per-container ring of the most recent raw intervals.
class IntervalCache {
public:
	explicit IntervalCache(std::size_t capacity = 4) : m_capacity(capacity) {
		if (capacity == 0) {
			throw InvalidConfig("cache capacity must be >= 1");
		}
	}

	void put(CachedInterval entry) {
		std::lock_guard lock(m_mutex);
		auto& ring = m_rings[entry.key.container_id];
		ring.push_back(std::move(entry));
		while (ring.size() > m_capacity) {
			ring.pop_front();
		}
	}

	// Newest first, at most min(count, capacity) groups.
	std::vector<std::vector<ForensicEvent>> fetch_prior_intervals(const std::string& container_id,
	                                                              std::size_t count) const {
		if (count == 0) {
			throw InvalidConfig("fetch count must be >= 1");
		}
		std::lock_guard lock(m_mutex);
		auto it = m_rings.find(container_id);
		if (it == m_rings.end()) {
			throw UnknownContainer(container_id);
		}
		std::vector<std::vector<ForensicEvent>> out;
		for (auto r = it->second.rbegin(); r != it->second.rend() && out.size() < count; ++r) {
			out.push_back(r->events);
		}
		return out;
	}

	std::vector<IntervalKey> keys(const std::string& container_id) const {
		std::lock_guard lock(m_mutex);
		std::vector<IntervalKey> out;
		if (auto it = m_rings.find(container_id); it != m_rings.end()) {
			for (const auto& e : it->second) {
				out.push_back(e.key);
			}
		}
		return out;
	}

	std::size_t size(const std::string& container_id) const {
		std::lock_guard lock(m_mutex);
		auto it = m_rings.find(container_id);
		return it == m_rings.end() ? 0 : it->second.size();
	}

	std::size_t capacity() const { return m_capacity; }

private:
	std::size_t m_capacity;
	mutable std::mutex m_mutex;
	std::map<std::string, std::deque<CachedInterval>> m_rings;
};

// Collects activity vectors for containers without a model. Hands back the
// dataset exactly once, when the count reaches the target, then seals.
class TrainingAccumulator {
public:
	explicit TrainingAccumulator(std::size_t target = 120) : m_target(target) {
		if (target == 0) {
			throw InvalidConfig("accumulation target must be >= 1");
		}
	}

	std::optional<std::vector<ActivityVector>> add(const ActivityVector& v) {
		std::lock_guard lock(m_mutex);
		auto& slot = m_slots[v.key.container_id];
		if (slot.sealed) {
			return std::nullopt;
		}
		slot.vectors.push_back(v);
		if (slot.vectors.size() == m_target) {
			slot.sealed = true;
			return std::exchange(slot.vectors, {});
		}
		return std::nullopt;
	}

	// Opens a new accumulation cycle for a container.
	void reset(const std::string& container_id) {
		std::lock_guard lock(m_mutex);
		m_slots.erase(container_id);
	}

	std::size_t count(const std::string& container_id) const {
		std::lock_guard lock(m_mutex);
		auto it = m_slots.find(container_id);
		return it == m_slots.end() ? 0 : it->second.vectors.size();
	}

	bool sealed(const std::string& container_id) const {
		std::lock_guard lock(m_mutex);
		auto it = m_slots.find(container_id);
		return it != m_slots.end() && it->second.sealed;
	}

	std::size_t target() const { return m_target; }

private:
	struct Slot {
		std::vector<ActivityVector> vectors;
		bool sealed = false;
	};
	std::size_t m_target;
	mutable std::mutex m_mutex;
	std::map<std::string, Slot> m_slots;
};

// Trained bundles by container. Concurrent readers, exclusive installs.
class ModelStore {
public:
	std::shared_ptr<const ModelBundle> get(const std::string& container_id) const {
		std::shared_lock lock(m_mutex);
		auto it = m_models.find(container_id);
		return it == m_models.end() ? nullptr : it->second;
	}

	void install(ModelBundle bundle) {
		auto ptr = std::make_shared<const ModelBundle>(std::move(bundle));
		std::unique_lock lock(m_mutex);
		m_models[ptr->container_id] = std::move(ptr);
	}

	std::size_t size() const {
		std::shared_lock lock(m_mutex);
		return m_models.size();
	}

private:
	mutable std::shared_mutex m_mutex;
	std::map<std::string, std::shared_ptr<const ModelBundle>> m_models;
};

// How r_th is chosen for a container.
struct PolicySpec {
	enum class Kind { KSigma, Heuristic };
	Kind kind = Kind::KSigma;
	double value = 3.0; // k, or r_th for the heuristic

	ThresholdPolicy resolve(const TrainingCurve& curve) const {
		if (kind == Kind::Heuristic) {
			return make_heuristic_threshold(value);
		}
		return fit_threshold_ksigma(curve, value);
	}
};

struct PublisherConfig {
	TrainConfig train;
	PolicySpec policy;
	// When false, bundles keep the policy they were saved with.
	bool override_bundle_policy = false;
	std::size_t cache_capacity = 4;
	std::optional<std::filesystem::path> model_dir; // where freshly trained bundles are written
};

// Builds a complete bundle from a raw training set.
inline ModelBundle train_bundle(const std::string& container_id, const std::vector<ActivityVector>& dataset,
                                const TrainConfig& train_cfg, const PolicySpec& policy) {
	ModelBundle b;
	b.container_id = container_id;
	b.scaler = fit_scaler(std::span<const ActivityVector>(dataset));
	auto result = train(std::span<const ActivityVector>(dataset), b.scaler, train_cfg);
	b.model = std::move(result.model);
	b.curve = std::move(result.curve);
	b.policy = policy.resolve(b.curve);
	b.schema_version = b.scaler.schema_version;
	return b;
}

inline std::filesystem::path bundle_path(const std::filesystem::path& dir, const std::string& container_id) {
	return dir / (container_id + ".vae.json");
}

// The adaptive forensic publisher. One sequential caller per container;
// distinct containers may call concurrently.
class Publisher {
public:
	explicit Publisher(PublisherConfig config)
	    : m_config(std::move(config)), m_cache(m_config.cache_capacity),
	      m_accumulator(m_config.train.accumulation_target) {
		m_config.train.validate();
	}

	PublishAction process_interval(const IntervalGroup& group, const ActivityVector& vector) {
		if (group.key != vector.key) {
			throw ForeignEvent("activity vector key does not match interval group");
		}
		m_cache.put({group.key, group.events, vector});

		PublishAction action;
		action.key = group.key;
		const auto bundle = m_store.get(group.key.container_id);
		if (!bundle) {
			action.mode = PublishMode::AccumulatingNoModel;
			action.vector = vector;
			action.forensics = group.events;
			if (auto dataset = m_accumulator.add(vector)) {
				auto trained = train_bundle(group.key.container_id, *dataset, m_config.train, m_config.policy);
				if (m_config.model_dir) {
					std::filesystem::create_directories(*m_config.model_dir);
					save_model(bundle_path(*m_config.model_dir, trained.container_id), trained);
				}
				m_store.install(std::move(trained));
				action.training_triggered = true;
			}
			return action;
		}

		const auto policy = m_config.override_bundle_policy ? m_config.policy.resolve(bundle->curve) : bundle->policy;
		auto latent = score(bundle->model, bundle->scaler, vector);
		auto verdict = assess(latent, policy);
		action.latent = std::move(latent);
		if (verdict.stable) {
			action.mode = PublishMode::LatentOnly;
		} else {
			action.mode = PublishMode::LatentPlusForensics;
			action.forensics = group.events;
		}
		action.verdict = std::move(verdict);
		return action;
	}

	std::vector<std::vector<ForensicEvent>> fetch_prior_intervals(const std::string& container_id,
	                                                              std::size_t count) const {
		return m_cache.fetch_prior_intervals(container_id, count);
	}

	ModelStore& models() { return m_store; }
	const ModelStore& models() const { return m_store; }
	IntervalCache& cache() { return m_cache; }
	TrainingAccumulator& accumulator() { return m_accumulator; }
	const PublisherConfig& config() const { return m_config; }

private:
	PublisherConfig m_config;
	IntervalCache m_cache;
	TrainingAccumulator m_accumulator;
	ModelStore m_store;
};

} // namespace vaefp
