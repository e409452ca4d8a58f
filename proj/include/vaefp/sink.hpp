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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "stability.hpp"
#include "summarizer.hpp"
#include "trace.hpp"
#include "vae.hpp"

namespace vaefp {

enum class PublishMode { LatentOnly, LatentPlusForensics, AccumulatingNoModel };

inline const char* mode_name(PublishMode m) {
	switch (m) {
	case PublishMode::LatentOnly:
		return "latent_only";
	case PublishMode::LatentPlusForensics:
		return "latent_plus_forensics";
	case PublishMode::AccumulatingNoModel:
		return "accumulating";
	}
	return "?";
}

// What gets shipped for one interval.
struct PublishAction {
	IntervalKey key;
	PublishMode mode = PublishMode::AccumulatingNoModel;
	std::optional<LatentModel> latent;
	std::optional<std::vector<ForensicEvent>> forensics;
	std::optional<StabilityVerdict> verdict;
	std::optional<ActivityVector> vector; // set while accumulating
	bool training_triggered = false;
};

// One bulk-API document: target index plus its JSON source (single line).
struct BulkDocument {
	std::string index;
	std::string source;

	bool operator==(const BulkDocument&) const = default;
};

// Action line then source line per document, newline terminated.
inline std::string encode_bulk_request(const std::vector<BulkDocument>& docs) {
	if (docs.empty()) {
		throw EmptyBatch();
	}
	std::string out;
	for (const auto& d : docs) {
		out += "{\"index\":{\"_index\":";
		append_json_string(out, d.index);
		out += "}}\n";
		out += d.source;
		out += '\n';
	}
	return out;
}

namespace detail {

inline void append_double_array(std::string& out, const std::vector<double>& v) {
	out += '[';
	for (std::size_t i = 0; i < v.size(); ++i) {
		if (i > 0) {
			out += ',';
		}
		append_double(out, v[i]);
	}
	out += ']';
}

inline void append_key_fields(std::string& out, const IntervalKey& key) {
	out += "\"c\":";
	append_json_string(out, key.container_id);
	out += ",\"k\":";
	append_int(out, key.interval_index);
	out += ",\"start\":";
	append_double(out, key.start);
	out += ",\"len\":";
	append_double(out, key.length);
}

inline void append_latent_fields(std::string& out, const PublishAction& a) {
	if (a.verdict) {
		out += ",\"recon_error\":";
		append_double(out, a.verdict->recon_error);
		out += ",\"r_th\":";
		append_double(out, a.verdict->r_th);
		out += a.verdict->stable ? ",\"stable\":true" : ",\"stable\":false";
	}
	if (a.latent) {
		out += ",\"mu\":";
		append_double_array(out, a.latent->mu);
		out += ",\"logvar\":";
		append_double_array(out, a.latent->logvar);
	}
}

} // namespace detail

// Latent record document: interval key, verdict and the latent model M.
inline std::string latent_document(const PublishAction& a) {
	std::string out = "{";
	detail::append_key_fields(out, a.key);
	out += ",\"mode\":\"";
	out += mode_name(a.mode);
	out += '"';
	detail::append_latent_fields(out, a);
	out += '}';
	return out;
}

inline std::string forensic_document(const IntervalKey& key, const ForensicEvent& e) {
	std::string out = "{\"c\":";
	append_json_string(out, e.container_id);
	out += ",\"k\":";
	append_int(out, key.interval_index);
	out += ",\"t\":";
	append_double(out, e.timestamp);
	out += ",\"sc\":";
	append_json_string(out, e.syscall);
	out += ",\"pid\":";
	append_int(out, e.pid);
	out += ",\"ret\":";
	append_int(out, e.result);
	out += ",\"bytes\":";
	append_int(out, e.arg_bytes);
	out += '}';
	return out;
}

struct IndexNames {
	std::string latent = "vaefp-latent";
	std::string forensic = "vaefp-forensics";
};

inline std::vector<BulkDocument> bulk_documents(const PublishAction& a, const IndexNames& idx) {
	std::vector<BulkDocument> docs;
	if (a.latent || a.verdict) {
		docs.push_back({idx.latent, latent_document(a)});
	}
	if (a.forensics) {
		for (const auto& e : *a.forensics) {
			docs.push_back({idx.forensic, forensic_document(a.key, e)});
		}
	}
	return docs;
}

// Full-forensics documents for one interval, as a conventional publisher ships them.
inline std::vector<BulkDocument> standard_documents(const IntervalKey& key, const std::vector<ForensicEvent>& events,
                                                    const IndexNames& idx) {
	std::vector<BulkDocument> docs;
	docs.reserve(events.size());
	for (const auto& e : events) {
		docs.push_back({idx.forensic, forensic_document(key, e)});
	}
	return docs;
}

// File-sink line: one action per line, forensic events embedded as an array.
inline std::string encode_action_record(const PublishAction& a) {
	std::string out = "{";
	detail::append_key_fields(out, a.key);
	out += ",\"mode\":\"";
	out += mode_name(a.mode);
	out += '"';
	detail::append_latent_fields(out, a);
	if (a.forensics) {
		out += ",\"forensics\":[";
		for (std::size_t i = 0; i < a.forensics->size(); ++i) {
			if (i > 0) {
				out += ',';
			}
			out += serialize_event((*a.forensics)[i]);
		}
		out += ']';
	}
	out += "}\n";
	return out;
}

enum class WireFormat { Records, Bulk };

class Sink {
public:
	virtual ~Sink() = default;

	// Payload for one action in this sink's wire format; empty when there is nothing to ship.
	virtual std::string encode(const PublishAction& action) const = 0;

	// Writes a payload. Throws SinkUnavailable.
	virtual void write(std::string_view payload) = 0;

	virtual std::uint64_t bytes_written() const = 0;
};

namespace detail {

inline std::string encode_for(WireFormat fmt, const IndexNames& idx, const PublishAction& a) {
	if (fmt == WireFormat::Records) {
		return encode_action_record(a);
	}
	auto docs = bulk_documents(a, idx);
	return docs.empty() ? std::string() : encode_bulk_request(docs);
}

} // namespace detail

// Keeps published bytes in memory; used for cost accounting and tests.
class MemorySink : public Sink {
public:
	explicit MemorySink(WireFormat fmt = WireFormat::Bulk, IndexNames idx = {}, bool keep_content = true)
	    : m_format(fmt), m_index(std::move(idx)), m_keep(keep_content) {}

	std::string encode(const PublishAction& action) const override {
		return detail::encode_for(m_format, m_index, action);
	}

	void write(std::string_view payload) override {
		std::lock_guard lock(m_mutex);
		if (m_closed) {
			throw SinkUnavailable("memory sink closed");
		}
		m_bytes += payload.size();
		if (m_keep) {
			m_content.append(payload);
		}
	}

	std::uint64_t bytes_written() const override {
		std::lock_guard lock(m_mutex);
		return m_bytes;
	}

	std::string content() const {
		std::lock_guard lock(m_mutex);
		return m_content;
	}

	void close() {
		std::lock_guard lock(m_mutex);
		m_closed = true;
	}
	void reopen() {
		std::lock_guard lock(m_mutex);
		m_closed = false;
	}

	const IndexNames& indices() const { return m_index; }

private:
	WireFormat m_format;
	IndexNames m_index;
	bool m_keep;
	mutable std::mutex m_mutex;
	std::uint64_t m_bytes = 0;
	std::string m_content;
	bool m_closed = false;
};

// Append-only newline-delimited action records.
class FileSink : public Sink {
public:
	explicit FileSink(std::filesystem::path path) : m_path(std::move(path)) {
		m_out.open(m_path, std::ios::binary | std::ios::app);
		if (!m_out) {
			throw SinkUnavailable("cannot open '" + m_path.string() + "'");
		}
	}

	std::string encode(const PublishAction& action) const override { return encode_action_record(action); }

	void write(std::string_view payload) override {
		std::lock_guard lock(m_mutex);
		if (!m_out.is_open()) {
			throw SinkUnavailable("file sink '" + m_path.string() + "' is closed");
		}
		m_out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
		m_out.flush();
		if (!m_out) {
			throw SinkUnavailable("write to '" + m_path.string() + "' failed");
		}
		m_bytes += payload.size();
	}

	std::uint64_t bytes_written() const override {
		std::lock_guard lock(m_mutex);
		return m_bytes;
	}

	void close() {
		std::lock_guard lock(m_mutex);
		m_out.close();
	}

private:
	std::filesystem::path m_path;
	mutable std::mutex m_mutex;
	std::ofstream m_out;
	std::uint64_t m_bytes = 0;
};

// Payloads that could not be delivered, one file each, replayed in order.
class Spool {
public:
	explicit Spool(std::filesystem::path dir) : m_dir(std::move(dir)) {
		std::filesystem::create_directories(m_dir);
		for (const auto& f : pending()) {
			m_next = std::max(m_next, std::stoull(f.stem().string().substr(6)) + 1);
		}
	}

	void append(std::string_view payload) {
		std::lock_guard lock(m_mutex);
		std::ostringstream name;
		name << "spool-" << std::setw(10) << std::setfill('0') << m_next++ << ".ndjson";
		std::ofstream out(m_dir / name.str(), std::ios::binary);
		out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
		if (!out) {
			throw IoError("cannot write spool file in '" + m_dir.string() + "'");
		}
	}

	std::vector<std::filesystem::path> pending() const {
		std::vector<std::filesystem::path> files;
		for (const auto& entry : std::filesystem::directory_iterator(m_dir)) {
			const auto name = entry.path().filename().string();
			if (entry.is_regular_file() && name.starts_with("spool-") && name.ends_with(".ndjson")) {
				files.push_back(entry.path());
			}
		}
		std::sort(files.begin(), files.end());
		return files;
	}

	// Delivers spooled payloads oldest first; stops at the first failure.
	// Returns the number delivered.
	std::size_t replay(Sink& sink) {
		std::lock_guard lock(m_mutex);
		std::size_t delivered = 0;
		for (const auto& f : pending()) {
			std::ifstream in(f, std::ios::binary);
			std::ostringstream ss;
			ss << in.rdbuf();
			in.close();
			try {
				sink.write(ss.str());
			} catch (const SinkUnavailable&) {
				break;
			}
			std::filesystem::remove(f);
			++delivered;
		}
		return delivered;
	}

private:
	std::filesystem::path m_dir;
	std::mutex m_mutex;
	unsigned long long m_next = 0;
};

struct EmitReceipt {
	std::uint64_t bytes = 0;
};

// Serializes and writes one action. On SinkUnavailable the payload is
// spooled (when a spool is given) and the error rethrown.
inline EmitReceipt emit(const PublishAction& action, Sink& sink, Spool* spool = nullptr) {
	const auto payload = sink.encode(action);
	if (payload.empty()) {
		return {};
	}
	try {
		sink.write(payload);
	} catch (const SinkUnavailable&) {
		if (spool != nullptr) {
			spool->append(payload);
		}
		throw;
	}
	return {payload.size()};
}

} // namespace vaefp
