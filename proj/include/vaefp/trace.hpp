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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "error.hpp"

namespace vaefp {

// One syscall record captured for a container.
struct ForensicEvent {
	double timestamp = 0.0; // seconds since trace epoch
	std::string container_id;
	std::string syscall;
	std::int64_t pid = 0;
	std::int64_t result = 0; // negative = error return
	std::int64_t arg_bytes = 0;

	bool operator==(const ForensicEvent&) const = default;
};

// Shortest decimal that round-trips to the same double.
inline void append_double(std::string& out, double v) {
	char buf[32];
	auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
	out.append(buf, end);
}

inline void append_int(std::string& out, std::int64_t v) {
	char buf[24];
	auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
	out.append(buf, end);
}

inline void append_json_string(std::string& out, std::string_view s) {
	out += nlohmann::json(s).dump();
}

// Canonical trace line, without the trailing newline.
inline std::string serialize_event(const ForensicEvent& e) {
	std::string out;
	out.reserve(64 + e.container_id.size() + e.syscall.size());
	out += "{\"t\":";
	append_double(out, e.timestamp);
	out += ",\"c\":";
	append_json_string(out, e.container_id);
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

inline ForensicEvent parse_event_record(std::string_view line, std::size_t line_no = 1) {
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(line);
	} catch (const nlohmann::json::parse_error& ex) {
		throw MalformedRecord(line_no, ex.what());
	}
	if (!j.is_object()) {
		throw MalformedRecord(line_no, "record is not an object");
	}
	for (auto it = j.begin(); it != j.end(); ++it) {
		const auto& k = it.key();
		if (k != "t" && k != "c" && k != "sc" && k != "pid" && k != "ret" && k != "bytes") {
			throw MalformedRecord(line_no, "unknown field '" + k + "'");
		}
	}
	auto field = [&](const char* name) -> const nlohmann::json& {
		auto it = j.find(name);
		if (it == j.end()) {
			throw MalformedRecord(line_no, std::string("missing field '") + name + "'");
		}
		return *it;
	};
	auto integer = [&](const char* name) -> std::int64_t {
		const auto& v = field(name);
		if (v.is_number_unsigned()) {
			if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
				throw MalformedRecord(line_no, std::string("'") + name + "' out of range");
			}
			return static_cast<std::int64_t>(v.get<std::uint64_t>());
		}
		if (!v.is_number_integer()) {
			throw MalformedRecord(line_no, std::string("'") + name + "' must be an integer");
		}
		return v.get<std::int64_t>();
	};

	ForensicEvent e;
	const auto& t = field("t");
	if (!t.is_number()) {
		throw MalformedRecord(line_no, "'t' must be a number");
	}
	e.timestamp = t.get<double>();
	if (!std::isfinite(e.timestamp) || e.timestamp < 0.0) {
		throw MalformedRecord(line_no, "'t' must be finite and non-negative");
	}
	const auto& c = field("c");
	if (!c.is_string()) {
		throw MalformedRecord(line_no, "'c' must be a string");
	}
	e.container_id = c.get<std::string>();
	const auto& sc = field("sc");
	if (!sc.is_string() || sc.get_ref<const std::string&>().empty()) {
		throw MalformedRecord(line_no, "'sc' must be a non-empty string");
	}
	e.syscall = sc.get<std::string>();
	e.pid = integer("pid");
	if (e.pid < 0) {
		throw MalformedRecord(line_no, "'pid' must be >= 0");
	}
	e.result = integer("ret");
	e.arg_bytes = integer("bytes");
	if (e.arg_bytes < 0) {
		throw MalformedRecord(line_no, "'bytes' must be >= 0");
	}
	return e;
}

// Streaming reader over a newline-delimited trace. Not thread-safe.
class TraceReader {
public:
	explicit TraceReader(std::istream& in) : m_in(in) {}

	std::optional<ForensicEvent> next() {
		std::string line;
		if (!std::getline(m_in, line)) {
			return std::nullopt;
		}
		++m_line;
		if (m_in.eof()) {
			throw MalformedRecord(m_line, "missing trailing newline");
		}
		if (!line.empty() && line.back() == '\r') {
			line.pop_back();
		}
		auto e = parse_event_record(line, m_line);
		if (m_count > 0 && e.timestamp < m_last_t) {
			throw OutOfOrderTimestamp(m_count);
		}
		m_last_t = e.timestamp;
		++m_count;
		return e;
	}

	std::size_t events_read() const { return m_count; }

private:
	std::istream& m_in;
	std::size_t m_line = 0;
	std::size_t m_count = 0;
	double m_last_t = 0.0;
};

inline std::vector<ForensicEvent> read_trace(std::istream& in) {
	std::vector<ForensicEvent> events;
	TraceReader reader(in);
	while (auto e = reader.next()) {
		events.push_back(std::move(*e));
	}
	return events;
}

inline void write_trace(std::ostream& out, const std::vector<ForensicEvent>& events) {
	for (const auto& e : events) {
		out << serialize_event(e) << '\n';
	}
}

} // namespace vaefp
