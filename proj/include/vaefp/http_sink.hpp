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

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>

#include <httplib.h>

#include "sink.hpp"

namespace vaefp {

struct BulkEndpoint {
	std::string host = "127.0.0.1";
	int port = 9200;
	std::string path = "/_bulk";
	IndexNames indices;
	std::string auth_header; // sent verbatim as Authorization when non-empty
	int timeout_seconds = 5;
};

// POSTs bulk payloads to a search cluster's /_bulk endpoint.
class HttpBulkSink : public Sink {
public:
	explicit HttpBulkSink(BulkEndpoint ep) : m_ep(std::move(ep)), m_client(m_ep.host, m_ep.port) {
		m_client.set_connection_timeout(m_ep.timeout_seconds, 0);
		m_client.set_read_timeout(m_ep.timeout_seconds, 0);
		m_client.set_write_timeout(m_ep.timeout_seconds, 0);
		m_client.set_keep_alive(true);
	}

	std::string encode(const PublishAction& action) const override {
		auto docs = bulk_documents(action, m_ep.indices);
		return docs.empty() ? std::string() : encode_bulk_request(docs);
	}

	void write(std::string_view payload) override {
		std::lock_guard lock(m_mutex);
		httplib::Headers headers;
		if (!m_ep.auth_header.empty()) {
			headers.emplace("Authorization", m_ep.auth_header);
		}
		auto res = m_client.Post(m_ep.path, headers, payload.data(), payload.size(), "application/x-ndjson");
		if (!res) {
			throw SinkUnavailable(m_ep.host + ":" + std::to_string(m_ep.port) + ": " + httplib::to_string(res.error()));
		}
		if (res->status < 200 || res->status >= 300) {
			throw SinkUnavailable("bulk endpoint returned HTTP " + std::to_string(res->status));
		}
		m_bytes += payload.size();
	}

	std::uint64_t bytes_written() const override {
		std::lock_guard lock(m_mutex);
		return m_bytes;
	}

private:
	BulkEndpoint m_ep;
	mutable std::mutex m_mutex;
	httplib::Client m_client;
	std::uint64_t m_bytes = 0;
};

} // namespace vaefp
