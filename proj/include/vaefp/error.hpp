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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vaefp {

// Broad failure class; the CLI maps each one to a distinct exit code.
enum class ErrorKind { Config, Data, Model, Io };

class Error : public std::runtime_error {
public:
	Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), m_kind(kind) {}
	ErrorKind kind() const noexcept { return m_kind; }

private:
	ErrorKind m_kind;
};

class MalformedRecord : public Error {
public:
	MalformedRecord(std::size_t line, const std::string& reason)
	    : Error(ErrorKind::Data, "malformed record at line " + std::to_string(line) + ": " + reason),
	      m_line(line) {}
	std::size_t line() const noexcept { return m_line; }

private:
	std::size_t m_line;
};

class OutOfOrderTimestamp : public Error {
public:
	explicit OutOfOrderTimestamp(std::size_t index)
	    : Error(ErrorKind::Data, "timestamp decreases at event index " + std::to_string(index)),
	      m_index(index) {}
	std::size_t index() const noexcept { return m_index; }

private:
	std::size_t m_index;
};

class InvalidConfig : public Error {
public:
	explicit InvalidConfig(const std::string& what) : Error(ErrorKind::Config, "invalid config: " + what) {}
};

class ForeignEvent : public Error {
public:
	explicit ForeignEvent(const std::string& what) : Error(ErrorKind::Data, "foreign event: " + what) {}
};

class EmptyDataset : public Error {
public:
	EmptyDataset() : Error(ErrorKind::Data, "empty dataset") {}
};

class DimensionMismatch : public Error {
public:
	DimensionMismatch(std::size_t expected, std::size_t actual)
	    : Error(ErrorKind::Data, "dimension mismatch: expected " + std::to_string(expected) + ", got " +
	                                 std::to_string(actual)) {}
};

class NonFiniteInput : public Error {
public:
	explicit NonFiniteInput(const std::string& where) : Error(ErrorKind::Data, "non-finite input in " + where) {}
};

class InsufficientData : public Error {
public:
	InsufficientData(std::size_t actual, std::size_t required)
	    : Error(ErrorKind::Data, "insufficient data: have " + std::to_string(actual) + " intervals, need " +
	                                 std::to_string(required)),
	      m_actual(actual), m_required(required) {}
	std::size_t actual() const noexcept { return m_actual; }
	std::size_t required() const noexcept { return m_required; }

private:
	std::size_t m_actual;
	std::size_t m_required;
};

class SchemaMismatch : public Error {
public:
	explicit SchemaMismatch(const std::string& what) : Error(ErrorKind::Model, "schema mismatch: " + what) {}
};

class CorruptModelFile : public Error {
public:
	explicit CorruptModelFile(const std::string& what) : Error(ErrorKind::Model, "corrupt model file: " + what) {}
};

class InvalidK : public Error {
public:
	explicit InvalidK(double k) : Error(ErrorKind::Config, "invalid k: " + std::to_string(k)) {}
};

class UnknownContainer : public Error {
public:
	explicit UnknownContainer(const std::string& id) : Error(ErrorKind::Data, "unknown container: " + id) {}
};

class SinkUnavailable : public Error {
public:
	explicit SinkUnavailable(const std::string& what) : Error(ErrorKind::Io, "sink unavailable: " + what) {}
};

class EmptyBatch : public Error {
public:
	EmptyBatch() : Error(ErrorKind::Data, "bulk request needs at least one document") {}
};

class IoError : public Error {
public:
	explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

} // namespace vaefp
