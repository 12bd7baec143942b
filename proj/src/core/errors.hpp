/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#pragma once

#include <stdexcept>
#include <string>

namespace pathcalc {

enum class ErrorKind {
  domain,       // argument outside the operation's domain
  precision,    // time not on the grid (caller must snap)
  config,       // invalid specification / parameters
  evaluation,   // functional could not be evaluated at the given pair
  consistency,  // internal identity violated (registry/subdivision mismatch)
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& what) : Error(ErrorKind::precision, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what) : Error(ErrorKind::evaluation, what) {}
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& what) : Error(ErrorKind::consistency, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace pathcalc
