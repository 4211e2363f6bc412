/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <stdexcept>
#include <string>

namespace qecdecay {

/// Input violates a numerical precondition (non-Hermitian generator,
/// unnormalized state, non-unitary operator, ...).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Shapes or tensor-factor structure do not fit together.
class StructuralError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Operation is not defined for the given kind of input.
class UnsupportedError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Power-law fit could not find enough usable samples.
class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Joint Hilbert space would exceed the configured dimension cap.
class SizingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario document. Carries the offending line and key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::size_t line, std::string key, const std::string &what)
      : std::runtime_error(format(line, key, what)), line_(line),
        key_(std::move(key)) {}

  std::size_t line() const { return line_; }
  const std::string &key() const { return key_; }

private:
  static std::string format(std::size_t line, const std::string &key,
                            const std::string &what) {
    std::string msg = "line " + std::to_string(line);
    if (!key.empty())
      msg += ", key '" + key + "'";
    return msg + ": " + what;
  }

  std::size_t line_;
  std::string key_;
};

} // namespace qecdecay
