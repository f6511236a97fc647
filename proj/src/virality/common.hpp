// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace virality {

/// Broad failure classes. The C API maps each one onto a status code, the CLI
/// onto an exit code.
enum class ErrorKind {
  Io,          ///< unreadable / unwritable file
  Parse,       ///< malformed input text
  Validation,  ///< record violates a domain invariant
  Domain,      ///< argument outside the mathematical domain of an operation
  Fit,         ///< an estimator cannot be fitted on the given data
  Schema,      ///< column / key mismatch between artifacts
  Config,      ///< invalid configuration value
  Split,       ///< no valid train/test partition
  Metric,      ///< metric undefined for the given labels
  Fold,        ///< cross-validation folds cannot be built
  Degenerate,  ///< degenerate distribution (e.g. all values identical)
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

/// Feature values that have "not happened yet" are empty, never sentinels.
using MaybeDouble = std::optional<double>;

/// 64-bit FNV-1a; used for fingerprints of datasets and artifacts.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) noexcept;
  Fnv1a& update(std::uint64_t value) noexcept;
  Fnv1a& update(double value) noexcept;
  std::uint64_t digest() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t value);

}  // namespace virality
