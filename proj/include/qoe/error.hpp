// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qoe {

enum class ErrorKind {
  invalid_argument,
  invalid_recipe,
  parse_error,
  io_error,
  synthesis_degenerate,
  degenerate_fit,
  undefined_auc,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for failures caused by the numbers themselves rather than by bad input
/// (the CLI reports these with exit code 3 instead of 2).
bool is_degenerate(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qoe
