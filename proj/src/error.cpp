// SPDX-License-Identifier: Apache-2.0

#include "qoe/error.hpp"

namespace qoe {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_recipe: return "invalid-recipe";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::synthesis_degenerate: return "synthesis-degenerate";
    case ErrorKind::degenerate_fit: return "degenerate-fit";
    case ErrorKind::undefined_auc: return "undefined-auc";
  }
  return "unknown";
}

bool is_degenerate(ErrorKind kind) noexcept {
  return kind == ErrorKind::synthesis_degenerate || kind == ErrorKind::degenerate_fit ||
         kind == ErrorKind::undefined_auc;
}

}  // namespace qoe
