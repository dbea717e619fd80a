// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace qoe::workbench {

/// Runs task(0) .. task(count - 1) on up to `workers` threads (0 = hardware
/// concurrency). Tasks must not share mutable state. If any task throws, the
/// remaining unstarted tasks are skipped and the exception of the lowest
/// failing index is rethrown, so errors do not depend on scheduling.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task);

}  // namespace qoe::workbench
