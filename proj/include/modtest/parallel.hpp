#pragma once

#include <functional>

namespace modtest {

/// Runs body(0..count-1) on up to `threads` workers. Tasks claim indices
/// from a shared counter; if several tasks throw, the exception from the
/// lowest index is rethrown so failures are schedule-independent.
void parallel_for(int count, int threads,
                  const std::function<void(int)>& body);

}  // namespace modtest
