#pragma once

#include <functional>

namespace hrb {

/// Number of workers actually used for `requested` (0 = hardware default).
int resolve_threads(int requested);

/// Runs fn(i) for i in [0, count) on a static block partition over
/// `threads` workers. Work item i always covers the same indices no matter
/// the thread count, so any output written to slot i is reproducible.
/// Exceptions are captured and the first one is rethrown after the join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace hrb
