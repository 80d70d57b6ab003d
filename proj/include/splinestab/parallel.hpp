#pragma once

#include <cstddef>
#include <functional>

namespace splinestab {

/// Concurrency cap: SPLINESTAB_THREADS if set (>=1), else hardware concurrency.
int max_threads();

/// Runs fn(begin, end) over consecutive blocks of [0, n).
///
/// Block boundaries depend only on n and block_size, never on the number of
/// worker threads, so any reduction performed per block and combined in block
/// order is reproducible for every SPLINESTAB_THREADS setting.
void parallel_blocks(std::size_t n, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace splinestab
