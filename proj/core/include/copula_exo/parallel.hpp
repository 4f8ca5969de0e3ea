#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace copula_exo {

/// Worker threads to use: COPULA_EXO_THREADS when set to a positive value,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t configured_threads();

/// Runs body(i) for i in [0, n) on up to configured_threads() workers.
/// Iterations must write only to their own slots. If any iteration throws,
/// the exception from the lowest failing index is rethrown after all workers
/// have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace copula_exo
