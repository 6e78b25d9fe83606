#pragma once

#include <cstddef>
#include <exception>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace arena {

/// Runs body(i) for i in [0, count). With parallelism ≤ 1 (or without
/// OpenMP) this is a plain serial loop — the reference path used by tests.
/// The parallel path distributes iterations across OpenMP threads; the
/// first exception thrown by any iteration is rethrown after the loop.
/// Callers must make iterations independent and write results to
/// pre-assigned slots so the outcome cannot depend on scheduling.
template <typename Body>
void for_each_index(std::size_t count, int parallelism, Body&& body) {
#if defined(_OPENMP)
    if (parallelism > 1 && count > 1) {
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(parallelism)
        for (long long i = 0; i < static_cast<long long>(count); ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
        return;
    }
#else
    (void)parallelism;
#endif
    for (std::size_t i = 0; i < count; ++i) body(i);
}

/// Degree of hardware parallelism OpenMP would use by default.
inline int default_parallelism() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace arena
