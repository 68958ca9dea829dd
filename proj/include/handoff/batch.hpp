#pragma once

#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace handoff::batch {

/// Per-page parallel map. Results land in index order, so any reduction
/// over the returned vector is deterministic regardless of thread count.
/// `jobs` <= 1 (or a build without OpenMP) runs the serial reference path.
template <class T, class F>
std::vector<T> map_pages(int n, F&& f, int jobs = 0) {
    std::vector<T> out(n);
#ifdef _OPENMP
    if (jobs != 1) {
        if (jobs > 1) omp_set_num_threads(jobs);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
#endif
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
}

/// Serial reference kept alongside the parallel kernel for equivalence
/// testing and benchmarking.
template <class T, class F>
std::vector<T> map_pages_serial(int n, F&& f) {
    std::vector<T> out(n);
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
}

}  // namespace handoff::batch
