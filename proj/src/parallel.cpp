#include "mfdim/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mfdim {

namespace {
int g_workers = 0;
}

void setWorkerCount(int n) { g_workers = n < 0 ? 0 : n; }

int workerCount() {
#ifdef _OPENMP
    return g_workers > 0 ? g_workers : omp_get_max_threads();
#else
    return 1;
#endif
}

void parallelFor(int64_t n, const std::function<void(int64_t)>& body) {
#ifdef _OPENMP
    const int threads = workerCount();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int64_t i = 0; i < n; ++i) body(i);
#else
    serialFor(n, body);
#endif
}

void serialFor(int64_t n, const std::function<void(int64_t)>& body) {
    for (int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace mfdim
