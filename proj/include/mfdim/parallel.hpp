#pragma once

#include <cstdint>
#include <functional>

namespace mfdim {

// Worker count used by parallelFor. 0 means "all available cores".
// Results never depend on this value: parallel loops only ever write to
// disjoint, index-addressed slots and all reductions happen serially
// afterwards.
void setWorkerCount(int n);
int workerCount();

// Parallel map over [0, n). Body must be pure per index apart from writing
// its own output slot.
void parallelFor(int64_t n, const std::function<void(int64_t)>& body);

// Serial reference loop, kept so tests can assert the parallel path is a
// pure reordering of the same work.
void serialFor(int64_t n, const std::function<void(int64_t)>& body);

}  // namespace mfdim
