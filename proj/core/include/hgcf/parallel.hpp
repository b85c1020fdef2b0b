#pragma once

#include <cstddef>
#include <functional>

namespace hgcf {

// Worker count for numeric kernels. Defaults to 1; HGCF_NUM_THREADS overrides.
int num_threads();
void set_num_threads(int n);

// Runs body(begin, end) over a static partition of [0, n). Each index is
// visited by exactly one worker, so per-row results do not depend on the
// thread count.
void parallel_for_rows(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hgcf
