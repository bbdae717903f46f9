#pragma once

namespace attrflow {

// Process-wide worker count for the OpenMP kernels. 1 by default: every
// kernel splits work only across independent output elements with a fixed
// per-element accumulation order, so results are bit-identical for any
// thread count, but 1 keeps the reproducibility contract trivially auditable.
void set_num_threads(int n);
int num_threads();

}  // namespace attrflow
