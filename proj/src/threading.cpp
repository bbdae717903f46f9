#include "attrflow/threading.hpp"

#include <omp.h>

namespace attrflow {

namespace {
int g_threads = 1;
}

void set_num_threads(int n) {
    if (n < 1) n = 1;
    g_threads = n;
    omp_set_num_threads(n);
}

int num_threads() { return g_threads; }

}  // namespace attrflow
