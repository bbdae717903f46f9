#pragma once

#include <cmath>
#include <cstddef>

#include "attrflow/threading.hpp"

// Dense kernels behind the autodiff ops. The parallel versions split work
// across independent output rows/elements only; the accumulation order per
// output element is identical to the serial reference, so omp and ref
// variants agree bit-for-bit and results do not depend on the thread count.
namespace attrflow::kernels {

namespace ref {

// C = A(m x k) * B(k x n)
template <typename T>
void matmul(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        T* ci = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) ci[j] = T(0);
        for (int p = 0; p < k; ++p) {
            const T aip = a[static_cast<size_t>(i) * k + p];
            const T* bp = b + static_cast<size_t>(p) * n;
            for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

// C = A(m x k) * B(n x k)^T
template <typename T>
void matmul_nt(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const T* ai = a + static_cast<size_t>(i) * k;
        for (int j = 0; j < n; ++j) {
            const T* bj = b + static_cast<size_t>(j) * k;
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            c[static_cast<size_t>(i) * n + j] = acc;
        }
    }
}

// C += A(m x k) * B(k x n)
template <typename T>
void matmul_acc(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        T* ci = c + static_cast<size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const T aip = a[static_cast<size_t>(i) * k + p];
            const T* bp = b + static_cast<size_t>(p) * n;
            for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

// C += A(m x k) * B(n x k)^T
template <typename T>
void matmul_nt_acc(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const T* ai = a + static_cast<size_t>(i) * k;
        for (int j = 0; j < n; ++j) {
            const T* bj = b + static_cast<size_t>(j) * k;
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            c[static_cast<size_t>(i) * n + j] += acc;
        }
    }
}

// C(k x n) += A(m x k)^T * B(m x n)
template <typename T>
void matmul_tn_acc(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int p = 0; p < k; ++p) {
        T* cp = c + static_cast<size_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            const T api = a[static_cast<size_t>(i) * k + p];
            const T* bi = b + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) cp[j] += api * bi[j];
        }
    }
}

// y = softmax(x) per row, max-subtracted
template <typename T>
void softmax_rows(const T* x, T* y, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const T* xi = x + static_cast<size_t>(i) * cols;
        T* yi = y + static_cast<size_t>(i) * cols;
        T mx = xi[0];
        for (int j = 1; j < cols; ++j) mx = xi[j] > mx ? xi[j] : mx;
        T sum = T(0);
        for (int j = 0; j < cols; ++j) {
            yi[j] = std::exp(xi[j] - mx);
            sum += yi[j];
        }
        const T inv = T(1) / sum;
        for (int j = 0; j < cols; ++j) yi[j] *= inv;
    }
}

// per-row layer norm with affine, eps inside the sqrt
template <typename T>
void layer_norm_rows(const T* x, const T* gain, const T* bias, T* y,
                     int rows, int cols, T eps) {
    for (int i = 0; i < rows; ++i) {
        const T* xi = x + static_cast<size_t>(i) * cols;
        T* yi = y + static_cast<size_t>(i) * cols;
        T mean = T(0);
        for (int j = 0; j < cols; ++j) mean += xi[j];
        mean /= T(cols);
        T var = T(0);
        for (int j = 0; j < cols; ++j) {
            const T d = xi[j] - mean;
            var += d * d;
        }
        var /= T(cols);
        const T rstd = T(1) / std::sqrt(var + eps);
        for (int j = 0; j < cols; ++j) yi[j] = (xi[j] - mean) * rstd * gain[j] + bias[j];
    }
}

}  // namespace ref

// ---- OpenMP versions --------------------------------------------------

template <typename T>
void matmul(const T* a, const T* b, T* c, int m, int k, int n) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && m > 1)
    for (int i = 0; i < m; ++i) {
        T* ci = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) ci[j] = T(0);
        for (int p = 0; p < k; ++p) {
            const T aip = a[static_cast<size_t>(i) * k + p];
            const T* bp = b + static_cast<size_t>(p) * n;
            for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

// C += A(m x k) * B(k x n)
template <typename T>
void matmul_acc(const T* a, const T* b, T* c, int m, int k, int n) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && m > 1)
    for (int i = 0; i < m; ++i) {
        T* ci = c + static_cast<size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const T aip = a[static_cast<size_t>(i) * k + p];
            const T* bp = b + static_cast<size_t>(p) * n;
            for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

template <typename T>
void matmul_nt(const T* a, const T* b, T* c, int m, int k, int n) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && m > 1)
    for (int i = 0; i < m; ++i) {
        const T* ai = a + static_cast<size_t>(i) * k;
        for (int j = 0; j < n; ++j) {
            const T* bj = b + static_cast<size_t>(j) * k;
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            c[static_cast<size_t>(i) * n + j] = acc;
        }
    }
}

// C += A(m x k) * B(n x k)^T
template <typename T>
void matmul_nt_acc(const T* a, const T* b, T* c, int m, int k, int n) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && m > 1)
    for (int i = 0; i < m; ++i) {
        const T* ai = a + static_cast<size_t>(i) * k;
        for (int j = 0; j < n; ++j) {
            const T* bj = b + static_cast<size_t>(j) * k;
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            c[static_cast<size_t>(i) * n + j] += acc;
        }
    }
}

// C(k x n) += A(m x k)^T * B(m x n); parallel over output rows p
template <typename T>
void matmul_tn_acc(const T* a, const T* b, T* c, int m, int k, int n) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && k > 1)
    for (int p = 0; p < k; ++p) {
        T* cp = c + static_cast<size_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            const T api = a[static_cast<size_t>(i) * k + p];
            const T* bi = b + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) cp[j] += api * bi[j];
        }
    }
}

template <typename T>
void softmax_rows(const T* x, T* y, int rows, int cols) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && rows > 1)
    for (int i = 0; i < rows; ++i) {
        const T* xi = x + static_cast<size_t>(i) * cols;
        T* yi = y + static_cast<size_t>(i) * cols;
        T mx = xi[0];
        for (int j = 1; j < cols; ++j) mx = xi[j] > mx ? xi[j] : mx;
        T sum = T(0);
        for (int j = 0; j < cols; ++j) {
            yi[j] = std::exp(xi[j] - mx);
            sum += yi[j];
        }
        const T inv = T(1) / sum;
        for (int j = 0; j < cols; ++j) yi[j] *= inv;
    }
}

// dx += softmax backward given y = softmax(x) and upstream dy
template <typename T>
void softmax_rows_backward(const T* y, const T* dy, T* dx, int rows, int cols) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && rows > 1)
    for (int i = 0; i < rows; ++i) {
        const T* yi = y + static_cast<size_t>(i) * cols;
        const T* dyi = dy + static_cast<size_t>(i) * cols;
        T* dxi = dx + static_cast<size_t>(i) * cols;
        T dot = T(0);
        for (int j = 0; j < cols; ++j) dot += yi[j] * dyi[j];
        for (int j = 0; j < cols; ++j) dxi[j] += yi[j] * (dyi[j] - dot);
    }
}

template <typename T>
void layer_norm_rows(const T* x, const T* gain, const T* bias, T* y,
                     int rows, int cols, T eps) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && rows > 1)
    for (int i = 0; i < rows; ++i) {
        const T* xi = x + static_cast<size_t>(i) * cols;
        T* yi = y + static_cast<size_t>(i) * cols;
        T mean = T(0);
        for (int j = 0; j < cols; ++j) mean += xi[j];
        mean /= T(cols);
        T var = T(0);
        for (int j = 0; j < cols; ++j) {
            const T d = xi[j] - mean;
            var += d * d;
        }
        var /= T(cols);
        const T rstd = T(1) / std::sqrt(var + eps);
        for (int j = 0; j < cols; ++j) yi[j] = (xi[j] - mean) * rstd * gain[j] + bias[j];
    }
}

// layer norm backward. Row statistics are computed once; dgain/dbias are
// reduced per column in fixed row order so results match the serial run.
// `mean_buf`/`rstd_buf` are caller-provided scratch of length `rows`.
template <typename T>
void layer_norm_rows_backward(const T* x, const T* gain, const T* dy,
                              T* dx, T* dgain, T* dbias,
                              T* mean_buf, T* rstd_buf,
                              int rows, int cols, T eps) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && rows > 1)
    for (int i = 0; i < rows; ++i) {
        const T* xi = x + static_cast<size_t>(i) * cols;
        const T* dyi = dy + static_cast<size_t>(i) * cols;
        T* dxi = dx + static_cast<size_t>(i) * cols;
        T mean = T(0);
        for (int j = 0; j < cols; ++j) mean += xi[j];
        mean /= T(cols);
        T var = T(0);
        for (int j = 0; j < cols; ++j) {
            const T d = xi[j] - mean;
            var += d * d;
        }
        var /= T(cols);
        const T rstd = T(1) / std::sqrt(var + eps);
        mean_buf[i] = mean;
        rstd_buf[i] = rstd;

        T sum_g = T(0), sum_gx = T(0);
        for (int j = 0; j < cols; ++j) {
            const T g = dyi[j] * gain[j];
            sum_g += g;
            sum_gx += g * (xi[j] - mean) * rstd;
        }
        for (int j = 0; j < cols; ++j) {
            const T xhat = (xi[j] - mean) * rstd;
            const T g = dyi[j] * gain[j];
            dxi[j] += (g - sum_g / T(cols) - xhat * sum_gx / T(cols)) * rstd;
        }
    }
    if (dgain || dbias) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && cols > 1)
        for (int j = 0; j < cols; ++j) {
            T dg = T(0), db = T(0);
            for (int i = 0; i < rows; ++i) {
                const T dyij = dy[static_cast<size_t>(i) * cols + j];
                dg += dyij * (x[static_cast<size_t>(i) * cols + j] - mean_buf[i]) * rstd_buf[i];
                db += dyij;
            }
            if (dgain) dgain[j] += dg;
            if (dbias) dbias[j] += db;
        }
    }
}

// column sums: out(n) += sum_i A(m x n) rows
template <typename T>
void column_sum_acc(const T* a, T* out, int m, int n) {
#pragma omp parallel for schedule(static) if (num_threads() > 1 && n > 1)
    for (int j = 0; j < n; ++j) {
        T acc = T(0);
        for (int i = 0; i < m; ++i) acc += a[static_cast<size_t>(i) * n + j];
        out[j] += acc;
    }
}

}  // namespace attrflow::kernels
