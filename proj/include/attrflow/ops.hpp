#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "attrflow/kernels.hpp"
#include "attrflow/tensor.hpp"

// Differentiable ops. Each op computes its value eagerly through the
// kernels and, when grad mode is on and an input requires grad, records a
// backward closure on the result node. Closures accumulate into parent
// grads only for parents that require grad.
namespace attrflow::ops {

namespace detail_ops {

template <typename T>
bool any_requires(std::initializer_list<const Tensor<T>*> ts) {
    if (!grad_mode()) return false;
    for (const auto* t : ts)
        if (t->requires_grad()) return true;
    return false;
}

template <typename T>
void attach(Tensor<T>& out, std::initializer_list<const Tensor<T>*> parents,
            std::function<void(detail::Node<T>&)> fn) {
    if (!any_requires<T>(parents)) return;
    auto n = out.node();
    n->requires_grad = true;
    for (const auto* p : parents) n->parents.push_back(p->node());
    n->backward_fn = std::move(fn);
}

template <typename T>
void check_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
    if (a.shape() != b.shape())
        throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                    shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

}  // namespace detail_ops

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    detail_ops::check_same_shape(a, b, "add");
    Tensor<T> out = Tensor<T>::zeros(a.shape());
    const int64_t n = a.numel();
    const T* pa = a.data();
    const T* pb = b.data();
    T* po = out.data();
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] + pb[i];
    detail_ops::attach<T>(out, {&a, &b}, [an = a.node(), bn = b.node()](detail::Node<T>& self) {
        const int64_t n = self.numel();
        if (an->requires_grad) {
            T* g = an->grad_data();
            for (int64_t i = 0; i < n; ++i) g[i] += self.grad[i];
        }
        if (bn->requires_grad) {
            T* g = bn->grad_data();
            for (int64_t i = 0; i < n; ++i) g[i] += self.grad[i];
        }
    });
    return out;
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    detail_ops::check_same_shape(a, b, "sub");
    Tensor<T> out = Tensor<T>::zeros(a.shape());
    const int64_t n = a.numel();
    const T* pa = a.data();
    const T* pb = b.data();
    T* po = out.data();
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] - pb[i];
    detail_ops::attach<T>(out, {&a, &b}, [an = a.node(), bn = b.node()](detail::Node<T>& self) {
        const int64_t n = self.numel();
        if (an->requires_grad) {
            T* g = an->grad_data();
            for (int64_t i = 0; i < n; ++i) g[i] += self.grad[i];
        }
        if (bn->requires_grad) {
            T* g = bn->grad_data();
            for (int64_t i = 0; i < n; ++i) g[i] -= self.grad[i];
        }
    });
    return out;
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    detail_ops::check_same_shape(a, b, "mul");
    Tensor<T> out = Tensor<T>::zeros(a.shape());
    const int64_t n = a.numel();
    const T* pa = a.data();
    const T* pb = b.data();
    T* po = out.data();
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
    detail_ops::attach<T>(out, {&a, &b}, [an = a.node(), bn = b.node()](detail::Node<T>& self) {
        const int64_t n = self.numel();
        if (an->requires_grad) {
            T* g = an->grad_data();
            for (int64_t i = 0; i < n; ++i) g[i] += self.grad[i] * bn->value[i];
        }
        if (bn->requires_grad) {
            T* g = bn->grad_data();
            for (int64_t i = 0; i < n; ++i) g[i] += self.grad[i] * an->value[i];
        }
    });
    return out;
}

template <typename T>
Tensor<T> square(const Tensor<T>& a) {
    Tensor<T> out = Tensor<T>::zeros(a.shape());
    const int64_t n = a.numel();
    const T* pa = a.data();
    T* po = out.data();
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * pa[i];
    detail_ops::attach<T>(out, {&a}, [an = a.node()](detail::Node<T>& self) {
        if (!an->requires_grad) return;
        T* g = an->grad_data();
        const int64_t n = self.numel();
        for (int64_t i = 0; i < n; ++i) g[i] += T(2) * an->value[i] * self.grad[i];
    });
    return out;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) {
    Tensor<T> out = Tensor<T>::zeros(a.shape());
    const int64_t n = a.numel();
    const T* pa = a.data();
    T* po = out.data();
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * s;
    detail_ops::attach<T>(out, {&a}, [an = a.node(), s](detail::Node<T>& self) {
        if (!an->requires_grad) return;
        T* g = an->grad_data();
        const int64_t n = self.numel();
        for (int64_t i = 0; i < n; ++i) g[i] += s * self.grad[i];
    });
    return out;
}

template <typename T>
Tensor<T> silu(const Tensor<T>& a) {
    Tensor<T> out = Tensor<T>::zeros(a.shape());
    const int64_t n = a.numel();
    const T* pa = a.data();
    T* po = out.data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && n > 4096)
    for (int64_t i = 0; i < n; ++i) {
        const T s = T(1) / (T(1) + std::exp(-pa[i]));
        po[i] = pa[i] * s;
    }
    detail_ops::attach<T>(out, {&a}, [an = a.node()](detail::Node<T>& self) {
        if (!an->requires_grad) return;
        T* g = an->grad_data();
        const int64_t n = self.numel();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && n > 4096)
        for (int64_t i = 0; i < n; ++i) {
            const T x = an->value[i];
            const T s = T(1) / (T(1) + std::exp(-x));
            g[i] += self.grad[i] * (s + x * s * (T(1) - s));
        }
    });
    return out;
}

// C = A(m x k) * B(k x n)
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    const int m = a.rows(), k = a.cols();
    const int k2 = b.rows(), n = b.cols();
    if (k != k2)
        throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                    shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    Tensor<T> out = Tensor<T>::zeros({m, n});
    kernels::matmul(a.data(), b.data(), out.data(), m, k, n);
    detail_ops::attach<T>(out, {&a, &b},
                          [an = a.node(), bn = b.node(), m, k, n](detail::Node<T>& self) {
                              if (an->requires_grad)
                                  kernels::matmul_nt_acc(self.grad.data(), bn->value.data(),
                                                         an->grad_data(), m, n, k);
                              if (bn->requires_grad)
                                  kernels::matmul_tn_acc(an->value.data(), self.grad.data(),
                                                         bn->grad_data(), m, k, n);
                          });
    return out;
}

// Segmented matmuls for batched attention. q: [S*m x d], k: [S*n x d];
// result [S*m x n], one independent product per segment.
template <typename T>
Tensor<T> bmm_nt(const Tensor<T>& q, const Tensor<T>& k, int segments) {
    const int d = q.cols();
    if (k.cols() != d)
        throw std::invalid_argument("bmm_nt: feature dims disagree, " + shape_str(q.shape()) +
                                    " vs " + shape_str(k.shape()));
    if (q.rows() % segments != 0 || k.rows() % segments != 0)
        throw std::invalid_argument("bmm_nt: rows not divisible by segment count");
    const int m = q.rows() / segments;
    const int n = k.rows() / segments;
    Tensor<T> out = Tensor<T>::zeros({segments * m, n});
#pragma omp parallel for schedule(static) if (num_threads() > 1 && segments > 1)
    for (int s = 0; s < segments; ++s) {
        kernels::ref::matmul_nt(q.data() + static_cast<size_t>(s) * m * d,
                                k.data() + static_cast<size_t>(s) * n * d,
                                out.data() + static_cast<size_t>(s) * m * n, m, d, n);
    }
    detail_ops::attach<T>(out, {&q, &k},
                          [qn = q.node(), kn = k.node(), segments, m, n, d](detail::Node<T>& self) {
                              if (qn->requires_grad) {
                                  T* dq = qn->grad_data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && segments > 1)
                                  for (int s = 0; s < segments; ++s)
                                      kernels::ref::matmul_acc(self.grad.data() + static_cast<size_t>(s) * m * n,
                                                               kn->value.data() + static_cast<size_t>(s) * n * d,
                                                               dq + static_cast<size_t>(s) * m * d, m, n, d);
                              }
                              if (kn->requires_grad) {
                                  T* dk = kn->grad_data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && segments > 1)
                                  for (int s = 0; s < segments; ++s)
                                      kernels::ref::matmul_tn_acc(self.grad.data() + static_cast<size_t>(s) * m * n,
                                                                  qn->value.data() + static_cast<size_t>(s) * m * d,
                                                                  dk + static_cast<size_t>(s) * n * d, m, n, d);
                              }
                          });
    return out;
}

// p: [S*m x n] (attention weights), v: [S*n x d] -> [S*m x d]
template <typename T>
Tensor<T> bmm(const Tensor<T>& p, const Tensor<T>& v, int segments) {
    if (p.rows() % segments != 0 || v.rows() % segments != 0)
        throw std::invalid_argument("bmm: rows not divisible by segment count");
    const int m = p.rows() / segments;
    const int n = p.cols();
    if (v.rows() / segments != n)
        throw std::invalid_argument("bmm: inner dims disagree, " + shape_str(p.shape()) +
                                    " vs " + shape_str(v.shape()));
    const int d = v.cols();
    Tensor<T> out = Tensor<T>::zeros({segments * m, d});
#pragma omp parallel for schedule(static) if (num_threads() > 1 && segments > 1)
    for (int s = 0; s < segments; ++s) {
        kernels::ref::matmul(p.data() + static_cast<size_t>(s) * m * n,
                             v.data() + static_cast<size_t>(s) * n * d,
                             out.data() + static_cast<size_t>(s) * m * d, m, n, d);
    }
    detail_ops::attach<T>(out, {&p, &v},
                          [pn = p.node(), vn = v.node(), segments, m, n, d](detail::Node<T>& self) {
                              if (pn->requires_grad) {
                                  T* dp = pn->grad_data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && segments > 1)
                                  for (int s = 0; s < segments; ++s)
                                      kernels::ref::matmul_nt_acc(self.grad.data() + static_cast<size_t>(s) * m * d,
                                                                  vn->value.data() + static_cast<size_t>(s) * n * d,
                                                                  dp + static_cast<size_t>(s) * m * n, m, d, n);
                              }
                              if (vn->requires_grad) {
                                  T* dv = vn->grad_data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && segments > 1)
                                  for (int s = 0; s < segments; ++s)
                                      kernels::ref::matmul_tn_acc(pn->value.data() + static_cast<size_t>(s) * m * n,
                                                                  self.grad.data() + static_cast<size_t>(s) * m * d,
                                                                  dv + static_cast<size_t>(s) * n * d, m, n, d);
                              }
                          });
    return out;
}

// softmax along the last axis
template <typename T>
Tensor<T> softmax(const Tensor<T>& x) {
    Tensor<T> out = Tensor<T>::zeros(x.shape());
    kernels::softmax_rows(x.data(), out.data(), x.rows(), x.cols());
    detail_ops::attach<T>(out, {&x}, [xn = x.node(), on = out.node(), r = x.rows(),
                                      c = x.cols()](detail::Node<T>& self) {
        if (!xn->requires_grad) return;
        kernels::softmax_rows_backward(on->value.data(), self.grad.data(), xn->grad_data(), r, c);
    });
    return out;
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                     T eps = T(1e-5)) {
    const int c = x.cols();
    if (gain.numel() != c || bias.numel() != c)
        throw std::invalid_argument("layer_norm: affine params " + shape_str(gain.shape()) +
                                    "/" + shape_str(bias.shape()) + " do not match last dim of " +
                                    shape_str(x.shape()));
    Tensor<T> out = Tensor<T>::zeros(x.shape());
    kernels::layer_norm_rows(x.data(), gain.data(), bias.data(), out.data(), x.rows(), c, eps);
    detail_ops::attach<T>(out, {&x, &gain, &bias},
                          [xn = x.node(), gn = gain.node(), bn = bias.node(), r = x.rows(), c,
                           eps](detail::Node<T>& self) {
                              std::vector<T> mean_buf(r), rstd_buf(r);
                              std::vector<T> dx_dummy;
                              T* dx = nullptr;
                              if (xn->requires_grad) {
                                  dx = xn->grad_data();
                              } else {
                                  dx_dummy.assign(static_cast<size_t>(r) * c, T(0));
                                  dx = dx_dummy.data();
                              }
                              kernels::layer_norm_rows_backward(
                                  xn->value.data(), gn->value.data(), self.grad.data(), dx,
                                  gn->requires_grad ? gn->grad_data() : nullptr,
                                  bn->requires_grad ? bn->grad_data() : nullptr,
                                  mean_buf.data(), rstd_buf.data(), r, c, eps);
                          });
    return out;
}

// broadcast-add a length-c vector onto every row
template <typename T>
Tensor<T> add_row_vector(const Tensor<T>& x, const Tensor<T>& v) {
    const int c = x.cols();
    if (v.numel() != c)
        throw std::invalid_argument("add_row_vector: " + shape_str(v.shape()) +
                                    " does not match last dim of " + shape_str(x.shape()));
    Tensor<T> out = Tensor<T>::zeros(x.shape());
    const int r = x.rows();
    const T* px = x.data();
    const T* pv = v.data();
    T* po = out.data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && r > 1)
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            po[static_cast<size_t>(i) * c + j] = px[static_cast<size_t>(i) * c + j] + pv[j];
    detail_ops::attach<T>(out, {&x, &v}, [xn = x.node(), vn = v.node(), r, c](detail::Node<T>& self) {
        if (xn->requires_grad) {
            T* g = xn->grad_data();
            const int64_t n = self.numel();
            for (int64_t i = 0; i < n; ++i) g[i] += self.grad[i];
        }
        if (vn->requires_grad) kernels::column_sum_acc(self.grad.data(), vn->grad_data(), r, c);
    });
    return out;
}

// x: [S*n x c] plus one vector per segment, v: [S x c]
template <typename T>
Tensor<T> add_segment_vector(const Tensor<T>& x, const Tensor<T>& v, int segments) {
    const int c = x.cols();
    if (v.cols() != c || v.rows() != segments || x.rows() % segments != 0)
        throw std::invalid_argument("add_segment_vector: incompatible shapes " +
                                    shape_str(x.shape()) + " vs " + shape_str(v.shape()));
    const int n = x.rows() / segments;
    Tensor<T> out = Tensor<T>::zeros(x.shape());
    const T* px = x.data();
    const T* pv = v.data();
    T* po = out.data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && segments > 1)
    for (int s = 0; s < segments; ++s)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < c; ++j) {
                const size_t row = static_cast<size_t>(s) * n + i;
                po[row * c + j] = px[row * c + j] + pv[static_cast<size_t>(s) * c + j];
            }
    detail_ops::attach<T>(out, {&x, &v},
                          [xn = x.node(), vn = v.node(), segments, n, c](detail::Node<T>& self) {
                              if (xn->requires_grad) {
                                  T* g = xn->grad_data();
                                  const int64_t total = self.numel();
                                  for (int64_t i = 0; i < total; ++i) g[i] += self.grad[i];
                              }
                              if (vn->requires_grad) {
                                  T* g = vn->grad_data();
                                  for (int s = 0; s < segments; ++s)
                                      kernels::column_sum_acc(
                                          self.grad.data() + static_cast<size_t>(s) * n * c,
                                          g + static_cast<size_t>(s) * c, n, c);
                              }
                          });
    return out;
}

// x: [S*n x c] plus a tile v: [n x c] repeated across segments
template <typename T>
Tensor<T> add_tiled_rows(const Tensor<T>& x, const Tensor<T>& v, int segments) {
    const int c = x.cols();
    if (v.cols() != c || x.rows() != segments * v.rows())
        throw std::invalid_argument("add_tiled_rows: incompatible shapes " +
                                    shape_str(x.shape()) + " vs " + shape_str(v.shape()));
    const int n = v.rows();
    Tensor<T> out = Tensor<T>::zeros(x.shape());
    const T* px = x.data();
    const T* pv = v.data();
    T* po = out.data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && segments > 1)
    for (int s = 0; s < segments; ++s)
        for (int64_t i = 0; i < static_cast<int64_t>(n) * c; ++i)
            po[static_cast<size_t>(s) * n * c + i] = px[static_cast<size_t>(s) * n * c + i] + pv[i];
    detail_ops::attach<T>(out, {&x, &v},
                          [xn = x.node(), vn = v.node(), segments, n, c](detail::Node<T>& self) {
                              if (xn->requires_grad) {
                                  T* g = xn->grad_data();
                                  const int64_t total = self.numel();
                                  for (int64_t i = 0; i < total; ++i) g[i] += self.grad[i];
                              }
                              if (vn->requires_grad) {
                                  T* g = vn->grad_data();
                                  for (int s = 0; s < segments; ++s) {
                                      const T* gs = self.grad.data() + static_cast<size_t>(s) * n * c;
                                      for (int64_t i = 0; i < static_cast<int64_t>(n) * c; ++i)
                                          g[i] += gs[i];
                                  }
                              }
                          });
    return out;
}

template <typename T>
Tensor<T> concat_rows(const std::vector<Tensor<T>>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
    const int c = parts[0].cols();
    int total = 0;
    for (const auto& p : parts) {
        if (p.cols() != c)
            throw std::invalid_argument("concat_rows: column mismatch " +
                                        shape_str(parts[0].shape()) + " vs " + shape_str(p.shape()));
        total += p.rows();
    }
    Tensor<T> out = Tensor<T>::zeros({total, c});
    T* po = out.data();
    int64_t off = 0;
    bool any = false;
    for (const auto& p : parts) {
        std::copy(p.data(), p.data() + p.numel(), po + off);
        off += p.numel();
        any = any || p.requires_grad();
    }
    if (grad_mode() && any) {
        auto n = out.node();
        n->requires_grad = true;
        std::vector<std::shared_ptr<detail::Node<T>>> pnodes;
        for (const auto& p : parts) {
            n->parents.push_back(p.node());
            pnodes.push_back(p.node());
        }
        n->backward_fn = [pnodes](detail::Node<T>& self) {
            int64_t off = 0;
            for (const auto& pn : pnodes) {
                const int64_t sz = pn->numel();
                if (pn->requires_grad) {
                    T* g = pn->grad_data();
                    for (int64_t i = 0; i < sz; ++i) g[i] += self.grad[off + i];
                }
                off += sz;
            }
        };
    }
    return out;
}

template <typename T>
Tensor<T> slice_rows(const Tensor<T>& x, int row0, int row1) {
    const int r = x.rows(), c = x.cols();
    if (row0 < 0 || row1 > r || row0 >= row1)
        throw std::invalid_argument("slice_rows: bad range [" + std::to_string(row0) + "," +
                                    std::to_string(row1) + ") for " + shape_str(x.shape()));
    Tensor<T> out = Tensor<T>::zeros({row1 - row0, c});
    std::copy(x.data() + static_cast<size_t>(row0) * c, x.data() + static_cast<size_t>(row1) * c,
              out.data());
    detail_ops::attach<T>(out, {&x}, [xn = x.node(), row0, c](detail::Node<T>& self) {
        if (!xn->requires_grad) return;
        T* g = xn->grad_data() + static_cast<size_t>(row0) * c;
        const int64_t n = self.numel();
        for (int64_t i = 0; i < n; ++i) g[i] += self.grad[i];
    });
    return out;
}

// row gather (embedding lookup). Backward scatter-adds serially in row
// order: duplicate indices are expected.
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& table, const std::vector<int>& idx) {
    const int v = table.rows(), c = table.cols();
    Tensor<T> out = Tensor<T>::zeros({static_cast<int>(idx.size()), c});
    T* po = out.data();
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= v)
            throw std::out_of_range("gather_rows: index " + std::to_string(idx[i]) +
                                    " out of vocabulary of size " + std::to_string(v));
        std::copy(table.data() + static_cast<size_t>(idx[i]) * c,
                  table.data() + static_cast<size_t>(idx[i] + 1) * c, po + i * c);
    }
    detail_ops::attach<T>(out, {&table}, [tn = table.node(), idx, c](detail::Node<T>& self) {
        if (!tn->requires_grad) return;
        T* g = tn->grad_data();
        for (size_t i = 0; i < idx.size(); ++i)
            for (int j = 0; j < c; ++j)
                g[static_cast<size_t>(idx[i]) * c + j] += self.grad[i * c + j];
    });
    return out;
}

// out[i] = in[perm[i]] for a bijective element permutation (reshape /
// head-split / patchify all reduce to this). Backward scatters through the
// same map; bijectivity keeps the parallel scatter race-free.
template <typename T>
Tensor<T> permute_elements(const Tensor<T>& x, std::shared_ptr<const std::vector<int64_t>> perm,
                           std::vector<int> out_shape) {
    Tensor<T> out = Tensor<T>::zeros(std::move(out_shape));
    if (out.numel() != x.numel() || static_cast<int64_t>(perm->size()) != x.numel())
        throw std::invalid_argument("permute_elements: size mismatch " + shape_str(x.shape()) +
                                    " -> " + shape_str(out.shape()));
    const T* px = x.data();
    T* po = out.data();
    const int64_t n = x.numel();
    const int64_t* pp = perm->data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && n > 4096)
    for (int64_t i = 0; i < n; ++i) po[i] = px[pp[i]];
    detail_ops::attach<T>(out, {&x}, [xn = x.node(), perm](detail::Node<T>& self) {
        if (!xn->requires_grad) return;
        T* g = xn->grad_data();
        const int64_t n = self.numel();
        const int64_t* pp = perm->data();
#pragma omp parallel for schedule(static) if (num_threads() > 1 && n > 4096)
        for (int64_t i = 0; i < n; ++i) g[pp[i]] += self.grad[i];
    });
    return out;
}

template <typename T>
Tensor<T> sum_all(const Tensor<T>& x) {
    Tensor<T> out = Tensor<T>::zeros({1});
    T acc = T(0);
    const T* px = x.data();
    const int64_t n = x.numel();
    for (int64_t i = 0; i < n; ++i) acc += px[i];
    out.data()[0] = acc;
    detail_ops::attach<T>(out, {&x}, [xn = x.node()](detail::Node<T>& self) {
        if (!xn->requires_grad) return;
        T* g = xn->grad_data();
        const int64_t n = xn->numel();
        for (int64_t i = 0; i < n; ++i) g[i] += self.grad[0];
    });
    return out;
}

template <typename T>
Tensor<T> mean_all(const Tensor<T>& x) {
    return scale(sum_all(x), T(1) / static_cast<T>(x.numel()));
}

// single-segment convenience: softmax(Q K^T / sqrt(d)) V
template <typename T>
Tensor<T> scaled_dot_product_attention(const Tensor<T>& q, const Tensor<T>& k,
                                       const Tensor<T>& v) {
    if (q.cols() != k.cols())
        throw std::invalid_argument("attention: Q/K dims disagree, " + shape_str(q.shape()) +
                                    " vs " + shape_str(k.shape()));
    if (k.rows() != v.rows())
        throw std::invalid_argument("attention: K/V row counts disagree, " +
                                    shape_str(k.shape()) + " vs " + shape_str(v.shape()));
    const T inv_sqrt_d = T(1) / std::sqrt(static_cast<T>(q.cols()));
    Tensor<T> scores = scale(bmm_nt(q, k, 1), inv_sqrt_d);
    return bmm(softmax(scores), v, 1);
}

}  // namespace attrflow::ops
