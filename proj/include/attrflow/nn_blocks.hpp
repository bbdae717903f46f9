#pragma once

#include <memory>
#include <string>
#include <vector>

#include "attrflow/ops.hpp"
#include "attrflow/params.hpp"
#include "attrflow/rng.hpp"

namespace attrflow {

template <typename T>
Tensor<T> init_linear(ParamStore<T>& store, const std::string& name, int fan_in, int fan_out,
                      Rng& rng) {
    const T stddev = static_cast<T>(1.0 / std::sqrt(static_cast<double>(fan_in)));
    return store.add(name, Tensor<T>::randn({fan_in, fan_out}, rng, stddev));
}

template <typename T>
Tensor<T> init_zeros(ParamStore<T>& store, const std::string& name, std::vector<int> shape) {
    return store.add(name, Tensor<T>::zeros(std::move(shape)));
}

template <typename T>
Tensor<T> init_ones(ParamStore<T>& store, const std::string& name, std::vector<int> shape) {
    return store.add(name, Tensor<T>::filled(std::move(shape), T(1)));
}

// row (s, i) of a [S*n x h*dh] tensor becomes row ((s*h + head), i) of a
// [(S*h)*n x dh] tensor
inline std::shared_ptr<std::vector<int64_t>> head_split_perm(int segments, int n, int heads,
                                                             int dh) {
    auto perm = std::make_shared<std::vector<int64_t>>(
        static_cast<size_t>(segments) * n * heads * dh);
    int64_t o = 0;
    for (int s = 0; s < segments; ++s)
        for (int h = 0; h < heads; ++h)
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < dh; ++c)
                    (*perm)[static_cast<size_t>(o++)] =
                        (static_cast<int64_t>(s) * n + i) * (heads * dh) + h * dh + c;
    return perm;
}

inline std::shared_ptr<std::vector<int64_t>> head_merge_perm(int segments, int n, int heads,
                                                             int dh) {
    auto perm = std::make_shared<std::vector<int64_t>>(
        static_cast<size_t>(segments) * n * heads * dh);
    int64_t o = 0;
    for (int s = 0; s < segments; ++s)
        for (int i = 0; i < n; ++i)
            for (int h = 0; h < heads; ++h)
                for (int c = 0; c < dh; ++c)
                    (*perm)[static_cast<size_t>(o++)] =
                        ((static_cast<int64_t>(s) * heads + h) * n + i) * dh + c;
    return perm;
}

// Multi-head scaled dot-product attention over uniform segments.
// q: [S*nq x d], k/v: [S*nk x d] -> [S*nq x d]
template <typename T>
Tensor<T> multi_head_attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                               int segments, int heads, int nq, int nk) {
    const int d = q.cols();
    const int dh = d / heads;
    auto qh = ops::permute_elements(q, head_split_perm(segments, nq, heads, dh),
                                    {segments * heads * nq, dh});
    auto kh = ops::permute_elements(k, head_split_perm(segments, nk, heads, dh),
                                    {segments * heads * nk, dh});
    auto vh = ops::permute_elements(v, head_split_perm(segments, nk, heads, dh),
                                    {segments * heads * nk, dh});
    auto scores = ops::scale(ops::bmm_nt(qh, kh, segments * heads),
                             static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh))));
    auto out = ops::bmm(ops::softmax(scores), vh, segments * heads);
    return ops::permute_elements(out, head_merge_perm(segments, nq, heads, dh),
                                 {segments * nq, d});
}

// Pre-LN self-attention + feed-forward block (the tokenizer encoder brick).
template <typename T>
struct SelfAttnBlock {
    Tensor<T> ln1_g, ln1_b, wq, wk, wv, wo;
    Tensor<T> ln2_g, ln2_b, ff_w1, ff_b1, ff_w2, ff_b2;
    int heads = 2;

    void init(ParamStore<T>& store, const std::string& prefix, int d, int heads_, Rng& rng) {
        heads = heads_;
        ln1_g = init_ones(store, prefix + ".ln1.gain", {d});
        ln1_b = init_zeros(store, prefix + ".ln1.bias", {d});
        wq = init_linear(store, prefix + ".attn.wq", d, d, rng);
        wk = init_linear(store, prefix + ".attn.wk", d, d, rng);
        wv = init_linear(store, prefix + ".attn.wv", d, d, rng);
        wo = init_linear(store, prefix + ".attn.wo", d, d, rng);
        ln2_g = init_ones(store, prefix + ".ln2.gain", {d});
        ln2_b = init_zeros(store, prefix + ".ln2.bias", {d});
        ff_w1 = init_linear(store, prefix + ".ff.w1", d, 4 * d, rng);
        ff_b1 = init_zeros(store, prefix + ".ff.b1", {4 * d});
        ff_w2 = init_linear(store, prefix + ".ff.w2", 4 * d, d, rng);
        ff_b2 = init_zeros(store, prefix + ".ff.b2", {d});
    }

    // x: [segments*n x d]
    Tensor<T> forward(const Tensor<T>& x, int segments, int n) const {
        auto a = ops::layer_norm(x, ln1_g, ln1_b);
        auto attn = multi_head_attention(ops::matmul(a, wq), ops::matmul(a, wk),
                                         ops::matmul(a, wv), segments, heads, n, n);
        auto h = ops::add(x, ops::matmul(attn, wo));
        auto f = ops::layer_norm(h, ln2_g, ln2_b);
        f = ops::add_row_vector(ops::matmul(f, ff_w1), ff_b1);
        f = ops::silu(f);
        f = ops::add_row_vector(ops::matmul(f, ff_w2), ff_b2);
        return ops::add(h, f);
    }
};

}  // namespace attrflow
