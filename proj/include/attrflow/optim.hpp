#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "attrflow/params.hpp"

namespace attrflow {

// AdamW with decoupled weight decay. Moment accumulators are zero-created
// on first sight of a parameter; the step counter drives bias correction.
template <typename T>
class AdamW {
public:
    struct Hyper {
        double lr = 1e-4;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
        double weight_decay = 0.0;
    };

    explicit AdamW(Hyper hp = {}) : hp_(hp) {
        if (hp_.lr <= 0 || hp_.beta1 < 0 || hp_.beta2 < 0 || hp_.eps <= 0)
            throw std::invalid_argument("adamw: hyperparameters must be positive");
    }

    const Hyper& hyper() const { return hp_; }
    int64_t step_count() const { return step_; }

    // one update over the given parameters; every one must carry a gradient
    void step(std::vector<Parameter<T>*>& params) {
        ++step_;
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(step_));
        for (auto* p : params) {
            if (!p->tensor.has_grad())
                throw std::runtime_error("adamw: missing gradient for parameter '" + p->name + "'");
            auto& m = m_[p->name];
            auto& v = v_[p->name];
            const size_t n = static_cast<size_t>(p->tensor.numel());
            if (m.empty()) m.assign(n, T(0));
            if (v.empty()) v.assign(n, T(0));
            T* w = p->tensor.data();
            const T* g = p->tensor.grad();
            const T b1 = static_cast<T>(hp_.beta1), b2 = static_cast<T>(hp_.beta2);
            const T lr = static_cast<T>(hp_.lr), eps = static_cast<T>(hp_.eps);
            const T wd = static_cast<T>(hp_.weight_decay);
            const T ibc1 = static_cast<T>(1.0 / bc1), ibc2 = static_cast<T>(1.0 / bc2);
            for (size_t i = 0; i < n; ++i) {
                m[i] = b1 * m[i] + (T(1) - b1) * g[i];
                v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
                const T mhat = m[i] * ibc1;
                const T vhat = v[i] * ibc2;
                w[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + wd * w[i]);
            }
        }
    }

private:
    Hyper hp_;
    int64_t step_ = 0;
    std::unordered_map<std::string, std::vector<T>> m_, v_;
};

// Rescale gradients so the global L2 norm is at most `max_norm`.
// Returns the pre-clip norm. Accumulation order is the store order.
template <typename T>
double clip_grad_norm(std::vector<Parameter<T>*>& params, double max_norm) {
    double sq = 0.0;
    for (auto* p : params) {
        if (!p->tensor.has_grad()) continue;
        const T* g = p->tensor.grad();
        const int64_t n = p->tensor.numel();
        for (int64_t i = 0; i < n; ++i) sq += static_cast<double>(g[i]) * g[i];
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const T s = static_cast<T>(max_norm / norm);
        for (auto* p : params) {
            if (!p->tensor.has_grad()) continue;
            T* g = p->tensor.grad();
            const int64_t n = p->tensor.numel();
            for (int64_t i = 0; i < n; ++i) g[i] *= s;
        }
    }
    return norm;
}

}  // namespace attrflow
