#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "attrflow/rng.hpp"
#include "attrflow/tensor.hpp"

namespace attrflow {

struct GradCheckReport {
    double max_rel_err = 0.0;
    bool pass = false;
    int checked_elements = 0;
    std::string worst_location;
};

// Compares reverse-mode gradients of a scalar-valued function against
// central finite differences (f(x+h) - f(x-h)) / 2h. Meant to run with
// T = double; float loses too many digits for tight tolerances.
//
// `max_per_input` bounds how many coordinates of each input are perturbed
// (0 = all of them); for large inputs a deterministic random subset keeps
// the runtime sane while still touching every tensor.
template <typename T>
GradCheckReport grad_check(const std::function<Tensor<T>(std::vector<Tensor<T>>&)>& f,
                           std::vector<Tensor<T>> inputs, T h, double tol,
                           int max_per_input = 0, uint64_t pick_seed = 0x5eed) {
    for (auto& in : inputs) in.set_requires_grad(true);

    Tensor<T> out = f(inputs);
    if (out.numel() != 1)
        throw std::invalid_argument("grad_check: function output must be scalar, got " +
                                    shape_str(out.shape()));
    for (auto& in : inputs) in.zero_grad();
    out.backward();

    std::vector<std::vector<T>> analytic;
    analytic.reserve(inputs.size());
    for (auto& in : inputs) {
        if (in.has_grad())
            analytic.emplace_back(in.grad(), in.grad() + in.numel());
        else
            analytic.emplace_back(static_cast<size_t>(in.numel()), T(0));
    }

    GradCheckReport report;
    report.pass = true;
    Rng pick(pick_seed);
    for (size_t t = 0; t < inputs.size(); ++t) {
        const int64_t n = inputs[t].numel();
        std::vector<int64_t> coords;
        if (max_per_input <= 0 || n <= max_per_input) {
            coords.resize(static_cast<size_t>(n));
            for (int64_t i = 0; i < n; ++i) coords[static_cast<size_t>(i)] = i;
        } else {
            for (int i = 0; i < max_per_input; ++i)
                coords.push_back(static_cast<int64_t>(pick.next_u64() % static_cast<uint64_t>(n)));
            std::sort(coords.begin(), coords.end());
            coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
        }
        for (int64_t i : coords) {
            NoGradGuard ng;  // finite-difference evals record no tape
            T* slot = inputs[t].data() + i;
            const T saved = *slot;
            *slot = saved + h;
            const T fp = f(inputs).item();
            *slot = saved - h;
            const T fm = f(inputs).item();
            *slot = saved;
            const double fd = (static_cast<double>(fp) - static_cast<double>(fm)) / (2.0 * static_cast<double>(h));
            const double an = static_cast<double>(analytic[t][static_cast<size_t>(i)]);
            const double denom = std::max({1.0, std::abs(fd), std::abs(an)});
            const double rel = std::abs(fd - an) / denom;
            ++report.checked_elements;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_location =
                    "input " + std::to_string(t) + " elem " + std::to_string(i) +
                    " analytic=" + std::to_string(an) + " fd=" + std::to_string(fd);
            }
        }
    }
    report.pass = report.max_rel_err < tol;
    return report;
}

}  // namespace attrflow
