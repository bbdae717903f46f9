#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "attrflow/rng.hpp"

namespace attrflow {

// Thread-local switch: when disabled, ops compute values but record no tape.
bool& grad_mode();

inline bool& grad_mode() {
    thread_local bool enabled = true;
    return enabled;
}

struct NoGradGuard {
    bool prev;
    NoGradGuard() : prev(grad_mode()) { grad_mode() = false; }
    ~NoGradGuard() { grad_mode() = prev; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
};

namespace detail {

template <typename T>
struct Node {
    std::vector<int> shape;
    std::vector<T> value;
    std::vector<T> grad;  // sized lazily on first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    int64_t numel() const { return static_cast<int64_t>(value.size()); }

    T* grad_data() {
        if (grad.empty()) grad.assign(value.size(), T(0));
        return grad.data();
    }
};

}  // namespace detail

inline std::string shape_str(const std::vector<int>& s) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << "]";
    return os.str();
}

// Dense n-d tensor, row-major, with an optional gradient slot. Handle
// semantics: copies share the underlying node (graph edges need identity).
template <typename T>
class Tensor {
public:
    using Scalar = T;

    Tensor() = default;

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false) {
        return filled(std::move(shape), T(0), requires_grad);
    }

    static Tensor filled(std::vector<int> shape, T value, bool requires_grad = false) {
        Tensor t;
        t.node_ = std::make_shared<detail::Node<T>>();
        t.node_->shape = std::move(shape);
        t.node_->value.assign(check_numel(t.node_->shape), value);
        t.node_->requires_grad = requires_grad;
        return t;
    }

    static Tensor from_data(std::vector<int> shape, std::vector<T> data,
                            bool requires_grad = false) {
        Tensor t;
        t.node_ = std::make_shared<detail::Node<T>>();
        if (check_numel(shape) != static_cast<int64_t>(data.size()))
            throw std::invalid_argument("tensor data length " + std::to_string(data.size()) +
                                        " does not match shape " + shape_str(shape));
        t.node_->shape = std::move(shape);
        t.node_->value = std::move(data);
        t.node_->requires_grad = requires_grad;
        return t;
    }

    static Tensor randn(std::vector<int> shape, Rng& rng, T stddev = T(1),
                        bool requires_grad = false) {
        Tensor t = zeros(std::move(shape), requires_grad);
        for (auto& v : t.node_->value) v = static_cast<T>(rng.gaussian()) * stddev;
        return t;
    }

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const { return node_->shape; }
    int dim(int i) const { return node_->shape.at(static_cast<size_t>(i)); }
    int64_t numel() const { return node_->numel(); }

    // 2-d views: a rank-1 tensor counts as a single row
    int rows() const {
        if (node_->shape.size() <= 1) return 1;
        int64_t r = 1;
        for (size_t i = 0; i + 1 < node_->shape.size(); ++i) r *= node_->shape[i];
        return static_cast<int>(r);
    }
    int cols() const { return node_->shape.empty() ? 1 : node_->shape.back(); }

    T* data() { return node_->value.data(); }
    const T* data() const { return node_->value.data(); }
    std::vector<T>& values() { return node_->value; }
    const std::vector<T>& values() const { return node_->value; }

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool b) { node_->requires_grad = b; }

    bool has_grad() const { return !node_->grad.empty(); }
    T* grad() { return node_->grad.data(); }
    const T* grad() const { return node_->grad.data(); }
    const std::vector<T>& grad_vector() const { return node_->grad; }
    void zero_grad() { node_->grad.clear(); }

    T item() const {
        if (numel() != 1)
            throw std::invalid_argument("item() on non-scalar tensor " + shape_str(shape()));
        return node_->value[0];
    }

    // Reverse-mode sweep from a scalar. The recorded tape is released
    // afterwards; leaf gradients stay in place for the optimizer.
    void backward() {
        if (numel() != 1)
            throw std::invalid_argument("backward() requires a scalar, got " +
                                        shape_str(shape()));
        std::vector<detail::Node<T>*> order;
        std::unordered_set<detail::Node<T>*> seen;
        topo_sort(node_.get(), seen, order);
        node_->grad_data()[0] = T(1);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            detail::Node<T>& n = **it;
            if (n.backward_fn && !n.grad.empty()) n.backward_fn(n);
        }
        for (auto* n : order) {
            n->backward_fn = nullptr;
            n->parents.clear();
        }
    }

    std::shared_ptr<detail::Node<T>> node() const { return node_; }

    explicit Tensor(std::shared_ptr<detail::Node<T>> n) : node_(std::move(n)) {}

private:
    static int64_t check_numel(const std::vector<int>& shape) {
        int64_t n = 1;
        for (int e : shape) {
            if (e <= 0) throw std::invalid_argument("non-positive extent in shape " + shape_str(shape));
            n *= e;
        }
        return n;
    }

    static void topo_sort(detail::Node<T>* root, std::unordered_set<detail::Node<T>*>& seen,
                          std::vector<detail::Node<T>*>& order) {
        // iterative post-order DFS; graphs can be thousands of nodes deep
        struct Frame {
            detail::Node<T>* n;
            size_t next_child;
        };
        std::vector<Frame> stack;
        if (seen.insert(root).second) stack.push_back({root, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next_child < f.n->parents.size()) {
                detail::Node<T>* child = f.n->parents[f.next_child++].get();
                if (seen.insert(child).second) stack.push_back({child, 0});
            } else {
                order.push_back(f.n);
                stack.pop_back();
            }
        }
    }

    std::shared_ptr<detail::Node<T>> node_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace attrflow
