#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "attrflow/tensor.hpp"

namespace attrflow {

template <typename T>
struct Parameter {
    std::string name;  // unique dotted path, e.g. "adapter.block3.kv.K"
    Tensor<T> tensor;
};

// Ordered registry of named parameters. Iteration order is insertion
// order, which fixes the reduction/update order everywhere downstream.
template <typename T>
class ParamStore {
public:
    Tensor<T>& add(const std::string& name, Tensor<T> t) {
        if (index_.count(name))
            throw std::invalid_argument("duplicate parameter name: " + name);
        t.set_requires_grad(true);
        index_[name] = items_.size();
        items_.push_back({name, std::move(t)});
        return items_.back().tensor;
    }

    Tensor<T>* find(const std::string& name) {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &items_[it->second].tensor;
    }

    std::vector<Parameter<T>>& items() { return items_; }
    const std::vector<Parameter<T>>& items() const { return items_; }
    size_t size() const { return items_.size(); }

    void zero_grad() {
        for (auto& p : items_) p.tensor.zero_grad();
    }

    // params whose name starts with `prefix` ("" selects all)
    std::vector<Parameter<T>*> with_prefix(const std::string& prefix) {
        std::vector<Parameter<T>*> out;
        for (auto& p : items_)
            if (p.name.rfind(prefix, 0) == 0) out.push_back(&p);
        return out;
    }

    void set_requires_grad(const std::string& prefix, bool value) {
        for (auto* p : with_prefix(prefix)) p->tensor.set_requires_grad(value);
    }

    int64_t total_elements() const {
        int64_t n = 0;
        for (const auto& p : items_) n += p.tensor.numel();
        return n;
    }

private:
    std::vector<Parameter<T>> items_;
    std::unordered_map<std::string, size_t> index_;
};

}  // namespace attrflow
