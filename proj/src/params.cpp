#include "dagseg/params.hpp"

#include <cmath>

#include "dagseg/errors.hpp"
#include "dagseg/rng.hpp"

namespace dagseg {

Param& ParamStore::add(const std::string& name, int rows, int cols, bool trainable) {
    if (index_.count(name))
        throw GraphError("duplicate parameter name: " + name);
    if (rows <= 0 || cols <= 0)
        throw GraphError("parameter " + name + " must have positive dims");
    items_.push_back(std::make_unique<Param>(name, rows, cols, trainable));
    index_.emplace(name, items_.size() - 1);
    return *items_.back();
}

Param& ParamStore::get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end())
        throw GraphError("unknown parameter: " + name);
    return *items_[it->second];
}

const Param& ParamStore::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw GraphError("unknown parameter: " + name);
    return *items_[it->second];
}

Param* ParamStore::find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : items_[it->second].get();
}

void ParamStore::zero_grads() {
    for (auto& p : items_) p->grad.fill(0.0);
}

std::vector<Tensor> ParamStore::snapshot_values() const {
    std::vector<Tensor> out;
    out.reserve(items_.size());
    for (auto& p : items_) out.push_back(p->value);
    return out;
}

void ParamStore::restore_values(const std::vector<Tensor>& values) {
    if (values.size() != items_.size())
        throw GraphError("snapshot size does not match store");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i].same_shape(items_[i]->value))
            throw GraphError("snapshot shape mismatch for " + items_[i]->name);
        items_[i]->value = values[i];
    }
}

void init_uniform(ParamStore& store, double lo, double hi, std::uint64_t seed) {
    if (lo >= hi)
        throw ConfigError("init_uniform: low bound must be below high bound");
    for (std::size_t i = 0; i < store.size(); ++i) {
        Param& p = store.at(i);
        if (!p.trainable) continue;
        Rng rng(mix_seed(seed, p.name));
        for (double& x : p.value.v) x = rng.uniform(lo, hi);
    }
}

void adagrad_step(ParamStore& store, double lr, double l2, double eps) {
    for (std::size_t i = 0; i < store.size(); ++i) {
        Param& p = store.at(i);
        if (!p.trainable) {
            p.grad.fill(0.0);
            continue;
        }
        double decay = p.weight_decay ? l2 : 0.0;
        for (int k = 0; k < p.value.size(); ++k) {
            double g = p.grad[k] + decay * p.value[k];
            if (g == 0.0) continue;
            p.accum[k] += g * g;
            p.value[k] -= lr * g / (std::sqrt(p.accum[k]) + eps);
        }
        p.grad.fill(0.0);
    }
}

void clip_gradients(ParamStore& store, double max_norm) {
    if (max_norm <= 0.0) return;
    double sq = 0.0;
    for (std::size_t i = 0; i < store.size(); ++i)
        sq += store.at(i).grad.l2_norm_sq();
    double norm = std::sqrt(sq);
    if (norm <= max_norm) return;
    double scale = max_norm / norm;
    for (std::size_t i = 0; i < store.size(); ++i)
        for (double& g : store.at(i).grad.v) g *= scale;
}

} // namespace dagseg
