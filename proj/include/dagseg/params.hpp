#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagseg/tensor.hpp"

namespace dagseg {

// One named trainable tensor with its gradient and AdaGrad accumulator.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor accum;
    bool trainable = true;
    bool weight_decay = true; // participates in L2

    Param(std::string n, int rows, int cols, bool train)
        : name(std::move(n)), value(rows, cols), grad(rows, cols), accum(rows, cols),
          trainable(train) {}
};

// Insertion-ordered parameter store. Iteration order is the registration
// order, which keeps optimizer updates and serialization deterministic.
// Params have stable addresses for the lifetime of the store.
class ParamStore {
public:
    Param& add(const std::string& name, int rows, int cols, bool trainable = true);
    Param& get(const std::string& name);
    const Param& get(const std::string& name) const;
    Param* find(const std::string& name);
    bool contains(const std::string& name) const { return index_.count(name) > 0; }

    std::size_t size() const { return items_.size(); }
    Param& at(std::size_t i) { return *items_[i]; }
    const Param& at(std::size_t i) const { return *items_[i]; }

    void zero_grads();

    // Deep copy of all values, in store order; used for checkpoints.
    std::vector<Tensor> snapshot_values() const;
    void restore_values(const std::vector<Tensor>& values);

private:
    std::vector<std::unique_ptr<Param>> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Fills every trainable tensor with values drawn strictly inside (lo, hi).
// Each parameter gets an independent stream derived from (seed, name), so
// adding a parameter does not disturb the values of the others.
void init_uniform(ParamStore& store, double lo, double hi, std::uint64_t seed);

// One AdaGrad update over grads already averaged across the minibatch:
//   g     <- grad + l2 * value     (l2 skipped for params with weight_decay off)
//   accum <- accum + g^2
//   value <- value - lr * g / (sqrt(accum) + eps)
// Grads are reset to zero afterwards. Elements with g == 0 are left untouched
// (value and accumulator both).
void adagrad_step(ParamStore& store, double lr, double l2, double eps);

// Scales all gradients so their global L2 norm is at most max_norm.
// No-op when max_norm <= 0 or the norm is already within bounds.
void clip_gradients(ParamStore& store, double max_norm);

} // namespace dagseg
