#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "gkp/tensor.hpp"

namespace gkp {

// Named ordered parameter collection with matching gradient buffers.
// Iteration order is insertion order, which makes updates deterministic.
class ParamStore {
public:
    Tensor& add(const std::string& name, Tensor initial);

    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    Tensor& param(const std::string& name);
    const Tensor& param(const std::string& name) const;
    Tensor& grad(const std::string& name);
    const Tensor& grad(const std::string& name) const;

    const std::vector<std::string>& names() const { return names_; }
    std::size_t count() const { return names_.size(); }
    std::size_t total_parameters() const;

    void zero_grads();
    double squared_param_norm() const;
    double squared_grad_norm() const;
    bool bitwise_equal(const ParamStore& other) const;

    // Flat binary checkpoint of named tensors: per tensor a name length,
    // the name bytes, the rank, the dims, then little-endian 64-bit floats.
    // Round-trips bit-exactly.
    void save(const std::filesystem::path& file) const;
    static ParamStore load(const std::filesystem::path& file);
    void save_stream(std::ostream& out) const;
    static ParamStore load_stream(std::istream& in, const std::string& context);

private:
    struct Slot {
        Tensor value;
        Tensor grad;
    };
    std::vector<std::string> names_;
    std::vector<Slot> slots_;
    std::unordered_map<std::string, std::size_t> index_;

    std::size_t slot_of(const std::string& name) const;
};

struct AdamHyper {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam with bias correction, driven by the gradients currently in
// the store. Deterministic given the same state and gradients.
class AdamState {
public:
    AdamState(const ParamStore& params, AdamHyper hyper);

    void step(ParamStore& params);
    long long step_count() const { return step_; }
    const AdamHyper& hyper() const { return hyper_; }

private:
    AdamHyper hyper_;
    long long step_ = 0;
    std::vector<Tensor> first_moment_;
    std::vector<Tensor> second_moment_;
};

}  // namespace gkp
