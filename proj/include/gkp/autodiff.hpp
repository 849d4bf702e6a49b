#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gkp/graph_algos.hpp"
#include "gkp/optim.hpp"
#include "gkp/tensor.hpp"

namespace gkp {

// Reverse-mode tape covering exactly the op set the DGCNN needs. A tape is
// built by one forward pass and consumed by one backward() call; parameter
// leaves accumulate their gradients into the bound ParamStore.
class Tape {
public:
    struct ValueRef {
        std::size_t index = static_cast<std::size_t>(-1);
        bool valid() const { return index != static_cast<std::size_t>(-1); }
    };

    ValueRef constant(Tensor value);
    // Copies the named parameter onto the tape; backward adds into store.grad(name).
    ValueRef parameter(ParamStore& store, const std::string& name);

    // out[m x n] = a[m x k] * b[k x n]
    ValueRef matmul(ValueRef a, ValueRef b);
    // out[n x c] = s * h, s constant row-stochastic (sparse)
    ValueRef spmm(const CsrMatrix& s, ValueRef h);
    ValueRef tanh_act(ValueRef x);
    ValueRef relu(ValueRef x);
    // x[in_ch x len], filters[out x in x width]; valid cross-correlation.
    ValueRef conv1d(ValueRef x, ValueRef filters, int stride);
    // Rows sorted descending by last column (ties: previous columns
    // right-to-left, then original row index ascending), truncated or
    // zero-padded to k rows. Gradients route only to selected rows.
    ValueRef sortpool(ValueRef h, int k);
    ValueRef concat_cols(const std::vector<ValueRef>& parts);
    // [r x c] -> rank-2 [1 x r*c], row-major (each row's channels contiguous).
    ValueRef flatten_to_row(ValueRef h);
    // [r x c] -> rank-1 [r*c]
    ValueRef flatten_to_vector(ValueRef h);
    // y[j] = sum_i x[i] * w[i][j]
    ValueRef vec_mat(ValueRef x, ValueRef w);
    // Adds a bias vector to every row of a matrix (or to a vector).
    ValueRef add_bias(ValueRef x, ValueRef b);
    // Adds bias[ch] to every element of row ch (per-channel bias for conv1d).
    ValueRef add_channel_bias(ValueRef x, ValueRef b);
    ValueRef log_softmax(ValueRef x);
    // Inverted dropout with a fixed mask drawn from `rng` at build time.
    ValueRef dropout(ValueRef x, double rate, std::uint64_t* rng_state);
    ValueRef dot(ValueRef a, ValueRef b);
    ValueRef mse(ValueRef pred, double target);
    ValueRef nll(ValueRef log_probs, int class_id);

    const Tensor& value(ValueRef ref) const;
    // Seeds d(loss)/d(loss) = seed and propagates to every reachable leaf.
    void backward(ValueRef loss, double seed = 1.0);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&, const Node&)> backprop;  // may be empty (leaves)
    };
    std::vector<Node> nodes_;
    bool backward_done_ = false;

    ValueRef push(Tensor value, std::function<void(Tape&, const Node&)> backprop);
    Node& node(ValueRef ref);
    const Node& cnode(ValueRef ref) const;
    Tensor& grad_of(std::size_t index) { return nodes_[index].grad; }
};

}  // namespace gkp
