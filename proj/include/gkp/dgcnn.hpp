#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gkp/autodiff.hpp"
#include "gkp/graph.hpp"
#include "gkp/optim.hpp"

namespace gkp {

struct Conv1dSpec {
    int filters = 0;
    int width = 0;   // 0 in a config means "the concatenated channel width"
    int stride = 0;  // 0 likewise
};

struct NetworkConfig {
    std::vector<int> conv_channels{32, 32, 32, 1};  // last width-1 layer feeds the sort key
    int sortpool_k = 10;
    std::vector<Conv1dSpec> conv1d;  // empty -> {filters 16, width sum_c, stride sum_c}, {32, 5, 1}
    int dense_width = 128;
    int num_classes = 2;
    int label_alphabet_size = 1;  // one-hot dimension is this + 1 (OOV slot)
    bool bias = false;
    double dropout = 0.0;

    int concat_channels() const;
    // Fills defaulted conv1d fields and validates; throws ConfigError.
    void finalize();
};

struct Network {
    NetworkConfig config;
    ParamStore params;
};

// Allocates and seeds all parameters: uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
// Identical seeds give bitwise-identical parameters.
Network build_network(NetworkConfig config, std::uint64_t seed);

// Closed-form parameter count for a (finalized) config.
std::size_t parameter_count(const NetworkConfig& config);

// One-hot node features over the training alphabet; labels outside it map to
// the extra OOV slot.
Tensor one_hot_features(const Graph& g, int label_alphabet_size);

// Forward passes. The tape variants record gradients; `rng_state` feeds
// dropout when config.dropout > 0 and training is true.
Tape::ValueRef embed_on_tape(Tape& tape, Network& net, const Graph& g, bool training = false,
                             std::uint64_t* rng_state = nullptr);
Tape::ValueRef classify_on_tape(Tape& tape, Network& net, const Graph& g, bool training = false,
                                std::uint64_t* rng_state = nullptr);

Tensor embed(const Network& net, const Graph& g);
Tensor classify(const Network& net, const Graph& g);  // log-probabilities, length C

// Checkpoint: text header (config plus caller-provided provenance lines)
// followed by the binary parameter block.
void save_network(const Network& net, const std::filesystem::path& file,
                  const std::map<std::string, std::string>& extra_header = {});
struct LoadedNetwork {
    Network network;
    std::map<std::string, std::string> header;
};
LoadedNetwork load_network(const std::filesystem::path& file);

}  // namespace gkp
