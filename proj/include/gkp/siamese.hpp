#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gkp/dgcnn.hpp"
#include "gkp/gram.hpp"

namespace gkp {

enum class PairMode { Full, Sampled };

struct PairSample {
    int i = 0;
    int j = 0;        // i <= j; self-pairs included in full mode
    double target = 0.0;
};

struct PairDataset {
    std::vector<PairSample> pairs;
    PairMode mode = PairMode::Full;
    std::size_t sample_count = 0;
    std::uint64_t sample_seed = 0;
};

// Full mode: all M(M+1)/2 unordered pairs including self-pairs. Sampled mode:
// `count` distinct pairs drawn uniformly without replacement, deterministic
// by seed. Targets come from the gram matrix.
PairDataset build_pairs(const GramMatrix& gram, PairMode mode, std::size_t count = 0,
                        std::uint64_t seed = 0);

struct PretrainConfig {
    KernelSpec kernel{KernelKind::WL, 2, true};
    int epochs = 20;
    int batch_size = 32;
    AdamHyper adam{1e-3, 0.9, 0.999, 1e-8};
    PairMode pair_mode = PairMode::Full;
    std::size_t pair_count = 0;        // sampled mode; 0 means 20 * M
    bool resample_each_epoch = false;  // sampled mode only
    std::uint64_t seed = 0;
};

struct PretrainResult {
    std::vector<double> epoch_loss;  // mean squared error per epoch
};

// Siamese regression of embedding dot products onto kernel targets. Both
// branches share net.params; per batch the mean-MSE gradients of all pairs
// accumulate there before one Adam step. Throws NumericError on NaN loss.
// `gram_for_resample` enables per-epoch resampling in sampled mode.
PretrainResult pretrain(Network& net, const Dataset& unlabeled, const PairDataset& pairs,
                        const PretrainConfig& cfg, const GramMatrix* gram_for_resample = nullptr);

// dot(embed(g1), embed(g2)); exactly symmetric in its arguments.
double predicted_kernel(const Network& net, const Graph& g1, const Graph& g2);

// dgcnn checkpoint plus provenance (kernel spec, epochs, pair mode, seed,
// final loss) in the text header.
void save_pretrained_checkpoint(const Network& net, const std::filesystem::path& file,
                                const PretrainConfig& cfg, double final_loss);

}  // namespace gkp
