#include "gkp/siamese.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "gkp/errors.hpp"
#include "gkp/rng.hpp"

namespace gkp {
namespace {

// Linear index over the upper triangle (self-pairs included), row-major.
std::pair<int, int> pair_from_linear(std::size_t linear, std::size_t m) {
    std::size_t lo = 0, hi = m - 1;
    auto row_start = [m](std::size_t i) { return i * (2 * m - i + 1) / 2; };
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (row_start(mid) <= linear) lo = mid; else hi = mid - 1;
    }
    return {static_cast<int>(lo), static_cast<int>(lo + (linear - row_start(lo)))};
}

}  // namespace

PairDataset build_pairs(const GramMatrix& gram, PairMode mode, std::size_t count,
                        std::uint64_t seed) {
    const std::size_t m = gram.size;
    if (m == 0) throw ContractViolation("build_pairs: empty gram matrix");
    const std::size_t total = m * (m + 1) / 2;

    PairDataset out;
    out.mode = mode;
    if (mode == PairMode::Full) {
        out.pairs.reserve(total);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j)
                out.pairs.push_back({static_cast<int>(i), static_cast<int>(j), gram.at(i, j)});
        return out;
    }

    if (count == 0 || count > total)
        throw Error("build_pairs: sample count " + std::to_string(count) +
                    " must be in [1, " + std::to_string(total) + "]");
    out.sample_count = count;
    out.sample_seed = seed;

    // Floyd's sampling: `count` distinct linear indices.
    std::mt19937_64 rng(seed);
    std::set<std::size_t> chosen;
    for (std::size_t t = total - count; t < total; ++t) {
        std::size_t r = static_cast<std::size_t>(bounded_uniform(rng, t + 1));
        if (!chosen.insert(r).second) chosen.insert(t);
    }
    out.pairs.reserve(count);
    for (std::size_t linear : chosen) {
        auto [i, j] = pair_from_linear(linear, m);
        out.pairs.push_back({i, j, gram.at(i, j)});
    }
    return out;
}

PretrainResult pretrain(Network& net, const Dataset& unlabeled, const PairDataset& pairs,
                        const PretrainConfig& cfg, const GramMatrix* gram_for_resample) {
    if (cfg.epochs < 1) throw ConfigError("pretrain: epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("pretrain: batch_size must be >= 1");
    for (const PairSample& p : pairs.pairs)
        if (p.i < 0 || p.j < 0 || static_cast<std::size_t>(p.j) >= unlabeled.size())
            throw ContractViolation("pretrain: pair index outside the unlabeled set");

    PretrainResult result;
    AdamState adam(net.params, cfg.adam);
    std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 0x70a1));

    PairDataset current = pairs;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (epoch > 0 && cfg.resample_each_epoch && cfg.pair_mode == PairMode::Sampled) {
            if (!gram_for_resample)
                throw ContractViolation("pretrain: resampling requires the gram matrix");
            current = build_pairs(*gram_for_resample, PairMode::Sampled, pairs.sample_count,
                                  mix_seed(cfg.seed, 0xE90C + static_cast<std::uint64_t>(epoch)));
        }
        std::vector<std::size_t> order(current.pairs.size());
        std::iota(order.begin(), order.end(), 0);
        seeded_shuffle(order, shuffle_rng);

        double loss_sum = 0.0;
        std::size_t items = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            net.params.zero_grads();
            for (std::size_t b = start; b < end; ++b) {
                const PairSample& p = current.pairs[order[b]];
                Tape tape;
                Tape::ValueRef e1 = embed_on_tape(tape, net, unlabeled.graphs[p.i]);
                Tape::ValueRef e2 = embed_on_tape(tape, net, unlabeled.graphs[p.j]);
                Tape::ValueRef loss = tape.mse(tape.dot(e1, e2), p.target);
                const double value = tape.value(loss)[0];
                if (!std::isfinite(value))
                    throw NumericError("pretrain: loss is not finite at epoch " +
                                       std::to_string(epoch) + ", pair (" + std::to_string(p.i) +
                                       ", " + std::to_string(p.j) + "), parameter norm " +
                                       std::to_string(std::sqrt(net.params.squared_param_norm())));
                tape.backward(loss, inv_batch);
                loss_sum += value;
            }
            items += end - start;
            adam.step(net.params);
        }
        result.epoch_loss.push_back(loss_sum / static_cast<double>(items));
    }
    return result;
}

double predicted_kernel(const Network& net, const Graph& g1, const Graph& g2) {
    const Tensor e1 = embed(net, g1);
    const Tensor e2 = embed(net, g2);
    double acc = 0.0;
    for (std::size_t i = 0; i < e1.size(); ++i) acc += e1[i] * e2[i];
    return acc;
}

void save_pretrained_checkpoint(const Network& net, const std::filesystem::path& file,
                                const PretrainConfig& cfg, double final_loss) {
    std::map<std::string, std::string> extra;
    extra["pretrain_kernel"] = cfg.kernel.describe();
    extra["pretrain_epochs"] = std::to_string(cfg.epochs);
    extra["pretrain_pair_mode"] =
        cfg.pair_mode == PairMode::Full ? "full" : "sampled:" + std::to_string(cfg.pair_count);
    extra["pretrain_seed"] = std::to_string(cfg.seed);
    extra["pretrain_final_loss"] = std::to_string(final_loss);
    save_network(net, file, extra);
}

}  // namespace gkp
