#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "gkp/graph.hpp"

namespace gkp {

enum class KernelKind { WL, SP, GL3 };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

struct KernelSpec {
    KernelKind kind = KernelKind::WL;
    int h = 0;                        // WL iteration count, WL only
    bool normalize = true;
    bool gl3_connected_only = false;  // GL3 only: drop the disconnected graphlet classes

    std::string describe() const;
};

// Sparse non-negative integer count vector over structural features.
// Keys are opaque 64-bit encodings chosen by each kernel; maps are only
// comparable within one kernel run.
class FeatureMap {
public:
    void add(std::uint64_t key, std::int64_t count = 1) { counts_[key] += count; }
    std::int64_t count(std::uint64_t key) const {
        auto it = counts_.find(key);
        return it == counts_.end() ? 0 : it->second;
    }
    std::size_t distinct_keys() const { return counts_.size(); }
    std::int64_t total_count() const;
    bool empty() const { return counts_.empty(); }
    const std::unordered_map<std::uint64_t, std::int64_t>& entries() const { return counts_; }

private:
    std::unordered_map<std::uint64_t, std::int64_t> counts_;
};

// Injective recoding table for Weisfeiler-Lehman relabeling. One instance is
// shared by every graph of a run so identical patterns collide across graphs.
// Fresh ids start above the original label alphabet, which keeps signatures
// from different iterations distinct.
class WlRefiner {
public:
    explicit WlRefiner(int label_alphabet_size) : next_id_(label_alphabet_size) {}

    // signature = (own label, sorted neighbor-label multiset)
    int id_for(const std::vector<int>& signature);
    int distinct_patterns() const { return static_cast<int>(table_.size()); }

private:
    std::map<std::vector<int>, int> table_;
    int next_id_;
};

// Feature keys, namespaced so one kernel's keys never alias another's levels.
std::uint64_t wl_feature_key(int iteration, int label);
std::uint64_t sp_feature_key(int label_lo, int label_hi, int distance);
// GL3 classes by induced edge count: 0 = empty, 1 = one-edge, 2 = path, 3 = triangle.
std::uint64_t gl3_feature_key(int edge_count);

FeatureMap wl_feature_map(const Graph& g, int h, WlRefiner& refiner);
FeatureMap sp_feature_map(const Graph& g);
FeatureMap gl3_feature_map(const Graph& g, bool connected_only = false);

// Run-scoped kernel state: holds the shared WL recoding table. Feature-map
// construction is not thread-safe for WL (the table mutates); build maps
// single-threaded, then compute pair values freely in parallel.
class KernelContext {
public:
    KernelContext(const KernelSpec& spec, int label_alphabet_size)
        : spec_(spec), refiner_(label_alphabet_size) {}

    const KernelSpec& spec() const { return spec_; }
    FeatureMap feature_map(const Graph& g);

private:
    KernelSpec spec_;
    WlRefiner refiner_;
};

// Sparse dot product of two count vectors from the same run.
double kernel_value(const FeatureMap& a, const FeatureMap& b);

// Cosine normalization kxy / sqrt(kxx * kyy). Throws on degenerate inputs
// (a graph with an empty feature map has kxx = 0).
double normalize(double kxy, double kxx, double kyy);

}  // namespace gkp
