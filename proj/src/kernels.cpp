#include "gkp/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "gkp/errors.hpp"
#include "gkp/graph_algos.hpp"

namespace gkp {

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::WL: return "wl";
        case KernelKind::SP: return "sp";
        case KernelKind::GL3: return "gl3";
    }
    return "?";
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "wl" || name == "WL") return KernelKind::WL;
    if (name == "sp" || name == "SP") return KernelKind::SP;
    if (name == "gl3" || name == "GL3" || name == "gk") return KernelKind::GL3;
    throw ConfigError("unknown kernel kind '" + name + "' (expected wl, sp or gl3)");
}

std::string KernelSpec::describe() const {
    std::string s = to_string(kind);
    if (kind == KernelKind::WL) s += " h=" + std::to_string(h);
    s += normalize ? " normalized" : " raw";
    return s;
}

std::int64_t FeatureMap::total_count() const {
    std::int64_t total = 0;
    for (const auto& [key, count] : counts_) total += count;
    return total;
}

int WlRefiner::id_for(const std::vector<int>& signature) {
    auto [it, inserted] = table_.emplace(signature, next_id_);
    if (inserted) ++next_id_;
    return it->second;
}

namespace {
constexpr std::uint64_t kWlTag = 1, kSpTag = 2, kGl3Tag = 3;
}

std::uint64_t wl_feature_key(int iteration, int label) {
    return (kWlTag << 60) | (static_cast<std::uint64_t>(iteration) << 40) |
           static_cast<std::uint64_t>(label);
}

std::uint64_t sp_feature_key(int label_lo, int label_hi, int distance) {
    return (kSpTag << 60) | (static_cast<std::uint64_t>(label_lo) << 40) |
           (static_cast<std::uint64_t>(label_hi) << 20) | static_cast<std::uint64_t>(distance);
}

std::uint64_t gl3_feature_key(int edge_count) {
    return (kGl3Tag << 60) | static_cast<std::uint64_t>(edge_count);
}

FeatureMap wl_feature_map(const Graph& g, int h, WlRefiner& refiner) {
    if (h < 0) throw ContractViolation("wl_feature_map: h must be >= 0");
    const int n = g.node_count();
    FeatureMap fm;
    std::vector<int> labels = g.node_labels();
    for (int v = 0; v < n; ++v) fm.add(wl_feature_key(0, labels[v]));

    std::vector<int> next(n);
    std::vector<int> signature;
    for (int it = 1; it <= h; ++it) {
        for (int v = 0; v < n; ++v) {
            const auto& nbrs = g.neighbors(v);
            signature.clear();
            signature.reserve(nbrs.size() + 1);
            signature.push_back(labels[v]);
            for (int u : nbrs) signature.push_back(labels[u]);
            std::sort(signature.begin() + 1, signature.end());
            next[v] = refiner.id_for(signature);
        }
        labels = next;
        for (int v = 0; v < n; ++v) fm.add(wl_feature_key(it, labels[v]));
    }
    return fm;
}

FeatureMap sp_feature_map(const Graph& g) {
    FeatureMap fm;
    const DistanceMatrix dist = shortest_paths(g);
    const auto& labels = g.node_labels();
    const int n = g.node_count();
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (!dist.reachable(u, v)) continue;
            int lo = std::min(labels[u], labels[v]);
            int hi = std::max(labels[u], labels[v]);
            fm.add(sp_feature_key(lo, hi, dist.at(u, v)));
        }
    }
    return fm;
}

FeatureMap gl3_feature_map(const Graph& g, bool connected_only) {
    FeatureMap fm;
    const int n = g.node_count();
    if (n < 3) return fm;
    // Dense adjacency lookup; benchmark graphs are small, so O(n^3) exact
    // enumeration is fine (sampling is a non-goal).
    std::vector<char> adj(static_cast<std::size_t>(n) * n, 0);
    for (auto [u, v] : g.edges()) {
        adj[static_cast<std::size_t>(u) * n + v] = 1;
        adj[static_cast<std::size_t>(v) * n + u] = 1;
    }
    std::int64_t by_edges[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                int e = adj[static_cast<std::size_t>(i) * n + j] +
                        adj[static_cast<std::size_t>(i) * n + k] +
                        adj[static_cast<std::size_t>(j) * n + k];
                ++by_edges[e];
            }
    for (int e = connected_only ? 2 : 0; e < 4; ++e)
        if (by_edges[e] > 0) fm.add(gl3_feature_key(e), by_edges[e]);
    return fm;
}

FeatureMap KernelContext::feature_map(const Graph& g) {
    switch (spec_.kind) {
        case KernelKind::WL: return wl_feature_map(g, spec_.h, refiner_);
        case KernelKind::SP: return sp_feature_map(g);
        case KernelKind::GL3: return gl3_feature_map(g, spec_.gl3_connected_only);
    }
    throw ContractViolation("KernelContext: invalid kernel kind");
}

double kernel_value(const FeatureMap& a, const FeatureMap& b) {
    const FeatureMap& small = a.distinct_keys() <= b.distinct_keys() ? a : b;
    const FeatureMap& large = a.distinct_keys() <= b.distinct_keys() ? b : a;
    std::int64_t dot = 0;
    for (const auto& [key, count] : small.entries()) dot += count * large.count(key);
    return static_cast<double>(dot);
}

double normalize(double kxy, double kxx, double kyy) {
    if (kxx <= 0.0 || kyy <= 0.0)
        throw Error("normalize: degenerate graph (self-similarity " + std::to_string(kxx) +
                    ", " + std::to_string(kyy) + " must be positive)");
    return kxy / std::sqrt(kxx * kyy);
}

}  // namespace gkp
