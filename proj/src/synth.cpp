#include "gkp/synth.hpp"

#include <algorithm>
#include <set>

#include "gkp/errors.hpp"
#include "gkp/rng.hpp"

namespace gkp {

Dataset make_triangle_dataset(int count, std::uint64_t seed, int min_nodes, int max_nodes) {
    if (count < 2) throw ContractViolation("make_triangle_dataset: need at least 2 graphs");
    if (min_nodes < 4 || max_nodes < min_nodes)
        throw ContractViolation("make_triangle_dataset: bad node range");

    std::mt19937_64 rng(mix_seed(seed, 0x5719));
    Dataset ds;
    ds.name = "synthetic_triangles";
    ds.label_alphabet = {0, 1, 2};
    ds.num_classes = 2;

    for (int g = 0; g < count; ++g) {
        const int cls = g % 2;
        const int n = min_nodes + static_cast<int>(bounded_uniform(
                                      rng, static_cast<std::uint64_t>(max_nodes - min_nodes + 1)));
        std::set<std::pair<int, int>> edge_set;
        auto add_edge = [&edge_set](int u, int v) {
            if (u > v) std::swap(u, v);
            edge_set.emplace(u, v);
        };
        auto has_edge = [&edge_set](int u, int v) {
            if (u > v) std::swap(u, v);
            return edge_set.count({u, v}) != 0;
        };
        auto closes_triangle = [&](int u, int v) {
            for (int w = 0; w < n; ++w)
                if (w != u && w != v && has_edge(u, w) && has_edge(v, w)) return true;
            return false;
        };

        // Random spanning tree keeps every graph connected.
        for (int v = 1; v < n; ++v)
            add_edge(v, static_cast<int>(bounded_uniform(rng, static_cast<std::uint64_t>(v))));

        if (cls == 1) {
            const int triangles = 2 + static_cast<int>(bounded_uniform(rng, 3));
            for (int t = 0; t < triangles; ++t) {
                // Close a wedge: an edge (u, v) plus a third node adjacent to u.
                const int u = static_cast<int>(bounded_uniform(rng, static_cast<std::uint64_t>(n)));
                int v = -1;
                for (int probe = 0; probe < n; ++probe) {
                    const int cand = (u + 1 + probe) % n;
                    if (cand != u && has_edge(u, cand)) {
                        v = cand;
                        break;
                    }
                }
                if (v < 0) continue;
                int w = static_cast<int>(bounded_uniform(rng, static_cast<std::uint64_t>(n)));
                for (int probe = 0; probe < n && (w == u || w == v); ++probe) w = (w + 1) % n;
                if (w == u || w == v) continue;
                add_edge(u, w);
                add_edge(v, w);
            }
        } else {
            // A few extra edges, rejected whenever they would close a triangle.
            const int extra = 1 + static_cast<int>(bounded_uniform(rng, 3));
            for (int t = 0; t < extra; ++t) {
                for (int attempt = 0; attempt < 20; ++attempt) {
                    const int u = static_cast<int>(bounded_uniform(rng, static_cast<std::uint64_t>(n)));
                    const int v = static_cast<int>(bounded_uniform(rng, static_cast<std::uint64_t>(n)));
                    if (u == v || has_edge(u, v) || closes_triangle(u, v)) continue;
                    add_edge(u, v);
                    break;
                }
            }
        }

        std::vector<int> labels(n);
        for (int v = 0; v < n; ++v) labels[v] = static_cast<int>(bounded_uniform(rng, 3));
        std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
        ds.graphs.emplace_back(n, std::move(edges), std::move(labels), g);
        ds.targets.push_back(cls);
    }
    return ds;
}

Dataset subset_dataset(const Dataset& ds, const std::vector<int>& indices) {
    Dataset out;
    out.name = ds.name;
    out.label_alphabet = ds.label_alphabet;
    out.num_classes = ds.num_classes;
    out.graphs.reserve(indices.size());
    for (int idx : indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= ds.graphs.size())
            throw ContractViolation("subset_dataset: index out of range");
        out.graphs.push_back(ds.graphs[idx]);
        if (!ds.targets.empty()) out.targets.push_back(ds.targets[idx]);
    }
    return out;
}

}  // namespace gkp
