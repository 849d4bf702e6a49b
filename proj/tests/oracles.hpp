// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gkp/graph.hpp"

namespace oracle {

// All-pairs shortest paths by Floyd-Warshall (the library uses BFS).
inline std::vector<std::vector<int>> floyd_warshall(const gkp::Graph& g) {
    const int n = g.node_count();
    const int inf = 1 << 29;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (int v = 0; v < n; ++v) d[v][v] = 0;
    for (auto [u, v] : g.edges()) d[u][v] = d[v][u] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    for (auto& row : d)
        for (int& x : row)
            if (x >= inf) x = -1;
    return d;
}

// Label histogram (equals the WL feature map at h = 0).
inline std::map<int, long long> label_histogram(const gkp::Graph& g) {
    std::map<int, long long> hist;
    for (int label : g.node_labels()) ++hist[label];
    return hist;
}

// Exhaustive unordered-pair enumeration for the shortest-path kernel,
// using the Floyd-Warshall distances above.
inline std::map<std::tuple<int, int, int>, long long> sp_pairs(const gkp::Graph& g) {
    std::map<std::tuple<int, int, int>, long long> counts;
    const auto dist = floyd_warshall(g);
    const auto& labels = g.node_labels();
    for (int u = 0; u < g.node_count(); ++u)
        for (int v = u + 1; v < g.node_count(); ++v) {
            if (dist[u][v] < 0) continue;
            ++counts[{std::min(labels[u], labels[v]), std::max(labels[u], labels[v]), dist[u][v]}];
        }
    return counts;
}

// Induced 3-node subgraph census via direct edge-list membership tests.
// Returns counts indexed by induced edge count 0..3.
inline std::array<long long, 4> triple_census(const gkp::Graph& g) {
    auto connected = [&g](int u, int v) {
        for (auto [a, b] : g.edges())
            if ((a == u && b == v) || (a == v && b == u)) return true;
        return false;
    };
    std::array<long long, 4> counts{0, 0, 0, 0};
    const int n = g.node_count();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                ++counts[connected(i, j) + connected(i, k) + connected(j, k)];
    return counts;
}

inline double min_eigenvalue(const std::vector<double>& values, std::size_t n) {
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = values[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const std::vector<double>& values, std::size_t n) {
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = values[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

// Uniform random node-labeled graph with edge probability p.
inline gkp::Graph random_graph(std::mt19937_64& rng, int n, double edge_prob, int alphabet) {
    std::vector<std::pair<int, int>> edges;
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (unit() < edge_prob) edges.emplace_back(u, v);
    std::vector<int> labels(n);
    for (int& l : labels) l = static_cast<int>(rng() % static_cast<std::uint64_t>(alphabet));
    return gkp::Graph(n, std::move(edges), std::move(labels));
}

// Applies a node permutation: node v of the result is node perm[v] of g.
inline gkp::Graph permuted_graph(const gkp::Graph& g, const std::vector<int>& perm) {
    const int n = g.node_count();
    std::vector<int> inverse(n);
    for (int v = 0; v < n; ++v) inverse[perm[v]] = v;
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges()) edges.emplace_back(inverse[u], inverse[v]);
    std::vector<int> labels(n);
    for (int v = 0; v < n; ++v) labels[v] = g.node_labels()[perm[v]];
    return gkp::Graph(n, std::move(edges), std::move(labels), g.graph_id());
}

}  // namespace oracle
