#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gkp {

// Undirected node-labeled graph. Construction canonicalizes the edge set:
// self-loops and duplicate edges are dropped (counted, not errors) because
// public copies of the benchmark datasets contain such artifacts.
class Graph {
public:
    Graph(int node_count, std::vector<std::pair<int, int>> edges,
          std::vector<int> node_labels, int graph_id = 0);

    int node_count() const { return node_count_; }
    int graph_id() const { return graph_id_; }

    // Canonical edge list: u < v, sorted, no duplicates.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& node_labels() const { return node_labels_; }
    const std::vector<int>& neighbors(int v) const;
    int degree(int v) const;
    bool has_edge(int u, int v) const;

    int dropped_self_loops() const { return dropped_self_loops_; }
    int dropped_duplicate_edges() const { return dropped_duplicate_edges_; }

private:
    int node_count_;
    int graph_id_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<int> node_labels_;
    std::vector<std::vector<int>> adjacency_;
    int dropped_self_loops_ = 0;
    int dropped_duplicate_edges_ = 0;
};

// An ordered graph collection with per-graph class targets. `targets` is
// empty for unlabeled collections (the pre-training set U).
struct Dataset {
    std::vector<Graph> graphs;
    std::vector<int> targets;                 // class ids in [0, num_classes)
    std::vector<long long> label_alphabet;    // raw node-label values, index = label id
    std::string name;
    int num_classes = 0;
    int dropped_self_loops = 0;
    int dropped_duplicate_edges = 0;

    std::size_t size() const { return graphs.size(); }
    int label_alphabet_size() const { return static_cast<int>(label_alphabet.size()); }
    bool labeled() const { return !targets.empty(); }
};

// Pairwise shortest-path distances with an explicit unreachable sentinel.
class DistanceMatrix {
public:
    static constexpr int kUnreachable = -1;

    explicit DistanceMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, kUnreachable) {}

    int n() const { return n_; }
    int at(int u, int v) const { return d_[static_cast<std::size_t>(u) * n_ + v]; }
    bool reachable(int u, int v) const { return at(u, v) != kUnreachable; }
    void set(int u, int v, int dist) { d_[static_cast<std::size_t>(u) * n_ + v] = dist; }

private:
    int n_;
    std::vector<int> d_;
};

}  // namespace gkp
