#include "gkp/graph.hpp"

#include <algorithm>

#include "gkp/errors.hpp"

namespace gkp {

Graph::Graph(int node_count, std::vector<std::pair<int, int>> edges,
             std::vector<int> node_labels, int graph_id)
    : node_count_(node_count), graph_id_(graph_id), node_labels_(std::move(node_labels)) {
    if (node_count_ < 1)
        throw ContractViolation("graph " + std::to_string(graph_id_) + ": node count must be >= 1");
    if (static_cast<int>(node_labels_.size()) != node_count_)
        throw ContractViolation("graph " + std::to_string(graph_id_) + ": expected " +
                                std::to_string(node_count_) + " node labels, got " +
                                std::to_string(node_labels_.size()));
    for (int label : node_labels_)
        if (label < 0)
            throw ContractViolation("graph " + std::to_string(graph_id_) + ": negative node label");

    edges_.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u < 0 || u >= node_count_ || v < 0 || v >= node_count_)
            throw ContractViolation("graph " + std::to_string(graph_id_) + ": edge endpoint out of range");
        if (u == v) {
            ++dropped_self_loops_;
            continue;
        }
        if (u > v) std::swap(u, v);
        edges_.emplace_back(u, v);
    }
    std::sort(edges_.begin(), edges_.end());
    auto last = std::unique(edges_.begin(), edges_.end());
    dropped_duplicate_edges_ = static_cast<int>(edges_.end() - last);
    edges_.erase(last, edges_.end());

    adjacency_.resize(node_count_);
    for (auto [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

const std::vector<int>& Graph::neighbors(int v) const {
    if (v < 0 || v >= node_count_) throw ContractViolation("neighbors: node index out of range");
    return adjacency_[v];
}

int Graph::degree(int v) const { return static_cast<int>(neighbors(v).size()); }

bool Graph::has_edge(int u, int v) const {
    if (u == v) return false;
    const auto& nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

}  // namespace gkp
