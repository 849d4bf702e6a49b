#include "gkp/graph_algos.hpp"

#include <queue>

namespace gkp {

std::vector<double> CsrMatrix::to_dense() const {
    std::vector<double> dense(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int r = 0; r < rows; ++r)
        for (int e = row_ptr[r]; e < row_ptr[r + 1]; ++e)
            dense[static_cast<std::size_t>(r) * cols + col_idx[e]] = values[e];
    return dense;
}

DistanceMatrix shortest_paths(const Graph& g) {
    const int n = g.node_count();
    DistanceMatrix dist(n);
    std::vector<int> level(n);
    for (int source = 0; source < n; ++source) {
        std::fill(level.begin(), level.end(), DistanceMatrix::kUnreachable);
        level[source] = 0;
        std::queue<int> frontier;
        frontier.push(source);
        while (!frontier.empty()) {
            int u = frontier.front();
            frontier.pop();
            for (int v : g.neighbors(u)) {
                if (level[v] == DistanceMatrix::kUnreachable) {
                    level[v] = level[u] + 1;
                    frontier.push(v);
                }
            }
        }
        for (int v = 0; v < n; ++v) dist.set(source, v, level[v]);
    }
    return dist;
}

CsrMatrix normalized_adjacency(const Graph& g) {
    const int n = g.node_count();
    CsrMatrix m;
    m.rows = n;
    m.cols = n;
    m.row_ptr.resize(n + 1, 0);
    m.col_idx.reserve(2 * g.edges().size() + n);
    m.values.reserve(2 * g.edges().size() + n);
    for (int u = 0; u < n; ++u) {
        const auto& nbrs = g.neighbors(u);
        const double w = 1.0 / (static_cast<double>(nbrs.size()) + 1.0);
        // Columns ascending: neighbors below u, then the self-loop, then the rest.
        std::size_t i = 0;
        while (i < nbrs.size() && nbrs[i] < u) {
            m.col_idx.push_back(nbrs[i]);
            m.values.push_back(w);
            ++i;
        }
        m.col_idx.push_back(u);
        m.values.push_back(w);
        while (i < nbrs.size()) {
            m.col_idx.push_back(nbrs[i]);
            m.values.push_back(w);
            ++i;
        }
        m.row_ptr[u + 1] = static_cast<int>(m.col_idx.size());
    }
    return m;
}

}  // namespace gkp
