#pragma once

#include <vector>

#include "gkp/graph.hpp"

namespace gkp {

// Compressed sparse row matrix, used for the normalized adjacency operator.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;   // size rows + 1
    std::vector<int> col_idx;   // column per entry, ascending within a row
    std::vector<double> values;

    std::vector<double> to_dense() const;
};

// BFS all-pairs shortest paths (edges are unweighted).
DistanceMatrix shortest_paths(const Graph& g);

// Row-normalized self-loop-augmented adjacency: row u holds 1/(deg(u)+1) at
// column u and at each neighbor of u. Every row sums to 1.
CsrMatrix normalized_adjacency(const Graph& g);

}  // namespace gkp
