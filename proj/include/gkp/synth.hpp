#pragma once

#include <cstdint>

#include "gkp/graph.hpp"

namespace gkp {

// Synthetic binary classification set: class 1 graphs contain triangles,
// class 0 graphs are triangle-free. Connected graphs, 3 node labels drawn
// independently of the class, so only structure carries the signal. The
// triangle count is an exact linear separator in graphlet space.
Dataset make_triangle_dataset(int count, std::uint64_t seed, int min_nodes = 6, int max_nodes = 12);

// Copies the selected graphs (targets and alphabet preserved, original
// graph ids kept).
Dataset subset_dataset(const Dataset& ds, const std::vector<int>& indices);

}  // namespace gkp
