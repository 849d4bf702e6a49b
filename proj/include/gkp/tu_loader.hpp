#pragma once

#include <filesystem>

#include "gkp/graph.hpp"

namespace gkp {

// Loads a dataset in the standard community text format: a directory NAME/
// containing NAME_A.txt (edge list, 1-based global node ids),
// NAME_graph_indicator.txt, NAME_graph_labels.txt and NAME_node_labels.txt.
//
// Node indices are re-based to 0 per graph, class labels are remapped to a
// contiguous [0, C) range (ascending raw value order) and node labels are
// dictionary-encoded dataset-wide (ascending raw value order) so that
// identical labels share an id across graphs.
Dataset load_tu_dataset(const std::filesystem::path& directory);

// Writes `ds` in the same four-file format (used by tests and the synth tool).
void write_tu_dataset(const Dataset& ds, const std::filesystem::path& directory);

}  // namespace gkp
