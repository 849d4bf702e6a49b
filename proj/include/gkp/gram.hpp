#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "gkp/graph.hpp"
#include "gkp/kernels.hpp"

namespace gkp {

// Symmetric matrix of pairwise kernel values. `spec.normalize` doubles as
// the normalized-or-raw flag.
struct GramMatrix {
    KernelSpec spec;
    std::size_t size = 0;
    std::vector<double> values;  // row-major, size * size

    double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * size + j]; }
    bool normalized() const { return spec.normalize; }
};

// Pairwise kernel values over precomputed feature maps. Each entry is an
// independent computation, so the result is bitwise identical for any worker
// count. `graph_ids`, when given, names graphs in degenerate-graph errors.
GramMatrix gram_from_feature_maps(const std::vector<FeatureMap>& maps, const KernelSpec& spec,
                                  int workers = 1, const std::vector<int>* graph_ids = nullptr);

// Feature maps once per graph, then all pairs.
GramMatrix gram_matrix(const Dataset& ds, const KernelSpec& spec, int workers = 1);

// Flat binary format: magic, M, kernel kind, h, normalize flag, then M*M
// little-endian 64-bit floats, row-major.
void save_gram(const GramMatrix& gram, const std::filesystem::path& file);
GramMatrix load_gram(const std::filesystem::path& file);

// Text export for debugging.
void export_gram_csv(const GramMatrix& gram, const std::filesystem::path& file);

}  // namespace gkp
