#include "gkp/gram.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <thread>

#include "gkp/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "gram/checkpoint files are written as raw little-endian words");

namespace gkp {
namespace {

constexpr char kGramMagic[8] = {'G', 'K', 'G', 'R', 'A', 'M', '0', '1'};

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

}  // namespace

GramMatrix gram_from_feature_maps(const std::vector<FeatureMap>& maps, const KernelSpec& spec,
                                  int workers, const std::vector<int>* graph_ids) {
    if (maps.empty()) throw ContractViolation("gram: empty feature-map list");
    if (workers < 1) throw ContractViolation("gram: workers must be >= 1");
    const std::size_t m = maps.size();

    std::vector<double> self(m);
    for (std::size_t i = 0; i < m; ++i) {
        self[i] = kernel_value(maps[i], maps[i]);
        if (spec.normalize && self[i] <= 0.0) {
            int id = graph_ids ? (*graph_ids)[i] : static_cast<int>(i);
            throw Error("gram: graph " + std::to_string(id) +
                        " is degenerate under normalization (empty feature map)");
        }
    }

    GramMatrix gram;
    gram.spec = spec;
    gram.size = m;
    gram.values.assign(m * m, 0.0);

    // Upper-triangle pairs in row order, split into contiguous chunks. Every
    // entry is a pure function of (maps[i], maps[j], self), so any split
    // produces the same bits.
    const std::size_t pair_count = m * (m + 1) / 2;
    // Row i of the upper triangle starts at linear index i*(2m - i + 1)/2.
    auto row_start_of = [m](std::size_t i) { return i * (2 * m - i + 1) / 2; };
    auto pair_at = [&](std::size_t linear) {
        std::size_t lo = 0, hi = m - 1;
        while (lo < hi) {  // largest i with row_start(i) <= linear
            std::size_t mid = (lo + hi + 1) / 2;
            if (row_start_of(mid) <= linear) lo = mid; else hi = mid - 1;
        }
        return std::pair<std::size_t, std::size_t>(lo, lo + (linear - row_start_of(lo)));
    };

    auto compute_range = [&](std::size_t begin, std::size_t end) {
        if (begin >= end) return;
        auto [i, j] = pair_at(begin);
        for (std::size_t linear = begin; linear < end; ++linear) {
            double value = kernel_value(maps[i], maps[j]);
            if (spec.normalize) value = normalize(value, self[i], self[j]);
            gram.values[i * m + j] = value;
            gram.values[j * m + i] = value;
            if (++j == m) { ++i; j = i; }
        }
    };

    const int used = static_cast<int>(std::min<std::size_t>(workers, pair_count));
    if (used <= 1) {
        compute_range(0, pair_count);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(used);
        for (int w = 0; w < used; ++w) {
            std::size_t begin = pair_count * w / used;
            std::size_t end = pair_count * (w + 1) / used;
            pool.emplace_back(compute_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    return gram;
}

GramMatrix gram_matrix(const Dataset& ds, const KernelSpec& spec, int workers) {
    if (ds.graphs.empty()) throw ContractViolation("gram_matrix: empty dataset");
    KernelContext ctx(spec, ds.label_alphabet_size());
    std::vector<FeatureMap> maps;
    maps.reserve(ds.size());
    std::vector<int> ids;
    ids.reserve(ds.size());
    for (const Graph& g : ds.graphs) {
        maps.push_back(ctx.feature_map(g));
        ids.push_back(g.graph_id());
    }
    return gram_from_feature_maps(maps, spec, workers, &ids);
}

void save_gram(const GramMatrix& gram, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw LoadError("cannot open " + file.string() + " for writing");
    out.write(kGramMagic, sizeof(kGramMagic));
    write_raw(out, static_cast<std::uint64_t>(gram.size));
    write_raw(out, static_cast<std::uint32_t>(gram.spec.kind));
    write_raw(out, static_cast<std::uint32_t>(gram.spec.h));
    write_raw(out, static_cast<std::uint8_t>(gram.spec.normalize ? 1 : 0));
    out.write(reinterpret_cast<const char*>(gram.values.data()),
              static_cast<std::streamsize>(gram.values.size() * sizeof(double)));
    if (!out) throw LoadError("short write to " + file.string());
}

GramMatrix load_gram(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LoadError("cannot open " + file.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kGramMagic, sizeof(magic)) != 0)
        throw FormatError(file.string() + ": not a gram matrix file");
    std::uint64_t m = 0;
    std::uint32_t kind = 0, h = 0;
    std::uint8_t normalize = 0;
    read_raw(in, m);
    read_raw(in, kind);
    read_raw(in, h);
    read_raw(in, normalize);
    if (!in || kind > 2) throw FormatError(file.string() + ": corrupt header");
    GramMatrix gram;
    gram.spec.kind = static_cast<KernelKind>(kind);
    gram.spec.h = static_cast<int>(h);
    gram.spec.normalize = normalize != 0;
    gram.size = m;
    gram.values.resize(m * m);
    in.read(reinterpret_cast<char*>(gram.values.data()),
            static_cast<std::streamsize>(gram.values.size() * sizeof(double)));
    if (!in) throw FormatError(file.string() + ": truncated payload");
    return gram;
}

void export_gram_csv(const GramMatrix& gram, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw LoadError("cannot open " + file.string() + " for writing");
    out.precision(17);
    for (std::size_t i = 0; i < gram.size; ++i) {
        for (std::size_t j = 0; j < gram.size; ++j) {
            if (j) out << ',';
            out << gram.at(i, j);
        }
        out << '\n';
    }
}

}  // namespace gkp
