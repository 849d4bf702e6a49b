#include "gkp/tu_loader.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "gkp/errors.hpp"

namespace gkp {
namespace {

// One record per line, comma-separated integers, tolerant of stray whitespace
// and blank lines.
std::vector<std::vector<long long>> read_int_records(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open " + file.string());
    std::vector<std::vector<long long>> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<long long> fields;
        std::string token;
        std::stringstream ss(line);
        while (std::getline(ss, token, ',')) {
            std::size_t pos = 0;
            while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
            std::size_t end = token.size();
            while (end > pos && std::isspace(static_cast<unsigned char>(token[end - 1]))) --end;
            if (pos == end) continue;
            try {
                std::size_t used = 0;
                long long value = std::stoll(token.substr(pos, end - pos), &used);
                if (used != end - pos) throw std::invalid_argument(token);
                fields.push_back(value);
            } catch (const std::exception&) {
                throw FormatError(file.string() + ":" + std::to_string(line_no) +
                                  ": expected integer, got '" + token + "'");
            }
        }
        if (!fields.empty()) records.push_back(std::move(fields));
    }
    return records;
}

std::filesystem::path required_file(const std::filesystem::path& dir, const std::string& suffix) {
    std::filesystem::path p = dir / (dir.filename().string() + suffix);
    if (!std::filesystem::exists(p)) throw LoadError("missing dataset file " + p.string());
    return p;
}

}  // namespace

Dataset load_tu_dataset(const std::filesystem::path& directory) {
    std::filesystem::path dir = directory;
    if (dir.filename().empty()) dir = dir.parent_path();  // tolerate trailing slash
    if (!std::filesystem::is_directory(dir)) throw LoadError("not a dataset directory: " + dir.string());

    auto indicator = read_int_records(required_file(dir, "_graph_indicator.txt"));
    auto edges = read_int_records(required_file(dir, "_A.txt"));
    auto graph_labels = read_int_records(required_file(dir, "_graph_labels.txt"));
    auto node_labels = read_int_records(required_file(dir, "_node_labels.txt"));

    const std::size_t total_nodes = indicator.size();
    if (node_labels.size() != total_nodes)
        throw FormatError(dir.string() + ": " + std::to_string(total_nodes) +
                          " nodes in the indicator but " + std::to_string(node_labels.size()) +
                          " node-label lines (node with no label)");

    // Graph slots in ascending indicator-value order; standard files use 1..N.
    std::map<long long, int> graph_slot;
    std::vector<long long> node_graph(total_nodes);
    for (std::size_t i = 0; i < total_nodes; ++i) {
        if (indicator[i].size() != 1)
            throw FormatError(dir.string() + ": indicator line " + std::to_string(i + 1) +
                              " must hold one integer");
        node_graph[i] = indicator[i][0];
        graph_slot.emplace(node_graph[i], 0);
    }
    int next = 0;
    for (auto& [value, slot] : graph_slot) slot = next++;
    const int num_graphs = next;

    if (graph_labels.size() != static_cast<std::size_t>(num_graphs))
        throw FormatError(dir.string() + ": " + std::to_string(num_graphs) + " graphs but " +
                          std::to_string(graph_labels.size()) + " graph-label lines");

    // Dataset-wide node-label dictionary, stable across graphs.
    std::map<long long, int> label_id;
    for (const auto& rec : node_labels) {
        if (rec.empty()) throw FormatError(dir.string() + ": empty node-label line");
        label_id.emplace(rec[0], 0);
    }
    next = 0;
    std::vector<long long> alphabet;
    for (auto& [value, id] : label_id) {
        id = next++;
        alphabet.push_back(value);
    }

    // Per-graph node lists; local index = order of appearance in the file.
    std::vector<int> graph_size(num_graphs, 0);
    std::vector<int> local_index(total_nodes);
    for (std::size_t i = 0; i < total_nodes; ++i) {
        int g = graph_slot.at(node_graph[i]);
        local_index[i] = graph_size[g]++;
    }

    std::vector<std::vector<std::pair<int, int>>> graph_edges(num_graphs);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].size() != 2)
            throw FormatError(dir.string() + ": edge line " + std::to_string(e + 1) +
                              " must hold two node ids");
        long long a = edges[e][0], b = edges[e][1];
        if (a < 1 || b < 1 || a > static_cast<long long>(total_nodes) ||
            b > static_cast<long long>(total_nodes))
            throw FormatError(dir.string() + ": edge line " + std::to_string(e + 1) +
                              " references a node id outside [1, " + std::to_string(total_nodes) + "]");
        int ga = graph_slot.at(node_graph[a - 1]);
        int gb = graph_slot.at(node_graph[b - 1]);
        if (ga != gb)
            throw FormatError(dir.string() + ": edge line " + std::to_string(e + 1) +
                              " crosses two graphs");
        graph_edges[ga].emplace_back(local_index[a - 1], local_index[b - 1]);
    }

    std::vector<std::vector<int>> graph_node_labels(num_graphs);
    for (int g = 0; g < num_graphs; ++g) graph_node_labels[g].resize(graph_size[g]);
    for (std::size_t i = 0; i < total_nodes; ++i) {
        int g = graph_slot.at(node_graph[i]);
        graph_node_labels[g][local_index[i]] = label_id.at(node_labels[i][0]);
    }

    // Class ids contiguous in ascending raw-label order.
    std::map<long long, int> class_id;
    for (const auto& rec : graph_labels) {
        if (rec.empty()) throw FormatError(dir.string() + ": empty graph-label line");
        class_id.emplace(rec[0], 0);
    }
    next = 0;
    for (auto& [value, id] : class_id) id = next++;

    Dataset ds;
    ds.name = dir.filename().string();
    ds.label_alphabet = std::move(alphabet);
    ds.num_classes = next;
    ds.graphs.reserve(num_graphs);
    ds.targets.reserve(num_graphs);
    for (int g = 0; g < num_graphs; ++g) {
        if (graph_size[g] == 0)
            throw FormatError(dir.string() + ": graph " + std::to_string(g) + " has no nodes");
        Graph graph(graph_size[g], std::move(graph_edges[g]), std::move(graph_node_labels[g]), g);
        ds.dropped_self_loops += graph.dropped_self_loops();
        ds.dropped_duplicate_edges += graph.dropped_duplicate_edges();
        ds.graphs.push_back(std::move(graph));
        ds.targets.push_back(class_id.at(graph_labels[g][0]));
    }
    return ds;
}

void write_tu_dataset(const Dataset& ds, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    const std::string stem = directory.filename().string();
    std::ofstream a(directory / (stem + "_A.txt"));
    std::ofstream ind(directory / (stem + "_graph_indicator.txt"));
    std::ofstream gl(directory / (stem + "_graph_labels.txt"));
    std::ofstream nl(directory / (stem + "_node_labels.txt"));
    if (!a || !ind || !gl || !nl) throw LoadError("cannot write dataset files under " + directory.string());

    long long base = 1;
    for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
        const Graph& graph = ds.graphs[g];
        for (int v = 0; v < graph.node_count(); ++v) {
            ind << (g + 1) << "\n";
            long long raw = graph.node_labels()[v] < ds.label_alphabet_size()
                                ? ds.label_alphabet[graph.node_labels()[v]]
                                : graph.node_labels()[v];
            nl << raw << "\n";
        }
        for (auto [u, v] : graph.edges()) {
            a << (base + u) << ", " << (base + v) << "\n";
            a << (base + v) << ", " << (base + u) << "\n";
        }
        gl << (ds.targets.empty() ? 0 : ds.targets[g]) << "\n";
        base += graph.node_count();
    }
}

}  // namespace gkp
