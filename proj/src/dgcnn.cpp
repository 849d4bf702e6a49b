#include "gkp/dgcnn.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "gkp/errors.hpp"
#include "gkp/graph_algos.hpp"

namespace gkp {
namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::vector<int> split_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

// Output lengths of the conv1d stack given the flattened sortpool length.
std::vector<int> conv_stack_lengths(const NetworkConfig& cfg) {
    std::vector<int> lengths;
    int len = cfg.sortpool_k * cfg.concat_channels();
    for (const Conv1dSpec& spec : cfg.conv1d) {
        if (len < spec.width)
            throw ConfigError("conv1d width " + std::to_string(spec.width) +
                              " exceeds its input length " + std::to_string(len));
        len = (len - spec.width) / spec.stride + 1;
        lengths.push_back(len);
    }
    return lengths;
}

}  // namespace

int NetworkConfig::concat_channels() const {
    int total = 0;
    for (int c : conv_channels) total += c;
    return total;
}

void NetworkConfig::finalize() {
    if (conv_channels.empty()) throw ConfigError("at least one graph-convolution layer is required");
    for (int c : conv_channels)
        if (c < 1) throw ConfigError("graph-convolution widths must be >= 1");
    if (sortpool_k < 1) throw ConfigError("sortpool_k must be >= 1");
    if (dense_width < 1) throw ConfigError("dense_width must be >= 1");
    if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
    if (label_alphabet_size < 1) throw ConfigError("label_alphabet_size must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");

    const int sum_c = concat_channels();
    if (conv1d.empty()) conv1d = {{16, sum_c, sum_c}, {32, 5, 1}};
    for (Conv1dSpec& spec : conv1d) {
        if (spec.width == 0) spec.width = sum_c;
        if (spec.stride == 0) spec.stride = sum_c;
        if (spec.filters < 1 || spec.width < 1 || spec.stride < 1)
            throw ConfigError("conv1d filters, width and stride must be >= 1");
    }
    conv_stack_lengths(*this);  // validates lengths stay positive
}

std::size_t parameter_count(const NetworkConfig& cfg) {
    std::size_t total = 0;
    int in = cfg.label_alphabet_size + 1;
    for (int c : cfg.conv_channels) {
        total += static_cast<std::size_t>(in) * c;
        if (cfg.bias) total += static_cast<std::size_t>(c);
        in = c;
    }
    int ch = 1;
    for (const Conv1dSpec& spec : cfg.conv1d) {
        total += static_cast<std::size_t>(spec.filters) * ch * spec.width;
        if (cfg.bias) total += static_cast<std::size_t>(spec.filters);
        ch = spec.filters;
    }
    const std::vector<int> lengths = conv_stack_lengths(cfg);
    const int last_len = lengths.empty() ? cfg.sortpool_k * cfg.concat_channels() : lengths.back();
    const int last_ch = cfg.conv1d.empty() ? 1 : cfg.conv1d.back().filters;
    total += static_cast<std::size_t>(last_ch) * last_len * cfg.dense_width;
    if (cfg.bias) total += static_cast<std::size_t>(cfg.dense_width);
    total += static_cast<std::size_t>(cfg.dense_width) * cfg.num_classes;
    if (cfg.bias) total += static_cast<std::size_t>(cfg.num_classes);
    return total;
}

Network build_network(NetworkConfig config, std::uint64_t seed) {
    config.finalize();
    Network net;
    net.config = config;

    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    };
    auto init = [&](const std::string& name, std::vector<std::size_t> shape, std::size_t fan_in) {
        Tensor t{std::move(shape)};
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = uniform(-bound, bound);
        net.params.add(name, std::move(t));
    };

    std::size_t in = static_cast<std::size_t>(config.label_alphabet_size) + 1;
    for (std::size_t layer = 0; layer < config.conv_channels.size(); ++layer) {
        const std::size_t out = static_cast<std::size_t>(config.conv_channels[layer]);
        init("gconv" + std::to_string(layer) + ".W", {in, out}, in);
        if (config.bias) net.params.add("gconv" + std::to_string(layer) + ".b", Tensor({out}, 0.0));
        in = out;
    }
    std::size_t ch = 1;
    for (std::size_t j = 0; j < config.conv1d.size(); ++j) {
        const Conv1dSpec& spec = config.conv1d[j];
        init("conv1d" + std::to_string(j) + ".F",
             {static_cast<std::size_t>(spec.filters), ch, static_cast<std::size_t>(spec.width)},
             ch * static_cast<std::size_t>(spec.width));
        if (config.bias)
            net.params.add("conv1d" + std::to_string(j) + ".b",
                           Tensor({static_cast<std::size_t>(spec.filters)}, 0.0));
        ch = static_cast<std::size_t>(spec.filters);
    }
    const std::vector<int> lengths = conv_stack_lengths(config);
    const std::size_t dense_in =
        ch * static_cast<std::size_t>(lengths.empty() ? config.sortpool_k * config.concat_channels()
                                                      : lengths.back());
    init("dense.W", {dense_in, static_cast<std::size_t>(config.dense_width)}, dense_in);
    if (config.bias)
        net.params.add("dense.b", Tensor({static_cast<std::size_t>(config.dense_width)}, 0.0));
    init("head.W",
         {static_cast<std::size_t>(config.dense_width), static_cast<std::size_t>(config.num_classes)},
         static_cast<std::size_t>(config.dense_width));
    if (config.bias)
        net.params.add("head.b", Tensor({static_cast<std::size_t>(config.num_classes)}, 0.0));
    return net;
}

Tensor one_hot_features(const Graph& g, int label_alphabet_size) {
    const std::size_t n = static_cast<std::size_t>(g.node_count());
    const std::size_t d = static_cast<std::size_t>(label_alphabet_size) + 1;
    Tensor x({n, d}, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        int label = g.node_labels()[v];
        std::size_t slot = label < label_alphabet_size ? static_cast<std::size_t>(label) : d - 1;
        x.at(v, slot) = 1.0;
    }
    return x;
}

namespace {

using ParamFetch = std::function<Tape::ValueRef(const std::string&)>;

Tape::ValueRef embed_impl(Tape& tape, const NetworkConfig& cfg, const ParamFetch& fetch,
                          const Graph& g, bool training, std::uint64_t* rng_state) {
    Tape::ValueRef h = tape.constant(one_hot_features(g, cfg.label_alphabet_size));
    const CsrMatrix s = normalized_adjacency(g);

    std::vector<Tape::ValueRef> layer_outputs;
    for (std::size_t layer = 0; layer < cfg.conv_channels.size(); ++layer) {
        Tape::ValueRef z = tape.matmul(tape.spmm(s, h), fetch("gconv" + std::to_string(layer) + ".W"));
        if (cfg.bias) z = tape.add_bias(z, fetch("gconv" + std::to_string(layer) + ".b"));
        h = tape.tanh_act(z);
        layer_outputs.push_back(h);
    }

    Tape::ValueRef pooled = tape.sortpool(tape.concat_cols(layer_outputs), cfg.sortpool_k);
    Tape::ValueRef x = tape.flatten_to_row(pooled);
    for (std::size_t j = 0; j < cfg.conv1d.size(); ++j) {
        x = tape.conv1d(x, fetch("conv1d" + std::to_string(j) + ".F"), cfg.conv1d[j].stride);
        if (cfg.bias) x = tape.add_channel_bias(x, fetch("conv1d" + std::to_string(j) + ".b"));
        x = tape.relu(x);
    }
    Tape::ValueRef v = tape.vec_mat(tape.flatten_to_vector(x), fetch("dense.W"));
    if (cfg.bias) v = tape.add_bias(v, fetch("dense.b"));
    Tape::ValueRef e = tape.relu(v);
    if (training && cfg.dropout > 0.0) {
        if (!rng_state) throw ContractViolation("dropout requires an rng state during training");
        e = tape.dropout(e, cfg.dropout, rng_state);
    }
    return e;
}

Tape::ValueRef classify_impl(Tape& tape, const NetworkConfig& cfg, const ParamFetch& fetch,
                             const Graph& g, bool training, std::uint64_t* rng_state) {
    Tape::ValueRef e = embed_impl(tape, cfg, fetch, g, training, rng_state);
    Tape::ValueRef logits = tape.vec_mat(e, fetch("head.W"));
    if (cfg.bias) logits = tape.add_bias(logits, fetch("head.b"));
    return tape.log_softmax(logits);
}

}  // namespace

Tape::ValueRef embed_on_tape(Tape& tape, Network& net, const Graph& g, bool training,
                             std::uint64_t* rng_state) {
    ParamFetch fetch = [&](const std::string& name) { return tape.parameter(net.params, name); };
    return embed_impl(tape, net.config, fetch, g, training, rng_state);
}

Tape::ValueRef classify_on_tape(Tape& tape, Network& net, const Graph& g, bool training,
                                std::uint64_t* rng_state) {
    ParamFetch fetch = [&](const std::string& name) { return tape.parameter(net.params, name); };
    return classify_impl(tape, net.config, fetch, g, training, rng_state);
}

Tensor embed(const Network& net, const Graph& g) {
    Tape tape;
    ParamFetch fetch = [&](const std::string& name) { return tape.constant(net.params.param(name)); };
    return tape.value(embed_impl(tape, net.config, fetch, g, false, nullptr));
}

Tensor classify(const Network& net, const Graph& g) {
    Tape tape;
    ParamFetch fetch = [&](const std::string& name) { return tape.constant(net.params.param(name)); };
    return tape.value(classify_impl(tape, net.config, fetch, g, false, nullptr));
}

void save_network(const Network& net, const std::filesystem::path& file,
                  const std::map<std::string, std::string>& extra_header) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw LoadError("cannot open " + file.string() + " for writing");
    const NetworkConfig& c = net.config;
    out << "GKPNET1\n";
    out << "conv_channels = " << join_ints(c.conv_channels) << "\n";
    out << "sortpool_k = " << c.sortpool_k << "\n";
    std::vector<int> filters, widths, strides;
    for (const Conv1dSpec& s : c.conv1d) {
        filters.push_back(s.filters);
        widths.push_back(s.width);
        strides.push_back(s.stride);
    }
    out << "conv1d_filters = " << join_ints(filters) << "\n";
    out << "conv1d_widths = " << join_ints(widths) << "\n";
    out << "conv1d_strides = " << join_ints(strides) << "\n";
    out << "dense_width = " << c.dense_width << "\n";
    out << "num_classes = " << c.num_classes << "\n";
    out << "label_alphabet_size = " << c.label_alphabet_size << "\n";
    out << "bias = " << (c.bias ? "true" : "false") << "\n";
    out << "dropout = " << c.dropout << "\n";
    for (const auto& [key, value] : extra_header) out << key << " = " << value << "\n";
    out << "---\n";
    net.params.save_stream(out);
    if (!out) throw LoadError("short write to " + file.string());
}

LoadedNetwork load_network(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LoadError("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != "GKPNET1")
        throw FormatError(file.string() + ": not a network checkpoint");

    std::map<std::string, std::string> fields;
    while (std::getline(in, line)) {
        if (line == "---") break;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError(file.string() + ": bad header line '" + line + "'");
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        fields[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto take = [&](const std::string& key) {
        auto it = fields.find(key);
        if (it == fields.end()) throw FormatError(file.string() + ": missing header key " + key);
        std::string v = it->second;
        fields.erase(it);
        return v;
    };

    LoadedNetwork loaded;
    NetworkConfig& c = loaded.network.config;
    c.conv_channels = split_ints(take("conv_channels"));
    c.sortpool_k = std::stoi(take("sortpool_k"));
    std::vector<int> filters = split_ints(take("conv1d_filters"));
    std::vector<int> widths = split_ints(take("conv1d_widths"));
    std::vector<int> strides = split_ints(take("conv1d_strides"));
    c.conv1d.clear();
    for (std::size_t j = 0; j < filters.size(); ++j)
        c.conv1d.push_back({filters[j], widths[j], strides[j]});
    c.dense_width = std::stoi(take("dense_width"));
    c.num_classes = std::stoi(take("num_classes"));
    c.label_alphabet_size = std::stoi(take("label_alphabet_size"));
    c.bias = take("bias") == "true";
    c.dropout = std::stod(take("dropout"));
    c.finalize();
    loaded.header = std::move(fields);  // provenance lines
    loaded.network.params = ParamStore::load_stream(in, file.string());
    return loaded;
}

}  // namespace gkp
