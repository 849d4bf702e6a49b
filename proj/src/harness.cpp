#include "gkp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "gkp/config.hpp"
#include "gkp/errors.hpp"
#include "gkp/rng.hpp"
#include "gkp/synth.hpp"

namespace gkp {

std::string to_string(Method method) {
    switch (method) {
        case Method::KernelSvm: return "kernel-svm";
        case Method::Dgcnn: return "dgcnn";
        case Method::PretrainedDgcnn: return "pretrained-dgcnn";
    }
    return "?";
}

Method method_from_string(const std::string& name) {
    if (name == "kernel-svm" || name == "kernel_svm") return Method::KernelSvm;
    if (name == "dgcnn") return Method::Dgcnn;
    if (name == "pretrained-dgcnn" || name == "pretrained_dgcnn") return Method::PretrainedDgcnn;
    throw ConfigError("unknown method '" + name +
                      "' (expected kernel-svm, dgcnn or pretrained-dgcnn)");
}

int derive_sortpool_k(const Dataset& ds, const std::vector<int>& indices) {
    if (indices.empty()) throw ContractViolation("derive_sortpool_k: no graphs");
    std::vector<int> sizes;
    sizes.reserve(indices.size());
    for (int idx : indices) sizes.push_back(ds.graphs[idx].node_count());
    std::sort(sizes.begin(), sizes.end());
    const std::size_t need = (indices.size() * 6 + 9) / 10;  // ceil(0.6 N)
    const int k = sizes[sizes.size() - need];
    return std::max(10, k);
}

namespace {

constexpr char kPhaseTrainGram[] = "train-gram";
constexpr char kPhasePretrain[] = "pretrain";
constexpr char kPhaseFinetune[] = "finetune";
constexpr char kPhaseEpochSelect[] = "epoch-select";
constexpr char kPhaseTestPredict[] = "test-predict";

struct FoldContext {
    const ExperimentConfig* cfg;
    const Dataset* ds;
    const FoldPlan* plan;
    int rep;
    int fold;

    void note(const char* phase, int graph_index) const {
        if (cfg->access_hook) cfg->access_hook(phase, rep, fold, graph_index);
    }
    std::uint64_t fold_seed() const {
        return mix_seed(cfg->seed, static_cast<std::uint64_t>(rep) * FoldPlan::kNumFolds + fold);
    }
};

void run_jobs(int total, int jobs, const std::function<void(int)>& work) {
    if (jobs <= 1) {
        for (int i = 0; i < total; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        int i;
        while ((i = next.fetch_add(1)) < total) {
            try {
                work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int used = std::min(jobs, total);
    pool.reserve(used);
    for (int t = 0; t < used; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void finalize_report(Report& report, int repetitions) {
    double sum = 0.0;
    int used = 0;
    for (const FoldResult& f : report.folds) {
        if (f.failed) {
            ++report.failed_folds;
            continue;
        }
        sum += f.accuracy;
        ++used;
    }
    report.mean = used ? sum / used : 0.0;

    std::vector<double> groups;
    if (repetitions > 1) {
        report.std_over = "repetition-means";
        for (int rep = 0; rep < repetitions; ++rep) {
            double rsum = 0.0;
            int rn = 0;
            for (const FoldResult& f : report.folds)
                if (f.repetition == rep && !f.failed) {
                    rsum += f.accuracy;
                    ++rn;
                }
            if (rn) groups.push_back(rsum / rn);
        }
    } else {
        report.std_over = "folds";
        for (const FoldResult& f : report.folds)
            if (!f.failed) groups.push_back(f.accuracy);
    }
    if (groups.size() > 1) {
        double gmean = std::accumulate(groups.begin(), groups.end(), 0.0) / groups.size();
        double ss = 0.0;
        for (double g : groups) ss += (g - gmean) * (g - gmean);
        report.std_dev = std::sqrt(ss / (groups.size() - 1));
    }
}

// ---- kernel + SVM pipeline ----

struct KernelFoldState {
    KernelContext ctx;
    std::vector<FeatureMap> maps;   // aligned with train9
    std::vector<double> raw_self;   // raw k(x, x) per train9 member
    GramMatrix gram;                // over train9, spec-normalized
};

FoldResult kernel_svm_fold(const FoldContext& fc) {
    const ExperimentConfig& cfg = *fc.cfg;
    const Dataset& ds = *fc.ds;
    const std::vector<int>& test = fc.plan->test_indices(fc.rep, fc.fold);
    const std::vector<int>& val = fc.plan->validation_indices(fc.rep, fc.fold);
    const std::vector<int> train8 = fc.plan->train_indices(fc.rep, fc.fold, false);
    const std::vector<int> train9 = fc.plan->train_indices(fc.rep, fc.fold, true);

    std::unordered_map<int, std::size_t> pos9;
    for (std::size_t p = 0; p < train9.size(); ++p) pos9[train9[p]] = p;
    std::vector<std::size_t> train8_pos;
    for (int idx : train8) train8_pos.push_back(pos9.at(idx));

    std::vector<int> labels8, labels9;
    for (int idx : train8) labels8.push_back(ds.targets[idx]);
    for (int idx : train9) labels9.push_back(ds.targets[idx]);

    const std::vector<int> h_grid =
        cfg.kernel.kind == KernelKind::WL ? cfg.wl_h_grid : std::vector<int>{cfg.kernel.h};

    std::vector<KernelFoldState> states;
    states.reserve(h_grid.size());
    double best_acc = -1.0;
    std::size_t best_h_index = 0;
    double best_c = cfg.svm_c_grid.front();

    for (int h : h_grid) {
        KernelSpec spec = cfg.kernel;
        spec.h = h;
        KernelFoldState state{KernelContext(spec, ds.label_alphabet_size()), {}, {}, {}};
        std::vector<int> ids;
        for (int idx : train9) {
            fc.note(kPhaseTrainGram, idx);
            state.maps.push_back(state.ctx.feature_map(ds.graphs[idx]));
            state.raw_self.push_back(kernel_value(state.maps.back(), state.maps.back()));
            ids.push_back(idx);
        }
        state.gram = gram_from_feature_maps(state.maps, spec, cfg.gram_workers, &ids);

        const KernelView view8 = KernelView::subset(state.gram, train8_pos);
        for (double c : cfg.svm_c_grid) {
            MulticlassSvm model =
                svm_train_multiclass(view8, labels8, ds.num_classes, c, cfg.svm_tol);
            int correct = 0;
            std::vector<double> row(train8.size());
            for (int v : val) {
                const std::size_t vp = pos9.at(v);
                for (std::size_t j = 0; j < train8_pos.size(); ++j)
                    row[j] = state.gram.at(vp, train8_pos[j]);
                if (model.predict(row) == ds.targets[v]) ++correct;
            }
            const double acc = static_cast<double>(correct) / val.size();
            if (acc > best_acc) {
                best_acc = acc;
                best_h_index = states.size();
                best_c = c;
            }
        }
        states.push_back(std::move(state));
    }

    KernelFoldState& best = states[best_h_index];
    MulticlassSvm model = svm_train_multiclass(KernelView::dense(best.gram), labels9,
                                               ds.num_classes, best_c, cfg.svm_tol);
    int correct = 0;
    std::vector<double> row(train9.size());
    for (int t : test) {
        fc.note(kPhaseTestPredict, t);
        const FeatureMap fm = best.ctx.feature_map(ds.graphs[t]);
        const double self = kernel_value(fm, fm);
        for (std::size_t j = 0; j < train9.size(); ++j) {
            const double raw = kernel_value(fm, best.maps[j]);
            row[j] = best.gram.spec.normalize ? normalize(raw, self, best.raw_self[j]) : raw;
        }
        if (model.predict(row) == ds.targets[t]) ++correct;
    }

    FoldResult result;
    result.repetition = fc.rep;
    result.fold = fc.fold;
    result.accuracy = static_cast<double>(correct) / test.size();
    std::ostringstream sel;
    if (cfg.kernel.kind == KernelKind::WL) sel << "h=" << h_grid[best_h_index] << " ";
    sel << "C=" << best_c;
    result.selected = sel.str();
    return result;
}

// ---- DGCNN pipelines ----

double eval_accuracy(const Network& net, const FoldContext& fc, const std::vector<int>& indices,
                     const char* phase) {
    int correct = 0;
    for (int idx : indices) {
        fc.note(phase, idx);
        const Tensor logp = classify(net, fc.ds->graphs[idx]);
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < logp.size(); ++c)
            if (logp[c] > logp[argmax]) argmax = c;
        if (static_cast<int>(argmax) == fc.ds->targets[idx]) ++correct;
    }
    return static_cast<double>(correct) / indices.size();
}

NetworkConfig resolved_network_config(const FoldContext& fc, const std::vector<int>& train9) {
    NetworkConfig netcfg = fc.cfg->network;
    netcfg.num_classes = fc.ds->num_classes;
    netcfg.label_alphabet_size = fc.ds->label_alphabet_size();
    if (netcfg.sortpool_k <= 0) {
        for (int idx : train9) fc.note(kPhaseFinetune, idx);
        netcfg.sortpool_k = derive_sortpool_k(*fc.ds, train9);
    }
    netcfg.finalize();
    return netcfg;
}

// Supervised phase shared by both DGCNN pipelines: Adam + NLL on the 8
// training folds, epoch picked by validation accuracy, then the test fold.
FoldResult train_and_eval_classifier(Network& net, const FoldContext& fc) {
    const ExperimentConfig& cfg = *fc.cfg;
    const Dataset& ds = *fc.ds;
    const std::vector<int>& test = fc.plan->test_indices(fc.rep, fc.fold);
    const std::vector<int>& val = fc.plan->validation_indices(fc.rep, fc.fold);
    std::vector<int> order = fc.plan->train_indices(fc.rep, fc.fold, false);

    FoldResult result;
    result.repetition = fc.rep;
    result.fold = fc.fold;

    AdamState adam(net.params, cfg.finetune.adam);
    std::mt19937_64 batch_rng(mix_seed(fc.fold_seed(), 2));
    std::uint64_t dropout_state = mix_seed(fc.fold_seed(), 4);

    ParamStore best_params = net.params;  // epoch 0 = untrained fallback
    double best_val = eval_accuracy(net, fc, val, kPhaseEpochSelect);
    int best_epoch = 0;

    for (int epoch = 1; epoch <= cfg.finetune.epochs; ++epoch) {
        seeded_shuffle(order, batch_rng);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.finetune.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.finetune.batch_size));
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            net.params.zero_grads();
            for (std::size_t b = start; b < end; ++b) {
                const int idx = order[b];
                fc.note(kPhaseFinetune, idx);
                Tape tape;
                Tape::ValueRef logp =
                    classify_on_tape(tape, net, ds.graphs[idx], true, &dropout_state);
                Tape::ValueRef loss = tape.nll(logp, ds.targets[idx]);
                if (!std::isfinite(tape.value(loss)[0])) {
                    std::cerr << "fold (" << fc.rep << ", " << fc.fold
                              << "): training diverged at epoch " << epoch << "; fold excluded\n";
                    result.failed = true;
                    return result;
                }
                tape.backward(loss, inv_batch);
            }
            adam.step(net.params);
        }
        const double val_acc = eval_accuracy(net, fc, val, kPhaseEpochSelect);
        if (val_acc > best_val) {
            best_val = val_acc;
            best_epoch = epoch;
            best_params = net.params;
        }
    }

    net.params = best_params;
    result.accuracy = eval_accuracy(net, fc, test, kPhaseTestPredict);
    result.selected = "epoch=" + std::to_string(best_epoch);
    return result;
}

FoldResult dgcnn_fold(const FoldContext& fc) {
    const std::vector<int> train9 = fc.plan->train_indices(fc.rep, fc.fold, true);
    Network net = build_network(resolved_network_config(fc, train9), mix_seed(fc.fold_seed(), 1));
    return train_and_eval_classifier(net, fc);
}

FoldResult pretrained_dgcnn_fold(const FoldContext& fc) {
    const ExperimentConfig& cfg = *fc.cfg;
    const std::vector<int> train9 = fc.plan->train_indices(fc.rep, fc.fold, true);
    Network net = build_network(resolved_network_config(fc, train9), mix_seed(fc.fold_seed(), 1));

    if (cfg.pretrain.epochs > 0) {
        std::vector<int> pool = train9;
        if (cfg.pretrain_on_all) {
            pool.resize(fc.ds->size());
            std::iota(pool.begin(), pool.end(), 0);
        }
        for (int idx : pool) fc.note(kPhasePretrain, idx);
        const Dataset sub = subset_dataset(*fc.ds, pool);

        KernelContext ctx(cfg.pretrain.kernel, fc.ds->label_alphabet_size());
        std::vector<FeatureMap> maps;
        std::vector<int> ids;
        for (int idx : pool) {
            fc.note(kPhaseTrainGram, idx);
            maps.push_back(ctx.feature_map(fc.ds->graphs[idx]));
            ids.push_back(idx);
        }
        const GramMatrix gram =
            gram_from_feature_maps(maps, cfg.pretrain.kernel, cfg.gram_workers, &ids);

        PretrainConfig pcfg = cfg.pretrain;
        pcfg.seed = mix_seed(fc.fold_seed(), 3);
        if (pcfg.pair_mode == PairMode::Sampled && pcfg.pair_count == 0)
            pcfg.pair_count = 20 * gram.size;
        const PairDataset pairs =
            build_pairs(gram, pcfg.pair_mode, pcfg.pair_count, mix_seed(pcfg.seed, 0xBA5E));
        pretrain(net, sub, pairs, pcfg, &gram);
    }
    return train_and_eval_classifier(net, fc);
}

Report run_folds(const ExperimentConfig& cfg, const Dataset& ds,
                 const std::function<FoldResult(const FoldContext&)>& fold_fn) {
    if (!ds.labeled()) throw ContractViolation("experiments need a labeled dataset");
    const auto t0 = std::chrono::steady_clock::now();
    const FoldPlan plan = make_fold_plan(ds.targets, cfg.repetitions, cfg.seed);

    Report report;
    report.method = to_string(cfg.method);
    report.dataset = ds.name;
    report.config_echo = cfg.config_echo;
    report.folds.resize(static_cast<std::size_t>(cfg.repetitions) * FoldPlan::kNumFolds);

    const int jobs = cfg.access_hook ? 1 : cfg.jobs;  // hooks are not synchronized
    run_jobs(static_cast<int>(report.folds.size()), jobs, [&](int slot) {
        FoldContext fc{&cfg, &ds, &plan, slot / FoldPlan::kNumFolds, slot % FoldPlan::kNumFolds};
        report.folds[slot] = fold_fn(fc);
    });

    finalize_report(report, cfg.repetitions);
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report.failed_folds)
        std::cerr << report.method << " on " << report.dataset << ": " << report.failed_folds
                  << " fold(s) diverged and were excluded\n";
    return report;
}

}  // namespace

Report run_kernel_svm(const ExperimentConfig& cfg, const Dataset& ds) {
    return run_folds(cfg, ds, kernel_svm_fold);
}

Report run_dgcnn(const ExperimentConfig& cfg, const Dataset& ds) {
    return run_folds(cfg, ds, dgcnn_fold);
}

Report run_pretrained_dgcnn(const ExperimentConfig& cfg, const Dataset& ds) {
    return run_folds(cfg, ds, pretrained_dgcnn_fold);
}

Report run_experiment(const ExperimentConfig& cfg, const Dataset& ds) {
    switch (cfg.method) {
        case Method::KernelSvm: return run_kernel_svm(cfg, ds);
        case Method::Dgcnn: return run_dgcnn(cfg, ds);
        case Method::PretrainedDgcnn: return run_pretrained_dgcnn(cfg, ds);
    }
    throw ContractViolation("run_experiment: invalid method");
}

void write_report(const Report& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "report.csv");
        if (!csv) throw LoadError("cannot write " + (dir / "report.csv").string());
        csv << "# method = " << report.method << "\n";
        csv << "# dataset = " << report.dataset << "\n";
        csv << "repetition,fold,accuracy,selected,failed\n";
        csv.precision(17);
        for (const FoldResult& f : report.folds)
            csv << f.repetition << ',' << f.fold << ',' << f.accuracy << ',' << f.selected << ','
                << (f.failed ? 1 : 0) << "\n";
    }
    {
        std::ofstream txt(dir / "report.txt");
        char line[256];
        std::snprintf(line, sizeof(line), "%s on %s: %.2f +- %.2f (accuracy %%, std over %s)\n",
                      report.method.c_str(), report.dataset.c_str(), 100.0 * report.mean,
                      100.0 * report.std_dev, report.std_over.c_str());
        txt << line;
        txt << "folds: " << report.folds.size() << ", failed: " << report.failed_folds << "\n";
        std::snprintf(line, sizeof(line), "wall-clock: %.1f s\n", report.wall_clock_seconds);
        txt << line;
    }
    {
        std::ofstream echo(dir / "config.echo");
        echo << report.config_echo;
    }
}

Report load_report(const std::filesystem::path& dir) {
    std::ifstream csv(dir / "report.csv");
    if (!csv) throw LoadError("cannot open " + (dir / "report.csv").string());
    Report report;
    std::string line;
    int repetitions = 1;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            std::string value = line.substr(eq + 1);
            auto strip = [](std::string s) {
                while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                    s.erase(s.begin());
                while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
                return s;
            };
            key = strip(key);
            value = strip(value);
            if (key == "method") report.method = value;
            if (key == "dataset") report.dataset = value;
            continue;
        }
        if (line.rfind("repetition,", 0) == 0) continue;
        std::stringstream ss(line);
        std::string tok;
        FoldResult f;
        std::getline(ss, tok, ',');
        f.repetition = std::stoi(tok);
        std::getline(ss, tok, ',');
        f.fold = std::stoi(tok);
        std::getline(ss, tok, ',');
        f.accuracy = std::stod(tok);
        std::getline(ss, f.selected, ',');
        std::getline(ss, tok, ',');
        f.failed = tok == "1";
        repetitions = std::max(repetitions, f.repetition + 1);
        report.folds.push_back(std::move(f));
    }
    if (report.folds.empty()) throw FormatError((dir / "report.csv").string() + ": no fold rows");
    finalize_report(report, repetitions);
    return report;
}

std::string aggregate_text(const std::vector<Report>& reports) {
    if (reports.empty()) throw ContractViolation("aggregate: no reports");
    // Best mean per dataset gets a marker.
    std::map<std::string, double> best;
    for (const Report& r : reports) {
        auto [it, fresh] = best.emplace(r.dataset, r.mean);
        if (!fresh) it->second = std::max(it->second, r.mean);
    }
    std::ostringstream out;
    out << "dataset            method              accuracy\n";
    for (const Report& r : reports) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-18s %-18s %6.2f +- %.2f%s\n", r.dataset.c_str(),
                      r.method.c_str(), 100.0 * r.mean, 100.0 * r.std_dev,
                      r.mean == best[r.dataset] ? " *" : "");
        out << line;
    }
    return out.str();
}

std::string aggregate_csv(const std::vector<Report>& reports) {
    if (reports.empty()) throw ContractViolation("aggregate: no reports");
    std::ostringstream out;
    out << "dataset,method,mean,std,std_over,folds,failed\n";
    out.precision(17);
    for (const Report& r : reports)
        out << r.dataset << ',' << r.method << ',' << r.mean << ',' << r.std_dev << ','
            << r.std_over << ',' << r.folds.size() << ',' << r.failed_folds << "\n";
    return out.str();
}

ExperimentConfig experiment_config_from_kv(KeyValueConfig& kv) {
    ExperimentConfig cfg;

    cfg.kernel.kind = kernel_kind_from_string(kv.get_string("kernel", "wl"));
    cfg.kernel.h = kv.get_int("kernel.h", 2);
    cfg.kernel.normalize = kv.get_bool("kernel.normalize", true);
    cfg.kernel.gl3_connected_only = kv.get_bool("kernel.gl3_connected_only", false);
    cfg.wl_h_grid = kv.get_int_list("wl.h_grid", {0, 1, 2, 3, 4, 5});
    cfg.svm_c_grid = kv.get_double_list("svm.c_grid", {0.01, 0.1, 1.0, 10.0, 100.0});
    cfg.svm_tol = kv.get_double("svm.tol", 1e-3);

    cfg.network.conv_channels = kv.get_int_list("net.conv_channels", {32, 32, 32, 1});
    cfg.network.sortpool_k = kv.get_int("net.sortpool_k", 0);
    std::vector<int> filters = kv.get_int_list("net.conv1d_filters", {});
    std::vector<int> widths = kv.get_int_list("net.conv1d_widths", {});
    std::vector<int> strides = kv.get_int_list("net.conv1d_strides", {});
    if (filters.size() != widths.size() || filters.size() != strides.size())
        throw ConfigError("net.conv1d_filters/widths/strides must have equal lengths");
    cfg.network.conv1d.clear();
    for (std::size_t j = 0; j < filters.size(); ++j)
        cfg.network.conv1d.push_back({filters[j], widths[j], strides[j]});
    cfg.network.dense_width = kv.get_int("net.dense_width", 128);
    cfg.network.bias = kv.get_bool("net.bias", false);
    cfg.network.dropout = kv.get_double("net.dropout", 0.0);

    cfg.pretrain.kernel.kind = kernel_kind_from_string(kv.get_string("pretrain.kernel", "wl"));
    cfg.pretrain.kernel.h = kv.get_int("pretrain.kernel.h", 2);
    cfg.pretrain.kernel.normalize = kv.get_bool("pretrain.kernel.normalize", true);
    cfg.pretrain.epochs = kv.get_int("pretrain.epochs", 20);
    cfg.pretrain.batch_size = kv.get_int("pretrain.batch_size", 32);
    cfg.pretrain.adam.alpha = kv.get_double("pretrain.lr", 1e-3);
    const std::string mode = kv.get_string("pretrain.pair_mode", "full");
    if (mode == "full") cfg.pretrain.pair_mode = PairMode::Full;
    else if (mode == "sampled") cfg.pretrain.pair_mode = PairMode::Sampled;
    else throw ConfigError("pretrain.pair_mode must be full or sampled");
    cfg.pretrain.pair_count = static_cast<std::size_t>(kv.get_int("pretrain.pair_count", 0));
    cfg.pretrain.resample_each_epoch = kv.get_bool("pretrain.resample_each_epoch", false);

    cfg.finetune.epochs = kv.get_int("finetune.epochs", 100);
    cfg.finetune.batch_size = kv.get_int("finetune.batch_size", 50);
    cfg.finetune.adam.alpha = kv.get_double("finetune.lr", 1e-4);

    cfg.repetitions = kv.get_int("repetitions", 10);
    cfg.jobs = kv.get_int("jobs", 1);
    cfg.gram_workers = kv.get_int("gram_workers", 1);

    kv.finish();
    cfg.config_echo = kv.echo();
    return cfg;
}

}  // namespace gkp
