#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <vector>

#include <CLI11.hpp>

#include "gkp/config.hpp"
#include "gkp/errors.hpp"
#include "gkp/gram.hpp"
#include "gkp/harness.hpp"
#include "gkp/siamese.hpp"
#include "gkp/synth.hpp"
#include "gkp/tu_loader.hpp"

namespace {

gkp::ExperimentConfig config_from_file(const std::string& path) {
    if (path.empty()) {
        gkp::KeyValueConfig empty = gkp::KeyValueConfig::parse_string("", "<defaults>");
        return gkp::experiment_config_from_kv(empty);
    }
    gkp::KeyValueConfig kv = gkp::KeyValueConfig::parse_file(path);
    return gkp::experiment_config_from_kv(kv);
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%d %H:%M:%S", std::gmtime(&now));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-kernel pre-training for graph neural networks"};
    app.require_subcommand(1);

    // gram
    std::string gram_dataset, gram_kernel = "wl", gram_out, gram_csv;
    int gram_h = 2, gram_workers = 1;
    bool gram_normalize = false, gram_gl3_connected = false;
    auto* gram_cmd = app.add_subcommand("gram", "Compute a kernel gram matrix over a dataset");
    gram_cmd->add_option("dataset", gram_dataset, "TU-format dataset directory")->required();
    gram_cmd->add_option("--kernel", gram_kernel, "Kernel: wl, sp or gl3 (default wl)");
    gram_cmd->add_option("--h", gram_h, "WL iteration count (default 2)");
    gram_cmd->add_flag("--normalize", gram_normalize, "Cosine-normalize kernel values");
    gram_cmd->add_flag("--gl3-connected-only", gram_gl3_connected,
                       "GL3: count only connected graphlets");
    gram_cmd->add_option("--out", gram_out, "Output file (binary)")->required();
    gram_cmd->add_option("--csv", gram_csv, "Also export as CSV");
    gram_cmd->add_option("--workers", gram_workers, "Parallel pair workers (default 1)");

    // pretrain
    std::string pre_dataset, pre_config, pre_out = "pretrain_out";
    std::uint64_t pre_seed = 0;
    auto* pre_cmd = app.add_subcommand("pretrain", "Pre-train the siamese network on kernel targets");
    pre_cmd->add_option("dataset", pre_dataset, "TU-format dataset directory")->required();
    pre_cmd->add_option("--config", pre_config, "key = value config file");
    pre_cmd->add_option("--seed", pre_seed, "Seed (default 0)");
    pre_cmd->add_option("--out", pre_out, "Output directory (default pretrain_out)");

    // evaluate
    std::string eval_dataset, eval_method = "kernel-svm", eval_config, eval_out = "eval_out";
    std::uint64_t eval_seed = 0;
    bool eval_fast = false, eval_pretrain_on_all = false;
    int eval_jobs = 0;
    auto* eval_cmd = app.add_subcommand("evaluate", "Nested 10-fold cross-validation of one method");
    eval_cmd->add_option("dataset", eval_dataset, "TU-format dataset directory")->required();
    eval_cmd->add_option("--method", eval_method, "kernel-svm, dgcnn or pretrained-dgcnn")->required();
    eval_cmd->add_option("--config", eval_config, "key = value config file");
    eval_cmd->add_option("--seed", eval_seed, "Master seed (default 0)");
    eval_cmd->add_option("--out", eval_out, "Report directory (default eval_out)");
    eval_cmd->add_flag("--fast", eval_fast, "Single repetition instead of 10");
    eval_cmd->add_flag("--pretrain-on-all", eval_pretrain_on_all,
                       "Pre-train on all graphs, not just the 9 training folds");
    eval_cmd->add_option("--jobs", eval_jobs, "Parallel fold jobs (overrides config)");

    // report
    std::vector<std::string> report_dirs;
    std::string report_csv_out;
    auto* report_cmd = app.add_subcommand("report", "Aggregate evaluation reports into one table");
    report_cmd->add_option("dirs", report_dirs, "Report directories")->required()->expected(-1);
    report_cmd->add_option("--csv", report_csv_out, "Also write the table as CSV");

    // synth
    std::string synth_dir;
    int synth_count = 60;
    std::uint64_t synth_seed = 7;
    auto* synth_cmd =
        app.add_subcommand("synth", "Generate a synthetic triangle-classification dataset");
    synth_cmd->add_option("dir", synth_dir, "Output dataset directory")->required();
    synth_cmd->add_option("--count", synth_count, "Number of graphs (default 60)");
    synth_cmd->add_option("--seed", synth_seed, "Generator seed (default 7)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gram_cmd) {
            gkp::Dataset ds = gkp::load_tu_dataset(gram_dataset);
            gkp::KernelSpec spec;
            spec.kind = gkp::kernel_kind_from_string(gram_kernel);
            spec.h = gram_h;
            spec.normalize = gram_normalize;
            spec.gl3_connected_only = gram_gl3_connected;
            gkp::GramMatrix gram = gkp::gram_matrix(ds, spec, gram_workers);
            gkp::save_gram(gram, gram_out);
            if (!gram_csv.empty()) gkp::export_gram_csv(gram, gram_csv);
            std::cout << "wrote " << gram.size << "x" << gram.size << " gram (" << spec.describe()
                      << ") to " << gram_out << "\n";
        } else if (*pre_cmd) {
            gkp::Dataset ds = gkp::load_tu_dataset(pre_dataset);
            gkp::ExperimentConfig cfg = config_from_file(pre_config);
            gkp::PretrainConfig pcfg = cfg.pretrain;
            pcfg.seed = pre_seed;

            gkp::NetworkConfig netcfg = cfg.network;
            netcfg.num_classes = std::max(2, ds.num_classes);
            netcfg.label_alphabet_size = ds.label_alphabet_size();
            if (netcfg.sortpool_k <= 0) {
                std::vector<int> all(ds.size());
                std::iota(all.begin(), all.end(), 0);
                netcfg.sortpool_k = gkp::derive_sortpool_k(ds, all);
            }
            gkp::Network net = gkp::build_network(netcfg, pre_seed);

            gkp::GramMatrix gram = gkp::gram_matrix(ds, pcfg.kernel, cfg.gram_workers);
            if (pcfg.pair_mode == gkp::PairMode::Sampled && pcfg.pair_count == 0)
                pcfg.pair_count = 20 * gram.size;
            gkp::PairDataset pairs =
                gkp::build_pairs(gram, pcfg.pair_mode, pcfg.pair_count, pre_seed);
            gkp::PretrainResult result = gkp::pretrain(net, ds, pairs, pcfg, &gram);

            std::filesystem::create_directories(pre_out);
            const std::filesystem::path ckpt = std::filesystem::path(pre_out) / "checkpoint.gkpnet";
            gkp::save_pretrained_checkpoint(net, ckpt, pcfg, result.epoch_loss.back());
            std::ofstream loss_csv(std::filesystem::path(pre_out) / "loss.csv");
            loss_csv << "epoch,mse\n";
            loss_csv.precision(17);
            for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
                loss_csv << e + 1 << ',' << result.epoch_loss[e] << "\n";
            std::ofstream log(std::filesystem::path(pre_out) / "experiment.log", std::ios::app);
            log << timestamp() << " checkpoint=" << ckpt.string()
                << " kernel=" << pcfg.kernel.describe() << " epochs=" << pcfg.epochs
                << " pairs=" << pairs.pairs.size() << " final_mse=" << result.epoch_loss.back()
                << "\n";
            std::cout << "pre-trained on " << ds.name << ": epoch-1 mse " << result.epoch_loss.front()
                      << " -> final mse " << result.epoch_loss.back() << "\ncheckpoint: "
                      << ckpt.string() << "\n";
        } else if (*eval_cmd) {
            gkp::Dataset ds = gkp::load_tu_dataset(eval_dataset);
            gkp::ExperimentConfig cfg = config_from_file(eval_config);
            cfg.dataset_path = eval_dataset;
            cfg.method = gkp::method_from_string(eval_method);
            cfg.seed = eval_seed;
            if (eval_fast) cfg.repetitions = 1;
            cfg.pretrain_on_all = eval_pretrain_on_all;
            if (eval_jobs > 0) cfg.jobs = eval_jobs;
            gkp::Report report = gkp::run_experiment(cfg, ds);
            gkp::write_report(report, eval_out);
            std::ifstream txt(std::filesystem::path(eval_out) / "report.txt");
            std::cout << txt.rdbuf();
        } else if (*report_cmd) {
            std::vector<gkp::Report> reports;
            for (const std::string& dir : report_dirs) reports.push_back(gkp::load_report(dir));
            std::cout << gkp::aggregate_text(reports);
            if (!report_csv_out.empty()) {
                std::ofstream out(report_csv_out);
                out << gkp::aggregate_csv(reports);
            }
        } else if (*synth_cmd) {
            gkp::Dataset ds = gkp::make_triangle_dataset(synth_count, synth_seed);
            std::filesystem::path dir(synth_dir);
            gkp::write_tu_dataset(ds, dir);
            std::cout << "wrote " << ds.size() << " graphs to " << dir.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
