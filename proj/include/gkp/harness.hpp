#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gkp/dgcnn.hpp"
#include "gkp/folds.hpp"
#include "gkp/gram.hpp"
#include "gkp/siamese.hpp"
#include "gkp/svm.hpp"

namespace gkp {

enum class Method { KernelSvm, Dgcnn, PretrainedDgcnn };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct FineTuneConfig {
    int epochs = 100;
    int batch_size = 50;
    AdamHyper adam{1e-4, 0.9, 0.999, 1e-8};
};

// Called on every graph read when set: (phase, repetition, fold, graph index).
// Phases: train-gram, pretrain, finetune, epoch-select, test-predict.
// Setting a hook forces jobs = 1.
using AccessHook = std::function<void(const char*, int, int, int)>;

struct ExperimentConfig {
    std::string dataset_path;
    Method method = Method::KernelSvm;
    KernelSpec kernel{KernelKind::WL, 2, true};
    std::vector<int> wl_h_grid{0, 1, 2, 3, 4, 5};
    std::vector<double> svm_c_grid{0.01, 0.1, 1.0, 10.0, 100.0};
    double svm_tol = 1e-3;
    NetworkConfig network;  // sortpool_k == 0 derives the 60% rule from training graphs
    PretrainConfig pretrain;
    FineTuneConfig finetune;
    int repetitions = 10;
    std::uint64_t seed = 0;
    bool pretrain_on_all = false;  // permissive protocol: pre-training pairs over all graphs
    int jobs = 1;                  // parallel (repetition, fold) jobs
    int gram_workers = 1;
    std::string config_echo;
    AccessHook access_hook;
};

struct FoldResult {
    int repetition = 0;
    int fold = 0;
    double accuracy = 0.0;  // fraction in [0, 1]
    std::string selected;   // hyperparameters chosen on the validation fold
    bool failed = false;    // training diverged; excluded from aggregation
};

struct Report {
    std::string method;
    std::string dataset;
    std::vector<FoldResult> folds;
    double mean = 0.0;
    double std_dev = 0.0;
    std::string std_over;  // "repetition-means", or "folds" when R = 1
    int failed_folds = 0;
    double wall_clock_seconds = 0.0;
    std::string config_echo;
};

// Largest k such that at least 60% of the given graphs have >= k nodes,
// floored at 10 so the default conv1d stack always fits.
int derive_sortpool_k(const Dataset& ds, const std::vector<int>& indices);

Report run_kernel_svm(const ExperimentConfig& cfg, const Dataset& ds);
Report run_dgcnn(const ExperimentConfig& cfg, const Dataset& ds);
Report run_pretrained_dgcnn(const ExperimentConfig& cfg, const Dataset& ds);
Report run_experiment(const ExperimentConfig& cfg, const Dataset& ds);

// report.csv + report.txt + config.echo under `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);
Report load_report(const std::filesystem::path& dir);

// Comparison table: one row per report, best mean per dataset flagged.
std::string aggregate_text(const std::vector<Report>& reports);
std::string aggregate_csv(const std::vector<Report>& reports);

// Fills Method-specific sub-configs from flat key = value text.
ExperimentConfig experiment_config_from_kv(class KeyValueConfig& kv);

}  // namespace gkp
