#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gkp/gram.hpp"

namespace gkp {

// Read-only view onto a kernel matrix, optionally through an index subset;
// lets fold training reuse one gram without copying.
struct KernelView {
    std::size_t n = 0;
    std::function<double(std::size_t, std::size_t)> at;

    static KernelView dense(const GramMatrix& gram);
    static KernelView subset(const GramMatrix& gram, std::vector<std::size_t> indices);
};

struct SvmModel {
    std::vector<int> support_indices;  // positions in the training order
    std::vector<double> dual_coef;     // alpha_i * y_i per support vector
    double bias = 0.0;
    double C = 1.0;
    std::size_t train_size = 0;
    // Single-class training sets yield a constant predictor.
    bool constant = false;
    int constant_label = 1;
};

struct SvmPrediction {
    int label = 1;  // +1 / -1; decision value 0 breaks to +1
    double decision_value = 0.0;
};

// SMO on the dual of the C-SVM with a precomputed kernel. Labels are +1/-1.
// Stops when a full sweep finds no KKT violation beyond tol; after
// `max_passes` sweeps (default 10 * n) it warns and returns the best iterate.
SvmModel smo_train(const KernelView& kernel, const std::vector<int>& labels, double C,
                   double tol = 1e-3, int max_passes = 0);

SvmPrediction svm_predict(const SvmModel& model, const std::vector<double>& kernel_row);

// One-vs-rest reduction for multiclass problems (binary uses a single model).
struct MulticlassSvm {
    int num_classes = 0;
    std::vector<SvmModel> models;  // one per class for C > 2, one for binary

    int predict(const std::vector<double>& kernel_row) const;
};

MulticlassSvm svm_train_multiclass(const KernelView& kernel, const std::vector<int>& class_ids,
                                   int num_classes, double C, double tol = 1e-3);

}  // namespace gkp
