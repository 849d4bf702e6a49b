#include "gkp/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>

#include "gkp/errors.hpp"

namespace gkp {

KernelView KernelView::dense(const GramMatrix& gram) {
    KernelView v;
    v.n = gram.size;
    const GramMatrix* g = &gram;
    v.at = [g](std::size_t i, std::size_t j) { return g->at(i, j); };
    return v;
}

KernelView KernelView::subset(const GramMatrix& gram, std::vector<std::size_t> indices) {
    KernelView v;
    v.n = indices.size();
    const GramMatrix* g = &gram;
    auto idx = std::make_shared<std::vector<std::size_t>>(std::move(indices));
    v.at = [g, idx](std::size_t i, std::size_t j) { return g->at((*idx)[i], (*idx)[j]); };
    return v;
}

SvmModel smo_train(const KernelView& kernel, const std::vector<int>& labels, double C,
                   double tol, int max_passes) {
    const std::size_t n = kernel.n;
    if (labels.size() != n) throw ContractViolation("smo_train: label count mismatch");
    if (C <= 0.0) throw ContractViolation("smo_train: C must be positive");
    for (int y : labels)
        if (y != 1 && y != -1) throw ContractViolation("smo_train: labels must be +1 or -1");

    SvmModel model;
    model.C = C;
    model.train_size = n;

    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
    if (!has_pos || !has_neg) {
        // Degenerate margin: every point shares one label.
        model.constant = true;
        model.constant_label = has_pos ? 1 : -1;
        model.bias = model.constant_label;
        return model;
    }

    if (max_passes <= 0) max_passes = 10 * static_cast<int>(n);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> err(n);  // err[i] = f(i) - y[i], maintained incrementally
    double b = 0.0;
    for (std::size_t i = 0; i < n; ++i) err[i] = -static_cast<double>(labels[i]);

    int sweeps = 0;
    bool converged = false;
    while (sweeps < max_passes) {
        ++sweeps;
        int changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = labels[i];
            const double ri = err[i] * yi;  // yi*f(i) - 1
            const bool violates = (ri < -tol && alpha[i] < C) || (ri > tol && alpha[i] > 0.0);
            if (!violates) continue;

            // Second-choice heuristic: maximal |E_i - E_j|, smallest j on ties.
            std::size_t j = n;
            double best_gap = -1.0;
            for (std::size_t cand = 0; cand < n; ++cand) {
                if (cand == i) continue;
                const double gap = std::fabs(err[i] - err[cand]);
                if (gap > best_gap) {
                    best_gap = gap;
                    j = cand;
                }
            }
            if (j == n) continue;

            const double yj = labels[j];
            const double kii = kernel.at(i, i), kjj = kernel.at(j, j), kij = kernel.at(i, j);
            const double eta = kii + kjj - 2.0 * kij;
            if (eta <= 0.0) continue;  // duplicate/collinear points; some other pair will move

            double lo, hi;
            if (labels[i] != labels[j]) {
                lo = std::max(0.0, alpha[j] - alpha[i]);
                hi = std::min(C, C + alpha[j] - alpha[i]);
            } else {
                lo = std::max(0.0, alpha[i] + alpha[j] - C);
                hi = std::min(C, alpha[i] + alpha[j]);
            }
            if (lo >= hi) continue;

            double aj_new = alpha[j] + yj * (err[i] - err[j]) / eta;
            aj_new = std::clamp(aj_new, lo, hi);
            const double dj = aj_new - alpha[j];
            if (std::fabs(dj) < 1e-12) continue;
            const double ai_new = alpha[i] - yi * yj * dj;
            const double di = ai_new - alpha[i];

            const double b1 = b - err[i] - yi * di * kii - yj * dj * kij;
            const double b2 = b - err[j] - yi * di * kij - yj * dj * kjj;
            double b_new;
            if (ai_new > 0.0 && ai_new < C) b_new = b1;
            else if (aj_new > 0.0 && aj_new < C) b_new = b2;
            else b_new = 0.5 * (b1 + b2);

            const double db = b_new - b;
            for (std::size_t k = 0; k < n; ++k)
                err[k] += yi * di * kernel.at(i, k) + yj * dj * kernel.at(j, k) + db;
            alpha[i] = ai_new;
            alpha[j] = aj_new;
            b = b_new;
            ++changed;
        }
        if (changed == 0) {
            converged = true;
            break;
        }
    }
    if (!converged)
        std::cerr << "smo_train: no convergence after " << sweeps
                  << " sweeps (tol " << tol << "); returning current iterate\n";

    model.bias = b;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
            model.support_indices.push_back(static_cast<int>(i));
            model.dual_coef.push_back(alpha[i] * labels[i]);
        }
    }
    return model;
}

SvmPrediction svm_predict(const SvmModel& model, const std::vector<double>& kernel_row) {
    if (model.constant)
        return {model.constant_label, static_cast<double>(model.constant_label)};
    if (kernel_row.size() != model.train_size)
        throw ContractViolation("svm_predict: kernel row has " + std::to_string(kernel_row.size()) +
                                " entries, expected " + std::to_string(model.train_size));
    double f = model.bias;
    for (std::size_t s = 0; s < model.support_indices.size(); ++s)
        f += model.dual_coef[s] * kernel_row[model.support_indices[s]];
    return {f >= 0.0 ? 1 : -1, f};
}

int MulticlassSvm::predict(const std::vector<double>& kernel_row) const {
    if (num_classes == 2) {
        return svm_predict(models[0], kernel_row).label == 1 ? 1 : 0;
    }
    int best_class = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < num_classes; ++c) {
        const double v = svm_predict(models[c], kernel_row).decision_value;
        if (v > best_value) {
            best_value = v;
            best_class = c;
        }
    }
    return best_class;
}

MulticlassSvm svm_train_multiclass(const KernelView& kernel, const std::vector<int>& class_ids,
                                   int num_classes, double C, double tol) {
    if (num_classes < 2) throw ContractViolation("svm_train_multiclass: need at least two classes");
    MulticlassSvm result;
    result.num_classes = num_classes;
    if (num_classes == 2) {
        std::vector<int> y(class_ids.size());
        for (std::size_t i = 0; i < class_ids.size(); ++i) y[i] = class_ids[i] == 1 ? 1 : -1;
        result.models.push_back(smo_train(kernel, y, C, tol));
        return result;
    }
    for (int c = 0; c < num_classes; ++c) {
        std::vector<int> y(class_ids.size());
        for (std::size_t i = 0; i < class_ids.size(); ++i) y[i] = class_ids[i] == c ? 1 : -1;
        result.models.push_back(smo_train(kernel, y, C, tol));
    }
    return result;
}

}  // namespace gkp
