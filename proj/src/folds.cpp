#include "gkp/folds.hpp"

#include <algorithm>
#include <map>

#include "gkp/errors.hpp"
#include "gkp/rng.hpp"

namespace gkp {

std::vector<int> FoldPlan::train_indices(int rep, int outer, bool include_validation) const {
    const int val = (outer + 1) % kNumFolds;
    std::vector<int> out;
    for (int f = 0; f < kNumFolds; ++f) {
        if (f == outer) continue;
        if (!include_validation && f == val) continue;
        out.insert(out.end(), folds[rep][f].begin(), folds[rep][f].end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

FoldPlan make_fold_plan(const std::vector<int>& targets, int repetitions, std::uint64_t seed) {
    const int n = static_cast<int>(targets.size());
    if (n < FoldPlan::kNumFolds)
        throw Error("make_fold_plan: need at least " + std::to_string(FoldPlan::kNumFolds) +
                    " items, got " + std::to_string(n));
    if (repetitions < 1) throw ContractViolation("make_fold_plan: repetitions must be >= 1");

    // Class groups in ascending class order.
    std::map<int, std::vector<int>> by_class;
    for (int i = 0; i < n; ++i) by_class[targets[i]].push_back(i);

    FoldPlan plan;
    plan.num_items = n;
    plan.repetitions = repetitions;
    plan.seed = seed;
    plan.folds.resize(repetitions);

    for (int rep = 0; rep < repetitions; ++rep) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(rep)));
        auto& folds = plan.folds[rep];
        folds.assign(FoldPlan::kNumFolds, {});
        // Deal each shuffled class round-robin with a fold pointer shared
        // across classes: fold sizes and per-fold class counts both stay
        // within one item of even.
        int fold_ptr = 0;
        for (auto& [cls, members] : by_class) {
            std::vector<int> shuffled = members;
            seeded_shuffle(shuffled, rng);
            for (int idx : shuffled) {
                folds[fold_ptr].push_back(idx);
                fold_ptr = (fold_ptr + 1) % FoldPlan::kNumFolds;
            }
        }
        for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    }
    return plan;
}

}  // namespace gkp
