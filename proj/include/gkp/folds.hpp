#pragma once

#include <cstdint>
#include <vector>

namespace gkp {

// Deterministic nested cross-validation split assignment: R repetitions,
// each a stratified partition of [0, N) into 10 outer folds. Within outer
// fold t the validation fold is fold (t + 1) mod 10 of the same repetition.
struct FoldPlan {
    static constexpr int kNumFolds = 10;

    int num_items = 0;
    int repetitions = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::vector<int>>> folds;  // [repetition][fold] -> sorted indices

    const std::vector<int>& test_indices(int rep, int outer) const { return folds[rep][outer]; }
    const std::vector<int>& validation_indices(int rep, int outer) const {
        return folds[rep][(outer + 1) % kNumFolds];
    }
    // The 8 folds used for fitting, or all 9 training folds when
    // include_validation is true. Sorted ascending.
    std::vector<int> train_indices(int rep, int outer, bool include_validation) const;
};

// Stratified by class: per fold, each class count is within one item of an
// even split. Same (targets, R, seed) always produces the same plan.
FoldPlan make_fold_plan(const std::vector<int>& targets, int repetitions, std::uint64_t seed);

}  // namespace gkp
