#pragma once

#include "hydrostate/fuzzy.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hydrostate {

struct Split {
    std::vector<LabeledPattern> train;
    std::vector<LabeledPattern> test;
};

/// Per-class seeded shuffle, then the first round(fraction * n) of each class
/// go to training. Classes keep their order of first appearance.
Split stratified_split(std::span<const LabeledPattern> patterns, double train_fraction,
                       std::uint64_t seed);

/// Rows are expected labels, columns predicted labels, both in `labels` order.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<int>> counts;

    [[nodiscard]] int total() const;
    [[nodiscard]] int correct() const;
    [[nodiscard]] double accuracy() const;
    /// Fixed-width text table with an accuracy footer.
    [[nodiscard]] std::string render() const;
};

/// Classifies every labeled pattern. Labels unknown to the model get their
/// own row; the model can never predict them.
ConfusionMatrix evaluate(const ClassifierModel& model, std::span<const LabeledPattern> patterns);

}  // namespace hydrostate
