#include "hydrostate/evaluation.hpp"

#include "hydrostate/errors.hpp"
#include "hydrostate/random.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace hydrostate {

Split stratified_split(std::span<const LabeledPattern> patterns, double train_fraction,
                       std::uint64_t seed) {
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
        throw ValidationError("train_fraction", "train fraction must lie in [0, 1]");
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t k = 0; k < patterns.size(); ++k) {
        const auto it = std::find(classes.begin(), classes.end(), patterns[k].label);
        if (it == classes.end()) {
            classes.push_back(patterns[k].label);
            members.push_back({k});
        } else {
            members[static_cast<std::size_t>(it - classes.begin())].push_back(k);
        }
    }

    Split split;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<std::size_t>& idx = members[c];
        // Fisher-Yates driven by the class's own stream.
        StreamRng rng(seed, c);
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.next() % i]);
        const auto cut = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < cut ? split.train : split.test).push_back(patterns[idx[i]]);
    }
    return split;
}

int ConfusionMatrix::total() const {
    int n = 0;
    for (const auto& row : counts)
        for (const int v : row) n += v;
    return n;
}

int ConfusionMatrix::correct() const {
    int n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
    return n;
}

double ConfusionMatrix::accuracy() const {
    const int n = total();
    return n == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(n);
}

std::string ConfusionMatrix::render() const {
    std::size_t width = 8;
    for (const std::string& l : labels) width = std::max(width, l.size() + 2);
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width)) << "expected";
    for (const std::string& l : labels) os << std::right << std::setw(static_cast<int>(width)) << l;
    os << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        os << std::left << std::setw(static_cast<int>(width)) << labels[i];
        for (const int v : counts[i]) os << std::right << std::setw(static_cast<int>(width)) << v;
        os << '\n';
    }
    os << "accuracy " << correct() << '/' << total() << " = " << std::fixed << std::setprecision(4)
       << accuracy() << '\n';
    return os.str();
}

ConfusionMatrix evaluate(const ClassifierModel& model, std::span<const LabeledPattern> patterns) {
    ConfusionMatrix m;
    m.labels = model.labels;
    const auto slot = [&](const std::string& label) {
        const auto it = std::find(m.labels.begin(), m.labels.end(), label);
        if (it != m.labels.end()) return static_cast<std::size_t>(it - m.labels.begin());
        m.labels.push_back(label);
        return m.labels.size() - 1;
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const LabeledPattern& lp : patterns) {
        if (lp.label.empty()) continue;
        const std::size_t expected = slot(lp.label);
        pairs.emplace_back(expected, slot(classify(model, lp.pattern).label));
    }
    m.counts.assign(m.labels.size(), std::vector<int>(m.labels.size(), 0));
    for (const auto& [e, p] : pairs) ++m.counts[e][p];
    return m;
}

}  // namespace hydrostate
