#include "hydrostate/fuzzy.hpp"

#include "hydrostate/errors.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace hydrostate {

ClassifierModel ClassifierModel::make(std::size_t dimension, double theta, double gamma,
                                      Normalization normalization) {
    ClassifierModel model;
    model.gamma = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dimension), gamma);
    model.theta = theta;
    model.normalization = normalization.empty()
                              ? Normalization(dimension, Range{0.0, 1.0})
                              : std::move(normalization);
    model.validate();
    return model;
}

void ClassifierModel::validate() const {
    if (!(theta > 0.0 && theta <= 1.0))
        throw ValidationError("theta", "theta must lie in (0, 1]");
    if (!((gamma.array() > 0.0).all()) || !gamma.allFinite())
        throw ValidationError("gamma", "gamma slopes must be positive");
    if (normalization.size() != static_cast<std::size_t>(gamma.size()))
        throw ValidationError("normalization", "one normalization range per dimension required");
    for (std::size_t i = 0; i < normalization.size(); ++i)
        if (!(normalization[i].hi > normalization[i].lo))
            throw ValidationError("normalization/" + std::to_string(i), "range needs hi > lo");
    for (std::size_t j = 0; j < cells.size(); ++j) {
        const Cell& cell = cells[j];
        const std::string where = "cells/" + std::to_string(j);
        if (cell.lo.size() != gamma.size() || cell.hi.size() != gamma.size())
            throw ValidationError(where, "cell dimension does not match the model");
        if (!((cell.lo.array() <= cell.hi.array()).all()))
            throw ValidationError(where, "cell min point exceeds its max point");
        if (std::find(labels.begin(), labels.end(), cell.label) == labels.end())
            throw ValidationError(where, "cell label '" + cell.label + "' is not in the label set");
    }
}

double violation(const Cell& cell, const Pattern& p, const Eigen::VectorXd& gamma) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double above = ramp(p.sup(i) - cell.hi(i), gamma(i));
        const double below = ramp(cell.lo(i) - p.inf(i), gamma(i));
        worst = std::max(worst, std::max(above, below));
    }
    return worst;
}

double membership(const Cell& cell, const Pattern& p, const Eigen::VectorXd& gamma) {
    return 1.0 - violation(cell, p, gamma);
}

namespace {

void check_example(const ClassifierModel& model, const LabeledPattern& ex, std::size_t index) {
    const std::string where = "example " + std::to_string(index);
    if (ex.pattern.inf.size() != model.dimension() || ex.pattern.sup.size() != model.dimension())
        throw ValidationError(where, where + " has the wrong dimension");
    if (ex.label.empty()) throw ValidationError(where, where + " has no label");
    const auto& inf = ex.pattern.inf.array();
    const auto& sup = ex.pattern.sup.array();
    if (!((inf >= 0.0).all() && (sup <= 1.0).all() && (inf <= sup).all()))
        throw PatternOutOfRange(where + " lies outside [0,1] or has inf > sup");
}

// Boxes overlap when every dimension has a strictly positive common length.
std::optional<Eigen::Index> contraction_axis(const Cell& a, const Cell& b) {
    Eigen::Index axis = 0;
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.lo.size(); ++i) {
        const double common = std::min(a.hi(i), b.hi(i)) - std::max(a.lo(i), b.lo(i));
        if (!(common > 0.0)) return std::nullopt;
        if (common < smallest) {
            smallest = common;
            axis = i;
        }
    }
    if (a.lo.size() == 0) return std::nullopt;
    return axis;
}

// Split the common interval at its midpoint; the cell whose center lies lower
// keeps the lower half.
void contract(Cell& a, Cell& b, Eigen::Index axis) {
    const double start = std::max(a.lo(axis), b.lo(axis));
    const double end = std::min(a.hi(axis), b.hi(axis));
    const double mid = 0.5 * (start + end);
    const bool a_lower = a.lo(axis) + a.hi(axis) <= b.lo(axis) + b.hi(axis);
    Cell& lower = a_lower ? a : b;
    Cell& upper = a_lower ? b : a;
    lower.hi(axis) = mid;
    upper.lo(axis) = mid;
}

void resolve_overlaps(ClassifierModel& model, std::size_t touched) {
    for (std::size_t k = 0; k < model.cells.size(); ++k) {
        if (k == touched || model.cells[k].label == model.cells[touched].label) continue;
        if (const auto axis = contraction_axis(model.cells[touched], model.cells[k]))
            contract(model.cells[touched], model.cells[k], *axis);
    }
}

// A side may exceed theta only if the expansion leaves it unchanged.
bool fits(const Cell& cell, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double theta) {
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        const double side = hi(i) - lo(i);
        if (side > theta && side > cell.hi(i) - cell.lo(i)) return false;
    }
    return true;
}

}  // namespace

ClassifierModel train(ClassifierModel model, std::span<const LabeledPattern> examples) {
    model.validate();
    for (std::size_t e = 0; e < examples.size(); ++e) {
        const LabeledPattern& ex = examples[e];
        check_example(model, ex, e);
        if (std::find(model.labels.begin(), model.labels.end(), ex.label) == model.labels.end())
            model.labels.push_back(ex.label);

        std::optional<std::size_t> best;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < model.cells.size(); ++j) {
            const Cell& cell = model.cells[j];
            if (cell.label != ex.label) continue;
            const Eigen::VectorXd lo = cell.lo.cwiseMin(ex.pattern.inf);
            const Eigen::VectorXd hi = cell.hi.cwiseMax(ex.pattern.sup);
            if (!fits(cell, lo, hi, model.theta)) continue;
            const double cost = (hi - lo).sum() - (cell.hi - cell.lo).sum();
            if (cost < best_cost) {
                best_cost = cost;
                best = j;
            }
        }

        std::size_t touched = 0;
        if (best) {
            Cell& cell = model.cells[*best];
            cell.lo = cell.lo.cwiseMin(ex.pattern.inf);
            cell.hi = cell.hi.cwiseMax(ex.pattern.sup);
            touched = *best;
        } else {
            model.cells.push_back(Cell{ex.pattern.inf, ex.pattern.sup, ex.label});
            touched = model.cells.size() - 1;
        }
        resolve_overlaps(model, touched);
    }
    return model;
}

namespace {

// Volumes within this relative distance compare equal, so boxes of equal
// nominal size (0.2 - 0 against 1 - 0.8) fall through to the index rule.
constexpr double kVolumeTolerance = 1e-12;

bool smaller_volume(double a, double b) {
    return a < b - kVolumeTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

ClassificationResult classify(const ClassifierModel& model, const Pattern& p) {
    if (model.cells.empty()) throw EmptyModel();
    if (p.inf.size() != model.dimension() || p.sup.size() != model.dimension())
        throw ValidationError("pattern", "pattern dimension does not match the model");

    // Best cell per label: highest membership, then smallest volume, then lowest index.
    struct Candidate {
        double degree = -1.0;
        double volume = 0.0;
        std::size_t cell = 0;
        bool found = false;
    };
    auto better = [](const Candidate& c, double degree, double volume) {
        if (!c.found) return true;
        if (degree != c.degree) return degree > c.degree;
        return smaller_volume(volume, c.volume);  // equal volume keeps the earlier cell
    };

    std::vector<Candidate> per_label(model.labels.size());
    for (std::size_t j = 0; j < model.cells.size(); ++j) {
        const Cell& cell = model.cells[j];
        const auto slot = static_cast<std::size_t>(
            std::find(model.labels.begin(), model.labels.end(), cell.label) - model.labels.begin());
        const double degree = membership(cell, p, model.gamma);
        const double volume = cell.volume();
        if (better(per_label[slot], degree, volume)) per_label[slot] = {degree, volume, j, true};
    }

    ClassificationResult result;
    std::optional<std::size_t> winner;
    for (std::size_t s = 0; s < per_label.size(); ++s) {
        const Candidate& c = per_label[s];
        if (!c.found) continue;
        result.memberships.emplace_back(model.labels[s], c.degree);
        if (!winner) {
            winner = s;
            continue;
        }
        const Candidate& w = per_label[*winner];
        const bool wins = c.degree != w.degree   ? c.degree > w.degree
                          : smaller_volume(c.volume, w.volume) ? true
                          : smaller_volume(w.volume, c.volume) ? false
                                                               : c.cell < w.cell;
        if (wins) winner = s;
    }
    const Candidate& w = per_label[*winner];
    result.label = model.labels[*winner];
    result.membership = w.degree;
    result.cell = w.cell;
    return result;
}

Pattern normalize(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                  const Normalization& ranges) {
    const auto n = static_cast<Eigen::Index>(ranges.size());
    if (lower.size() != n || upper.size() != n)
        throw ValidationError("normalization", "state dimension does not match the ranges");
    Pattern p{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const Range& r = ranges[static_cast<std::size_t>(i)];
        if (!(r.hi > r.lo)) throw DegenerateRange(static_cast<std::size_t>(i));
        const double span = r.hi - r.lo;
        p.inf(i) = std::clamp((lower(i) - r.lo) / span, 0.0, 1.0);
        p.sup(i) = std::clamp((upper(i) - r.lo) / span, 0.0, 1.0);
    }
    return p;
}

Pattern normalize(const IntervalState& state, const Normalization& ranges) {
    return normalize(state.lower(), state.upper(), ranges);
}

Pattern normalize(const StateVector& state, const Normalization& ranges) {
    const Eigen::VectorXd x = state.stacked();
    return normalize(x, x, ranges);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> denormalize(const Pattern& p,
                                                        const Normalization& ranges) {
    const auto n = static_cast<Eigen::Index>(ranges.size());
    if (p.inf.size() != n || p.sup.size() != n)
        throw ValidationError("normalization", "pattern dimension does not match the ranges");
    Eigen::VectorXd lower(n), upper(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Range& r = ranges[static_cast<std::size_t>(i)];
        if (!(r.hi > r.lo)) throw DegenerateRange(static_cast<std::size_t>(i));
        lower(i) = r.lo + p.inf(i) * (r.hi - r.lo);
        upper(i) = r.lo + p.sup(i) * (r.hi - r.lo);
    }
    return {lower, upper};
}

}  // namespace hydrostate
