#pragma once

#include "hydrostate/error_limits.hpp"
#include "hydrostate/hydraulics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hydrostate {

/// Interval-valued pattern [inf, sup] in normalized coordinates.
struct Pattern {
    Eigen::VectorXd inf;
    Eigen::VectorXd sup;

    static Pattern crisp(const Eigen::VectorXd& point) { return {point, point}; }
    [[nodiscard]] Eigen::Index size() const { return inf.size(); }
    [[nodiscard]] bool is_crisp() const { return inf == sup; }

    friend bool operator==(const Pattern& a, const Pattern& b) {
        return a.inf.size() == b.inf.size() && a.sup.size() == b.sup.size() && a.inf == b.inf &&
               a.sup == b.sup;
    }
};

/// Training pair (P, l). An empty label marks an unlabeled pattern.
struct LabeledPattern {
    Pattern pattern;
    std::string label;

    friend bool operator==(const LabeledPattern&, const LabeledPattern&) = default;
};

/// Hidden neuron: an axis-aligned box with min point `lo` and max point `hi`.
struct Cell {
    Eigen::VectorXd lo;  // m
    Eigen::VectorXd hi;  // M
    std::string label;

    [[nodiscard]] double volume() const { return (hi - lo).prod(); }
    [[nodiscard]] bool contains(const Pattern& p) const {
        return (p.inf.array() >= lo.array()).all() && (p.sup.array() <= hi.array()).all();
    }

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.label == b.label && a.lo.size() == b.lo.size() && a.lo == b.lo &&
               a.hi.size() == b.hi.size() && a.hi == b.hi;
    }
};

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    friend bool operator==(const Range&, const Range&) = default;
};

using Normalization = std::vector<Range>;

/// Default fuzziness slope and maximum cell side.
inline constexpr double kDefaultGamma = 4.0;
inline constexpr double kDefaultTheta = 0.3;

struct ClassifierModel {
    std::vector<Cell> cells;
    std::vector<std::string> labels;  // output layer, in order of first appearance
    Eigen::VectorXd gamma;            // one slope per dimension
    double theta = kDefaultTheta;
    Normalization normalization;      // raw -> [0,1] ranges, one per dimension

    /// Untrained model of dimension n.
    static ClassifierModel make(std::size_t dimension, double theta = kDefaultTheta,
                                double gamma = kDefaultGamma, Normalization normalization = {});

    [[nodiscard]] Eigen::Index dimension() const { return gamma.size(); }

    /// Throws ValidationError if an invariant is broken.
    void validate() const;

    friend bool operator==(const ClassifierModel& a, const ClassifierModel& b) {
        return a.cells == b.cells && a.labels == b.labels && a.gamma.size() == b.gamma.size() &&
               a.gamma == b.gamma && a.theta == b.theta && a.normalization == b.normalization;
    }
};

struct ClassificationResult {
    std::vector<std::pair<std::string, double>> memberships;  // label-set order
    std::string label;
    double membership = 0.0;
    std::size_t cell = 0;  // index of the winning cell
};

/// Ramp fuzziness function: min(1, max(0, gamma * x)).
inline double ramp(double x, double gamma) { return std::min(1.0, std::max(0.0, gamma * x)); }

/// max_i max{ phi_i(P_i^sup - M_i), phi_i(m_i - P_i^inf) }; zero iff the
/// pattern lies in the cell.
double violation(const Cell& cell, const Pattern& p, const Eigen::VectorXd& gamma);

/// 1 - violation.
double membership(const Cell& cell, const Pattern& p, const Eigen::VectorXd& gamma);

/// Presents the examples in order, growing and adjusting cells. Throws
/// PatternOutOfRange for coordinates outside [0,1] and ValidationError on a
/// dimension mismatch or empty label.
ClassifierModel train(ClassifierModel model, std::span<const LabeledPattern> examples);

/// Throws EmptyModel.
ClassificationResult classify(const ClassifierModel& model, const Pattern& p);

/// Affine map of [lower, upper] onto [0,1]^n, clamped. Throws DegenerateRange.
Pattern normalize(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                  const Normalization& ranges);
Pattern normalize(const IntervalState& state, const Normalization& ranges);
Pattern normalize(const StateVector& state, const Normalization& ranges);

/// Inverse map back to raw (lower, upper) coordinates.
std::pair<Eigen::VectorXd, Eigen::VectorXd> denormalize(const Pattern& p,
                                                        const Normalization& ranges);

}  // namespace hydrostate
