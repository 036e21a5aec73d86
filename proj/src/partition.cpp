#include "mfdim/partition.hpp"

#include <algorithm>
#include <cmath>

#include "mfdim/errors.hpp"
#include "mfdim/parallel.hpp"

namespace mfdim {

namespace {

// Level-uniform trees factorize: sum over generation-n words of
// prod_k frac^q ratio^t equals prod_k (sum_j frac_j^q ratio_j^t).
double partitionSumLevelRules(const CylinderMeasure& mu, double q, double t, int n) {
    const auto& rules = mu.levelRules();
    const bool symbolic = mu.mode() == CylinderMeasure::Mode::Symbolic;
    const double symbolicRatio = 1.0 / static_cast<double>(mu.arity());
    double product = 1.0;
    for (int k = 0; k < n; ++k) {
        double levelSum = 0.0;
        for (const ChildSpec& c : rules[static_cast<size_t>(k)]) {
            if (c.massFraction <= 0.0) continue;  // zero-mass subtree
            const double diamRatio = symbolic ? symbolicRatio : c.ratio;
            levelSum += std::pow(c.massFraction, q) * std::pow(diamRatio, t);
        }
        product *= levelSum;
    }
    return product;
}

double partitionSumExplicit(const CylinderMeasure& mu, double q, double t, int n) {
    const auto& levels = mu.explicitLevels();
    double total = 0.0;
    for (const CylinderMeasure::Node& node : levels[static_cast<size_t>(n)]) {
        if (node.mass <= 0.0) continue;
        total += std::pow(node.mass, q) * std::pow(node.length, t);
    }
    return total;
}

bool uniformDiametersAt(const CylinderMeasure& mu, int n, double& diameter) {
    if (mu.mode() == CylinderMeasure::Mode::Symbolic) {
        diameter = std::pow(static_cast<double>(mu.arity()), -static_cast<double>(n));
        return true;
    }
    if (mu.isLevelUniform()) {
        double d = 1.0;
        for (int k = 0; k < n; ++k) {
            const auto& rule = mu.levelRules()[static_cast<size_t>(k)];
            for (const ChildSpec& c : rule)
                if (c.ratio != rule[0].ratio) return false;
            d *= rule[0].ratio;
        }
        diameter = d;
        return true;
    }
    const auto& nodes = mu.explicitLevels()[static_cast<size_t>(n)];
    for (const auto& node : nodes)
        if (std::fabs(node.length - nodes[0].length) > 1e-15 * nodes[0].length) return false;
    diameter = nodes[0].length;
    return true;
}

// log of sum over generation-n words of mass^q (zero masses skipped)
double logMomentSum(const CylinderMeasure& mu, double q, int n) {
    if (mu.isLevelUniform()) {
        double logSum = 0.0;
        for (int k = 0; k < n; ++k) {
            double levelSum = 0.0;
            for (const ChildSpec& c : mu.levelRules()[static_cast<size_t>(k)])
                if (c.massFraction > 0.0) levelSum += std::pow(c.massFraction, q);
            logSum += std::log(levelSum);
        }
        return logSum;
    }
    double sum = 0.0;
    for (const auto& node : mu.explicitLevels()[static_cast<size_t>(n)])
        if (node.mass > 0.0) sum += std::pow(node.mass, q);
    return std::log(sum);
}

}  // namespace

double partitionSum(const CylinderMeasure& mu, double q, double t, int n) {
    if (n < 1) throw ArgumentError("partition sum: n must be >= 1");
    if (n > mu.depth()) throw ArgumentError("partition sum: n exceeds the tree depth");
    return mu.isLevelUniform() ? partitionSumLevelRules(mu, q, t, n)
                               : partitionSumExplicit(mu, q, t, n);
}

double tauEstimate(const CylinderMeasure& mu, double q, int n) {
    if (mu.mode() != CylinderMeasure::Mode::Symbolic)
        throw ArgumentError("tau estimates are defined for symbolic measures");
    if (n < 1) throw ArgumentError("tau estimate: n must be >= 1");
    if (n > mu.depth()) throw ArgumentError("tau estimate: n exceeds the tree depth");
    const double logB = std::log(static_cast<double>(mu.arity()));
    return logMomentSum(mu, q, n) / (static_cast<double>(n) * logB);
}

double tauDerivativeAtOne(const CylinderMeasure& mu, int n, double h) {
    if (!(h > 0.0 && h <= 0.1)) throw ArgumentError("tau derivative: h must lie in (0, 0.1]");
    return (tauEstimate(mu, 1.0 + h, n) - tauEstimate(mu, 1.0 - h, n)) / (2.0 * h);
}

double bernoulliDimensionOracle(const BernoulliSpec& spec, double q) {
    spec.validate();
    const double logB = std::log(static_cast<double>(spec.symbolProbabilities.size()));
    double s = 0.0;
    for (double p : spec.symbolProbabilities) s += p * std::log(p) / logB;
    return (q - 1.0) * s;
}

double setDimensionEstimate(const CylinderMeasure& mu, double q, std::span<const int> depths) {
    if (depths.size() < 2) throw ArgumentError("set dimension estimate needs >= 2 depths");
    std::vector<double> invN, tN;
    invN.reserve(depths.size());
    tN.reserve(depths.size());

    for (int n : depths) {
        if (n < 1 || n > mu.depth())
            throw ArgumentError("set dimension estimate: depth " + std::to_string(n) +
                                " out of range");
        double t;
        double diameter;
        if (uniformDiametersAt(mu, n, diameter)) {
            // sum mass^q * diam^t = 1  =>  t = log(sum mass^q) / -log(diam)
            t = logMomentSum(mu, q, n) / -std::log(diameter);
        } else {
            // partitionSum is strictly decreasing in t (all diameters < 1)
            double lo = -10.0 * (1.0 + std::fabs(q)), hi = 10.0 * (1.0 + std::fabs(q));
            double fLo = partitionSum(mu, q, lo, n) - 1.0;
            double fHi = partitionSum(mu, q, hi, n) - 1.0;
            if (!(fLo > 0.0 && fHi < 0.0))
                throw EstimationError("set dimension estimate: bisection bracket failure");
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                if (partitionSum(mu, q, mid, n) - 1.0 > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            t = 0.5 * (lo + hi);
        }
        invN.push_back(1.0 / static_cast<double>(n));
        tN.push_back(t);
    }

    // least-squares t_n against 1/n; report the intercept (the 1/n -> 0 limit)
    const double m = static_cast<double>(depths.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < invN.size(); ++i) {
        sx += invN[i];
        sy += tN[i];
        sxx += invN[i] * invN[i];
        sxy += invN[i] * tN[i];
    }
    const double denom = sxx - sx * sx / m;
    if (denom == 0.0) throw EstimationError("set dimension estimate: degenerate depth grid");
    const double slope = (sxy - sx * sy / m) / denom;
    return (sy - slope * sx) / m;
}

PartitionTable makePartitionTable(const CylinderMeasure& mu, std::vector<double> qGrid, int depth,
                                  const std::optional<BernoulliSpec>& analytic) {
    PartitionTable table;
    table.qGrid = std::move(qGrid);
    table.depth = depth;
    table.tauHat.resize(table.qGrid.size());
    parallelFor(static_cast<int64_t>(table.qGrid.size()), [&](int64_t i) {
        table.tauHat[static_cast<size_t>(i)] =
            tauEstimate(mu, table.qGrid[static_cast<size_t>(i)], depth);
    });
    if (analytic) {
        std::vector<double> exact(table.qGrid.size());
        const auto& ps = analytic->symbolProbabilities;
        const double logB = std::log(static_cast<double>(ps.size()));
        for (size_t i = 0; i < table.qGrid.size(); ++i) {
            double sum = 0.0;
            for (double p : ps) sum += std::pow(p, table.qGrid[i]);
            exact[i] = std::log(sum) / logB;
        }
        table.tauAnalytic = std::move(exact);
    }
    return table;
}

}  // namespace mfdim
