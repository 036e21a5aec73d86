#include "mfdim/exponents.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

#include "mfdim/errors.hpp"
#include "mfdim/parallel.hpp"

namespace mfdim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const CylinderMeasure* asCylinder(const BallMassOracle& m) {
    return dynamic_cast<const CylinderMeasure*>(&m);
}
}  // namespace

void RadiusSchedule::validate() const {
    if (!(base > 1.0)) throw ArgumentError("radius schedule: base must be > 1");
    if (kMin < 1) throw ArgumentError("radius schedule: kMin must be >= 1");
    if (kMin >= kMax) throw ArgumentError("radius schedule: kMin must be < kMax");
    if (tailWindow < 2) throw ArgumentError("radius schedule: tail window must be >= 2");
    if (tailWindow > count())
        throw ArgumentError("radius schedule: tail window exceeds the radius count");
}

void RadiusSchedule::validateFor(const BallMassOracle& nu, const BallMassOracle& mu) const {
    validate();
    const double smallest = radius(kMax);
    for (const BallMassOracle* m : {&nu, &mu}) {
        if (const CylinderMeasure* tree = asCylinder(*m)) {
            if (tree->mode() == CylinderMeasure::Mode::Symbolic &&
                base != static_cast<double>(tree->arity()))
                throw ArgumentError(
                    "radius schedule: base must equal the arity of a symbolic measure");
            if (smallest < m->minResolvableRadius() * (1.0 - 1e-12))
                throw ArgumentError("radius schedule: radii fall below the measure resolution");
        }
    }
}

double RadiusSchedule::radius(int k) const {
    return std::pow(base, -static_cast<double>(k));
}

std::vector<double> RadiusSchedule::radii() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(count()));
    for (int k = kMin; k <= kMax; ++k) out.push_back(radius(k));
    return out;
}

ExponentSeries localExponentSeries(const BallMassOracle& nu, const BallMassOracle& mu, double q,
                                   const Point& x, const RadiusSchedule& schedule) {
    schedule.validate();
    const std::vector<double> rs = schedule.radii();
    const std::vector<double> nuMasses = nu.ballMasses(x, rs);
    const std::vector<double> muMasses = mu.ballMasses(x, rs);

    ExponentSeries s;
    s.x = x;
    s.q = q;
    s.base = schedule.base;
    s.kMin = schedule.kMin;
    const size_t n = rs.size();
    s.logR.resize(n);
    s.logNu.assign(n, kNaN);
    s.logMu.assign(n, kNaN);
    s.values.assign(n, kNaN);
    s.flagged.assign(n, 0);

    for (size_t i = 0; i < n; ++i) {
        s.logR[i] = std::log(rs[i]);
        const double nm = nuMasses[i], mm = muMasses[i];
        if (nm > 0.0 && mm == 0.0)
            throw SupportViolationError("nu(B) = " + std::to_string(nm) +
                                        " but mu(B) = 0 at r = " + std::to_string(rs[i]) +
                                        ", x = " + x.describe());
        if (nm <= 0.0 || mm <= 0.0) {
            s.flagged[i] = 1;
            continue;
        }
        s.logNu[i] = std::log(nm);
        s.logMu[i] = std::log(mm);
        s.values[i] = (s.logNu[i] - q * s.logMu[i]) / s.logR[i];
    }
    return s;
}

PointwiseResult pointwiseExponents(const ExponentSeries& series, int window) {
    if (window < 2) throw ArgumentError("tail window must be >= 2");
    std::vector<size_t> valid;
    valid.reserve(series.values.size());
    for (size_t i = 0; i < series.values.size(); ++i)
        if (!series.flagged[i]) valid.push_back(i);
    if (static_cast<int>(valid.size()) < window)
        throw EstimationError("series has " + std::to_string(valid.size()) +
                              " valid values, tail window needs " + std::to_string(window));

    PointwiseResult r;
    r.alphaLower = std::numeric_limits<double>::infinity();
    r.alphaUpper = -r.alphaLower;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const size_t first = valid.size() - static_cast<size_t>(window);
    for (size_t j = first; j < valid.size(); ++j) {
        const size_t i = valid[j];
        r.alphaLower = std::min(r.alphaLower, series.values[i]);
        r.alphaUpper = std::max(r.alphaUpper, series.values[i]);
        const double xv = series.logR[i];
        const double yv = series.logNu[i] - series.q * series.logMu[i];
        sx += xv;
        sy += yv;
        sxx += xv * xv;
        sxy += xv * yv;
    }
    const double n = static_cast<double>(window);
    const double denom = sxx - sx * sx / n;
    if (denom == 0.0) throw EstimationError("degenerate radii in slope fit");
    r.slope = (sxy - sx * sy / n) / denom;
    return r;
}

namespace {

PointwiseBatch runBatch(const BallMassOracle& nu, const BallMassOracle& mu, double q,
                        const std::vector<Point>& points, const RadiusSchedule& schedule,
                        bool parallel) {
    const int64_t n = static_cast<int64_t>(points.size());
    PointwiseBatch out;
    out.alphaLower.resize(points.size());
    out.alphaUpper.resize(points.size());
    out.slope.resize(points.size());

    std::atomic<bool> failed{false};
    const auto body = [&](int64_t i) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            const ExponentSeries s =
                localExponentSeries(nu, mu, q, points[static_cast<size_t>(i)], schedule);
            const PointwiseResult r = pointwiseExponents(s, schedule.tailWindow);
            out.alphaLower[static_cast<size_t>(i)] = r.alphaLower;
            out.alphaUpper[static_cast<size_t>(i)] = r.alphaUpper;
            out.slope[static_cast<size_t>(i)] = r.slope;
        } catch (...) {
            failed.store(true, std::memory_order_relaxed);
        }
    };

    if (parallel)
        parallelFor(n, body);
    else
        serialFor(n, body);

    if (failed.load()) {
        // rerun serially so the reported error does not depend on thread timing
        for (int64_t i = 0; i < n; ++i) {
            const ExponentSeries s =
                localExponentSeries(nu, mu, q, points[static_cast<size_t>(i)], schedule);
            const PointwiseResult r = pointwiseExponents(s, schedule.tailWindow);
            out.alphaLower[static_cast<size_t>(i)] = r.alphaLower;
            out.alphaUpper[static_cast<size_t>(i)] = r.alphaUpper;
            out.slope[static_cast<size_t>(i)] = r.slope;
        }
    }
    return out;
}

}  // namespace

PointwiseBatch pointwiseEstimatesBatch(const BallMassOracle& nu, const BallMassOracle& mu,
                                       double q, const std::vector<Point>& points,
                                       const RadiusSchedule& schedule) {
    return runBatch(nu, mu, q, points, schedule, true);
}

PointwiseBatch pointwiseEstimatesBatchSerial(const BallMassOracle& nu, const BallMassOracle& mu,
                                             double q, const std::vector<Point>& points,
                                             const RadiusSchedule& schedule) {
    return runBatch(nu, mu, q, points, schedule, false);
}

double nearestRankPercentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ArgumentError("percentile of an empty sample");
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("percentile must lie in (0, 1)");
    const double n = static_cast<double>(sorted.size());
    long rank = static_cast<long>(std::ceil(p * n - 1e-9));
    rank = std::max(1L, std::min(rank, static_cast<long>(sorted.size())));
    return sorted[static_cast<size_t>(rank - 1)];
}

DimensionReport dimensionEstimates(const BallMassOracle& nu, const BallMassOracle& mu, double q,
                                   int sampleCount, const RadiusSchedule& schedule,
                                   const Percentiles& percentiles, uint64_t seed) {
    if (sampleCount < 100) throw ArgumentError("dimension estimates need N >= 100");
    if (!(percentiles.low > 0.0 && percentiles.low <= percentiles.high && percentiles.high < 1.0))
        throw ArgumentError("percentiles must satisfy 0 < low <= high < 1");
    schedule.validateFor(nu, mu);

    const std::vector<Point> points = samplePoints(nu, sampleCount, seed);
    if (points.empty()) throw EstimationError("empty sample");
    PointwiseBatch batch = pointwiseEstimatesBatch(nu, mu, q, points, schedule);

    std::sort(batch.alphaLower.begin(), batch.alphaLower.end());
    std::sort(batch.alphaUpper.begin(), batch.alphaUpper.end());

    DimensionReport report;
    report.q = q;
    report.lowerHausdorff = nearestRankPercentile(batch.alphaLower, percentiles.low);
    report.upperHausdorff = nearestRankPercentile(batch.alphaLower, percentiles.high);
    report.lowerPacking = nearestRankPercentile(batch.alphaUpper, percentiles.low);
    report.upperPacking = nearestRankPercentile(batch.alphaUpper, percentiles.high);
    report.sampleCount = sampleCount;
    report.percentiles = percentiles;
    report.schedule = schedule;
    report.seed = seed;

    // the four ordering invariants hold by construction; check anyway
    if (!(report.lowerHausdorff <= report.upperHausdorff &&
          report.lowerPacking <= report.upperPacking &&
          report.lowerHausdorff <= report.lowerPacking &&
          report.upperHausdorff <= report.upperPacking))
        throw EstimationError("dimension report ordering violated");
    return report;
}

std::pair<double, double> exactnessGap(const DimensionReport& report) {
    return {report.upperHausdorff - report.lowerHausdorff,
            report.upperPacking - report.lowerPacking};
}

bool numericallyUnidimensional(const DimensionReport& report, double threshold) {
    return exactnessGap(report).first <= threshold;
}

double snOverN(const CylinderMeasure& measure, const std::vector<uint8_t>& path, int n) {
    if (measure.mode() != CylinderMeasure::Mode::Embedded)
        throw ArgumentError("S_n/n is defined for embedded tree measures");
    if (n < 1) throw ArgumentError("n must be >= 1");
    if (n > measure.depth()) throw ArgumentError("n exceeds the tree depth");
    if (static_cast<int>(path.size()) < n) throw ArgumentError("path shorter than n");

    std::vector<uint8_t> prefix(path.begin(), path.begin() + n);
    bool triadic = true;
    {
        std::vector<uint8_t> w;
        for (int k = 0; k < n; ++k) {
            w.assign(path.begin(), path.begin() + k + 1);
            const auto [left, length] = measure.cylinderInterval(w);
            const auto [pl, pLen] = k == 0 ? std::pair<double, double>{0.0, 1.0}
                                           : measure.cylinderInterval(std::vector<uint8_t>(
                                                 path.begin(), path.begin() + k));
            if (std::fabs(length / pLen - 1.0 / 3.0) > 1e-15) {
                triadic = false;
                break;
            }
        }
    }

    if (triadic) {
        // X_j = -log3(nu(I_j)/nu(I_{j-1})); S_n/n telescopes to the same ratio
        double sum = 0.0;
        double prev = 1.0;
        const double log3 = std::log(3.0);
        for (int k = 1; k <= n; ++k) {
            const double mass =
                measure.cylinderMass(std::vector<uint8_t>(path.begin(), path.begin() + k));
            if (!(mass > 0.0)) throw EstimationError("path runs through a zero-mass cylinder");
            sum += -std::log(mass / prev) / log3;
            prev = mass;
        }
        return sum / static_cast<double>(n);
    }

    const double mass = measure.cylinderMass(prefix);
    if (!(mass > 0.0)) throw EstimationError("path runs through a zero-mass cylinder");
    const double length = measure.cylinderLength(prefix);
    return std::log(mass) / std::log(length);
}

}  // namespace mfdim
