#include "mfdim/projection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include "mfdim/errors.hpp"
#include "mfdim/parallel.hpp"

namespace mfdim {

double Subspace::orthonormalityDefect() const {
    double worst = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double dot = 0.0;
            const auto ri = row(i), rj = row(j);
            for (int k = 0; k < ambient; ++k) dot += ri[static_cast<size_t>(k)] * rj[static_cast<size_t>(k)];
            worst = std::max(worst, std::fabs(dot - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

Subspace sampleSubspace(int n, int m, uint64_t seed) {
    if (!(m > 0 && m < n)) throw ArgumentError("subspace dimension must satisfy 0 < m < n");

    for (uint64_t attempt = 0;; ++attempt) {
        Rng rng(deriveSeed(seed, attempt));
        std::vector<double> rows(static_cast<size_t>(m) * static_cast<size_t>(n));
        for (double& v : rows) v = rng.gaussian();

        // modified Gram-Schmidt, two passes per row
        bool degenerate = false;
        for (int i = 0; i < m && !degenerate; ++i) {
            double* ri = rows.data() + static_cast<size_t>(i) * static_cast<size_t>(n);
            for (int pass = 0; pass < 2; ++pass) {
                for (int j = 0; j < i; ++j) {
                    const double* rj = rows.data() + static_cast<size_t>(j) * static_cast<size_t>(n);
                    double dot = 0.0;
                    for (int k = 0; k < n; ++k) dot += ri[k] * rj[k];
                    for (int k = 0; k < n; ++k) ri[k] -= dot * rj[k];
                }
            }
            double norm = 0.0;
            for (int k = 0; k < n; ++k) norm += ri[k] * ri[k];
            norm = std::sqrt(norm);
            if (norm < 1e-8) {
                degenerate = true;  // probability-zero event; retry with a fresh sub-seed
                break;
            }
            for (int k = 0; k < n; ++k) ri[k] /= norm;
        }
        if (degenerate) continue;

        Subspace v;
        v.ambient = n;
        v.dim = m;
        v.basis = std::move(rows);
        return v;
    }
}

PointCloudMeasure project(const PointCloudMeasure& cloud, const Subspace& v) {
    if (cloud.dimension() != v.ambient)
        throw ArgumentError("projection: cloud dimension does not match the ambient space");
    const int n = cloud.size(), m = v.dim;
    std::vector<double> proj(static_cast<size_t>(n) * static_cast<size_t>(m));
    for (int i = 0; i < n; ++i) {
        const auto p = cloud.pointAt(i);
        for (int r = 0; r < m; ++r) {
            const auto basisRow = v.row(r);
            double dot = 0.0;
            for (int k = 0; k < v.ambient; ++k)
                dot += basisRow[static_cast<size_t>(k)] * p[static_cast<size_t>(k)];
            proj[static_cast<size_t>(i) * static_cast<size_t>(m) + static_cast<size_t>(r)] = dot;
        }
    }

    // merge images closer than 1e-12 per coordinate (pushforward of atoms)
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double* pa = proj.data() + static_cast<size_t>(a) * static_cast<size_t>(m);
        const double* pb = proj.data() + static_cast<size_t>(b) * static_cast<size_t>(m);
        return std::lexicographical_compare(pa, pa + m, pb, pb + m);
    });

    std::vector<double> coords;
    std::vector<double> weights;
    coords.reserve(proj.size());
    weights.reserve(static_cast<size_t>(n));
    for (int ii = 0; ii < n; ++ii) {
        const int i = order[static_cast<size_t>(ii)];
        const double* p = proj.data() + static_cast<size_t>(i) * static_cast<size_t>(m);
        bool mergeWithLast = false;
        if (!weights.empty()) {
            const double* last = coords.data() + coords.size() - static_cast<size_t>(m);
            mergeWithLast = true;
            for (int k = 0; k < m; ++k)
                if (std::fabs(p[k] - last[k]) > 1e-12) {
                    mergeWithLast = false;
                    break;
                }
        }
        if (mergeWithLast)
            weights.back() += cloud.weightAt(i);
        else {
            coords.insert(coords.end(), p, p + m);
            weights.push_back(cloud.weightAt(i));
        }
    }
    return PointCloudMeasure(m, std::move(coords), std::move(weights), false);
}

double kernelPhi(double distance, double r, int m) {
    if (!(r > 0.0)) throw ArgumentError("kernel radius must be > 0");
    if (m < 1) throw ArgumentError("kernel order must be >= 1");
    const double d = std::fabs(distance);
    if (d <= r) return 1.0;
    return std::pow(r / d, m);
}

double convolveDirect(const PointCloudMeasure& mu, std::span<const double> x, double r, int m) {
    if (!(r > 0.0)) throw ArgumentError("kernel radius must be > 0");
    std::vector<double> dist;
    mu.distancesTo(x, dist);
    double sum = 0.0, comp = 0.0;
    for (size_t i = 0; i < dist.size(); ++i) {
        const double v = mu.weightAt(static_cast<int>(i)) * kernelPhi(dist[i], r, m);
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double convolveRadial(const PointCloudMeasure& mu, std::span<const double> x, double r, int m) {
    if (!(r > 0.0)) throw ArgumentError("kernel radius must be > 0");
    if (m < 1) throw ArgumentError("kernel order must be >= 1");

    std::vector<double> dist;
    mu.distancesTo(x, dist);
    const size_t n = dist.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return dist[a] < dist[b]; });

    // mass already inside radius r
    double massInside = 0.0;
    size_t i = 0;
    while (i < n && dist[order[i]] <= r) massInside += mu.weightAt(static_cast<int>(order[i++]));

    // piecewise-constant integral between consecutive jump radii
    const double dm = static_cast<double>(m);
    double integral = 0.0;
    double mass = massInside;
    double u = r;
    while (i < n) {
        const double next = dist[order[i]];  // > u: all atoms at <= u are consumed
        integral += mass * (std::pow(u, -dm) - std::pow(next, -dm)) / dm;
        while (i < n && dist[order[i]] == next) mass += mu.weightAt(static_cast<int>(order[i++]));
        u = next;
    }
    integral += mass * std::pow(u, -dm) / dm;  // constant tail out to infinity
    return dm * std::pow(r, dm) * integral;
}

KernelEvaluation evaluateKernelPair(const PointCloudMeasure& mu, std::span<const double> x,
                                    double r, int m) {
    KernelEvaluation e;
    e.x.assign(x.begin(), x.end());
    e.r = r;
    e.m = m;
    e.valueDirect = convolveDirect(mu, x, r, m);
    e.valueRadial = convolveRadial(mu, x, r, m);
    return e;
}

ExponentSeries projectedExponentSeries(const PointCloudMeasure& nu, const PointCloudMeasure& mu,
                                       double q, int m, const Point& x,
                                       const RadiusSchedule& schedule) {
    schedule.validate();
    if (m < 1) throw ArgumentError("kernel order must be >= 1");
    const auto& center = x.coords();
    const std::vector<double> rs = schedule.radii();

    ExponentSeries s;
    s.x = x;
    s.q = q;
    s.base = schedule.base;
    s.kMin = schedule.kMin;
    const size_t count = rs.size();
    s.logR.resize(count);
    s.logNu.assign(count, std::numeric_limits<double>::quiet_NaN());
    s.logMu.assign(count, std::numeric_limits<double>::quiet_NaN());
    s.values.assign(count, std::numeric_limits<double>::quiet_NaN());
    s.flagged.assign(count, 0);

    for (size_t i = 0; i < count; ++i) {
        s.logR[i] = std::log(rs[i]);
        const double nuConv = convolveDirect(nu, center, rs[i], m);
        const double muConv = convolveDirect(mu, center, rs[i], m);
        if (nuConv > 0.0 && muConv == 0.0)
            throw SupportViolationError("nu*phi > 0 but mu*phi = 0 at r = " + std::to_string(rs[i]));
        if (nuConv <= 0.0 || muConv <= 0.0) {  // possible only through underflow
            s.flagged[i] = 1;
            continue;
        }
        s.logNu[i] = std::log(nuConv);
        s.logMu[i] = std::log(muConv);
        s.values[i] = (s.logNu[i] - q * s.logMu[i]) / s.logR[i];
    }
    return s;
}

namespace {

ProjectionSummary runProjectionReport(const PointCloudMeasure& nu, const PointCloudMeasure& mu,
                                      double q, int m, int numSubspaces, int sampleCount,
                                      const RadiusSchedule& schedule,
                                      const Percentiles& percentiles, double tolerance,
                                      uint64_t seed, bool parallel) {
    if (numSubspaces < 1) throw ArgumentError("need at least one subspace");
    if (nu.dimension() != mu.dimension())
        throw ArgumentError("nu and mu must live in the same space");
    if (!(m > 0 && m < nu.dimension()))
        throw ArgumentError("subspace dimension must satisfy 0 < m < n");

    ProjectionSummary summary;
    summary.unprojected =
        dimensionEstimates(nu, mu, q, sampleCount, schedule, percentiles, deriveSeed(seed, ~0ULL));
    summary.perSubspace.resize(static_cast<size_t>(numSubspaces));

    const auto computeSlot = [&](int64_t i) {
        PerSubspaceReport& slot = summary.perSubspace[static_cast<size_t>(i)];
        slot.index = static_cast<int>(i);
        slot.subspace = sampleSubspace(nu.dimension(), m, deriveSeed(seed, static_cast<uint64_t>(i)));
        const PointCloudMeasure nuV = project(nu, slot.subspace);
        const PointCloudMeasure muV = project(mu, slot.subspace);
        if (nuV.supportSpread() <= 1e-9 || muV.supportSpread() <= 1e-9) {
            slot.degenerate = true;  // collapsed to (nearly) an atom
            return;
        }
        slot.report = dimensionEstimates(nuV, muV, q, sampleCount, schedule, percentiles,
                                         deriveSeed(seed, 0x10000000ULL + static_cast<uint64_t>(i)));
        const DimensionReport& u = summary.unprojected;
        const DimensionReport& p = slot.report;
        slot.withinTolerance = std::fabs(p.lowerHausdorff - u.lowerHausdorff) <= tolerance &&
                               std::fabs(p.upperHausdorff - u.upperHausdorff) <= tolerance &&
                               std::fabs(p.lowerPacking - u.lowerPacking) <= tolerance &&
                               std::fabs(p.upperPacking - u.upperPacking) <= tolerance;
    };

    std::atomic<bool> failed{false};
    const auto body = [&](int64_t i) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            computeSlot(i);
        } catch (...) {
            failed.store(true, std::memory_order_relaxed);
        }
    };

    if (parallel)
        parallelFor(numSubspaces, body);
    else
        serialFor(numSubspaces, body);

    // rerun serially so the reported error does not depend on thread timing
    if (failed.load())
        for (int64_t i = 0; i < numSubspaces; ++i) computeSlot(i);

    int passes = 0;
    for (const PerSubspaceReport& r : summary.perSubspace) {
        if (r.degenerate) continue;
        ++summary.comparable;
        if (r.withinTolerance) ++passes;
    }
    summary.passFraction =
        summary.comparable == 0 ? 0.0 : static_cast<double>(passes) / summary.comparable;
    return summary;
}

}  // namespace

ProjectionSummary projectionDimensionReport(const PointCloudMeasure& nu,
                                            const PointCloudMeasure& mu, double q, int m,
                                            int numSubspaces, int sampleCount,
                                            const RadiusSchedule& schedule,
                                            const Percentiles& percentiles, double tolerance,
                                            uint64_t seed) {
    return runProjectionReport(nu, mu, q, m, numSubspaces, sampleCount, schedule, percentiles,
                               tolerance, seed, true);
}

ProjectionSummary projectionDimensionReportSerial(const PointCloudMeasure& nu,
                                                  const PointCloudMeasure& mu, double q, int m,
                                                  int numSubspaces, int sampleCount,
                                                  const RadiusSchedule& schedule,
                                                  const Percentiles& percentiles, double tolerance,
                                                  uint64_t seed) {
    return runProjectionReport(nu, mu, q, m, numSubspaces, sampleCount, schedule, percentiles,
                               tolerance, seed, false);
}

}  // namespace mfdim
