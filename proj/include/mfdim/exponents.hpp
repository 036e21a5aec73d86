#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mfdim/cylinder_measure.hpp"
#include "mfdim/measure.hpp"

namespace mfdim {

// Geometric radius ladder r_k = base^-k for k in [kMin, kMax], with the tail
// window used by the liminf/limsup surrogates.
struct RadiusSchedule {
    double base = 2.0;
    int kMin = 4;
    int kMax = 14;
    int tailWindow = 5;

    void validate() const;
    // Additionally checks the ladder against measure resolutions: radii must
    // not go below base^-depth for tree measures, and symbolic trees require
    // base == arity so balls are exactly cylinders.
    void validateFor(const BallMassOracle& nu, const BallMassOracle& mu) const;

    int count() const { return kMax - kMin + 1; }
    double radius(int k) const;
    std::vector<double> radii() const;
};

// Per-radius values of alpha^q(x, r) for one point, with the raw log masses
// kept for slope fits and plot output. Radii with a vanishing ball mass are
// flagged, never silently dropped.
struct ExponentSeries {
    Point x;
    double q = 0.0;
    double base = 2.0;
    int kMin = 0;
    std::vector<double> logR;
    std::vector<double> logNu;    // NaN where flagged
    std::vector<double> logMu;    // NaN where flagged
    std::vector<double> values;   // a_k; NaN where flagged
    std::vector<uint8_t> flagged;

    int size() const { return static_cast<int>(values.size()); }
};

struct PointwiseResult {
    double alphaLower = 0.0;  // min over the tail window
    double alphaUpper = 0.0;  // max over the tail window
    double slope = 0.0;       // least-squares slope over the tail window
};

struct Percentiles {
    double low = 0.01;
    double high = 0.99;
};

struct DimensionReport {
    double q = 0.0;
    double lowerHausdorff = 0.0;
    double upperHausdorff = 0.0;
    double lowerPacking = 0.0;
    double upperPacking = 0.0;
    int sampleCount = 0;
    Percentiles percentiles;
    RadiusSchedule schedule;
    uint64_t seed = 0;
};

// a_k = (log nu(B(x,r_k)) - q log mu(B(x,r_k))) / log r_k.
// Throws SupportViolationError when nu charges a ball that mu misses.
ExponentSeries localExponentSeries(const BallMassOracle& nu, const BallMassOracle& mu, double q,
                                   const Point& x, const RadiusSchedule& schedule);

// Tail-window min/max plus the stabilized slope estimate; needs at least
// `window` unflagged values.
PointwiseResult pointwiseExponents(const ExponentSeries& series, int window);

struct PointwiseBatch {
    std::vector<double> alphaLower;
    std::vector<double> alphaUpper;
    std::vector<double> slope;
};

// Per-point estimates over a fixed sample list. The parallel version maps
// points across workers; outputs are identical to the serial reference for
// any worker count.
PointwiseBatch pointwiseEstimatesBatch(const BallMassOracle& nu, const BallMassOracle& mu,
                                       double q, const std::vector<Point>& points,
                                       const RadiusSchedule& schedule);
PointwiseBatch pointwiseEstimatesBatchSerial(const BallMassOracle& nu, const BallMassOracle& mu,
                                             double q, const std::vector<Point>& points,
                                             const RadiusSchedule& schedule);

// Draw N points from nu, estimate pointwise exponents, and aggregate the
// essential bounds as nearest-rank percentiles of the pointwise lower/upper
// values.
DimensionReport dimensionEstimates(const BallMassOracle& nu, const BallMassOracle& mu, double q,
                                   int sampleCount, const RadiusSchedule& schedule,
                                   const Percentiles& percentiles, uint64_t seed);

// Nearest-rank percentile of an ascending-sorted sample.
double nearestRankPercentile(const std::vector<double>& sorted, double p);

// (upperHausdorff - lowerHausdorff, upperPacking - lowerPacking).
std::pair<double, double> exactnessGap(const DimensionReport& report);
bool numericallyUnidimensional(const DimensionReport& report, double threshold);

// S_n/n = log nu(I_n(x)) / log |I_n(x)| along a digit path of an embedded
// tree; uses the telescoping increment form when the path is triadic.
double snOverN(const CylinderMeasure& measure, const std::vector<uint8_t>& path, int n);

}  // namespace mfdim
