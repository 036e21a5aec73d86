#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfdim/exponents.hpp"
#include "mfdim/point_cloud.hpp"

namespace mfdim {

// Element of the Grassmannian G_{n,m} as an orthonormal row basis.
struct Subspace {
    int ambient = 0;
    int dim = 0;
    std::vector<double> basis;  // row-major, dim x ambient

    std::span<const double> row(int i) const {
        return {basis.data() + static_cast<size_t>(i) * static_cast<size_t>(ambient),
                static_cast<size_t>(ambient)};
    }
    // max |B B^T - I| entry; orthonormality defect
    double orthonormalityDefect() const;
};

// Haar-distributed subspace: orthonormalized rows of an m x n standard
// Gaussian matrix (rotation invariance of the Gaussian gives the invariant
// distribution). Deterministic given the seed; a rank-deficient draw is
// retried with an incremented sub-seed.
Subspace sampleSubspace(int n, int m, uint64_t seed);

// Pushforward of a cloud under orthogonal projection onto V: points mapped
// to their m basis coordinates, weights kept. Images closer than 1e-12 in
// every coordinate are merged by weight addition.
PointCloudMeasure project(const PointCloudMeasure& cloud, const Subspace& v);

// min{1, r^m |x|^-m}; equals 1 at x = 0.
double kernelPhi(double distance, double r, int m);

// mu * phi_r^m(x) as a direct weighted kernel sum.
double convolveDirect(const PointCloudMeasure& mu, std::span<const double> x, double r, int m);

// The same convolution through the radial form
//   m r^m Integral_r^inf u^-{m+1} mu(B(x,u)) du,
// evaluated exactly: the ball mass is a step function with jumps at the
// sorted atom distances, so the integral is a finite sum of segment terms.
double convolveRadial(const PointCloudMeasure& mu, std::span<const double> x, double r, int m);

struct KernelEvaluation {
    std::vector<double> x;
    double r = 0;
    int m = 0;
    double valueDirect = 0;
    double valueRadial = 0;
};
KernelEvaluation evaluateKernelPair(const PointCloudMeasure& mu, std::span<const double> x,
                                    double r, int m);

// Exponent series with convolutions in place of ball masses.
ExponentSeries projectedExponentSeries(const PointCloudMeasure& nu, const PointCloudMeasure& mu,
                                       double q, int m, const Point& x,
                                       const RadiusSchedule& schedule);

struct PerSubspaceReport {
    int index = 0;
    Subspace subspace;
    DimensionReport report;
    bool degenerate = false;  // projection collapsed the support; excluded from the summary
    bool withinTolerance = false;
};

struct ProjectionSummary {
    DimensionReport unprojected;
    std::vector<PerSubspaceReport> perSubspace;
    int comparable = 0;       // non-degenerate subspaces
    double passFraction = 0;  // fraction of comparable V within tolerance on all four values
};

// For each Haar-sampled V: push both measures forward, rerun the dimension
// estimates, and compare all four values against the unprojected report.
ProjectionSummary projectionDimensionReport(const PointCloudMeasure& nu,
                                            const PointCloudMeasure& mu, double q, int m,
                                            int numSubspaces, int sampleCount,
                                            const RadiusSchedule& schedule,
                                            const Percentiles& percentiles, double tolerance,
                                            uint64_t seed);

// Serial reference for the per-subspace loop (kept for determinism tests).
ProjectionSummary projectionDimensionReportSerial(const PointCloudMeasure& nu,
                                                  const PointCloudMeasure& mu, double q, int m,
                                                  int numSubspaces, int sampleCount,
                                                  const RadiusSchedule& schedule,
                                                  const Percentiles& percentiles, double tolerance,
                                                  uint64_t seed);

}  // namespace mfdim
