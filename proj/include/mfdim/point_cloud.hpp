#pragma once

#include <span>
#include <vector>

#include "mfdim/measure.hpp"

namespace mfdim {

// Weighted point set in R^d with exact closed-ball masses.
class PointCloudMeasure : public BallMassOracle {
public:
    // coords is row-major (size() * dimension). Weights must be positive; with
    // renormalize=false they must already sum to 1 within 1e-12.
    PointCloudMeasure(int dimension, std::vector<double> coords, std::vector<double> weights,
                      bool renormalize = false);

    int dimension() const { return dimension_; }
    int size() const { return static_cast<int>(weights_.size()); }
    std::span<const double> pointAt(int i) const {
        return {coords_.data() + static_cast<size_t>(i) * static_cast<size_t>(dimension_),
                static_cast<size_t>(dimension_)};
    }
    double weightAt(int i) const { return weights_[static_cast<size_t>(i)]; }
    const std::vector<double>& weights() const { return weights_; }

    double ballMass(const Point& x, double r) const override;
    Point sample(Rng& rng) const override;
    std::vector<double> ballMasses(const Point& x, std::span<const double> radii) const override;

    double ballMassAt(std::span<const double> x, double r) const;
    void distancesTo(std::span<const double> x, std::vector<double>& out) const;

    // Half the largest coordinate spread over all axes (0 for a single atom).
    double supportSpread() const;

private:
    int dimension_;
    std::vector<double> coords_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;  // for sampling
    // 1d fast path: coordinate-sorted prefix masses turn interval queries
    // into two binary searches
    std::vector<double> sorted1d_;
    std::vector<double> prefix1d_;
};

// Compensated (Neumaier) summation; used wherever mass sums must stay within
// the 1e-12 normalization tolerance.
double neumaierSum(std::span<const double> values);

// count equally weighted atoms on a uniform grid over [0,1].
PointCloudMeasure buildSegmentCloud(int count);

// All level-`depth` cylinder midpoints of the two-ratio Cantor construction
// with the given contraction, as a product in R^2; 4^-depth mass each.
PointCloudMeasure buildProductCantorCloud(double ratio, int depth);

// Uniform coordinates in [0,1]^dim with random weights (normalized).
PointCloudMeasure buildRandomCloud(int count, int dim, uint64_t seed);

// Discretize any sampling measure into an equally weighted cloud.
PointCloudMeasure cloudFromMeasure(const BallMassOracle& measure, int count, uint64_t seed);

}  // namespace mfdim
