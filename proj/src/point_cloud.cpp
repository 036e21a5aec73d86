#include "mfdim/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfdim/errors.hpp"

namespace mfdim {

double neumaierSum(std::span<const double> values) {
    double sum = 0.0, compensation = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            compensation += (sum - t) + v;
        else
            compensation += (v - t) + sum;
        sum = t;
    }
    return sum + compensation;
}

PointCloudMeasure::PointCloudMeasure(int dimension, std::vector<double> coords,
                                     std::vector<double> weights, bool renormalize)
    : dimension_(dimension), coords_(std::move(coords)), weights_(std::move(weights)) {
    if (dimension_ < 1) throw ConstructionError("point cloud: dimension must be >= 1");
    if (weights_.empty()) throw ConstructionError("point cloud: no points");
    if (coords_.size() != weights_.size() * static_cast<size_t>(dimension_))
        throw ConstructionError("point cloud: coordinate/weight size mismatch");
    for (double c : coords_)
        if (!std::isfinite(c)) throw ConstructionError("point cloud: non-finite coordinate");
    for (double w : weights_)
        if (!(w > 0.0)) throw ConstructionError("point cloud: weights must be > 0");

    double total = neumaierSum(weights_);
    if (renormalize) {
        for (double& w : weights_) w /= total;
        total = neumaierSum(weights_);
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw ConstructionError("point cloud: weights sum to " + std::to_string(total) +
                                ", not 1");

    cumulative_.resize(weights_.size());
    double run = 0.0, comp = 0.0;
    for (size_t i = 0; i < weights_.size(); ++i) {
        const double v = weights_[i];
        const double t = run + v;
        if (std::fabs(run) >= std::fabs(v))
            comp += (run - t) + v;
        else
            comp += (v - t) + run;
        run = t;
        cumulative_[i] = run + comp;
    }
    cumulative_.back() = std::max(cumulative_.back(), 1.0);

    if (dimension_ == 1) {
        const size_t n = weights_.size();
        std::vector<size_t> order(n);
        for (size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return coords_[a] < coords_[b]; });
        sorted1d_.resize(n);
        prefix1d_.resize(n);
        double s = 0.0, c = 0.0;
        for (size_t i = 0; i < n; ++i) {
            sorted1d_[i] = coords_[order[i]];
            const double v = weights_[order[i]];
            const double t = s + v;
            if (std::fabs(s) >= std::fabs(v))
                c += (s - t) + v;
            else
                c += (v - t) + s;
            s = t;
            prefix1d_[i] = std::min(1.0, s + c);
        }
    }
}

void PointCloudMeasure::distancesTo(std::span<const double> x, std::vector<double>& out) const {
    if (x.size() != static_cast<size_t>(dimension_))
        throw ArgumentError("point dimension mismatch");
    const size_t n = weights_.size();
    out.resize(n);
    const int d = dimension_;
    for (size_t i = 0; i < n; ++i) {
        const double* p = coords_.data() + i * static_cast<size_t>(d);
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double diff = x[static_cast<size_t>(j)] - p[j];
            s += diff * diff;
        }
        out[i] = std::sqrt(s);
    }
}

double PointCloudMeasure::ballMassAt(std::span<const double> x, double r) const {
    if (!(r > 0.0)) throw ArgumentError("ball radius must be > 0");
    if (x.size() != static_cast<size_t>(dimension_))
        throw ArgumentError("point dimension mismatch");
    const size_t n = weights_.size();
    const int d = dimension_;
    double sum = 0.0, comp = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double* p = coords_.data() + i * static_cast<size_t>(d);
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double diff = x[static_cast<size_t>(j)] - p[j];
            s += diff * diff;
        }
        if (std::sqrt(s) <= r) {
            const double v = weights_[i];
            const double t = sum + v;
            if (std::fabs(sum) >= std::fabs(v))
                comp += (sum - t) + v;
            else
                comp += (v - t) + sum;
            sum = t;
        }
    }
    return std::min(1.0, sum + comp);
}

double PointCloudMeasure::ballMass(const Point& x, double r) const {
    return ballMassAt(x.coords(), r);
}

std::vector<double> PointCloudMeasure::ballMasses(const Point& x,
                                                  std::span<const double> radii) const {
    const auto& center = x.coords();
    if (dimension_ == 1) {
        if (center.size() != 1) throw ArgumentError("point dimension mismatch");
        std::vector<double> result(radii.size());
        for (size_t k = 0; k < radii.size(); ++k) {
            if (!(radii[k] > 0.0)) throw ArgumentError("ball radius must be > 0");
            const auto lo = std::lower_bound(sorted1d_.begin(), sorted1d_.end(),
                                             center[0] - radii[k]);
            const auto hi = std::upper_bound(sorted1d_.begin(), sorted1d_.end(),
                                             center[0] + radii[k]);
            if (lo >= hi) {
                result[k] = 0.0;
                continue;
            }
            const size_t a = static_cast<size_t>(lo - sorted1d_.begin());
            const size_t b = static_cast<size_t>(hi - sorted1d_.begin());
            result[k] = a == 0 ? prefix1d_[b - 1]
                               : std::max(0.0, prefix1d_[b - 1] - prefix1d_[a - 1]);
        }
        return result;
    }
    std::vector<double> dist;
    distancesTo(center, dist);
    const size_t n = dist.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return dist[a] < dist[b]; });

    std::vector<double> sortedDist(n), prefix(n);
    double run = 0.0, comp = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sortedDist[i] = dist[order[i]];
        const double v = weights_[order[i]];
        const double t = run + v;
        if (std::fabs(run) >= std::fabs(v))
            comp += (run - t) + v;
        else
            comp += (v - t) + run;
        run = t;
        prefix[i] = std::min(1.0, run + comp);
    }

    std::vector<double> result(radii.size());
    for (size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0)) throw ArgumentError("ball radius must be > 0");
        const auto it = std::upper_bound(sortedDist.begin(), sortedDist.end(), radii[k]);
        const size_t count = static_cast<size_t>(it - sortedDist.begin());
        result[k] = count == 0 ? 0.0 : prefix[count - 1];
    }
    return result;
}

Point PointCloudMeasure::sample(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const size_t i = std::min(static_cast<size_t>(it - cumulative_.begin()),
                              weights_.size() - 1);
    const auto p = pointAt(static_cast<int>(i));
    return Point::euclidean(std::vector<double>(p.begin(), p.end()));
}

double PointCloudMeasure::supportSpread() const {
    double spread = 0.0;
    for (int j = 0; j < dimension_; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (size_t i = 0; i < weights_.size(); ++i) {
            const double c = coords_[i * static_cast<size_t>(dimension_) + static_cast<size_t>(j)];
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        spread = std::max(spread, hi - lo);
    }
    return spread;
}

PointCloudMeasure buildSegmentCloud(int count) {
    if (count < 1) throw ConstructionError("segment cloud: count must be >= 1");
    std::vector<double> coords(static_cast<size_t>(count));
    std::vector<double> weights(static_cast<size_t>(count), 1.0 / count);
    for (int i = 0; i < count; ++i)
        coords[static_cast<size_t>(i)] = (i + 0.5) / static_cast<double>(count);
    return PointCloudMeasure(1, std::move(coords), std::move(weights), true);
}

PointCloudMeasure buildProductCantorCloud(double ratio, int depth) {
    if (!(ratio > 0.0 && ratio <= 0.5))
        throw ConstructionError("product Cantor cloud: ratio must be in (0, 1/2]");
    if (depth < 1 || depth > 16) throw ConstructionError("product Cantor cloud: depth out of range");
    std::vector<double> lefts{0.0};
    double length = 1.0;
    for (int k = 0; k < depth; ++k) {
        const double childLen = length * ratio;
        std::vector<double> next;
        next.reserve(lefts.size() * 2);
        for (double l : lefts) {
            next.push_back(l);
            next.push_back(l + length - childLen);
        }
        lefts = std::move(next);
        length = childLen;
    }
    for (double& l : lefts) l += 0.5 * length;  // midpoints

    const size_t n1 = lefts.size();
    const double w = std::pow(0.5, depth) * std::pow(0.5, depth);  // exact binary power
    std::vector<double> coords;
    coords.reserve(n1 * n1 * 2);
    std::vector<double> weights(n1 * n1, w);
    for (size_t i = 0; i < n1; ++i)
        for (size_t j = 0; j < n1; ++j) {
            coords.push_back(lefts[i]);
            coords.push_back(lefts[j]);
        }
    return PointCloudMeasure(2, std::move(coords), std::move(weights), false);
}

PointCloudMeasure buildRandomCloud(int count, int dim, uint64_t seed) {
    if (count < 1 || dim < 1) throw ConstructionError("random cloud: bad count or dimension");
    Rng rng(seed);
    std::vector<double> coords(static_cast<size_t>(count) * static_cast<size_t>(dim));
    std::vector<double> weights(static_cast<size_t>(count));
    for (double& c : coords) c = rng.uniform();
    for (double& w : weights) w = rng.uniform(0.5, 1.5);
    return PointCloudMeasure(dim, std::move(coords), std::move(weights), true);
}

PointCloudMeasure cloudFromMeasure(const BallMassOracle& measure, int count, uint64_t seed) {
    if (count < 1) throw ConstructionError("cloud discretization: count must be >= 1");
    Rng rng(seed);
    std::vector<double> coords;
    std::vector<double> weights(static_cast<size_t>(count), 1.0 / count);
    int dim = -1;
    for (int i = 0; i < count; ++i) {
        const Point p = measure.sample(rng);
        if (p.isSymbolic())
            throw ArgumentError("cannot discretize a symbolic measure into a euclidean cloud");
        if (dim < 0) {
            dim = static_cast<int>(p.coords().size());
            coords.reserve(static_cast<size_t>(count) * static_cast<size_t>(dim));
        }
        coords.insert(coords.end(), p.coords().begin(), p.coords().end());
    }
    return PointCloudMeasure(dim, std::move(coords), std::move(weights), true);
}

}  // namespace mfdim
