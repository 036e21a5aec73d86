#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mfdim/point.hpp"
#include "mfdim/rng.hpp"

namespace mfdim {

// Common query surface of every measure: closed-ball masses plus sampling.
// Implementations are immutable after construction, so all queries are safe
// from any number of threads.
class BallMassOracle {
public:
    virtual ~BallMassOracle() = default;

    // Mass of the closed ball B(x, r), in [0, 1]. Nondecreasing in r.
    virtual double ballMass(const Point& x, double r) const = 0;

    // One draw distributed like the measure.
    virtual Point sample(Rng& rng) const = 0;

    // Masses of several balls around one center; overridable so clouds can
    // answer all radii from a single distance pass.
    virtual std::vector<double> ballMasses(const Point& x, std::span<const double> radii) const {
        std::vector<double> out(radii.size());
        for (size_t i = 0; i < radii.size(); ++i) out[i] = ballMass(x, radii[i]);
        return out;
    }

    // Smallest radius at which ball masses still resolve the measure
    // (b^-depth for finite trees, 0 when unconstrained).
    virtual double minResolvableRadius() const { return 0.0; }

    virtual std::optional<double> supportDimensionHint() const { return std::nullopt; }
};

// count i.i.d. draws, generated serially from one seed so downstream
// parallelism cannot change them.
std::vector<Point> samplePoints(const BallMassOracle& measure, int count, uint64_t seed);

}  // namespace mfdim
