#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfdim/cylinder_measure.hpp"
#include "mfdim/exponents.hpp"
#include "mfdim/point_cloud.hpp"

namespace mfdim {

struct CheckRecord {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
};

// Outcome of one named, seeded experiment. Overall pass is the conjunction
// of the non-skipped checks; every check carries (expected, observed,
// tolerance) so a failure is diagnosable without re-running.
struct Verdict {
    std::string experiment;
    std::string config;  // materialized parameters
    std::vector<CheckRecord> checks;
    bool pass = true;

    void add(CheckRecord record);
    void addSkipped(const std::string& name, const std::string& why);

    std::string toJson() const;
    std::string toTable() const;
};

// Estimator settings shared by the finite-scale experiments. The tail
// window/percentile pair is deliberately tighter than the library defaults:
// at reachable depths the pointwise estimates carry O(sigma/sqrt(k)) sampling
// spread, so extreme percentiles would measure that noise instead of the
// essential bounds. For two-symbol trees the pointwise values also sit on a
// binomial lattice whose modal atom spans the central percentiles; 0.48/0.52
// stays inside that atom while still separating genuinely bimodal samples.
struct EstimatorSettings {
    int kMin = 2;
    int depthMargin = 2;  // kMax = depth - depthMargin
    int tailWindow = 2;
    Percentiles percentiles{0.48, 0.52};
};

struct QuasiBernoulliParams {
    BernoulliSpec spec;
    std::vector<double> qGrid{-1.0, 0.0, 0.5, 2.0};
    int sampleCount = 2000;
    uint64_t seed = 1u;
    double mcTolerance = 0.05;        // Monte-Carlo exponent route
    double partitionTolerance = 1e-5; // (q-1) * numeric tau'(1) route
    double criticalTolerance = 1e-6;  // critical-exponent self check
    EstimatorSettings estimator;
};

// Both independent routes (pointwise exponents, partition sums) must agree
// with the closed-form Bernoulli value before this verdict passes.
Verdict verifyQuasiBernoulli(const QuasiBernoulliParams& params);

struct UnidimensionalityParams {
    double q = 0.0;
    int sampleCount = 2000;
    double gapThreshold = 0.1;
    uint64_t seed = 1u;
    EstimatorSettings estimator;
};

// Finite surrogate of the unidimensionality dichotomy: the Hausdorff and
// packing exactness gaps of a percentile report. Borel-set quantifiers are
// not finitely checkable; the verdict names the surrogate it used.
Verdict verifyUnidimensionality(const CylinderMeasure& measure, const std::string& measureName,
                                const UnidimensionalityParams& params);

struct ErgodicParams {
    std::vector<double> symbolProbabilities{0.3, 0.7};
    std::vector<int> depths{8, 24};
    int sampleCount = 2000;
    uint64_t seed = 1u;
};

// Shift-invariance surrogate: the pointwise slope estimates of a Bernoulli
// measure concentrate as depth grows, so their sample spread must shrink
// strictly between the smallest and largest depth.
Verdict verifyErgodicConstancy(const ErgodicParams& params);

struct ProjectionParams {
    int m = 1;
    std::vector<double> qGrid{0.0};
    int numSubspaces = 50;
    double tolerance = 0.1;
    double passThreshold = 0.9;
    int sampleCount = 800;
    RadiusSchedule schedule{5.0, 2, 6, 2};
    Percentiles percentiles{0.45, 0.55};
    uint64_t seed = 1u;
};

// Per q: fraction of Haar subspaces whose four projected estimates stay
// within tolerance of the unprojected report. For q <= 0 the check is
// skipped (with a note) when the unprojected estimate violates the
// dim <= m(1-q) hypothesis.
Verdict verifyProjectionPreservation(const PointCloudMeasure& cloud, const std::string& cloudName,
                                     const ProjectionParams& params);

struct KernelLemmaParams {
    int samples = 10000;
    std::vector<int> ms{1, 2};
    int kMin = 3;
    int kMax = 16;
    double base = 2.0;
    int slopeWindow = 5;
    double slopeSlack = 0.05;   // tail slope of log mu*phi vs log r <= m + slack
    double ratioEpsilon = 0.2;  // ratio-exponent bound at the deepest two octaves
    bool ahlforsRegular = true; // enables the ratio-exponent check
    uint64_t seed = 1u;
};

// The two kernel inequalities (exact domination of the ball mass, slope
// bound) plus, on Ahlfors-regular supports, the vanishing ratio exponent.
Verdict verifyKernelLemmas(const PointCloudMeasure& cloud, const std::string& cloudName,
                           const KernelLemmaParams& params);

// Registered experiment names with one-line descriptions (CLI).
std::vector<std::pair<std::string, std::string>> experimentCatalog();

// Schedule helper used by the experiments: radii aligned to the cylinder
// scales of a tree measure.
RadiusSchedule treeSchedule(const CylinderMeasure& measure, const EstimatorSettings& settings);

double sampleStandardDeviation(const std::vector<double>& values);

}  // namespace mfdim
