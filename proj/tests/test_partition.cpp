#include <doctest.h>

#include <cmath>

#include "mfdim/errors.hpp"
#include "mfdim/partition.hpp"
#include "mfdim/serialize.hpp"
#include "test_helpers.hpp"

using namespace mfdim;

namespace {
const double kLog2Log3 = std::log(2.0) / std::log(3.0);

CylinderMeasure biased(int depth) {
    BernoulliSpec spec;
    spec.symbolProbabilities = {0.3, 0.7};
    spec.depth = depth;
    return buildBernoulli(spec);
}
}  // namespace

TEST_SUITE("partition") {

TEST_CASE("normalization values of the partition sum") {
    const CylinderMeasure u = buildUniformBernoulli(2, 8);
    CHECK(partitionSum(u, 1.0, 0.0, 5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(partitionSum(u, 0.0, 1.0, 3) == doctest::Approx(1.0).epsilon(1e-14));

    const CylinderMeasure thirds = buildDerangedCantor(1.0 / 3, 1.0 / 3, 0.5, 0.5, 8);
    CHECK(partitionSum(thirds, 0.0, kLog2Log3, 4) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("partition sums match the word-enumeration oracle") {
    const CylinderMeasure osc = buildBlockOscillating(0.2, 0.8, 10);
    const CylinderMeasure deranged = buildDerangedCantor(
        [](int level) {
            const double r = level % 2 == 0 ? 0.3 : 0.45;
            return std::array<ChildSpec, 2>{ChildSpec{r, 0.35}, ChildSpec{0.5 - r / 2, 0.65}};
        },
        10);
    const CylinderMeasure twoPhase = buildTwoPhase(0.1, 0.5, 10);
    for (const CylinderMeasure* m : {&osc, &deranged, &twoPhase}) {
        for (double q : {-1.0, 0.0, 0.7, 2.0}) {
            for (double t : {-0.5, 0.0, 0.63, 1.2}) {
                const double fast = partitionSum(*m, q, t, 7);
                const double brute = testing::bruteForcePartitionSum(*m, q, t, 7);
                CHECK(fast == doctest::Approx(brute).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("zero-mass cylinders are skipped, keeping q <= 0 sums finite") {
    std::vector<CylinderMeasure::LevelRule> rules(6, {{0.4, 1.0}, {0.4, 0.0}});
    const CylinderMeasure m =
        CylinderMeasure::fromLevelRules(CylinderMeasure::Mode::Embedded, std::move(rules));
    const double sum = partitionSum(m, -2.0, 0.5, 4);
    CHECK(std::isfinite(sum));
    CHECK(sum == doctest::Approx(std::pow(std::pow(0.4, 4), 0.5)).epsilon(1e-12));
}

TEST_CASE("depth bounds are enforced") {
    const CylinderMeasure u = buildUniformBernoulli(2, 6);
    CHECK_THROWS_AS(partitionSum(u, 0.0, 0.0, 7), ArgumentError);
    CHECK_THROWS_AS(tauEstimate(u, 0.0, 7), ArgumentError);
}

TEST_CASE("tau of the uniform measure is 1 - q at every depth") {
    const CylinderMeasure u = buildUniformBernoulli(2, 12);
    for (int n : {2, 5, 9, 12})
        for (double q : {-2.0, 0.0, 0.5, 1.0, 3.0})
            CHECK(tauEstimate(u, q, n) == doctest::Approx(1.0 - q).epsilon(1e-12));
}

TEST_CASE("tau(1, n) vanishes for every shipped probability measure") {
    const CylinderMeasure measures[] = {buildUniformBernoulli(2, 12), biased(12),
                                        buildBlockOscillating(0.2, 0.8, 12),
                                        buildTwoPhase(0.02, 0.5, 12)};
    for (const CylinderMeasure& m : measures)
        for (int n : {3, 8, 12}) CHECK(std::fabs(tauEstimate(m, 1.0, n)) <= 1e-12);
}

TEST_CASE("tau of the biased measure at q = 2 is log2(0.58)") {
    const CylinderMeasure m = biased(10);
    const double expected = std::log(0.58) / std::log(2.0);  // -0.78587625...
    for (int n : {1, 4, 10})
        CHECK(tauEstimate(m, 2.0, n) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("tau requires symbolic mode") {
    const CylinderMeasure thirds = buildDerangedCantor(1.0 / 3, 1.0 / 3, 0.5, 0.5, 6);
    CHECK_THROWS_AS(tauEstimate(thirds, 0.0, 3), ArgumentError);
}

TEST_CASE("tau'(1): exact for the uniform measure, entropy for the biased one") {
    const CylinderMeasure u = buildUniformBernoulli(2, 12);
    CHECK(tauDerivativeAtOne(u, 12) == doctest::Approx(-1.0).epsilon(1e-10));

    const CylinderMeasure m = biased(12);
    const double entropy =
        0.3 * std::log2(0.3) + 0.7 * std::log2(0.7);  // -0.8812908992306927
    CHECK(tauDerivativeAtOne(m, 12) == doctest::Approx(entropy).epsilon(1e-5));

    CHECK_THROWS_AS(tauDerivativeAtOne(u, 12, 0.5), ArgumentError);
    CHECK_THROWS_AS(tauDerivativeAtOne(u, 12, 0.0), ArgumentError);
}

TEST_CASE("Bernoulli dimension oracle closed form") {
    BernoulliSpec half;
    half.symbolProbabilities = {0.5, 0.5};
    half.depth = 4;
    CHECK(bernoulliDimensionOracle(half, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bernoulliDimensionOracle(half, 1.0) == 0.0);

    BernoulliSpec b;
    b.symbolProbabilities = {0.3, 0.7};
    b.depth = 4;
    CHECK(bernoulliDimensionOracle(b, 2.0) == doctest::Approx(-0.8812908992306927).epsilon(1e-12));
    CHECK(bernoulliDimensionOracle(b, 0.0) == doctest::Approx(0.8812908992306927).epsilon(1e-12));
}

TEST_CASE("set dimension: closed-form cases") {
    const CylinderMeasure u = buildUniformBernoulli(2, 14);
    const std::vector<int> depths{8, 11, 14};
    CHECK(setDimensionEstimate(u, 0.0, depths) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(setDimensionEstimate(u, 2.0, depths) == doctest::Approx(-1.0).epsilon(1e-12));

    const CylinderMeasure thirds = buildDerangedCantor(1.0 / 3, 1.0 / 3, 0.5, 0.5, 14);
    CHECK(setDimensionEstimate(thirds, 0.0, depths) == doctest::Approx(kLog2Log3).epsilon(1e-6));
}

TEST_CASE("set dimension: bisection route for non-uniform diameters") {
    const CylinderMeasure m = buildDerangedCantor(1.0 / 3, 0.25, 0.5, 0.5, 14);
    // independent oracle: solve (1/3)^t + (1/4)^t = 1 directly
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (std::pow(1.0 / 3, mid) + std::pow(0.25, mid) > 1.0 ? lo : hi) = mid;
    }
    const double expected = 0.5 * (lo + hi);
    const std::vector<int> depths{10, 12, 14};
    CHECK(setDimensionEstimate(m, 0.0, depths) == doctest::Approx(expected).epsilon(1e-8));
    CHECK_THROWS_AS(setDimensionEstimate(m, 0.0, std::vector<int>{10}), ArgumentError);
}

TEST_CASE("tau is convex on a q grid and the table carries analytic values") {
    BernoulliSpec spec;
    spec.symbolProbabilities = {0.3, 0.7};
    spec.depth = 12;
    const CylinderMeasure m = buildBernoulli(spec);
    std::vector<double> grid;
    for (double q = -2.0; q <= 3.0; q += 0.25) grid.push_back(q);
    const PartitionTable table = makePartitionTable(m, grid, 12, spec);

    REQUIRE(table.tauAnalytic.has_value());
    for (size_t i = 0; i < grid.size(); ++i)
        CHECK(table.tauHat[i] == doctest::Approx((*table.tauAnalytic)[i]).epsilon(1e-12));
    for (size_t i = 1; i + 1 < grid.size(); ++i) {
        const double second = table.tauHat[i + 1] - 2.0 * table.tauHat[i] + table.tauHat[i - 1];
        CHECK(second >= -1e-9);
    }

    const std::string csv = partitionTableCsv(table);
    CHECK(csv.rfind("q,n,tau_hat,tau_analytic\n", 0) == 0);
}

TEST_CASE("scaling identity: halving every diameter scales the sum by 2^-t") {
    const CylinderMeasure a = CylinderMeasure::fromNodeRule(
        CylinderMeasure::Mode::Embedded, 2, 6,
        [](const std::vector<uint8_t>& w) -> std::vector<ChildSpec> {
            const double r = w.size() % 2 == 0 ? 0.3 : 0.42;
            return {{r, 0.45}, {r, 0.55}};
        });
    auto levels = a.explicitLevels();
    for (auto& level : levels)
        for (auto& node : level) {
            node.left *= 0.5;
            node.length *= 0.5;
        }
    const CylinderMeasure b =
        CylinderMeasure::fromExplicitLevels(CylinderMeasure::Mode::Embedded, 2, std::move(levels));
    for (double q : {-0.5, 0.0, 2.0})
        for (double t : {-1.0, 0.4, 1.3})
            CHECK(partitionSum(b, q, t, 5) ==
                  doctest::Approx(std::pow(2.0, -t) * partitionSum(a, q, t, 5)).epsilon(1e-12));
}

}  // TEST_SUITE
