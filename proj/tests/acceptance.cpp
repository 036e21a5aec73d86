// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mfdim/experiments.hpp"
#include "mfdim/parallel.hpp"
#include "mfdim/partition.hpp"
#include "mfdim/projection.hpp"
#include "mfdim/serialize.hpp"

using namespace mfdim;

namespace {

int failures = 0;

void record(const std::string& id, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    if (!pass) ++failures;
}

double seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct OracleRun {
    double maxDeviation;
    double elapsed;
};

OracleRun bernoulliOracleDeviation(const std::vector<double>& probs, int depth,
                                   const std::vector<double>& qGrid, uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    BernoulliSpec spec;
    spec.symbolProbabilities = probs;
    spec.depth = depth;
    const CylinderMeasure mu = buildBernoulli(spec);
    const RadiusSchedule sched = treeSchedule(mu, EstimatorSettings{});
    double worst = 0.0;
    for (size_t qi = 0; qi < qGrid.size(); ++qi) {
        const double q = qGrid[qi];
        const double oracle = bernoulliDimensionOracle(spec, q);
        const DimensionReport r = dimensionEstimates(mu, mu, q, 2000, sched,
                                                     Percentiles{0.45, 0.55}, deriveSeed(seed, qi));
        worst = std::max({worst, std::fabs(r.lowerHausdorff - oracle),
                          std::fabs(r.upperHausdorff - oracle),
                          std::fabs(r.lowerPacking - oracle),
                          std::fabs(r.upperPacking - oracle)});
    }
    return {worst, seconds(start)};
}

void criterion1() {
    const OracleRun uniform =
        bernoulliOracleDeviation({0.5, 0.5}, 16, {-1.0, 0.0, 0.5, 2.0}, 101);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "p=(1/2,1/2) depth 16: max |estimate - (1-q)| = %.4g (tol 0.05), %.1fs",
                  uniform.maxDeviation, uniform.elapsed);
    record("C1a quasi-Bernoulli oracle, uniform", uniform.maxDeviation <= 0.05 && uniform.elapsed <= 30.0,
           buf);

    const OracleRun biased = bernoulliOracleDeviation({0.3, 0.7}, 18, {0.0, 2.0}, 102);
    std::snprintf(buf, sizeof buf,
                  "p=(0.3,0.7) depth 18: max |estimate - 0.8813(1-q)| = %.4g (tol 0.05), %.1fs",
                  biased.maxDeviation, biased.elapsed);
    record("C1b quasi-Bernoulli oracle, biased", biased.maxDeviation <= 0.05 && biased.elapsed <= 30.0,
           buf);
}

void criterion2() {
    const CylinderMeasure thirds = buildDerangedCantor(1.0 / 3, 1.0 / 3, 0.5, 0.5, 14);
    const std::vector<int> depths{8, 11, 14};
    const double estimate = setDimensionEstimate(thirds, 0.0, depths);
    const double expected = std::log(2.0) / std::log(3.0);
    const double err = std::fabs(estimate - expected);

    double worstTau = 0.0;
    BernoulliSpec biased;
    biased.symbolProbabilities = {0.3, 0.7};
    biased.depth = 12;
    const CylinderMeasure shipped[] = {
        buildUniformBernoulli(2, 12), buildBernoulli(biased),
        buildBlockOscillating(0.2, 0.8, 12), buildTwoPhase(0.02, 0.5, 12)};
    for (const CylinderMeasure& m : shipped)
        for (int n : {4, 8, 12}) worstTau = std::max(worstTau, std::fabs(tauEstimate(m, 1.0, n)));

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "|setDim - log2/log3| = %.3g (tol 1e-6); max |tau(1,n)| = %.3g (tol 1e-12)", err,
                  worstTau);
    record("C2 partition-route exactness", err <= 1e-6 && worstTau <= 1e-12, buf);
}

void criterion3() {
    double worstRel = 0.0;
    long count = 0;
    for (int dim : {2, 3}) {
        const PointCloudMeasure cloud = buildRandomCloud(1000, dim, 300 + dim);
        Rng rng(400 + static_cast<uint64_t>(dim));
        for (int i = 0; i < 500; ++i) {
            std::vector<double> x(static_cast<size_t>(dim));
            for (double& c : x) c = rng.uniform(-0.2, 1.2);
            const double r = std::exp(rng.uniform(std::log(1e-4), std::log(2.0)));
            const int m = 1 + static_cast<int>(rng.below(2));
            const KernelEvaluation e = evaluateKernelPair(cloud, x, r, m);
            worstRel = std::max(worstRel, std::fabs(e.valueDirect - e.valueRadial) /
                                              std::max(e.valueDirect, 1e-300));
            ++count;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "max relative gap %.3g over %ld queries (tol 1e-9)", worstRel,
                  count);
    record("C3 kernel identity (direct vs radial)", worstRel <= 1e-9, buf);
}

void criterion4() {
    const PointCloudMeasure segment = buildSegmentCloud(10000);
    KernelLemmaParams params;
    params.samples = 10000;
    params.seed = 500;
    const Verdict v = verifyKernelLemmas(segment, "segment(10000)", params);
    std::string detail = "verdict:";
    for (const CheckRecord& c : v.checks)
        detail += " [" + c.name + " -> " + (c.pass ? "ok" : "fail") + "]";
    record("C4 kernel lemmas", v.pass, detail);
}

void criterion5() {
    const auto start = std::chrono::steady_clock::now();
    const PointCloudMeasure cloud = buildProductCantorCloud(0.2, 7);
    ProjectionParams params;
    params.m = 1;
    params.qGrid = {0.0};
    params.numSubspaces = 50;
    params.tolerance = 0.1;
    params.passThreshold = 0.9;
    params.sampleCount = 800;
    params.schedule = RadiusSchedule{5.0, 2, 6, 2};
    params.seed = 600;
    const Verdict v = verifyProjectionPreservation(cloud, "product-cantor(1/5)^2 depth 7", params);
    const double elapsed = seconds(start);
    char buf[200];
    const double frac = v.checks.empty() ? 0.0 : v.checks[0].observed;
    std::snprintf(buf, sizeof buf,
                  "pass fraction %.3f over 50 Haar lines (need >= 0.9, tol 0.1), %.1fs (limit 120s)",
                  frac, elapsed);
    record("C5 projection preservation", v.pass && elapsed <= 120.0, buf);
}

void criterion6() {
    ErgodicParams params;
    params.symbolProbabilities = {0.3, 0.7};
    params.depths = {8, 24};
    params.sampleCount = 2000;
    params.seed = 700;
    const Verdict v = verifyErgodicConstancy(params);
    double sd8 = -1, sd24 = -1;
    for (const CheckRecord& c : v.checks) {
        if (c.name.find("depth 8") != std::string::npos) sd8 = c.observed;
        if (c.name.find("depth 24") != std::string::npos) sd24 = c.observed;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "slope spread: depth 8 -> %.4f, depth 24 -> %.4f (strict decrease)",
                  sd8, sd24);
    record("C6 ergodic constancy", v.pass, buf);
}

void criterion7() {
    UnidimensionalityParams params;
    params.sampleCount = 2000;
    params.seed = 800;

    double worstGap = 0.0;
    bool bernoulliPass = true;
    for (const auto& probs : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.3, 0.7}}) {
        BernoulliSpec spec;
        spec.symbolProbabilities = probs;
        spec.depth = 16;
        const CylinderMeasure m = buildBernoulli(spec);
        for (double q : {0.0, 2.0}) {
            params.q = q;
            const Verdict v = verifyUnidimensionality(m, "bernoulli", params);
            bernoulliPass = bernoulliPass && v.pass;
            for (const CheckRecord& c : v.checks) worstGap = std::max(worstGap, c.observed);
        }
    }

    params.q = 0.0;
    const CylinderMeasure counter = buildTwoPhase(0.02, 0.5, 16);
    const Verdict cv = verifyUnidimensionality(counter, "two-phase", params);
    const double counterGap = cv.checks.empty() ? 0.0 : cv.checks[0].observed;

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "Bernoulli gaps <= %.4f (tol 0.1); mixed-entropy Hausdorff gap %.3f (need >= 0.2)",
                  worstGap, counterGap);
    record("C7 unidimensionality surrogate", bernoulliPass && counterGap >= 0.2, buf);
}

void criterion8() {
    const PointCloudMeasure segment = buildSegmentCloud(10000);
    RadiusSchedule sched;
    sched.base = 2.0;
    sched.kMin = 3;
    sched.kMax = 11;
    sched.tailWindow = sched.count();
    const auto points = samplePoints(segment, 2000, 900);
    PointwiseBatch batch = pointwiseEstimatesBatch(segment, segment, 0.0, points, sched);
    std::sort(batch.slope.begin(), batch.slope.end());
    const double lo = nearestRankPercentile(batch.slope, 0.01);
    const double hi = nearestRankPercentile(batch.slope, 0.99);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "slope-based dim estimates: p01 = %.4f, p99 = %.4f (need [0.95, 1.05])", lo, hi);
    record("C8 classical reduction at q=0", lo >= 0.95 && hi <= 1.05, buf);
}

void criterion9() {
    QuasiBernoulliParams qb;
    qb.spec.symbolProbabilities = {0.3, 0.7};
    qb.spec.depth = 14;
    qb.qGrid = {0.0, 2.0};
    qb.sampleCount = 500;
    qb.seed = 1000;

    KernelLemmaParams kl;
    kl.samples = 2000;
    kl.seed = 1001;
    const PointCloudMeasure segment = buildSegmentCloud(2000);

    const PointCloudMeasure cloud = buildProductCantorCloud(0.2, 5);
    const RadiusSchedule projSched{5.0, 1, 4, 2};

    bool identical = true;
    std::string note;
    {
        setWorkerCount(1);
        const std::string a = verifyQuasiBernoulli(qb).toJson();
        setWorkerCount(8);
        const std::string b = verifyQuasiBernoulli(qb).toJson();
        identical = identical && a == b;
        if (a != b) note += " quasi-bernoulli differs;";
    }
    {
        setWorkerCount(1);
        const std::string a = verifyKernelLemmas(segment, "segment", kl).toJson();
        setWorkerCount(8);
        const std::string b = verifyKernelLemmas(segment, "segment", kl).toJson();
        identical = identical && a == b;
        if (a != b) note += " kernel-lemmas differs;";
    }
    {
        setWorkerCount(1);
        const ProjectionSummary a = projectionDimensionReport(cloud, cloud, 0.0, 1, 8, 150,
                                                              projSched, Percentiles{0.45, 0.55},
                                                              0.1, 77);
        setWorkerCount(8);
        const ProjectionSummary b = projectionDimensionReport(cloud, cloud, 0.0, 1, 8, 150,
                                                              projSched, Percentiles{0.45, 0.55},
                                                              0.1, 77);
        setWorkerCount(0);
        for (size_t i = 0; i < a.perSubspace.size(); ++i)
            identical = identical &&
                        reportCsvRow(a.perSubspace[i].report) == reportCsvRow(b.perSubspace[i].report);
        identical = identical && a.passFraction == b.passFraction;
    }
    record("C9 determinism across worker counts", identical,
           identical ? "verdicts and reports byte-identical at 1 and 8 workers" : note);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("----------------\n%s (%d failure%s)\n", failures == 0 ? "ALL PASS" : "FAILURES",
                failures, failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}
