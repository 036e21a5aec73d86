#include "mfdim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mfdim/errors.hpp"
#include "mfdim/partition.hpp"
#include "mfdim/projection.hpp"
#include "mfdim/serialize.hpp"

namespace mfdim {

void Verdict::add(CheckRecord record) {
    if (!record.skipped && !record.pass) pass = false;
    checks.push_back(std::move(record));
}

void Verdict::addSkipped(const std::string& name, const std::string& why) {
    CheckRecord r;
    r.name = name;
    r.skipped = true;
    r.pass = true;
    r.note = why;
    checks.push_back(std::move(r));
}

std::string Verdict::toJson() const {
    nlohmann::json j;
    j["formatVersion"] = 1;
    j["experiment"] = experiment;
    j["config"] = config;
    j["pass"] = pass;
    nlohmann::json arr = nlohmann::json::array();
    for (const CheckRecord& c : checks) {
        nlohmann::json jc{{"name", c.name},     {"expected", c.expected},
                          {"observed", c.observed}, {"tolerance", c.tolerance},
                          {"pass", c.pass},     {"skipped", c.skipped}};
        if (!c.note.empty()) jc["note"] = c.note;
        arr.push_back(std::move(jc));
    }
    j["checks"] = std::move(arr);
    return j.dump(2);
}

std::string Verdict::toTable() const {
    std::ostringstream out;
    out << "experiment: " << experiment << "\n";
    out << "config:     " << config << "\n";
    for (const CheckRecord& c : checks) {
        if (c.skipped) {
            out << "  [skip] " << c.name << " -- " << c.note << "\n";
            continue;
        }
        out << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name
            << ": expected " << formatDouble(c.expected) << ", observed "
            << formatDouble(c.observed) << ", tolerance " << formatDouble(c.tolerance);
        if (!c.note.empty()) out << " (" << c.note << ")";
        out << "\n";
    }
    out << "overall: " << (pass ? "PASS" : "FAIL") << "\n";
    return out.str();
}

RadiusSchedule treeSchedule(const CylinderMeasure& measure, const EstimatorSettings& s) {
    RadiusSchedule sched;
    sched.base = static_cast<double>(measure.arity());
    sched.kMin = s.kMin;
    sched.kMax = measure.depth() - s.depthMargin;
    sched.tailWindow = s.tailWindow;
    sched.validate();
    return sched;
}

double sampleStandardDeviation(const std::vector<double>& values) {
    if (values.size() < 2) throw EstimationError("cannot estimate spread from fewer than 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

namespace {

CheckRecord gapCheck(const std::string& name, double expected, double observed, double tol,
                     const std::string& note = "") {
    CheckRecord c;
    c.name = name;
    c.expected = expected;
    c.observed = observed;
    c.tolerance = tol;
    c.pass = std::fabs(observed - expected) <= tol;
    c.note = note;
    return c;
}

std::string describeQGrid(const std::vector<double>& qGrid) {
    std::string s = "q={";
    for (size_t i = 0; i < qGrid.size(); ++i) {
        if (i) s += ",";
        s += formatDouble(qGrid[i]);
    }
    return s + "}";
}

}  // namespace

Verdict verifyQuasiBernoulli(const QuasiBernoulliParams& params) {
    params.spec.validate();
    const CylinderMeasure mu = buildBernoulli(params.spec);
    const RadiusSchedule sched = treeSchedule(mu, params.estimator);

    Verdict v;
    v.experiment = "quasi-bernoulli";
    {
        std::ostringstream cfg;
        cfg << "p=";
        for (size_t i = 0; i < params.spec.symbolProbabilities.size(); ++i)
            cfg << (i ? "," : "") << formatDouble(params.spec.symbolProbabilities[i]);
        cfg << " depth=" << params.spec.depth << " " << describeQGrid(params.qGrid)
            << " N=" << params.sampleCount << " kMin=" << sched.kMin << " kMax=" << sched.kMax
            << " W=" << sched.tailWindow << " percentiles=" << formatDouble(params.estimator.percentiles.low)
            << "/" << formatDouble(params.estimator.percentiles.high) << " seed=" << params.seed;
        v.config = cfg.str();
    }

    const std::vector<int> depthGrid{std::max(2, params.spec.depth - 6),
                                     std::max(3, params.spec.depth - 3), params.spec.depth};
    for (size_t qi = 0; qi < params.qGrid.size(); ++qi) {
        const double q = params.qGrid[qi];
        const double oracle = bernoulliDimensionOracle(params.spec, q);
        const std::string tag = "q=" + formatDouble(q) + " ";

        const DimensionReport report =
            dimensionEstimates(mu, mu, q, params.sampleCount, sched, params.estimator.percentiles,
                               deriveSeed(params.seed, qi));
        v.add(gapCheck(tag + "exponent route lowerHausdorff", oracle, report.lowerHausdorff,
                       params.mcTolerance));
        v.add(gapCheck(tag + "exponent route upperHausdorff", oracle, report.upperHausdorff,
                       params.mcTolerance));
        v.add(gapCheck(tag + "exponent route lowerPacking", oracle, report.lowerPacking,
                       params.mcTolerance));
        v.add(gapCheck(tag + "exponent route upperPacking", oracle, report.upperPacking,
                       params.mcTolerance));

        const double tauPrime = tauDerivativeAtOne(mu, mu.depth());
        v.add(gapCheck(tag + "partition route (q-1)*tau'(1)", oracle, (q - 1.0) * tauPrime,
                       params.partitionTolerance));

        // critical exponent of the support against its own closed form
        double powerSum = 0.0;
        for (double p : params.spec.symbolProbabilities) powerSum += std::pow(p, q);
        const double analyticCritical =
            std::log(powerSum) / std::log(static_cast<double>(params.spec.symbolProbabilities.size()));
        const double observedCritical = setDimensionEstimate(mu, q, depthGrid);
        v.add(gapCheck(tag + "critical exponent (support)", analyticCritical, observedCritical,
                       params.criticalTolerance));
    }
    return v;
}

Verdict verifyUnidimensionality(const CylinderMeasure& measure, const std::string& measureName,
                                const UnidimensionalityParams& params) {
    const RadiusSchedule sched = treeSchedule(measure, params.estimator);

    Verdict v;
    v.experiment = "unidimensional";
    {
        std::ostringstream cfg;
        cfg << "measure=" << measureName << " q=" << formatDouble(params.q)
            << " N=" << params.sampleCount << " kMax=" << sched.kMax
            << " gapThreshold=" << formatDouble(params.gapThreshold) << " seed=" << params.seed;
        v.config = cfg.str();
    }

    const DimensionReport report =
        dimensionEstimates(measure, measure, params.q, params.sampleCount, sched,
                           params.estimator.percentiles, params.seed);
    const auto [hGap, pGap] = exactnessGap(report);
    v.add(gapCheck("hausdorff exactness gap", 0.0, hGap, params.gapThreshold,
                   "surrogate: percentile spread of pointwise lower exponents"));
    v.add(gapCheck("packing exactness gap", 0.0, pGap, params.gapThreshold,
                   "surrogate: percentile spread of pointwise upper exponents"));
    return v;
}

Verdict verifyErgodicConstancy(const ErgodicParams& params) {
    if (params.depths.size() < 2) throw ArgumentError("ergodic check needs >= 2 depths");
    if (!std::is_sorted(params.depths.begin(), params.depths.end()))
        throw ArgumentError("ergodic check depths must increase");
    if (params.sampleCount < 2)
        throw EstimationError("cannot estimate spread from fewer than 2 samples");

    Verdict v;
    v.experiment = "ergodic";
    {
        std::ostringstream cfg;
        cfg << "p=";
        for (size_t i = 0; i < params.symbolProbabilities.size(); ++i)
            cfg << (i ? "," : "") << formatDouble(params.symbolProbabilities[i]);
        cfg << " depths=";
        for (size_t i = 0; i < params.depths.size(); ++i)
            cfg << (i ? "," : "") << params.depths[i];
        cfg << " N=" << params.sampleCount << " seed=" << params.seed;
        v.config = cfg.str();
    }

    std::vector<double> spreads;
    for (size_t di = 0; di < params.depths.size(); ++di) {
        BernoulliSpec spec;
        spec.symbolProbabilities = params.symbolProbabilities;
        spec.depth = params.depths[di];
        const CylinderMeasure mu = buildBernoulli(spec);

        RadiusSchedule sched;
        sched.base = static_cast<double>(mu.arity());
        sched.kMin = 2;
        sched.kMax = mu.depth() - 2;
        sched.tailWindow = sched.count();  // slope over the whole ladder
        sched.validate();

        const std::vector<Point> points =
            samplePoints(mu, params.sampleCount, deriveSeed(params.seed, di));
        const PointwiseBatch batch = pointwiseEstimatesBatch(mu, mu, 0.0, points, sched);
        const double spread = sampleStandardDeviation(batch.slope);
        spreads.push_back(spread);

        CheckRecord info;
        info.name = "slope spread at depth " + std::to_string(params.depths[di]);
        info.expected = spread;
        info.observed = spread;
        info.pass = true;
        info.note = "recorded";
        v.add(std::move(info));
    }

    CheckRecord strict;
    strict.name = "spread shrinks with depth";
    strict.expected = spreads.front();
    strict.observed = spreads.back();
    strict.tolerance = 0.0;
    strict.pass = spreads.back() < spreads.front();
    strict.note = "pass iff spread(max depth) < spread(min depth), strictly";
    v.add(std::move(strict));
    return v;
}

Verdict verifyProjectionPreservation(const PointCloudMeasure& cloud, const std::string& cloudName,
                                     const ProjectionParams& params) {
    Verdict v;
    v.experiment = "projection";
    {
        std::ostringstream cfg;
        cfg << "cloud=" << cloudName << " (" << cloud.size() << " pts, R^" << cloud.dimension()
            << ") m=" << params.m << " " << describeQGrid(params.qGrid)
            << " subspaces=" << params.numSubspaces << " tol=" << formatDouble(params.tolerance)
            << " threshold=" << formatDouble(params.passThreshold) << " N=" << params.sampleCount
            << " base=" << formatDouble(params.schedule.base) << " kMin=" << params.schedule.kMin
            << " kMax=" << params.schedule.kMax << " seed=" << params.seed;
        v.config = cfg.str();
    }

    for (size_t qi = 0; qi < params.qGrid.size(); ++qi) {
        const double q = params.qGrid[qi];
        const std::string tag = "q=" + formatDouble(q) + " ";
        const uint64_t qSeed = deriveSeed(params.seed, qi);

        if (q <= 0.0) {
            const DimensionReport unprojected =
                dimensionEstimates(cloud, cloud, q, params.sampleCount, params.schedule,
                                   params.percentiles, deriveSeed(qSeed, ~0ULL));
            const double bound = params.m * (1.0 - q);
            if (unprojected.upperHausdorff > bound) {
                std::ostringstream why;
                why << "hypothesis violated: estimated dim " << formatDouble(unprojected.upperHausdorff)
                    << " > m(1-q) = " << formatDouble(bound);
                v.addSkipped(tag + "projection preservation", why.str());
                continue;
            }
        }

        const ProjectionSummary summary = projectionDimensionReport(
            cloud, cloud, q, params.m, params.numSubspaces, params.sampleCount, params.schedule,
            params.percentiles, params.tolerance, qSeed);

        CheckRecord c;
        c.name = tag + "fraction of subspaces within tolerance";
        c.expected = params.passThreshold;
        c.observed = summary.passFraction;
        c.tolerance = 0.0;
        c.pass = summary.passFraction >= params.passThreshold;
        {
            std::ostringstream note;
            note << summary.comparable << "/" << params.numSubspaces
                 << " comparable; unprojected lowerH=" << formatDouble(summary.unprojected.lowerHausdorff)
                 << " upperH=" << formatDouble(summary.unprojected.upperHausdorff)
                 << "; surrogate: pass fraction over Haar sample vs a.e.-V claim";
            c.note = note.str();
        }
        v.add(std::move(c));
    }
    return v;
}

Verdict verifyKernelLemmas(const PointCloudMeasure& cloud, const std::string& cloudName,
                           const KernelLemmaParams& params) {
    if (params.samples < 1) throw ArgumentError("kernel lemma check needs samples >= 1");

    Verdict v;
    v.experiment = "kernel-lemmas";
    {
        std::ostringstream cfg;
        cfg << "cloud=" << cloudName << " (" << cloud.size() << " pts, R^" << cloud.dimension()
            << ") samples=" << params.samples << " m={";
        for (size_t i = 0; i < params.ms.size(); ++i) cfg << (i ? "," : "") << params.ms[i];
        cfg << "} radii=" << formatDouble(params.base) << "^-[" << params.kMin << ".."
            << params.kMax << "] seed=" << params.seed;
        v.config = cfg.str();
    }

    // exact inequality mu(B) <= mu*phi over sampled (x, r), alternating m
    {
        Rng rng(deriveSeed(params.seed, 1));
        const double logLo = -params.kMax * std::log(params.base);
        const double logHi = -params.kMin * std::log(params.base);
        long violations = 0;
        for (int i = 0; i < params.samples; ++i) {
            const Point x = cloud.sample(rng);
            const double r = std::exp(rng.uniform(logLo, logHi));
            const int m = params.ms[static_cast<size_t>(i) % params.ms.size()];
            const double ball = cloud.ballMassAt(x.coords(), r);
            const double conv = convolveDirect(cloud, x.coords(), r, m);
            if (!(ball <= conv)) ++violations;
        }
        CheckRecord c;
        c.name = "ball mass dominated by convolution";
        c.expected = 0.0;
        c.observed = static_cast<double>(violations);
        c.tolerance = 0.0;
        c.pass = violations == 0;
        c.note = "exact inequality over " + std::to_string(params.samples) + " samples";
        v.add(std::move(c));
    }

    // tail slope of log mu*phi against log r
    std::vector<double> radii;
    for (int k = params.kMax - params.slopeWindow + 1; k <= params.kMax; ++k)
        radii.push_back(std::pow(params.base, -k));
    const int slopePoints = std::min(200, params.samples);
    for (int m : params.ms) {
        Rng rng(deriveSeed(params.seed, 100 + static_cast<uint64_t>(m)));
        double worst = -1e300;
        for (int i = 0; i < slopePoints; ++i) {
            const Point x = cloud.sample(rng);
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (double r : radii) {
                const double lr = std::log(r);
                const double lc = std::log(convolveDirect(cloud, x.coords(), r, m));
                sx += lr;
                sy += lc;
                sxx += lr * lr;
                sxy += lr * lc;
            }
            const double n = static_cast<double>(radii.size());
            const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
            worst = std::max(worst, slope);
        }
        CheckRecord c;
        c.name = "tail slope of log mu*phi, m=" + std::to_string(m);
        c.expected = static_cast<double>(m);
        c.observed = worst;
        c.tolerance = params.slopeSlack;
        c.pass = worst <= m + params.slopeSlack;
        c.note = "max over " + std::to_string(slopePoints) + " points, slack " +
                 formatDouble(params.slopeSlack);
        v.add(std::move(c));
    }

    // ratio exponent log(mu*phi / mu(B)) / |log r| at the deepest two octaves
    if (params.ahlforsRegular) {
        for (int m : params.ms) {
            Rng rng(deriveSeed(params.seed, 200 + static_cast<uint64_t>(m)));
            double worst = 0.0;
            for (int i = 0; i < slopePoints; ++i) {
                const Point x = cloud.sample(rng);
                for (int k = params.kMax - 1; k <= params.kMax; ++k) {
                    const double r = std::pow(params.base, -k);
                    const double ball = cloud.ballMassAt(x.coords(), r);
                    const double conv = convolveDirect(cloud, x.coords(), r, m);
                    if (!(ball > 0.0)) continue;  // x is an atom, so this cannot trigger
                    const double expo = std::log(conv / ball) / std::fabs(std::log(r));
                    worst = std::max(worst, std::fabs(expo));
                }
            }
            CheckRecord c;
            c.name = "ratio exponent at deepest octaves, m=" + std::to_string(m);
            c.expected = 0.0;
            c.observed = worst;
            c.tolerance = params.ratioEpsilon;
            c.pass = worst <= params.ratioEpsilon;
            c.note = "log(mu*phi / mu(B)) / |log r| over the two deepest octaves";
            v.add(std::move(c));
        }
    } else {
        v.addSkipped("ratio exponent at deepest octaves",
                     "support not declared Ahlfors-regular");
    }
    return v;
}

std::vector<std::pair<std::string, std::string>> experimentCatalog() {
    return {
        {"quasi-bernoulli",
         "dimension estimates of a Bernoulli measure against its closed form, two routes"},
        {"unidimensional", "Hausdorff/packing exactness gaps of a tree measure"},
        {"ergodic", "slope spread shrinks with depth for a shift-ergodic measure"},
        {"projection", "projected dimension estimates match the unprojected report"},
        {"kernel-lemmas", "kernel inequalities for the convolution mu*phi"},
    };
}

}  // namespace mfdim
