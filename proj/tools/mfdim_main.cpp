// mfdim: build Cantor-type measures, estimate multifractal dimensions,
// project measures onto random subspaces, and run the named verification
// experiments. Exit codes: 0 success/pass, 1 runtime failure or failed
// verdict, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "mfdim/errors.hpp"
#include "mfdim/experiments.hpp"
#include "mfdim/parallel.hpp"
#include "mfdim/partition.hpp"
#include "mfdim/projection.hpp"
#include "mfdim/serialize.hpp"

using namespace mfdim;

namespace {

std::vector<double> splitDoubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw CLI::ValidationError("bad numeric list entry '" + item + "'");
    }
    if (out.empty()) throw CLI::ValidationError("empty numeric list");
    return out;
}

std::vector<int> splitInts(const std::string& csv) {
    std::vector<int> out;
    for (double v : splitDoubles(csv)) out.push_back(static_cast<int>(v));
    return out;
}

std::ostream& openSink(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw ArgumentError("cannot open " + path + " for writing");
    return file;
}

// echo of the materialized flag values, prefixed for CSV comments
std::string configEcho(const CLI::App& app, bool hashPrefix) {
    std::string raw = app.config_to_str(true, false);
    if (!hashPrefix) return raw;
    std::istringstream in(raw);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) out << "# config: " << line << "\n";
    return out.str();
}

struct MeasureFlags {
    std::string bernoulli, cantor, masses, twoPhase, oscillating, file;
    int depth = 0;

    void attach(CLI::App* cmd, bool withFile) {
        cmd->add_option("--bernoulli", bernoulli, "symbol probabilities p0,p1,... (symbolic)");
        cmd->add_option("--cantor", cantor, "contraction ratios r0,r1 (embedded, middle gap)");
        cmd->add_option("--masses", masses, "child mass fractions for --cantor (default 0.5,0.5)");
        cmd->add_option("--two-phase", twoPhase,
                        "pLow,pHigh branch probabilities of the mixed-entropy measure");
        cmd->add_option("--oscillating", oscillating, "pa,pb of the block-oscillating mass rule");
        cmd->add_option("--depth", depth, "tree depth");
        if (withFile) cmd->add_option("--measure", file, "measure file (tree document or cloud csv)");
    }

    int selections() const {
        return !bernoulli.empty() + !cantor.empty() + !twoPhase.empty() + !oscillating.empty() +
               !file.empty();
    }

    CylinderMeasure buildTree() const {
        if (selections() != 1)
            throw ArgumentError("choose exactly one of --bernoulli/--cantor/--two-phase/"
                                "--oscillating/--measure");
        if (!file.empty()) return loadCylinderMeasure(file);
        if (depth < 1) throw ArgumentError("--depth is required");
        if (!bernoulli.empty()) {
            BernoulliSpec spec;
            spec.symbolProbabilities = splitDoubles(bernoulli);
            spec.depth = depth;
            return buildBernoulli(spec);
        }
        if (!twoPhase.empty()) {
            const auto ps = splitDoubles(twoPhase);
            if (ps.size() != 2) throw ArgumentError("--two-phase takes pLow,pHigh");
            return buildTwoPhase(ps[0], ps[1], depth);
        }
        if (!oscillating.empty()) {
            const auto ps = splitDoubles(oscillating);
            if (ps.size() != 2) throw ArgumentError("--oscillating takes pa,pb");
            return buildBlockOscillating(ps[0], ps[1], depth);
        }
        const auto ratios = splitDoubles(cantor);
        const auto fracs = masses.empty() ? std::vector<double>{0.5, 0.5} : splitDoubles(masses);
        if (ratios.size() > 2 || fracs.size() != 2)
            throw ArgumentError("--cantor takes r0[,r1] and --masses m0,m1");
        const double r0 = ratios[0], r1 = ratios.size() == 2 ? ratios[1] : ratios[0];
        return buildDerangedCantor(r0, r1, fracs[0], fracs[1], depth);
    }
};

struct ScheduleFlags {
    double base = 0.0;  // 0: derive from the measure
    int kMin = 0, kMax = 0, window = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--base", base, "radius base b (default: tree arity, 2 for clouds)");
        cmd->add_option("--kmin", kMin, "smallest radius exponent (default 4, trees: 2)");
        cmd->add_option("--kmax", kMax, "largest radius exponent (default: depth-2, clouds: 12)");
        cmd->add_option("--window", window, "tail window W (default 5)");
    }

    RadiusSchedule forTree(const CylinderMeasure& m) const {
        RadiusSchedule s;
        s.base = base > 0.0 ? base : static_cast<double>(m.arity());
        s.kMin = kMin > 0 ? kMin : 2;
        s.kMax = kMax > 0 ? kMax : m.depth() - 2;
        s.tailWindow = window > 0 ? window : 5;
        return s;
    }

    RadiusSchedule forCloud() const {
        RadiusSchedule s;
        s.base = base > 0.0 ? base : 2.0;
        s.kMin = kMin > 0 ? kMin : 4;
        s.kMax = kMax > 0 ? kMax : 12;
        s.tailWindow = window > 0 ? window : 5;
        return s;
    }
};

void writePlotData(const std::string& path, const BallMassOracle& nu, const BallMassOracle& mu,
                   double q, const std::vector<Point>& points, const RadiusSchedule& sched) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open " + path + " for writing");
    out << "# mfdim-csv v1 plot-data\npoint,k,log_r,log_nu,log_mu\n";
    for (size_t i = 0; i < points.size(); ++i) {
        const ExponentSeries s = localExponentSeries(nu, mu, q, points[i], sched);
        for (int j = 0; j < s.size(); ++j) {
            if (s.flagged[static_cast<size_t>(j)]) continue;
            out << i << ',' << (sched.kMin + j) << ',' << formatDouble(s.logR[static_cast<size_t>(j)])
                << ',' << formatDouble(s.logNu[static_cast<size_t>(j)]) << ','
                << formatDouble(s.logMu[static_cast<size_t>(j)]) << "\n";
        }
    }
}

int runVerifyNamed(const std::string& name, const Verdict& verdict, const std::string& outPath,
                   const std::string& format) {
    std::ofstream file;
    std::ostream& out = openSink(outPath, file);
    if (format == "table")
        out << verdict.toTable();
    else
        out << verdict.toJson() << "\n";
    std::cerr << "experiment '" << name << "': " << (verdict.pass ? "PASS" : "FAIL") << "\n";
    return verdict.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multifractal dimension estimation for pairs of Borel measures"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read defaults from a config file (flags win)");
    int threads = 0;
    app.add_option("--threads", threads, "worker count (default: all cores); never affects results");

    // ---- generate ----
    auto* generate = app.add_subcommand("generate", "build a measure and write it to a file");
    MeasureFlags genMeasure;
    genMeasure.attach(generate, false);
    std::string genOut;
    int genCloudSamples = 0;
    double genSquareRatio = 0.0;
    uint64_t genSeed = 1;
    generate->add_option("-o,--out", genOut, "output path")->required();
    generate->add_option("--cantor-square", genSquareRatio,
                         "write the R^2 product Cantor cloud with this ratio (csv output)");
    generate->add_option("--cloud-size", genCloudSamples,
                         "also discretize into a cloud of this many samples (embedded trees)");
    generate->add_option("--seed", genSeed, "seed for --cloud-size sampling");

    // ---- estimate ----
    auto* estimate = app.add_subcommand("estimate", "dimension reports over a q grid");
    std::string estMeasurePath, estMuPath, estQ = "0", estOut, estFormat = "csv", estPlot;
    int estSamples = 2000;
    uint64_t estSeed = 1;
    double estPLow = 0.01, estPHigh = 0.99;
    ScheduleFlags estSched;
    estimate->add_option("--measure", estMeasurePath, "measure file for nu (and mu by default)")
        ->required();
    estimate->add_option("--mu", estMuPath, "optional reference measure mu (default: nu itself)");
    estimate->add_option("--q", estQ, "comma-separated q grid (default 0)");
    estimate->add_option("-N,--samples", estSamples, "sample points per report (default 2000)");
    estimate->add_option("--plow", estPLow, "lower percentile (default 0.01)");
    estimate->add_option("--phigh", estPHigh, "upper percentile (default 0.99)");
    estSched.attach(estimate);
    estimate->add_option("--seed", estSeed, "master seed");
    estimate->add_option("--format", estFormat, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    estimate->add_option("--out", estOut, "output path (default stdout)");
    estimate->add_option("--plot-data", estPlot, "write (log r, log nu, log mu) triples here");

    // ---- project ----
    auto* projectCmd = app.add_subcommand("project", "per-subspace dimension reports");
    std::string projMeasurePath, projOut, projSubspaceOut, projProjectedOut;
    int projM = 1, projSubspaces = 50, projSamples = 800, projCloudSize = 100000;
    double projQ = 0.0, projTolerance = 0.1;
    uint64_t projSeed = 1;
    ScheduleFlags projSched;
    projectCmd->add_option("--measure", projMeasurePath, "point cloud csv (or tree to discretize)")
        ->required();
    projectCmd->add_option("--m", projM, "projection dimension (0 < m < n)")->required();
    projectCmd->add_option("--subspaces", projSubspaces, "number of Haar subspaces (default 50)");
    projectCmd->add_option("--q", projQ, "moment parameter (default 0)");
    projectCmd->add_option("--tolerance", projTolerance, "per-value tolerance (default 0.1)");
    projectCmd->add_option("-N,--samples", projSamples, "sample points per report (default 800)");
    projectCmd->add_option("--cloud-size", projCloudSize,
                           "discretization size for tree inputs (default 100000)");
    projSched.attach(projectCmd);
    projectCmd->add_option("--seed", projSeed, "master seed");
    projectCmd->add_option("--out", projOut, "per-subspace csv (default stdout)");
    projectCmd->add_option("--subspace-out", projSubspaceOut, "write subspace bases as csv rows");
    projectCmd->add_option("--projected-out", projProjectedOut,
                           "write the first subspace's projected cloud");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run a named experiment; exit 0 iff it passes");
    std::string verifyName, verifyOut, verifyFormat = "table";
    verify->add_option("experiment", verifyName, "experiment name")->required();
    MeasureFlags verifyMeasure;
    verifyMeasure.attach(verify, true);
    std::string verifyP = "0.3,0.7", verifyQ, verifyDepths = "8,24";
    int verifyN = 2000, verifySubspaces = 50, verifyM = 1, verifySamples = 10000;
    int verifyCloudCount = 10000, verifyCantorDepth = 7;
    double verifyGap = 0.1, verifyTolerance = 0.0, verifyThreshold = 0.9, verifyCantorRatio = 0.2;
    uint64_t verifySeed = 1;
    verify->add_option("--p", verifyP, "Bernoulli probabilities (quasi-bernoulli, ergodic)");
    verify->add_option("--q", verifyQ, "q grid override");
    verify->add_option("--depths", verifyDepths, "depth list (ergodic)");
    verify->add_option("-N,--samples-per-report", verifyN, "sample points per report");
    verify->add_option("--subspaces", verifySubspaces, "subspace count (projection)");
    verify->add_option("--m", verifyM, "projection dimension (projection)");
    verify->add_option("--gap-threshold", verifyGap, "exactness gap threshold (unidimensional)");
    verify->add_option("--tolerance", verifyTolerance, "per-value tolerance (projection)");
    verify->add_option("--threshold", verifyThreshold, "required pass fraction (projection)");
    verify->add_option("--kernel-samples", verifySamples, "sampled (x, r) pairs (kernel-lemmas)");
    verify->add_option("--segment", verifyCloudCount, "segment cloud size (kernel-lemmas)");
    verify->add_option("--cantor-ratio", verifyCantorRatio, "product Cantor ratio (projection)");
    verify->add_option("--cantor-depth", verifyCantorDepth, "product Cantor depth (projection)");
    verify->add_option("--seed", verifySeed, "master seed");
    verify->add_option("--out", verifyOut, "verdict path (default stdout)");
    verify->add_option("--format", verifyFormat, "json|table")
        ->check(CLI::IsMember({"json", "table"}));

    // ---- report ----
    auto* reportCmd = app.add_subcommand("report", "render a stored verdict document");
    std::string reportIn;
    reportCmd->add_option("--in", reportIn, "verdict json path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints help or the parse error
        return 2;
    }

    setWorkerCount(threads);

    try {
        if (*generate) {
            if (genSquareRatio > 0.0) {
                if (genMeasure.depth < 1) throw ArgumentError("--depth is required");
                const PointCloudMeasure cloud =
                    buildProductCantorCloud(genSquareRatio, genMeasure.depth);
                savePointCloud(cloud, genOut);
                std::cout << "wrote " << genOut << ": " << cloud.size() << " points in R^2\n";
                return 0;
            }
            const CylinderMeasure m = genMeasure.buildTree();
            saveCylinderMeasure(m, genOut);
            std::cout << "wrote " << genOut << ": depth=" << m.depth() << " arity=" << m.arity()
                      << " nodes=" << m.nodeCount()
                      << " totalMass=" << formatDouble(m.cylinderMass({})) << "\n";
            if (genCloudSamples > 0) {
                const PointCloudMeasure cloud = cloudFromMeasure(m, genCloudSamples, genSeed);
                savePointCloud(cloud, genOut + ".cloud.csv");
                std::cout << "wrote " << genOut << ".cloud.csv: " << cloud.size() << " points\n";
            }
            return 0;
        }

        if (*estimate) {
            const MeasureKind kind = detectMeasureKind(estMeasurePath);
            std::unique_ptr<CylinderMeasure> tree;
            std::unique_ptr<PointCloudMeasure> cloud;
            const BallMassOracle* nu = nullptr;
            RadiusSchedule sched;
            if (kind == MeasureKind::Cylinder) {
                tree = std::make_unique<CylinderMeasure>(loadCylinderMeasure(estMeasurePath));
                sched = estSched.forTree(*tree);
                nu = tree.get();
            } else {
                cloud = std::make_unique<PointCloudMeasure>(loadPointCloud(estMeasurePath));
                sched = estSched.forCloud();
                nu = cloud.get();
            }
            std::unique_ptr<CylinderMeasure> muTree;
            std::unique_ptr<PointCloudMeasure> muCloud;
            const BallMassOracle* mu = nu;
            if (!estMuPath.empty()) {
                if (detectMeasureKind(estMuPath) == MeasureKind::Cylinder) {
                    muTree = std::make_unique<CylinderMeasure>(loadCylinderMeasure(estMuPath));
                    mu = muTree.get();
                } else {
                    muCloud = std::make_unique<PointCloudMeasure>(loadPointCloud(estMuPath));
                    mu = muCloud.get();
                }
            }

            const std::vector<double> qGrid = splitDoubles(estQ);
            const Percentiles pct{estPLow, estPHigh};
            std::ofstream file;
            std::ostream& out = openSink(estOut, file);
            nlohmann::json jsonReports = nlohmann::json::array();
            if (estFormat == "csv") {
                out << "# mfdim-csv v1 dimension-report\n" << configEcho(app, true);
                out << reportCsvHeader() << "\n";
            }
            for (size_t qi = 0; qi < qGrid.size(); ++qi) {
                const DimensionReport report = dimensionEstimates(
                    *nu, *mu, qGrid[qi], estSamples, sched, pct, deriveSeed(estSeed, qi));
                if (estFormat == "csv")
                    out << reportCsvRow(report) << "\n";
                else
                    jsonReports.push_back(nlohmann::json::parse(reportJson(report)));
            }
            if (estFormat == "json") {
                nlohmann::json doc{{"formatVersion", 1},
                                   {"config", configEcho(app, false)},
                                   {"reports", jsonReports}};
                out << doc.dump(2) << "\n";
            }
            if (!estPlot.empty()) {
                const std::vector<Point> points =
                    samplePoints(*nu, std::min(estSamples, 200), deriveSeed(estSeed, 0));
                writePlotData(estPlot, *nu, *mu, qGrid[0], points, sched);
            }
            return 0;
        }

        if (*projectCmd) {
            std::unique_ptr<PointCloudMeasure> cloud;
            if (detectMeasureKind(projMeasurePath) == MeasureKind::Cloud)
                cloud = std::make_unique<PointCloudMeasure>(loadPointCloud(projMeasurePath));
            else {
                const CylinderMeasure tree = loadCylinderMeasure(projMeasurePath);
                cloud = std::make_unique<PointCloudMeasure>(
                    cloudFromMeasure(tree, projCloudSize, deriveSeed(projSeed, 0xC10DDULL)));
            }
            if (projM >= cloud->dimension())
                throw CLI::ValidationError("--m must be smaller than the cloud dimension");

            const RadiusSchedule sched = projSched.forCloud();
            const Percentiles pct{0.45, 0.55};
            const ProjectionSummary summary =
                projectionDimensionReport(*cloud, *cloud, projQ, projM, projSubspaces, projSamples,
                                          sched, pct, projTolerance, projSeed);

            std::ofstream file;
            std::ostream& out = openSink(projOut, file);
            out << "# mfdim-csv v1 projection-report\n" << configEcho(app, true);
            out << "v_index,q,lowerH,upperH,lowerP,upperP,pass\n";
            for (const PerSubspaceReport& r : summary.perSubspace) {
                if (r.degenerate) {
                    out << r.index << ',' << formatDouble(projQ) << ",,,,,skip\n";
                    continue;
                }
                out << r.index << ',' << formatDouble(projQ) << ','
                    << formatDouble(r.report.lowerHausdorff) << ','
                    << formatDouble(r.report.upperHausdorff) << ','
                    << formatDouble(r.report.lowerPacking) << ','
                    << formatDouble(r.report.upperPacking) << ',' << (r.withinTolerance ? 1 : 0)
                    << "\n";
            }
            std::cout << "unprojected: " << reportCsvRow(summary.unprojected) << "\n";
            std::cout << "pass fraction: " << formatDouble(summary.passFraction) << " over "
                      << summary.comparable << " comparable subspaces\n";

            if (!projSubspaceOut.empty()) {
                std::ofstream sub(projSubspaceOut);
                if (!sub) throw ArgumentError("cannot open " + projSubspaceOut);
                sub << "# mfdim-csv v1 subspaces\nv_index,row,entries...\n";
                for (const PerSubspaceReport& r : summary.perSubspace)
                    for (int row = 0; row < r.subspace.dim; ++row) {
                        sub << r.index << ',' << row;
                        for (double v : r.subspace.row(row)) sub << ',' << formatDouble(v);
                        sub << "\n";
                    }
            }
            if (!projProjectedOut.empty() && !summary.perSubspace.empty())
                savePointCloud(project(*cloud, summary.perSubspace.front().subspace),
                               projProjectedOut);
            return 0;
        }

        if (*verify) {
            const auto catalog = experimentCatalog();
            const bool known = std::any_of(catalog.begin(), catalog.end(),
                                           [&](const auto& e) { return e.first == verifyName; });
            if (!known) {
                std::cerr << "unknown experiment '" << verifyName << "'. valid names:\n";
                for (const auto& [name, blurb] : catalog)
                    std::cerr << "  " << name << " - " << blurb << "\n";
                return 2;
            }

            Verdict verdict;
            if (verifyName == "quasi-bernoulli") {
                QuasiBernoulliParams params;
                params.spec.symbolProbabilities = splitDoubles(verifyP);
                params.spec.depth = verifyMeasure.depth > 0 ? verifyMeasure.depth : 16;
                if (!verifyQ.empty()) params.qGrid = splitDoubles(verifyQ);
                params.sampleCount = verifyN;
                params.seed = verifySeed;
                verdict = verifyQuasiBernoulli(params);
            } else if (verifyName == "unidimensional") {
                const CylinderMeasure m = verifyMeasure.buildTree();
                UnidimensionalityParams params;
                params.q = verifyQ.empty() ? 0.0 : splitDoubles(verifyQ)[0];
                params.sampleCount = verifyN;
                params.gapThreshold = verifyGap;
                params.seed = verifySeed;
                verdict = verifyUnidimensionality(m, "cli measure", params);
            } else if (verifyName == "ergodic") {
                ErgodicParams params;
                params.symbolProbabilities = splitDoubles(verifyP);
                params.depths = splitInts(verifyDepths);
                params.sampleCount = verifyN;
                params.seed = verifySeed;
                verdict = verifyErgodicConstancy(params);
            } else if (verifyName == "projection") {
                std::unique_ptr<PointCloudMeasure> cloud;
                std::string cloudName;
                if (!verifyMeasure.file.empty()) {
                    cloud = std::make_unique<PointCloudMeasure>(loadPointCloud(verifyMeasure.file));
                    cloudName = verifyMeasure.file;
                } else {
                    cloud = std::make_unique<PointCloudMeasure>(
                        buildProductCantorCloud(verifyCantorRatio, verifyCantorDepth));
                    cloudName = "product-cantor(" + formatDouble(verifyCantorRatio) + ")^2 depth " +
                                std::to_string(verifyCantorDepth);
                }
                ProjectionParams params;
                params.m = verifyM;
                if (!verifyQ.empty()) params.qGrid = splitDoubles(verifyQ);
                params.numSubspaces = verifySubspaces;
                if (verifyTolerance > 0.0) params.tolerance = verifyTolerance;
                params.passThreshold = verifyThreshold;
                params.sampleCount = verifyN > 0 ? verifyN : 800;
                params.schedule.kMax = std::min(params.schedule.kMax, verifyCantorDepth - 1);
                params.seed = verifySeed;
                verdict = verifyProjectionPreservation(*cloud, cloudName, params);
            } else {  // kernel-lemmas
                std::unique_ptr<PointCloudMeasure> cloud;
                std::string cloudName;
                if (!verifyMeasure.file.empty()) {
                    cloud = std::make_unique<PointCloudMeasure>(loadPointCloud(verifyMeasure.file));
                    cloudName = verifyMeasure.file;
                } else {
                    cloud = std::make_unique<PointCloudMeasure>(buildSegmentCloud(verifyCloudCount));
                    cloudName = "segment(" + std::to_string(verifyCloudCount) + ")";
                }
                KernelLemmaParams params;
                params.samples = verifySamples;
                params.seed = verifySeed;
                verdict = verifyKernelLemmas(*cloud, cloudName, params);
            }
            return runVerifyNamed(verifyName, verdict, verifyOut, verifyFormat);
        }

        if (*reportCmd) {
            std::ifstream in(reportIn);
            if (!in) throw ArgumentError("cannot open " + reportIn);
            nlohmann::json doc = nlohmann::json::parse(in);
            Verdict v;
            v.experiment = doc.value("experiment", "?");
            v.config = doc.value("config", "");
            v.pass = doc.value("pass", false);
            for (const auto& jc : doc.value("checks", nlohmann::json::array())) {
                CheckRecord c;
                c.name = jc.value("name", "?");
                c.expected = jc.value("expected", 0.0);
                c.observed = jc.value("observed", 0.0);
                c.tolerance = jc.value("tolerance", 0.0);
                c.pass = jc.value("pass", false);
                c.skipped = jc.value("skipped", false);
                c.note = jc.value("note", "");
                v.checks.push_back(std::move(c));
            }
            std::cout << v.toTable();
            return v.pass ? 0 : 1;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
