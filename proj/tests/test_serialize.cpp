#include <doctest.h>

#include <sstream>

#include "mfdim/errors.hpp"
#include "mfdim/serialize.hpp"

using namespace mfdim;

TEST_SUITE("serialize") {

TEST_CASE("cylinder round trip is bit-identical on the written text") {
    const CylinderMeasure m = buildDerangedCantor(0.3, 0.45, 0.37, 0.63, 5);
    std::ostringstream first;
    saveCylinderMeasure(m, first);
    std::istringstream in(first.str());
    const CylinderMeasure loaded = loadCylinderMeasure(in);
    std::ostringstream second;
    saveCylinderMeasure(loaded, second);
    CHECK(first.str() == second.str());

    // loaded measure answers identical queries
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(0.0, 1.0);
        const double r = rng.uniform(1e-4, 0.5);
        CHECK(m.ballMass(Point::scalar(x), r) == loaded.ballMass(Point::scalar(x), r));
    }
}

TEST_CASE("symbolic round trip preserves cylinder masses exactly") {
    BernoulliSpec spec;
    spec.symbolProbabilities = {0.15, 0.25, 0.6};
    spec.depth = 4;
    const CylinderMeasure m = buildBernoulli(spec);
    std::ostringstream out;
    saveCylinderMeasure(m, out);
    std::istringstream in(out.str());
    const CylinderMeasure loaded = loadCylinderMeasure(in);
    CHECK(loaded.arity() == 3);
    CHECK(loaded.depth() == 4);
    CHECK(loaded.mode() == CylinderMeasure::Mode::Symbolic);
    CHECK(loaded.cylinderMass({2, 0, 1, 2}) == m.cylinderMass({2, 0, 1, 2}));
}

TEST_CASE("corrupt node line reports its line number") {
    const CylinderMeasure m = buildDerangedCantor(0.3, 0.3, 0.5, 0.5, 2);
    std::ostringstream out;
    saveCylinderMeasure(m, out);
    std::string text = out.str();
    const size_t pos = text.find("node 0 ");
    REQUIRE(pos != std::string::npos);
    text.replace(pos + 7, 3, "bad");
    std::istringstream in(text);
    try {
        loadCylinderMeasure(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() > 1);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("missing nodes are rejected") {
    std::istringstream in(
        "# mfdim-measure v1\nmode symbolic\narity 2\ndepth 1\nnodes 3\n"
        "node - 1 1\nnode 0 0.5 0.5\n");
    CHECK_THROWS_AS(loadCylinderMeasure(in), ParseError);
}

TEST_CASE("cloud CSV round trip is bit-identical") {
    const PointCloudMeasure cloud = buildRandomCloud(64, 3, 77);
    std::ostringstream first;
    savePointCloud(cloud, first);
    std::istringstream in(first.str());
    const PointCloudMeasure loaded = loadPointCloud(in);
    std::ostringstream second;
    savePointCloud(loaded, second);
    CHECK(first.str() == second.str());
    CHECK(loaded.dimension() == 3);
    CHECK(loaded.size() == 64);
}

TEST_CASE("cloud CSV header is validated") {
    std::istringstream in("# mfdim-cloud v1\nx1,x2,mass\n0,0,1\n");
    CHECK_THROWS_AS(loadPointCloud(in), ParseError);
}

TEST_CASE("report csv row carries the pinned schema") {
    DimensionReport r;
    r.q = 2.0;
    r.lowerHausdorff = -0.88;
    r.upperHausdorff = -0.87;
    r.lowerPacking = -0.86;
    r.upperPacking = -0.85;
    r.sampleCount = 2000;
    r.seed = 99;
    CHECK(reportCsvHeader() == "q,lowerH,upperH,lowerP,upperP,N,seed");
    CHECK(reportCsvRow(r) == "2,-0.88,-0.87,-0.85999999999999999,-0.84999999999999998,2000,99");
}

}  // TEST_SUITE
