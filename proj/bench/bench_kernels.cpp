// Timing harness comparing the OpenMP kernels against their serial
// reference implementations. Outputs must match bit for bit; the point of
// the serial paths is exactly that comparison.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "mfdim/exponents.hpp"
#include "mfdim/parallel.hpp"
#include "mfdim/point_cloud.hpp"
#include "mfdim/projection.hpp"

using namespace mfdim;

namespace {

double timeIt(const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-34s %10.3fs %10.3fs %8.2fx   %s\n", name, serial, parallel,
                serial / parallel, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("%-34s %11s %11s %9s   %s\n", "kernel", "serial", "openmp", "speedup",
                "outputs");

    {
        BernoulliSpec spec;
        spec.symbolProbabilities = {0.3, 0.7};
        spec.depth = 18;
        const CylinderMeasure mu = buildBernoulli(spec);
        RadiusSchedule sched;
        sched.base = 2.0;
        sched.kMin = 2;
        sched.kMax = 16;
        sched.tailWindow = 5;
        const auto points = samplePoints(mu, 20000, 1);

        PointwiseBatch serial, parallel;
        const double ts =
            timeIt([&] { serial = pointwiseEstimatesBatchSerial(mu, mu, 0.7, points, sched); });
        setWorkerCount(0);
        const double tp =
            timeIt([&] { parallel = pointwiseEstimatesBatch(mu, mu, 0.7, points, sched); });
        const bool same =
            std::memcmp(serial.slope.data(), parallel.slope.data(),
                        serial.slope.size() * sizeof(double)) == 0 &&
            std::memcmp(serial.alphaLower.data(), parallel.alphaLower.data(),
                        serial.alphaLower.size() * sizeof(double)) == 0;
        row("pointwise exponents (20k points)", ts, tp, same);
    }

    {
        const PointCloudMeasure cloud = buildSegmentCloud(20000);
        RadiusSchedule sched;
        sched.base = 2.0;
        sched.kMin = 3;
        sched.kMax = 12;
        sched.tailWindow = 5;
        const auto points = samplePoints(cloud, 2000, 2);

        PointwiseBatch serial, parallel;
        const double ts = timeIt(
            [&] { serial = pointwiseEstimatesBatchSerial(cloud, cloud, 0.0, points, sched); });
        const double tp =
            timeIt([&] { parallel = pointwiseEstimatesBatch(cloud, cloud, 0.0, points, sched); });
        const bool same = std::memcmp(serial.slope.data(), parallel.slope.data(),
                                      serial.slope.size() * sizeof(double)) == 0;
        row("cloud ball masses (2k x 20k)", ts, tp, same);
    }

    {
        const PointCloudMeasure cloud = buildProductCantorCloud(0.2, 6);
        const RadiusSchedule sched{5.0, 1, 5, 2};
        ProjectionSummary serial, parallel;
        const double ts = timeIt([&] {
            serial = projectionDimensionReportSerial(cloud, cloud, 0.0, 1, 24, 400, sched,
                                                     Percentiles{0.45, 0.55}, 0.1, 3);
        });
        const double tp = timeIt([&] {
            parallel = projectionDimensionReport(cloud, cloud, 0.0, 1, 24, 400, sched,
                                                 Percentiles{0.45, 0.55}, 0.1, 3);
        });
        bool same = serial.passFraction == parallel.passFraction;
        for (size_t i = 0; same && i < serial.perSubspace.size(); ++i)
            same = serial.perSubspace[i].report.lowerHausdorff ==
                   parallel.perSubspace[i].report.lowerHausdorff;
        row("projection reports (24 subspaces)", ts, tp, same);
    }

    return 0;
}
