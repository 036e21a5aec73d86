#pragma once

#include <iosfwd>
#include <string>

#include "mfdim/cylinder_measure.hpp"
#include "mfdim/exponents.hpp"
#include "mfdim/point_cloud.hpp"

namespace mfdim {

// All writers emit decimals with 17 significant digits, so a save/load/save
// round trip is bit-identical on the text.

// Tree measures: a line-based document with an explicit header
// (arity/depth/metricMode) followed by one node per line in word order.
void saveCylinderMeasure(const CylinderMeasure& measure, std::ostream& out);
void saveCylinderMeasure(const CylinderMeasure& measure, const std::string& path);
CylinderMeasure loadCylinderMeasure(std::istream& in);       // throws ParseError with line numbers
CylinderMeasure loadCylinderMeasure(const std::string& path);

// Point clouds: CSV with header x1,...,xd,weight.
void savePointCloud(const PointCloudMeasure& cloud, std::ostream& out);
void savePointCloud(const PointCloudMeasure& cloud, const std::string& path);
PointCloudMeasure loadPointCloud(std::istream& in);
PointCloudMeasure loadPointCloud(const std::string& path);

// Either kind of measure file, detected from the first line.
enum class MeasureKind { Cylinder, Cloud };
MeasureKind detectMeasureKind(const std::string& path);

std::string formatDouble(double v);  // %.17g

// Report rows: csv schema q,lowerH,upperH,lowerP,upperP,N,seed.
std::string reportCsvHeader();
std::string reportCsvRow(const DimensionReport& report);
std::string reportJson(const DimensionReport& report);

// csv schema q,n,tau_hat[,tau_analytic].
std::string partitionTableCsv(const struct PartitionTable& table);

}  // namespace mfdim
