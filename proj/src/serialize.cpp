#include "mfdim/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mfdim/errors.hpp"
#include "mfdim/partition.hpp"

namespace mfdim {

namespace {

constexpr const char* kMeasureMagic = "# mfdim-measure v1";
constexpr const char* kCloudMagic = "# mfdim-cloud v1";

std::ofstream openOut(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open " + path + " for writing");
    return out;
}

std::ifstream openIn(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open " + path + " for reading");
    return in;
}

double parseDouble(const std::string& token, long line) {
    try {
        size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad numeric field '" + token + "'", line);
    }
}

long parseLong(const std::string& token, long line) {
    try {
        size_t used = 0;
        const long v = std::stol(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad integer field '" + token + "'", line);
    }
}

}  // namespace

std::string formatDouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void saveCylinderMeasure(const CylinderMeasure& measure, std::ostream& out) {
    out << kMeasureMagic << "\n";
    out << "mode " << (measure.mode() == CylinderMeasure::Mode::Embedded ? "embedded" : "symbolic")
        << "\n";
    out << "arity " << measure.arity() << "\n";
    out << "depth " << measure.depth() << "\n";
    out << "nodes " << measure.nodeCount() << "\n";
    // node lines: word ratio mass [left length]; '-' denotes the root
    const bool embedded = measure.mode() == CylinderMeasure::Mode::Embedded;
    std::vector<uint8_t> word;
    const auto writeNode = [&](const std::vector<uint8_t>& w, double ratio, double mass,
                               double left, double length) {
        if (w.empty())
            out << "node -";
        else {
            out << "node ";
            for (uint8_t d : w) out << static_cast<char>('0' + d);
        }
        out << ' ' << formatDouble(ratio) << ' ' << formatDouble(mass);
        if (embedded) out << ' ' << formatDouble(left) << ' ' << formatDouble(length);
        out << "\n";
    };

    // depth-first in word order, deriving geometry level by level
    struct Frame {
        std::vector<uint8_t> word;
        double ratio, mass, left, length;
    };
    std::vector<Frame> stack{{{}, 1.0, 1.0, 0.0, 1.0}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        writeNode(f.word, f.ratio, f.mass, f.left, f.length);
        const int level = static_cast<int>(f.word.size());
        if (level == measure.depth()) continue;
        for (int j = measure.arity() - 1; j >= 0; --j) {
            Frame child;
            child.word = f.word;
            child.word.push_back(static_cast<uint8_t>(j));
            if (measure.isLevelUniform()) {
                const ChildSpec& spec = measure.levelRules()[static_cast<size_t>(level)][static_cast<size_t>(j)];
                child.ratio = spec.ratio;
                child.mass = f.mass * spec.massFraction;
                if (embedded) {
                    child.length = f.length * spec.ratio;
                    child.left = j == 0 ? f.left : f.left + f.length - child.length;
                } else {
                    child.length = f.length / measure.arity();
                    child.left = 0.0;
                }
            } else {
                uint64_t idx = 0;
                for (uint8_t d : child.word) idx = idx * measure.arity() + d;
                const auto& node = measure.explicitLevels()[static_cast<size_t>(level) + 1][idx];
                child.ratio = node.ratio;
                child.mass = node.mass;
                child.left = node.left;
                child.length = node.length;
            }
            stack.push_back(std::move(child));
        }
    }
}

void saveCylinderMeasure(const CylinderMeasure& measure, const std::string& path) {
    auto out = openOut(path);
    saveCylinderMeasure(measure, out);
}

CylinderMeasure loadCylinderMeasure(std::istream& in) {
    std::string lineText;
    long line = 0;

    const auto nextLine = [&]() -> bool {
        while (std::getline(in, lineText)) {
            ++line;
            if (!lineText.empty()) return true;
        }
        return false;
    };

    if (!nextLine() || lineText != kMeasureMagic)
        throw ParseError("missing measure header '" + std::string(kMeasureMagic) + "'", line);

    CylinderMeasure::Mode mode = CylinderMeasure::Mode::Symbolic;
    int arity = -1, depth = -1;
    uint64_t declaredNodes = 0;
    for (int i = 0; i < 4; ++i) {
        if (!nextLine()) throw ParseError("truncated measure header", line);
        std::istringstream ss(lineText);
        std::string key, value;
        ss >> key >> value;
        if (key == "mode") {
            if (value == "embedded")
                mode = CylinderMeasure::Mode::Embedded;
            else if (value == "symbolic")
                mode = CylinderMeasure::Mode::Symbolic;
            else
                throw ParseError("unknown mode '" + value + "'", line);
        } else if (key == "arity")
            arity = static_cast<int>(parseLong(value, line));
        else if (key == "depth")
            depth = static_cast<int>(parseLong(value, line));
        else if (key == "nodes")
            declaredNodes = static_cast<uint64_t>(parseLong(value, line));
        else
            throw ParseError("unknown header key '" + key + "'", line);
    }
    if (arity < 2) throw ParseError("arity must be >= 2", line);
    if (depth < 1) throw ParseError("depth must be >= 1", line);

    std::vector<std::vector<CylinderMeasure::Node>> levels(static_cast<size_t>(depth) + 1);
    std::vector<std::vector<uint8_t>> seen(static_cast<size_t>(depth) + 1);
    uint64_t levelSize = 1;
    for (int k = 0; k <= depth; ++k) {
        levels[static_cast<size_t>(k)].resize(levelSize);
        seen[static_cast<size_t>(k)].assign(levelSize, 0);
        levelSize *= static_cast<uint64_t>(arity);
    }

    uint64_t parsed = 0;
    const bool embedded = mode == CylinderMeasure::Mode::Embedded;
    while (nextLine()) {
        std::istringstream ss(lineText);
        std::string tag, word;
        ss >> tag;
        if (tag != "node") throw ParseError("expected a node line, got '" + tag + "'", line);
        ss >> word;
        if (word.empty()) throw ParseError("missing word field", line);
        std::vector<uint8_t> digits;
        if (word != "-") {
            digits.reserve(word.size());
            for (char c : word) {
                if (c < '0' || c >= '0' + arity)
                    throw ParseError("word digit '" + std::string(1, c) + "' outside alphabet", line);
                digits.push_back(static_cast<uint8_t>(c - '0'));
            }
        }
        if (static_cast<int>(digits.size()) > depth)
            throw ParseError("word longer than declared depth", line);

        std::string f1, f2, f3, f4;
        ss >> f1 >> f2;
        if (f1.empty() || f2.empty()) throw ParseError("node line missing ratio/mass", line);
        CylinderMeasure::Node node;
        node.ratio = parseDouble(f1, line);
        node.mass = parseDouble(f2, line);
        if (embedded) {
            ss >> f3 >> f4;
            if (f3.empty() || f4.empty()) throw ParseError("embedded node missing interval", line);
            node.left = parseDouble(f3, line);
            node.length = parseDouble(f4, line);
        } else {
            node.left = 0.0;
            node.length = std::pow(static_cast<double>(arity), -static_cast<double>(digits.size()));
        }

        uint64_t idx = 0;
        for (uint8_t d : digits) idx = idx * static_cast<uint64_t>(arity) + d;
        const size_t level = digits.size();
        if (seen[level][idx]) throw ParseError("duplicate node '" + word + "'", line);
        seen[level][idx] = 1;
        levels[level][idx] = node;
        ++parsed;
    }

    if (declaredNodes != 0 && parsed != declaredNodes)
        throw ParseError("header declares " + std::to_string(declaredNodes) + " nodes, found " +
                             std::to_string(parsed),
                         line);
    for (size_t k = 0; k < seen.size(); ++k)
        for (size_t i = 0; i < seen[k].size(); ++i)
            if (!seen[k][i])
                throw ParseError("missing node at level " + std::to_string(k) + " index " +
                                     std::to_string(i),
                                 line);

    try {
        return CylinderMeasure::fromExplicitLevels(mode, arity, std::move(levels));
    } catch (const ConstructionError& e) {
        throw ParseError(std::string("invalid measure: ") + e.what(), line);
    }
}

CylinderMeasure loadCylinderMeasure(const std::string& path) {
    auto in = openIn(path);
    return loadCylinderMeasure(in);
}

void savePointCloud(const PointCloudMeasure& cloud, std::ostream& out) {
    out << kCloudMagic << "\n";
    for (int j = 1; j <= cloud.dimension(); ++j) out << 'x' << j << ',';
    out << "weight\n";
    for (int i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.pointAt(i);
        for (double c : p) out << formatDouble(c) << ',';
        out << formatDouble(cloud.weightAt(i)) << "\n";
    }
}

void savePointCloud(const PointCloudMeasure& cloud, const std::string& path) {
    auto out = openOut(path);
    savePointCloud(cloud, out);
}

PointCloudMeasure loadPointCloud(std::istream& in) {
    std::string lineText;
    long line = 0;
    if (!std::getline(in, lineText)) throw ParseError("empty cloud file", 1);
    ++line;
    if (lineText != kCloudMagic) throw ParseError("missing cloud header", line);
    if (!std::getline(in, lineText)) throw ParseError("missing column header", line);
    ++line;

    int dim = 0;
    {
        std::istringstream ss(lineText);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.size() < 2 || cols.back() != "weight")
            throw ParseError("column header must be x1,...,xd,weight", line);
        dim = static_cast<int>(cols.size()) - 1;
        for (int j = 0; j < dim; ++j)
            if (cols[static_cast<size_t>(j)] != "x" + std::to_string(j + 1))
                throw ParseError("column header must be x1,...,xd,weight", line);
    }

    std::vector<double> coords, weights;
    while (std::getline(in, lineText)) {
        ++line;
        if (lineText.empty()) continue;
        std::istringstream ss(lineText);
        std::string field;
        std::vector<double> fields;
        while (std::getline(ss, field, ',')) fields.push_back(parseDouble(field, line));
        if (static_cast<int>(fields.size()) != dim + 1)
            throw ParseError("expected " + std::to_string(dim + 1) + " fields", line);
        coords.insert(coords.end(), fields.begin(), fields.end() - 1);
        weights.push_back(fields.back());
    }
    if (weights.empty()) throw ParseError("cloud has no points", line);
    try {
        return PointCloudMeasure(dim, std::move(coords), std::move(weights), false);
    } catch (const ConstructionError& e) {
        throw ParseError(std::string("invalid cloud: ") + e.what(), line);
    }
}

PointCloudMeasure loadPointCloud(const std::string& path) {
    auto in = openIn(path);
    return loadPointCloud(in);
}

MeasureKind detectMeasureKind(const std::string& path) {
    auto in = openIn(path);
    std::string first;
    std::getline(in, first);
    if (first == kMeasureMagic) return MeasureKind::Cylinder;
    if (first == kCloudMagic) return MeasureKind::Cloud;
    throw ParseError("unrecognized measure file '" + path + "'", 1);
}

std::string reportCsvHeader() { return "q,lowerH,upperH,lowerP,upperP,N,seed"; }

std::string reportCsvRow(const DimensionReport& r) {
    std::ostringstream out;
    out << formatDouble(r.q) << ',' << formatDouble(r.lowerHausdorff) << ','
        << formatDouble(r.upperHausdorff) << ',' << formatDouble(r.lowerPacking) << ','
        << formatDouble(r.upperPacking) << ',' << r.sampleCount << ',' << r.seed;
    return out.str();
}

std::string partitionTableCsv(const PartitionTable& table) {
    std::ostringstream out;
    out << "q,n,tau_hat" << (table.tauAnalytic ? ",tau_analytic" : "") << "\n";
    for (size_t i = 0; i < table.qGrid.size(); ++i) {
        out << formatDouble(table.qGrid[i]) << ',' << table.depth << ','
            << formatDouble(table.tauHat[i]);
        if (table.tauAnalytic) out << ',' << formatDouble((*table.tauAnalytic)[i]);
        out << "\n";
    }
    return out.str();
}

std::string reportJson(const DimensionReport& r) {
    nlohmann::json j{{"q", r.q},
                     {"lowerHausdorff", r.lowerHausdorff},
                     {"upperHausdorff", r.upperHausdorff},
                     {"lowerPacking", r.lowerPacking},
                     {"upperPacking", r.upperPacking},
                     {"sampleCount", r.sampleCount},
                     {"percentileLow", r.percentiles.low},
                     {"percentileHigh", r.percentiles.high},
                     {"scheduleBase", r.schedule.base},
                     {"scheduleKMin", r.schedule.kMin},
                     {"scheduleKMax", r.schedule.kMax},
                     {"tailWindow", r.schedule.tailWindow},
                     {"seed", r.seed}};
    return j.dump();
}

}  // namespace mfdim
