#include "mfdim/measure.hpp"

#include <cstdio>

namespace mfdim {

std::string Point::describe() const {
    if (symbolic_) {
        std::string s = "word:";
        for (uint8_t d : digits_) s += static_cast<char>('0' + d);
        return s;
    }
    std::string s = "(";
    char buf[40];
    for (size_t i = 0; i < coords_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", coords_[i]);
        if (i) s += ", ";
        s += buf;
    }
    return s + ")";
}

std::vector<Point> samplePoints(const BallMassOracle& measure, int count, uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> points;
    points.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) points.push_back(measure.sample(rng));
    return points;
}

}  // namespace mfdim
