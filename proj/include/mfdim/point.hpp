#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfdim/errors.hpp"

namespace mfdim {

// A sample point. Euclidean points carry coordinates; points of a symbolic
// coding space carry their digit string. A measure only ever sees points of
// its own kind.
class Point {
public:
    Point() = default;

    static Point euclidean(std::vector<double> coords) {
        Point p;
        p.coords_ = std::move(coords);
        return p;
    }

    static Point scalar(double x) { return euclidean({x}); }

    static Point symbolic(std::vector<uint8_t> digits) {
        Point p;
        p.digits_ = std::move(digits);
        p.symbolic_ = true;
        return p;
    }

    bool isSymbolic() const { return symbolic_; }

    const std::vector<double>& coords() const {
        if (symbolic_) throw ArgumentError("symbolic point has no coordinates");
        return coords_;
    }

    const std::vector<uint8_t>& digits() const {
        if (!symbolic_) throw ArgumentError("euclidean point has no digit string");
        return digits_;
    }

    std::string describe() const;

private:
    std::vector<double> coords_;
    std::vector<uint8_t> digits_;
    bool symbolic_ = false;
};

}  // namespace mfdim
