#pragma once

#include <cmath>
#include <vector>

#include "mfdim/cylinder_measure.hpp"

namespace mfdim::testing {

// Independent ball-mass oracle: enumerate every leaf cylinder of the tree
// and sum the masses of those whose closed interval meets [x-r, x+r].
// No pruning, no shared code with CylinderMeasure::ballMass.
inline double bruteForceBallMass(const CylinderMeasure& m, double x, double r) {
    double total = 0.0;
    std::vector<uint8_t> word(static_cast<size_t>(m.depth()), 0);
    const uint64_t leaves = 1ULL << m.depth();  // binary trees only
    for (uint64_t leaf = 0; leaf < leaves; ++leaf) {
        for (int k = 0; k < m.depth(); ++k)
            word[static_cast<size_t>(k)] = static_cast<uint8_t>((leaf >> (m.depth() - 1 - k)) & 1);
        const auto [left, length] = m.cylinderInterval(word);
        if (left <= x + r && left + length >= x - r) total += m.cylinderMass(word);
    }
    return total;
}

// Independent partition-sum oracle: explicit enumeration of generation-n
// words with masses and diameters accumulated from the raw rule data.
inline double bruteForcePartitionSum(const CylinderMeasure& m, double q, double t, int n) {
    double total = 0.0;
    std::vector<uint8_t> word(static_cast<size_t>(n), 0);
    const uint64_t words = 1ULL << n;
    for (uint64_t w = 0; w < words; ++w) {
        double mass = 1.0, diam = 1.0;
        for (int k = 0; k < n; ++k) {
            const uint8_t digit = static_cast<uint8_t>((w >> (n - 1 - k)) & 1);
            word[static_cast<size_t>(k)] = digit;
            if (m.isLevelUniform()) {
                const ChildSpec& c = m.levelRules()[static_cast<size_t>(k)][digit];
                mass *= c.massFraction;
                diam *= (m.mode() == CylinderMeasure::Mode::Symbolic) ? 0.5 : c.ratio;
            }
        }
        if (!m.isLevelUniform()) {
            mass = m.cylinderMass(word);
            diam = m.cylinderLength(word);
        }
        if (mass > 0.0) total += std::pow(mass, q) * std::pow(diam, t);
    }
    return total;
}

}  // namespace mfdim::testing
