#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mfdim/measure.hpp"

namespace mfdim {

// One child of a tree node: contraction ratio of its interval relative to
// the parent, and the fraction of the parent's mass it receives.
struct ChildSpec {
    double ratio;
    double massFraction;
};

struct BernoulliSpec {
    std::vector<double> symbolProbabilities;  // entries > 0, sum to 1
    int depth = 0;

    void validate() const;  // throws ConstructionError
};

// Tree-coded Cantor-type measure, built to finite depth.
//
// Two metric modes:
//  - Embedded: binary subdivision of [0,1] with the two children at the ends
//    of the parent interval and a gap in the middle. Balls are real
//    intervals; ball masses come from a pruned tree traversal.
//  - Symbolic: words over {0..arity-1} with d(x,y) = b^-(length of common
//    prefix). The closed ball B(x, b^-n) is exactly the generation-n
//    cylinder containing x, of diameter b^-n.
//
// Two storage backends:
//  - level rules: one ChildSpec row per level (constant and depth-dependent
//    constructions; O(depth) memory, so depth ~24 is cheap);
//  - explicit nodes: a materialized table of every node (per-node callback
//    rules and deserialized files).
class CylinderMeasure : public BallMassOracle {
public:
    enum class Mode { Embedded, Symbolic };

    using LevelRule = std::vector<ChildSpec>;  // one entry per child
    using NodeRule = std::function<std::vector<ChildSpec>(const std::vector<uint8_t>& word)>;

    struct Node {
        double ratio;   // |I_w| / |I_parent(w)|; 1 for the root
        double mass;    // absolute mass of the cylinder
        double left;    // embedded mode: interval [left, left+length]
        double length;
    };

    // rules[k] describes the children of generation-k nodes; depth = rules.size().
    static CylinderMeasure fromLevelRules(Mode mode, std::vector<LevelRule> rules);

    // Materializes the full tree by asking `rule` for every node's children.
    static CylinderMeasure fromNodeRule(Mode mode, int arity, int depth, const NodeRule& rule);

    // levels[k] holds all arity^k generation-k nodes in word order
    // (deserialization path; validates the invariants).
    static CylinderMeasure fromExplicitLevels(Mode mode, int arity,
                                              std::vector<std::vector<Node>> levels);

    int arity() const { return arity_; }
    int depth() const { return depth_; }
    Mode mode() const { return mode_; }
    bool isLevelUniform() const { return !rules_.empty(); }
    uint64_t nodeCount() const;

    // Cylinder queries; word length <= depth.
    double cylinderMass(const std::vector<uint8_t>& word) const;
    double cylinderLength(const std::vector<uint8_t>& word) const;
    // Embedded mode: {left, length} of the word's interval.
    std::pair<double, double> cylinderInterval(const std::vector<uint8_t>& word) const;

    double ballMass(const Point& x, double r) const override;
    Point sample(Rng& rng) const override;
    double minResolvableRadius() const override;

    // Symbolic mode: mass of the generation-n cylinder containing x.
    double ballMassAtGeneration(const Point& x, int generation) const;

    const std::vector<LevelRule>& levelRules() const;
    const std::vector<std::vector<Node>>& explicitLevels() const;

private:
    CylinderMeasure() = default;

    double ballMassEmbedded(double lo, double hi) const;
    const Node& nodeAt(int level, uint64_t index) const;

    Mode mode_ = Mode::Symbolic;
    int arity_ = 2;
    int depth_ = 0;
    std::vector<LevelRule> rules_;             // level-uniform backend
    std::vector<std::vector<Node>> levels_;    // explicit backend
    double minLeafLength_ = 0.0;
};

// Deranged Cantor constructions (binary, embedded in [0,1], middle gap).
// Ratios must lie in (0, 1/2] so the two children fit disjointly.
CylinderMeasure buildDerangedCantor(double ratio0, double ratio1, double mass0, double mass1,
                                    int depth);
CylinderMeasure buildDerangedCantor(
    const std::function<std::array<ChildSpec, 2>(int level)>& levelRule, int depth);

// Bernoulli product measure on the full coding space (symbolic mode).
CylinderMeasure buildBernoulli(const BernoulliSpec& spec);
CylinderMeasure buildUniformBernoulli(int arity, int depth);

// Symbolic binary measure whose mass rule alternates between (pa, 1-pa) and
// (pb, 1-pb) over level blocks of length 2^j.
CylinderMeasure buildBlockOscillating(double pa, double pb, int depth);

// Symbolic binary measure splitting the space in two halves of equal mass
// that carry Bernoulli(pLow) and Bernoulli(pHigh) conditionals. With
// different branch entropies the local dimension is genuinely bimodal, so
// the lower Hausdorff estimates separate across sample points.
CylinderMeasure buildTwoPhase(double pLow, double pHigh, int depth);

}  // namespace mfdim
