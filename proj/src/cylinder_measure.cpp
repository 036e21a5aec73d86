#include "mfdim/cylinder_measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfdim/errors.hpp"

namespace mfdim {

namespace {

constexpr double kMassTol = 1e-12;  // normalization tolerance (double accumulation over <= 2^24 nodes)

std::string wordToString(const std::vector<uint8_t>& word) {
    if (word.empty()) return "<root>";
    std::string s;
    s.reserve(word.size());
    for (uint8_t d : word) s += static_cast<char>('0' + d);
    return s;
}

void validateChildren(const std::vector<ChildSpec>& children, CylinderMeasure::Mode mode,
                      size_t arity, const std::string& where) {
    if (children.size() != arity)
        throw ConstructionError("node " + where + ": expected " + std::to_string(arity) +
                                " children, got " + std::to_string(children.size()));
    double fracSum = 0.0;
    for (size_t j = 0; j < children.size(); ++j) {
        const ChildSpec& c = children[j];
        const bool ratioOk = mode == CylinderMeasure::Mode::Embedded
                                 ? (c.ratio > 0.0 && c.ratio <= 0.5)
                                 : (c.ratio > 0.0 && c.ratio < 1.0);
        if (!ratioOk)
            throw ConstructionError("node " + where + ", child " + std::to_string(j) + ": ratio " +
                                    std::to_string(c.ratio) +
                                    (mode == CylinderMeasure::Mode::Embedded
                                         ? " outside (0, 1/2]; children would not fit disjointly"
                                         : " outside (0, 1)"));
        if (!(c.massFraction >= 0.0))
            throw ConstructionError("node " + where + ", child " + std::to_string(j) +
                                    ": negative mass fraction");
        fracSum += c.massFraction;
    }
    if (std::fabs(fracSum - 1.0) > kMassTol)
        throw ConstructionError("node " + where + ": child masses sum to " +
                                std::to_string(fracSum) + ", not 1");
}

}  // namespace

void BernoulliSpec::validate() const {
    if (depth < 1) throw ConstructionError("Bernoulli spec: depth must be >= 1");
    if (symbolProbabilities.size() < 2)
        throw ConstructionError("Bernoulli spec: need at least 2 symbols");
    double sum = 0.0;
    for (double p : symbolProbabilities) {
        if (!(p > 0.0))
            throw ConstructionError("Bernoulli spec: symbol probabilities must be > 0");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kMassTol)
        throw ConstructionError("Bernoulli spec: probabilities sum to " + std::to_string(sum) +
                                ", not 1");
}

CylinderMeasure CylinderMeasure::fromLevelRules(Mode mode, std::vector<LevelRule> rules) {
    if (rules.empty()) throw ConstructionError("cylinder measure: depth must be >= 1");
    const size_t arity = rules.front().size();
    if (arity < 2) throw ConstructionError("cylinder measure: arity must be >= 2");
    if (mode == Mode::Embedded && arity != 2)
        throw ConstructionError("embedded mode supports arity 2 only");
    for (size_t k = 0; k < rules.size(); ++k)
        validateChildren(rules[k], mode, arity, "level " + std::to_string(k));

    CylinderMeasure m;
    m.mode_ = mode;
    m.arity_ = static_cast<int>(arity);
    m.depth_ = static_cast<int>(rules.size());
    m.rules_ = std::move(rules);
    double len = 1.0;
    for (const LevelRule& rule : m.rules_) {
        double worst = 1.0;
        for (const ChildSpec& c : rule) worst = std::min(worst, c.ratio);
        len *= (mode == Mode::Symbolic) ? 1.0 / static_cast<double>(arity) : worst;
    }
    m.minLeafLength_ = len;
    return m;
}

CylinderMeasure CylinderMeasure::fromNodeRule(Mode mode, int arity, int depth,
                                              const NodeRule& rule) {
    if (depth < 1) throw ConstructionError("cylinder measure: depth must be >= 1");
    if (arity < 2) throw ConstructionError("cylinder measure: arity must be >= 2");
    if (mode == Mode::Embedded && arity != 2)
        throw ConstructionError("embedded mode supports arity 2 only");

    std::vector<std::vector<Node>> levels(depth + 1);
    levels[0] = {Node{1.0, 1.0, 0.0, 1.0}};
    std::vector<uint8_t> word;
    for (int k = 0; k < depth; ++k) {
        const auto& parents = levels[k];
        auto& next = levels[k + 1];
        next.resize(parents.size() * static_cast<size_t>(arity));
        word.assign(static_cast<size_t>(k), 0);
        for (size_t idx = 0; idx < parents.size(); ++idx) {
            // decode idx into the word (base-arity digits, most significant first)
            size_t rem = idx;
            for (int pos = k - 1; pos >= 0; --pos) {
                word[static_cast<size_t>(pos)] = static_cast<uint8_t>(rem % arity);
                rem /= static_cast<size_t>(arity);
            }
            const std::vector<ChildSpec> children = rule(word);
            validateChildren(children, mode, static_cast<size_t>(arity), wordToString(word));
            const Node& parent = parents[idx];
            double leftCursor = parent.left;
            for (int j = 0; j < arity; ++j) {
                Node child;
                child.ratio = children[static_cast<size_t>(j)].ratio;
                child.mass = parent.mass * children[static_cast<size_t>(j)].massFraction;
                if (mode == Mode::Embedded) {
                    child.length = parent.length * child.ratio;
                    // two children at the ends of the parent, middle gap
                    child.left = (j == 0) ? parent.left : parent.left + parent.length - child.length;
                } else {
                    child.length = parent.length / static_cast<double>(arity);
                    child.left = leftCursor;
                    leftCursor += child.length;
                }
                next[idx * static_cast<size_t>(arity) + static_cast<size_t>(j)] = child;
            }
        }
    }
    return fromExplicitLevels(mode, arity, std::move(levels));
}

CylinderMeasure CylinderMeasure::fromExplicitLevels(Mode mode, int arity,
                                                    std::vector<std::vector<Node>> levels) {
    if (levels.size() < 2) throw ConstructionError("cylinder measure: depth must be >= 1");
    if (arity < 2) throw ConstructionError("cylinder measure: arity must be >= 2");
    if (levels[0].size() != 1) throw ConstructionError("cylinder measure: exactly one root node");
    if (std::fabs(levels[0][0].mass - 1.0) > kMassTol)
        throw ConstructionError("cylinder measure: root mass must be 1");

    const size_t ar = static_cast<size_t>(arity);
    double minLeaf = 1.0;
    for (size_t k = 0; k + 1 < levels.size(); ++k) {
        if (levels[k + 1].size() != levels[k].size() * ar)
            throw ConstructionError("cylinder measure: level " + std::to_string(k + 1) +
                                    " has wrong node count");
        for (size_t idx = 0; idx < levels[k].size(); ++idx) {
            const Node& parent = levels[k][idx];
            double massSum = 0.0;
            for (size_t j = 0; j < ar; ++j) {
                const Node& child = levels[k + 1][idx * ar + j];
                if (!(child.ratio > 0.0) || child.ratio >= 1.0 ||
                    (mode == Mode::Embedded && child.ratio > 0.5))
                    throw ConstructionError("cylinder measure: node at level " +
                                            std::to_string(k + 1) + " index " + std::to_string(idx * ar + j) +
                                            ": ratio out of range");
                massSum += child.mass;
                if (mode == Mode::Embedded) {
                    if (child.left < parent.left - 1e-12 ||
                        child.left + child.length > parent.left + parent.length + 1e-12)
                        throw ConstructionError("cylinder measure: child interval escapes parent at level " +
                                                std::to_string(k + 1));
                    if (j > 0) {
                        const Node& prev = levels[k + 1][idx * ar + j - 1];
                        if (child.left < prev.left + prev.length - 1e-12)
                            throw ConstructionError("cylinder measure: sibling intervals overlap at level " +
                                                    std::to_string(k + 1));
                    }
                }
            }
            if (std::fabs(massSum - parent.mass) > kMassTol)
                throw ConstructionError("cylinder measure: children of level-" + std::to_string(k) +
                                        " node " + std::to_string(idx) + " sum to " +
                                        std::to_string(massSum) + ", parent has " +
                                        std::to_string(parent.mass));
        }
    }
    for (const Node& leaf : levels.back()) minLeaf = std::min(minLeaf, leaf.length);

    CylinderMeasure m;
    m.mode_ = mode;
    m.arity_ = arity;
    m.depth_ = static_cast<int>(levels.size()) - 1;
    m.levels_ = std::move(levels);
    m.minLeafLength_ = minLeaf;
    return m;
}

uint64_t CylinderMeasure::nodeCount() const {
    uint64_t total = 0, levelSize = 1;
    for (int k = 0; k <= depth_; ++k) {
        total += levelSize;
        levelSize *= static_cast<uint64_t>(arity_);
    }
    return total;
}

const CylinderMeasure::Node& CylinderMeasure::nodeAt(int level, uint64_t index) const {
    return levels_[static_cast<size_t>(level)][index];
}

double CylinderMeasure::cylinderMass(const std::vector<uint8_t>& word) const {
    if (static_cast<int>(word.size()) > depth_)
        throw ArgumentError("word longer than tree depth");
    for (uint8_t d : word)
        if (d >= arity_) throw ArgumentError("word digit out of alphabet");
    if (isLevelUniform()) {
        double mass = 1.0;
        for (size_t k = 0; k < word.size(); ++k) mass *= rules_[k][word[k]].massFraction;
        return mass;
    }
    uint64_t idx = 0;
    for (uint8_t d : word) idx = idx * static_cast<uint64_t>(arity_) + d;
    return nodeAt(static_cast<int>(word.size()), idx).mass;
}

double CylinderMeasure::cylinderLength(const std::vector<uint8_t>& word) const {
    if (mode_ == Mode::Symbolic)
        return std::pow(static_cast<double>(arity_), -static_cast<double>(word.size()));
    return cylinderInterval(word).second;
}

std::pair<double, double> CylinderMeasure::cylinderInterval(const std::vector<uint8_t>& word) const {
    if (mode_ != Mode::Embedded) throw ArgumentError("cylinder intervals exist in embedded mode only");
    if (static_cast<int>(word.size()) > depth_)
        throw ArgumentError("word longer than tree depth");
    if (isLevelUniform()) {
        double left = 0.0, length = 1.0;
        for (size_t k = 0; k < word.size(); ++k) {
            const ChildSpec& spec = rules_[k][word[k]];
            const double childLen = length * spec.ratio;
            if (word[k] == 1) left += length - childLen;
            length = childLen;
        }
        return {left, length};
    }
    uint64_t idx = 0;
    for (uint8_t d : word) idx = idx * static_cast<uint64_t>(arity_) + d;
    const Node& n = nodeAt(static_cast<int>(word.size()), idx);
    return {n.left, n.length};
}

double CylinderMeasure::ballMassEmbedded(double lo, double hi) const {
    // Prune on full containment / disjointness; at the deepest generation a
    // leaf counts in full as soon as its interval meets the query.
    struct Frame {
        int level;
        uint64_t index;
        double mass, left, length;
    };
    double total = 0.0;
    std::vector<Frame> stack;
    stack.push_back({0, 0, 1.0, 0.0, 1.0});
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.left > hi || f.left + f.length < lo || f.mass == 0.0) continue;
        if ((lo <= f.left && f.left + f.length <= hi) || f.level == depth_) {
            total += f.mass;
            continue;
        }
        if (isLevelUniform()) {
            const LevelRule& rule = rules_[static_cast<size_t>(f.level)];
            const double len0 = f.length * rule[0].ratio;
            const double len1 = f.length * rule[1].ratio;
            stack.push_back({f.level + 1, 0, f.mass * rule[0].massFraction, f.left, len0});
            stack.push_back(
                {f.level + 1, 0, f.mass * rule[1].massFraction, f.left + f.length - len1, len1});
        } else {
            for (int j = 0; j < arity_; ++j) {
                const uint64_t ci = f.index * static_cast<uint64_t>(arity_) + static_cast<uint64_t>(j);
                const Node& c = nodeAt(f.level + 1, ci);
                stack.push_back({f.level + 1, ci, c.mass, c.left, c.length});
            }
        }
    }
    return total;
}

double CylinderMeasure::ballMassAtGeneration(const Point& x, int generation) const {
    if (mode_ != Mode::Symbolic)
        throw ArgumentError("generation ball masses exist in symbolic mode only");
    const std::vector<uint8_t>& digits = x.digits();
    if (generation < 0) throw ArgumentError("generation must be >= 0");
    const int n = std::min(generation, depth_);
    if (static_cast<int>(digits.size()) < n)
        throw ArgumentError("point has fewer digits than requested generation");
    if (isLevelUniform()) {
        double mass = 1.0;
        for (int k = 0; k < n; ++k) {
            if (digits[static_cast<size_t>(k)] >= arity_)
                throw ArgumentError("point digit out of alphabet");
            mass *= rules_[static_cast<size_t>(k)][digits[static_cast<size_t>(k)]].massFraction;
        }
        return mass;
    }
    uint64_t idx = 0;
    for (int k = 0; k < n; ++k) {
        if (digits[static_cast<size_t>(k)] >= arity_)
            throw ArgumentError("point digit out of alphabet");
        idx = idx * static_cast<uint64_t>(arity_) + digits[static_cast<size_t>(k)];
    }
    return nodeAt(n, idx).mass;
}

double CylinderMeasure::ballMass(const Point& x, double r) const {
    if (!(r > 0.0)) throw ArgumentError("ball radius must be > 0");
    if (mode_ == Mode::Symbolic) {
        // d(x,y) <= r  <=>  common prefix length >= ceil(log_b(1/r))
        if (r >= 1.0) return 1.0;
        const double t = -std::log(r) / std::log(static_cast<double>(arity_));
        const int gen = std::max(0, static_cast<int>(std::ceil(t - 1e-9)));
        return ballMassAtGeneration(x, std::min(gen, depth_));
    }
    if (x.coords().size() != 1)
        throw ArgumentError("embedded cylinder measures live on the line");
    const double c = x.coords()[0];
    return ballMassEmbedded(c - r, c + r);
}

Point CylinderMeasure::sample(Rng& rng) const {
    std::vector<uint8_t> digits;
    digits.reserve(static_cast<size_t>(depth_));
    double left = 0.0, length = 1.0, mass = 1.0;
    uint64_t idx = 0;
    for (int k = 0; k < depth_; ++k) {
        const double u = rng.uniform() * mass;
        double cumulative = 0.0;
        int chosen = -1, lastPositive = 0;
        double childMass = 0.0, childLeft = 0.0, childLength = 0.0;
        for (int j = 0; j < arity_ && chosen < 0; ++j) {
            double cm, cl, cln;
            if (isLevelUniform()) {
                const ChildSpec& spec = rules_[static_cast<size_t>(k)][static_cast<size_t>(j)];
                cm = mass * spec.massFraction;
                cln = (mode_ == Mode::Symbolic) ? length / arity_ : length * spec.ratio;
                cl = (mode_ == Mode::Embedded && j == 1) ? left + length - cln : left;
            } else {
                const Node& c = nodeAt(k + 1, idx * static_cast<uint64_t>(arity_) + static_cast<uint64_t>(j));
                cm = c.mass;
                cl = c.left;
                cln = c.length;
            }
            if (cm > 0.0) lastPositive = j;
            cumulative += cm;
            if (u < cumulative) {
                chosen = j;
                childMass = cm;
                childLeft = cl;
                childLength = cln;
            }
        }
        if (chosen < 0) {
            // u landed past the accumulated childrens' mass (rounding); take
            // the last child that carries mass
            chosen = lastPositive;
            if (isLevelUniform()) {
                const ChildSpec& spec = rules_[static_cast<size_t>(k)][static_cast<size_t>(chosen)];
                childMass = mass * spec.massFraction;
                childLength = (mode_ == Mode::Symbolic) ? length / arity_ : length * spec.ratio;
                childLeft = (mode_ == Mode::Embedded && chosen == 1) ? left + length - childLength : left;
            } else {
                const Node& c = nodeAt(k + 1, idx * static_cast<uint64_t>(arity_) + static_cast<uint64_t>(chosen));
                childMass = c.mass;
                childLeft = c.left;
                childLength = c.length;
            }
        }
        digits.push_back(static_cast<uint8_t>(chosen));
        idx = idx * static_cast<uint64_t>(arity_) + static_cast<uint64_t>(chosen);
        mass = childMass;
        left = childLeft;
        length = childLength;
    }
    if (mode_ == Mode::Symbolic) return Point::symbolic(std::move(digits));
    return Point::scalar(left + 0.5 * length);
}

double CylinderMeasure::minResolvableRadius() const {
    if (mode_ == Mode::Symbolic)
        return std::pow(static_cast<double>(arity_), -static_cast<double>(depth_));
    return minLeafLength_;
}

const std::vector<CylinderMeasure::LevelRule>& CylinderMeasure::levelRules() const {
    if (!isLevelUniform()) throw ArgumentError("measure is not backed by level rules");
    return rules_;
}

const std::vector<std::vector<CylinderMeasure::Node>>& CylinderMeasure::explicitLevels() const {
    if (isLevelUniform()) throw ArgumentError("measure is not backed by explicit nodes");
    return levels_;
}

CylinderMeasure buildDerangedCantor(double ratio0, double ratio1, double mass0, double mass1,
                                    int depth) {
    if (depth < 1) throw ConstructionError("deranged Cantor: depth must be >= 1");
    std::vector<CylinderMeasure::LevelRule> rules(
        static_cast<size_t>(depth),
        CylinderMeasure::LevelRule{{ratio0, mass0}, {ratio1, mass1}});
    return CylinderMeasure::fromLevelRules(CylinderMeasure::Mode::Embedded, std::move(rules));
}

CylinderMeasure buildDerangedCantor(
    const std::function<std::array<ChildSpec, 2>(int level)>& levelRule, int depth) {
    if (depth < 1) throw ConstructionError("deranged Cantor: depth must be >= 1");
    std::vector<CylinderMeasure::LevelRule> rules;
    rules.reserve(static_cast<size_t>(depth));
    for (int k = 0; k < depth; ++k) {
        const std::array<ChildSpec, 2> pair = levelRule(k);
        rules.push_back({pair[0], pair[1]});
    }
    return CylinderMeasure::fromLevelRules(CylinderMeasure::Mode::Embedded, std::move(rules));
}

CylinderMeasure buildBernoulli(const BernoulliSpec& spec) {
    spec.validate();
    const double ratio = 1.0 / static_cast<double>(spec.symbolProbabilities.size());
    CylinderMeasure::LevelRule rule;
    rule.reserve(spec.symbolProbabilities.size());
    for (double p : spec.symbolProbabilities) rule.push_back({ratio, p});
    std::vector<CylinderMeasure::LevelRule> rules(static_cast<size_t>(spec.depth), rule);
    return CylinderMeasure::fromLevelRules(CylinderMeasure::Mode::Symbolic, std::move(rules));
}

CylinderMeasure buildUniformBernoulli(int arity, int depth) {
    BernoulliSpec spec;
    spec.symbolProbabilities.assign(static_cast<size_t>(arity), 1.0 / arity);
    spec.depth = depth;
    // make the probabilities sum to 1 exactly even when 1/arity is inexact
    double sum = 0.0;
    for (size_t i = 0; i + 1 < spec.symbolProbabilities.size(); ++i) sum += spec.symbolProbabilities[i];
    spec.symbolProbabilities.back() = 1.0 - sum;
    return buildBernoulli(spec);
}

CylinderMeasure buildBlockOscillating(double pa, double pb, int depth) {
    if (depth < 1) throw ConstructionError("block-oscillating measure: depth must be >= 1");
    std::vector<CylinderMeasure::LevelRule> rules;
    rules.reserve(static_cast<size_t>(depth));
    for (int k = 0; k < depth; ++k) {
        const int level = k + 1;  // blocks of length 2^j: level l sits in block floor(log2 l)
        int block = 0;
        while ((2 << block) <= level) ++block;
        const double p = (block % 2 == 0) ? pa : pb;
        rules.push_back({{0.5, p}, {0.5, 1.0 - p}});
    }
    return CylinderMeasure::fromLevelRules(CylinderMeasure::Mode::Symbolic, std::move(rules));
}

CylinderMeasure buildTwoPhase(double pLow, double pHigh, int depth) {
    if (depth < 2) throw ConstructionError("two-phase measure: depth must be >= 2");
    return CylinderMeasure::fromNodeRule(
        CylinderMeasure::Mode::Symbolic, 2, depth,
        [&](const std::vector<uint8_t>& word) -> std::vector<ChildSpec> {
            if (word.empty()) return {{0.5, 0.5}, {0.5, 0.5}};
            const double p = word[0] == 0 ? pLow : pHigh;
            return {{0.5, p}, {0.5, 1.0 - p}};
        });
}

}  // namespace mfdim
