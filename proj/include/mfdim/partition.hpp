#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mfdim/cylinder_measure.hpp"

namespace mfdim {

// Sum over generation-n cylinders of mass^q * diameter^t. Zero-mass
// cylinders are excluded: 0^q would be infinite for q <= 0 and contributes
// nothing for q > 0, so skipping keeps every sum finite and correct.
double partitionSum(const CylinderMeasure& mu, double q, double t, int n);

// tau_hat(q, n) = log(sum of mass^q over generation n) / (n log b),
// for symbolic measures with alphabet size b.
double tauEstimate(const CylinderMeasure& mu, double q, int n);

// Central difference (tau(1+h) - tau(1-h)) / 2h; default h = 1e-3.
double tauDerivativeAtOne(const CylinderMeasure& mu, int n, double h = 1e-3);

// Closed form (q-1) * sum_i p_i log_b p_i: the exact common value of the
// multifractal Hausdorff and packing dimensions of a Bernoulli product
// measure relative to itself.
double bernoulliDimensionOracle(const BernoulliSpec& spec, double q);

// Critical exponent t_n solving partitionSum(mu, q, t, n) = 1 at each depth
// (closed form for uniform diameters, bisection otherwise), extrapolated in
// 1/n by least squares; returns the intercept.
double setDimensionEstimate(const CylinderMeasure& mu, double q, std::span<const int> depths);

struct PartitionTable {
    std::vector<double> qGrid;
    int depth = 0;
    std::vector<double> tauHat;
    std::optional<std::vector<double>> tauAnalytic;  // present for Bernoulli inputs
};

// Evaluates tau_hat over the grid (parallel over grid entries, assembled in
// order); attaches analytic values when a Bernoulli spec is supplied.
PartitionTable makePartitionTable(const CylinderMeasure& mu, std::vector<double> qGrid, int depth,
                                  const std::optional<BernoulliSpec>& analytic = std::nullopt);

}  // namespace mfdim
