/**
 * @file calibration.hpp
 * @brief Choose the power exponent p so that the rebalanced weights meet a
 *        concentration bound.
 *
 * Concentration (largest weight, or sum of the k largest) is nondecreasing in
 * p, so the largest admissible p is found by bisection on [0,1].
 */

#pragma once

#include "powerweights/weights.hpp"

#include <cstddef>
#include <functional>

namespace powerweights
{

inline constexpr double kDefaultSolveTolerance = 1e-10;
inline constexpr std::size_t kMaxSolveIterations = 200;
/// Slack allowed on the achieved statistic.
inline constexpr double kBoundSlack = 1e-8;

enum class TargetKind
{
    MaxWeight,
    TopKSum,
};

struct CalibrationTarget
{
    TargetKind kind = TargetKind::MaxWeight;
    std::size_t k = 1; ///< only read for TopKSum
    double bound = 1.0;

    static CalibrationTarget max_weight(double bound) { return {TargetKind::MaxWeight, 1, bound}; }
    static CalibrationTarget top_k_sum(std::size_t k, double bound) { return {TargetKind::TopKSum, k, bound}; }
};

struct CalibrationResult
{
    double p_star = 1.0;
    double achieved = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Sum of the k largest values (k clipped to the vector length).
double top_k_sum(std::span<const double> weights, std::size_t k);

/// Largest weight, or sum of the k largest; the bound is not consulted.
/// Throws InvalidTarget for k == 0 and KExceedsN when k > n.
double concentration_statistic(const WeightVector &mu, const CalibrationTarget &target);

/// Called after each bisection step with the current bracket.
using BracketObserver = std::function<void(double lo, double hi)>;

struct SolveOptions
{
    double tol = kDefaultSolveTolerance; ///< stop once the p-bracket is narrower
    std::size_t max_iterations = kMaxSolveIterations;
    BracketObserver observer;
};

/// Largest p in [0,1] whose power-rebalanced weights satisfy the target.
/// The bound must lie in (0,1) (InvalidTarget otherwise).
/// Throws Infeasible when even equal weighting (p = 0) exceeds the bound and
/// NonConvergence when the iteration cap is hit.
CalibrationResult solve_exponent(const WeightVector &mu, const CalibrationTarget &target,
                                 const SolveOptions &options);
CalibrationResult solve_exponent(const WeightVector &mu, const CalibrationTarget &target,
                                 double tol = kDefaultSolveTolerance);

} // namespace powerweights
