/**
 * @file transforms.hpp
 * @brief Reweighting rules for capitalization-weighted indexes.
 *
 * power:     eta_i = mu_i^p / sum_j mu_j^p, p in [0,1]. Preserves the order of
 *            weights and never raises the largest weight.
 * linpower:  same, but weights below a knot d are mapped through the chord
 *            d^(p-1) * x instead of x^p, so small constituents keep their
 *            relative proportions.
 * cap:       every weight above a threshold is scaled so the group sums to a
 *            target aggregate; the rest absorb the remainder proportionally.
 *            Neither guarantee holds for this rule.
 */

#pragma once

#include "powerweights/weights.hpp"

#include <string>
#include <variant>

namespace powerweights
{

inline constexpr double kDefaultKnot = 0.01;
inline constexpr double kDefaultCapThreshold = 0.045;
inline constexpr double kDefaultCapTarget = 0.40;

struct PowerRule
{
    double p = 1.0;

    /// Throws InvalidRule unless 0 <= p <= 1.
    void validate() const;
};

struct LinearizedPowerRule
{
    double p = 1.0;
    double knot = kDefaultKnot;

    /// Throws InvalidRule unless 0 <= p <= 1 and 0 < knot < 1.
    void validate() const;
};

struct CapRule
{
    double threshold = kDefaultCapThreshold;
    double target_aggregate = kDefaultCapTarget;

    /// Throws InvalidRule unless 0 < threshold < target_aggregate < 1.
    void validate() const;
};

using RebalanceRule = std::variant<PowerRule, LinearizedPowerRule, CapRule>;

/// "power", "linpower" or "cap".
std::string method_name(const RebalanceRule &rule);
/// Human-readable form, e.g. "power(p=0.5)".
std::string describe(const RebalanceRule &rule);

/// mu^p computed as exp(p ln mu); zero maps to zero for every p.
double power_weight(double mu, double p) noexcept;

/// Piecewise map used by the linearized rule: x^p for x >= knot, knot^(p-1) x below.
double linearized_power_weight(double x, double p, double knot) noexcept;

WeightVector power_rebalance(const WeightVector &mu, const PowerRule &rule);
WeightVector linearized_power_rebalance(const WeightVector &mu, const LinearizedPowerRule &rule);
WeightVector cap_rebalance(const WeightVector &mu, const CapRule &rule);

WeightVector apply_rule(const WeightVector &mu, const RebalanceRule &rule);

} // namespace powerweights
