/**
 * @file diagnostics.hpp
 * @brief Before/after comparison of a rebalance.
 *
 * Detects the two failure modes of cap-and-redistribute reweighting (a
 * smaller constituent overtaking a larger one; the largest weight going up)
 * and reports turnover and concentration metrics alongside.
 */

#pragma once

#include "powerweights/transforms.hpp"
#include "powerweights/weights.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace powerweights
{

inline constexpr double kDefaultReportingP = 0.5;
inline constexpr std::array<std::size_t, 4> kReportedTopK{1, 5, 6, 10};

/// A pair whose before-weights are strictly ordered one way and whose
/// after-weights are strictly ordered the other way. "low" is the
/// constituent with the smaller before-weight.
struct OrderViolation
{
    std::string identifier_low;
    std::string identifier_high;
    double mu_low = 0.0;
    double mu_high = 0.0;
    double eta_low = 0.0;
    double eta_high = 0.0;
};

struct ConcentrationMetrics
{
    double hhi = 0.0;
    /// k -> sum of the k largest weights, for each reported k <= n.
    std::map<std::size_t, double> top_k_sums;
    double diversity = 1.0;
};

struct DiagnosticsReport
{
    std::vector<OrderViolation> order_violations;
    double max_before = 0.0;
    double max_after = 0.0;
    bool max_increased = false;
    double turnover = 0.0;
    double hhi_before = 0.0;
    double hhi_after = 0.0;
    std::map<std::size_t, std::pair<double, double>> top_k_sums;
    double reporting_p = kDefaultReportingP;
    double diversity_before = 1.0;
    double diversity_after = 1.0;

    bool has_pathology() const { return !order_violations.empty() || max_increased; }
};

/// Every pair with mu_i < mu_j and eta_i > eta_j, matched by identifier.
/// Throws IdentifierMismatch if the identifier sets differ.
std::vector<OrderViolation> find_order_violations(const WeightVector &mu, const WeightVector &eta);

/// One-way turnover 0.5 * sum |eta_i - mu_i| over the union of identifiers;
/// an identifier present on one side only counts its full weight.
double turnover(const WeightVector &mu, const WeightVector &eta);

double hhi(const WeightVector &w);

/// D_p(w) = (sum w_i^p)^(1/p). Throws InvalidArgument unless 0 < p < 1.
double diversity(const WeightVector &w, double p = kDefaultReportingP);

ConcentrationMetrics concentration_metrics(const WeightVector &w, double reporting_p = kDefaultReportingP);

DiagnosticsReport diagnose(const WeightVector &mu, const WeightVector &eta,
                           double reporting_p = kDefaultReportingP);

struct MethodComparison
{
    RebalanceRule rule;
    WeightVector eta;
    DiagnosticsReport report;
};

/// Applies each rule to mu in order. A failing rule is rethrown with the
/// same code and its position prefixed to the message.
std::vector<MethodComparison> compare_methods(const WeightVector &mu,
                                              const std::vector<RebalanceRule> &rules,
                                              double reporting_p = kDefaultReportingP);

} // namespace powerweights
