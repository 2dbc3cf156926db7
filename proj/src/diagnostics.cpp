#include "powerweights/diagnostics.hpp"

#include "powerweights/calibration.hpp"
#include "powerweights/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace powerweights
{

std::vector<OrderViolation> find_order_violations(const WeightVector &mu, const WeightVector &eta)
{
    if (mu.size() != eta.size())
        throw Error(ErrorCode::IdentifierMismatch, "before and after cover different constituents");

    std::unordered_map<std::string, double> eta_by_id;
    eta_by_id.reserve(eta.size());
    for (const auto &e : eta.entries())
        eta_by_id.emplace(e.identifier, e.weight);

    struct Row
    {
        const std::string *id;
        double mu;
        double eta;
    };
    std::vector<Row> rows;
    rows.reserve(mu.size());
    for (const auto &e : mu.entries())
    {
        auto it = eta_by_id.find(e.identifier);
        if (it == eta_by_id.end())
            throw Error(ErrorCode::IdentifierMismatch,
                        "'" + e.identifier + "' is missing from the after weights");
        rows.push_back({&e.identifier, e.weight, it->second});
    }

    // Sorted by (mu, eta), an inversion in eta can only span strictly
    // different mu values, and any inversion implies an adjacent one.
    std::stable_sort(rows.begin(), rows.end(), [](const Row &a, const Row &b) {
        return a.mu < b.mu || (a.mu == b.mu && a.eta < b.eta);
    });
    const bool sorted = std::adjacent_find(rows.begin(), rows.end(), [](const Row &a, const Row &b) {
                            return a.eta > b.eta;
                        }) == rows.end();
    std::vector<OrderViolation> violations;
    if (sorted)
        return violations;

    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            if (rows[i].mu < rows[j].mu && rows[i].eta > rows[j].eta)
                violations.push_back({*rows[i].id, *rows[j].id, rows[i].mu, rows[j].mu,
                                      rows[i].eta, rows[j].eta});
    return violations;
}

double turnover(const WeightVector &mu, const WeightVector &eta)
{
    std::unordered_map<std::string, double> eta_by_id;
    eta_by_id.reserve(eta.size());
    for (const auto &e : eta.entries())
        eta_by_id.emplace(e.identifier, e.weight);

    std::vector<double> diffs;
    diffs.reserve(mu.size() + eta.size());
    for (const auto &e : mu.entries())
    {
        auto it = eta_by_id.find(e.identifier);
        if (it == eta_by_id.end())
        {
            diffs.push_back(e.weight);
            continue;
        }
        diffs.push_back(std::abs(it->second - e.weight));
        eta_by_id.erase(it);
    }
    // leftovers exist only in eta; iterate eta to keep the summation order stable
    for (const auto &e : eta.entries())
        if (eta_by_id.count(e.identifier) != 0)
            diffs.push_back(e.weight);
    return std::clamp(0.5 * accurate_sum(diffs), 0.0, 1.0);
}

double hhi(const WeightVector &w)
{
    std::vector<double> sq;
    sq.reserve(w.size());
    for (const auto &e : w.entries())
        sq.push_back(e.weight * e.weight);
    return accurate_sum(sq);
}

double diversity(const WeightVector &w, double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorCode::InvalidArgument, "diversity exponent must lie in (0,1)");
    std::vector<double> powered;
    powered.reserve(w.size());
    for (const auto &e : w.entries())
        powered.push_back(power_weight(e.weight, p));
    return std::pow(accurate_sum(powered), 1.0 / p);
}

ConcentrationMetrics concentration_metrics(const WeightVector &w, double reporting_p)
{
    ConcentrationMetrics m;
    m.hhi = hhi(w);
    const auto weights = w.weights();
    for (std::size_t k : kReportedTopK)
        if (k <= w.size())
            m.top_k_sums[k] = top_k_sum(weights, k);
    m.diversity = diversity(w, reporting_p);
    return m;
}

DiagnosticsReport diagnose(const WeightVector &mu, const WeightVector &eta, double reporting_p)
{
    DiagnosticsReport r;
    r.order_violations = find_order_violations(mu, eta);
    r.max_before = mu.max_weight();
    r.max_after = eta.max_weight();
    r.max_increased = r.max_after > r.max_before + kSumTolerance;
    r.turnover = turnover(mu, eta);

    const auto before = concentration_metrics(mu, reporting_p);
    const auto after = concentration_metrics(eta, reporting_p);
    r.hhi_before = before.hhi;
    r.hhi_after = after.hhi;
    for (const auto &[k, value] : before.top_k_sums)
        r.top_k_sums[k] = {value, after.top_k_sums.at(k)};
    r.reporting_p = reporting_p;
    r.diversity_before = before.diversity;
    r.diversity_after = after.diversity;
    return r;
}

std::vector<MethodComparison> compare_methods(const WeightVector &mu,
                                              const std::vector<RebalanceRule> &rules,
                                              double reporting_p)
{
    std::vector<MethodComparison> out;
    out.reserve(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i)
    {
        try
        {
            auto eta = apply_rule(mu, rules[i]);
            auto report = diagnose(mu, eta, reporting_p);
            out.push_back({rules[i], std::move(eta), std::move(report)});
        }
        catch (const Error &e)
        {
            throw Error(e.code(), "rule " + std::to_string(i + 1) + " (" + describe(rules[i]) +
                                      "): " + e.what());
        }
    }
    return out;
}

} // namespace powerweights
