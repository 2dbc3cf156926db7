#include "powerweights/transforms.hpp"

#include "powerweights/error.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace powerweights
{

namespace
{

bool in_closed_unit(double x) { return x >= 0.0 && x <= 1.0; }

WeightVector renormalized(const WeightVector &mu, const std::vector<double> &raw)
{
    if (!(accurate_sum(raw) > 0.0))
        throw Error(ErrorCode::AllWeightsZero, "no positive weight to renormalize over");
    return mu.with_weights(normalize(raw));
}

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

void PowerRule::validate() const
{
    if (!in_closed_unit(p))
        throw Error(ErrorCode::InvalidRule, "power rule: p must lie in [0,1]");
}

void LinearizedPowerRule::validate() const
{
    if (!in_closed_unit(p))
        throw Error(ErrorCode::InvalidRule, "linearized power rule: p must lie in [0,1]");
    if (!(knot > 0.0 && knot < 1.0))
        throw Error(ErrorCode::InvalidRule, "linearized power rule: knot must lie in (0,1)");
}

void CapRule::validate() const
{
    if (!(threshold > 0.0 && threshold < target_aggregate && target_aggregate < 1.0))
        throw Error(ErrorCode::InvalidRule,
                    "cap rule: requires 0 < threshold < target_aggregate < 1");
}

std::string method_name(const RebalanceRule &rule)
{
    return std::visit(overloaded{
                          [](const PowerRule &) { return std::string("power"); },
                          [](const LinearizedPowerRule &) { return std::string("linpower"); },
                          [](const CapRule &) { return std::string("cap"); },
                      },
                      rule);
}

std::string describe(const RebalanceRule &rule)
{
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const PowerRule &r) { os << "power(p=" << r.p << ")"; },
                   [&](const LinearizedPowerRule &r) {
                       os << "linpower(p=" << r.p << ",knot=" << r.knot << ")";
                   },
                   [&](const CapRule &r) {
                       os << "cap(threshold=" << r.threshold
                          << ",target_aggregate=" << r.target_aggregate << ")";
                   },
               },
               rule);
    return os.str();
}

double power_weight(double mu, double p) noexcept
{
    if (mu <= 0.0)
        return 0.0;
    return std::exp(p * std::log(mu));
}

double linearized_power_weight(double x, double p, double knot) noexcept
{
    if (x >= knot)
        return power_weight(x, p);
    // chord of x^p through the origin and (knot, knot^p)
    return power_weight(knot, p - 1.0) * x;
}

WeightVector power_rebalance(const WeightVector &mu, const PowerRule &rule)
{
    rule.validate();
    std::vector<double> raw;
    raw.reserve(mu.size());
    for (const auto &e : mu.entries())
        raw.push_back(power_weight(e.weight, rule.p));
    return renormalized(mu, raw);
}

WeightVector linearized_power_rebalance(const WeightVector &mu, const LinearizedPowerRule &rule)
{
    rule.validate();
    std::vector<double> raw;
    raw.reserve(mu.size());
    for (const auto &e : mu.entries())
        raw.push_back(linearized_power_weight(e.weight, rule.p, rule.knot));
    return renormalized(mu, raw);
}

WeightVector cap_rebalance(const WeightVector &mu, const CapRule &rule)
{
    rule.validate();

    std::vector<double> large;
    std::vector<double> rest;
    for (const auto &e : mu.entries())
        (e.weight > rule.threshold ? large : rest).push_back(e.weight);
    if (large.empty())
        return mu;

    // The complement is summed directly rather than taken as 1 - S.
    const double large_sum = accurate_sum(large);
    const double rest_sum = accurate_sum(rest);
    if (!(rest_sum > 0.0))
        throw Error(ErrorCode::DegenerateComplement,
                    "cap rule: every positive weight exceeds the threshold; nothing absorbs the remainder");

    const double large_scale = rule.target_aggregate / large_sum;
    const double rest_scale = (1.0 - rule.target_aggregate) / rest_sum;
    std::vector<double> raw;
    raw.reserve(mu.size());
    for (const auto &e : mu.entries())
        raw.push_back(e.weight * (e.weight > rule.threshold ? large_scale : rest_scale));
    return renormalized(mu, raw);
}

WeightVector apply_rule(const WeightVector &mu, const RebalanceRule &rule)
{
    return std::visit(overloaded{
                          [&](const PowerRule &r) { return power_rebalance(mu, r); },
                          [&](const LinearizedPowerRule &r) { return linearized_power_rebalance(mu, r); },
                          [&](const CapRule &r) { return cap_rebalance(mu, r); },
                      },
                      rule);
}

} // namespace powerweights
