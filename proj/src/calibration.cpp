#include "powerweights/calibration.hpp"

#include "powerweights/error.hpp"
#include "powerweights/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace powerweights
{

namespace
{

void validate_k(const CalibrationTarget &target, std::size_t n)
{
    if (target.kind == TargetKind::TopKSum)
    {
        if (target.k == 0)
            throw Error(ErrorCode::InvalidTarget, "top-k target needs k >= 1");
        if (target.k > n)
            throw Error(ErrorCode::KExceedsN, "top-k target has k=" + std::to_string(target.k) +
                                                  " but only " + std::to_string(n) + " constituents");
    }
}

double statistic_unchecked(std::span<const double> w, const CalibrationTarget &target)
{
    if (target.kind == TargetKind::MaxWeight)
        return *std::max_element(w.begin(), w.end());
    return top_k_sum(w, target.k);
}

void validate_target(const CalibrationTarget &target, std::size_t n)
{
    if (!(target.bound > 0.0 && target.bound < 1.0))
        throw Error(ErrorCode::InvalidTarget, "calibration bound must lie in (0,1)");
    validate_k(target, n);
}

} // namespace

double top_k_sum(std::span<const double> weights, std::size_t k)
{
    std::vector<double> sorted(weights.begin(), weights.end());
    k = std::min(k, sorted.size());
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(),
                      std::greater<>());
    return accurate_sum(std::span<const double>(sorted.data(), k));
}

double concentration_statistic(const WeightVector &mu, const CalibrationTarget &target)
{
    validate_k(target, mu.size());
    return statistic_unchecked(mu.weights(), target);
}

CalibrationResult solve_exponent(const WeightVector &mu, const CalibrationTarget &target, double tol)
{
    SolveOptions options;
    options.tol = tol;
    return solve_exponent(mu, target, options);
}

CalibrationResult solve_exponent(const WeightVector &mu, const CalibrationTarget &target,
                                 const SolveOptions &options)
{
    validate_target(target, mu.size());
    const double tol = options.tol;
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw Error(ErrorCode::InvalidArgument, "solver tolerance must be positive");

    auto statistic_at = [&](double p) {
        return statistic_unchecked(power_rebalance(mu, PowerRule{p}).weights(), target);
    };

    const double at_zero = statistic_at(0.0);
    if (at_zero > target.bound)
        throw Error(ErrorCode::Infeasible,
                    "bound " + std::to_string(target.bound) +
                        " is below the equal-weight value " + std::to_string(at_zero));

    CalibrationResult result;
    const double at_one = statistic_at(1.0);
    if (at_one <= target.bound)
    {
        result.p_star = 1.0;
        result.achieved = at_one;
        result.converged = true;
        return result;
    }

    // g(p) = statistic(p) - bound; g(lo) <= 0 < g(hi) throughout.
    double lo = 0.0;
    double hi = 1.0;
    double stat_lo = at_zero;
    double stat_hi = at_one;
    std::size_t iterations = 0;
    while (hi - lo >= tol)
    {
        if (iterations == options.max_iterations)
            throw Error(ErrorCode::NonConvergence,
                        "exponent bisection exceeded " + std::to_string(options.max_iterations) +
                            " iterations");
        ++iterations;
        const double mid = lo + 0.5 * (hi - lo);
        const double stat_mid = statistic_at(mid);
        const double g = stat_mid - target.bound;
        if (g <= 0.0)
        {
            lo = mid;
            stat_lo = stat_mid;
        }
        else
        {
            hi = mid;
            stat_hi = stat_mid;
        }
        if (options.observer)
            options.observer(lo, hi);
        if (std::abs(g) < 1e-10)
            break;
    }

    result.iterations = iterations;
    result.converged = true;
    if (stat_hi <= target.bound + kBoundSlack)
    {
        result.p_star = hi;
        result.achieved = stat_hi;
    }
    else
    {
        result.p_star = lo;
        result.achieved = stat_lo;
    }
    return result;
}

} // namespace powerweights
