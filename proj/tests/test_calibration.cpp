#include "powerweights/calibration.hpp"
#include "powerweights/transforms.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

using namespace powerweights;
using powerweights::testing::error_code_of;
using powerweights::testing::make_weights;
using powerweights::testing::random_weights;
using powerweights::testing::reference_power;

namespace
{

double reference_statistic(std::vector<double> w, const CalibrationTarget &target)
{
    std::sort(w.begin(), w.end(), std::greater<>());
    const std::size_t k = target.kind == TargetKind::MaxWeight ? 1 : target.k;
    return std::accumulate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

double stat_at(const WeightVector &mu, const CalibrationTarget &target, double p)
{
    return concentration_statistic(power_rebalance(mu, PowerRule{p}), target);
}

} // namespace

TEST(ConcentrationStatistic, Examples)
{
    EXPECT_DOUBLE_EQ(concentration_statistic(make_weights({0.7, 0.3}), CalibrationTarget::max_weight(0.5)),
                     0.7);
    EXPECT_DOUBLE_EQ(concentration_statistic(make_weights({0.4, 0.3, 0.2, 0.1}),
                                             CalibrationTarget::top_k_sum(2, 0.5)),
                     0.7);
    const auto eq = make_weights(std::vector<double>(8, 1.0));
    EXPECT_DOUBLE_EQ(concentration_statistic(eq, CalibrationTarget::top_k_sum(3, 0.5)), 3.0 / 8.0);
    // ties at the k-th position are harmless
    EXPECT_DOUBLE_EQ(concentration_statistic(make_weights({0.3, 0.3, 0.3, 0.1}),
                                             CalibrationTarget::top_k_sum(2, 0.5)),
                     0.6);
}

TEST(ConcentrationStatistic, Errors)
{
    const auto mu = make_weights({0.7, 0.3});
    EXPECT_EQ(error_code_of([&] { concentration_statistic(mu, CalibrationTarget::top_k_sum(3, 0.5)); }),
              ErrorCode::KExceedsN);
    EXPECT_EQ(error_code_of([&] { concentration_statistic(mu, CalibrationTarget::top_k_sum(0, 0.5)); }),
              ErrorCode::InvalidTarget);
}

TEST(SolveExponent, AlreadySatisfied)
{
    const auto r = solve_exponent(make_weights({0.7, 0.3}), CalibrationTarget::max_weight(0.70));
    EXPECT_EQ(r.p_star, 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_DOUBLE_EQ(r.achieved, 0.7);
}

TEST(SolveExponent, TwoStockClosedForm)
{
    // (0.7/0.3)^p = 0.6/0.4  =>  p = ln 1.5 / ln(7/3)
    const double closed = std::log(1.5) / std::log(7.0 / 3.0);
    EXPECT_NEAR(closed, 0.47853904401797065, 1e-15);

    // brute-force grid scan with the reference formula
    double grid_best = 0.0;
    for (int i = 0; i <= 100000; ++i)
    {
        const double p = i / 100000.0;
        if (reference_power({0.7, 0.3}, p)[0] <= 0.6)
            grid_best = p;
    }
    EXPECT_NEAR(grid_best, closed, 1e-5);

    const auto r = solve_exponent(make_weights({0.7, 0.3}), CalibrationTarget::max_weight(0.60));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.p_star, closed, 1e-9);
    EXPECT_NEAR(r.achieved, 0.60, 1e-9);
    EXPECT_LE(r.achieved, 0.60 + kBoundSlack);
    EXPECT_LE(r.iterations, kMaxSolveIterations);
}

TEST(SolveExponent, Infeasible)
{
    const auto mu = make_weights({0.7, 0.3});
    EXPECT_EQ(error_code_of([&] { solve_exponent(mu, CalibrationTarget::max_weight(0.40)); }),
              ErrorCode::Infeasible);
    // zeros are excluded from the equal-weight floor: 1/m with m = 2
    const auto with_zero = make_weights({0.6, 0.4, 0.0});
    EXPECT_EQ(error_code_of([&] { solve_exponent(with_zero, CalibrationTarget::max_weight(0.45)); }),
              ErrorCode::Infeasible);
    // exactly at the floor is feasible
    EXPECT_NEAR(solve_exponent(mu, CalibrationTarget::max_weight(0.5)).achieved, 0.5, 1e-8);
}

TEST(SolveExponent, ArgumentErrors)
{
    const auto mu = make_weights({0.7, 0.3});
    EXPECT_EQ(error_code_of([&] { solve_exponent(mu, CalibrationTarget::max_weight(0.6), 0.0); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(error_code_of([&] { solve_exponent(mu, CalibrationTarget::max_weight(1.0)); }),
              ErrorCode::InvalidTarget);
    EXPECT_EQ(error_code_of([&] { solve_exponent(mu, CalibrationTarget::top_k_sum(5, 0.6)); }),
              ErrorCode::KExceedsN);
}

TEST(SolveExponent, IterationCapRaisesNonConvergence)
{
    const auto mu = make_weights({0.7, 0.3});
    SolveOptions options;
    options.max_iterations = 5;
    EXPECT_EQ(error_code_of([&] { solve_exponent(mu, CalibrationTarget::max_weight(0.6), options); }),
              ErrorCode::NonConvergence);
    // the default cap is far above what a 1e-10 bracket needs
    EXPECT_LT(solve_exponent(mu, CalibrationTarget::max_weight(0.6)).iterations, 40u);
}

TEST(SolveExponent, BracketInvariant)
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto mu = random_weights(rng, {10, 100});
        const auto target = CalibrationTarget::top_k_sum(6, 0.5 * (6.0 / mu.size() + concentration_statistic(
                                                                        mu, CalibrationTarget::top_k_sum(6, 0.5))));
        if (target.bound >= concentration_statistic(mu, target))
            continue;
        std::size_t steps = 0;
        SolveOptions options;
        options.observer = [&](double lo, double hi) {
            ++steps;
            EXPECT_LT(lo, hi);
            EXPECT_LE(stat_at(mu, target, lo) - target.bound, 0.0);
            EXPECT_GT(stat_at(mu, target, hi) - target.bound, 0.0);
        };
        solve_exponent(mu, target, options);
        EXPECT_GT(steps, 0u);
    }
}

TEST(SolveExponent, RandomCasesMatchGridOracle)
{
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    int solved = 0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto mu = random_weights(rng, {2, 100});
        const bool top_k = trial % 2 == 1 && mu.size() >= 6;
        const auto probe = top_k ? CalibrationTarget::top_k_sum(6, 0.5) : CalibrationTarget::max_weight(0.5);
        const double floor = reference_statistic(reference_power(mu.weights(), 0.0), probe);
        const double ceiling = reference_statistic(mu.weights(), probe);
        if (ceiling - floor < 1e-6)
            continue;
        CalibrationTarget target = probe;
        target.bound = floor + frac(rng) * (ceiling - floor);

        const auto r = solve_exponent(mu, target);
        ++solved;
        ASSERT_TRUE(r.converged);
        EXPECT_LE(stat_at(mu, target, r.p_star), target.bound + 1e-8);
        EXPECT_GT(stat_at(mu, target, std::min(r.p_star + 1e-9, 1.0)), target.bound - 1e-8);

        // independent oracle: largest p on a 1e-4 grid meeting the bound
        double grid_best = 0.0;
        for (int i = 0; i <= 10000; ++i)
        {
            const double p = i / 10000.0;
            if (reference_statistic(reference_power(mu.weights(), p), target) <= target.bound)
                grid_best = p;
        }
        EXPECT_GE(r.p_star, grid_best - 1e-9);
        EXPECT_LE(r.p_star, grid_best + 1e-4 + 1e-9);
    }
    EXPECT_GT(solved, 80);
}

TEST(SolveExponent, PermutationInvariant)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial)
    {
        const auto mu = random_weights(rng, {7, 60});
        const auto target = CalibrationTarget::top_k_sum(
            6, 0.5 * (6.0 / mu.size() + concentration_statistic(mu, CalibrationTarget::top_k_sum(6, 0.5))));
        auto entries = mu.entries();
        std::shuffle(entries.begin(), entries.end(), rng);
        const WeightVector shuffled(entries);
        const auto a = solve_exponent(mu, target);
        const auto b = solve_exponent(shuffled, target);
        EXPECT_NEAR(a.p_star, b.p_star, kDefaultSolveTolerance * 2);
    }
}

TEST(SolveExponent, Deterministic)
{
    std::mt19937_64 rng(24);
    const auto mu = random_weights(rng, {50, 50});
    const auto target = CalibrationTarget::max_weight(1.5 / 50.0);
    const auto a = solve_exponent(mu, target);
    const auto b = solve_exponent(mu, target);
    EXPECT_EQ(a.p_star, b.p_star);
    EXPECT_EQ(a.iterations, b.iterations);
}
