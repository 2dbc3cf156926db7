/**
 * @file weights.hpp
 * @brief Index constituents and validated weight vectors.
 *
 * A WeightVector is an ordered list of (identifier, weight) pairs with
 * weights in [0,1] summing to one. Zero weights are kept in place so that
 * before/after vectors stay index-aligned.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace powerweights
{

/// Absolute tolerance on the sum of a WeightVector.
inline constexpr double kSumTolerance = 1e-12;

struct Constituent
{
    std::string identifier;
    double market_cap = 0.0;
    std::optional<double> price;
    std::optional<double> shares_outstanding;

    /// Throws InvalidConstituent for an empty identifier, NegativeMarketCap
    /// for a negative or non-finite cap.
    static Constituent from_market_cap(std::string identifier, double market_cap);

    /// market_cap = price * shares. Both must be positive and finite.
    static Constituent from_price_shares(std::string identifier, double price, double shares);
};

struct WeightEntry
{
    std::string identifier;
    double weight = 0.0;

    friend bool operator==(const WeightEntry &, const WeightEntry &) = default;
};

class WeightVector
{
public:
    /// Validates: nonempty, unique nonempty identifiers, every weight in
    /// [0,1], sum within kSumTolerance of one. Throws InvalidWeights or
    /// DuplicateIdentifier.
    explicit WeightVector(std::vector<WeightEntry> entries);

    /// Pairs identifiers with weights positionally; sizes must match.
    static WeightVector from_parts(const std::vector<std::string> &identifiers,
                                   std::span<const double> weights);

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<WeightEntry> &entries() const noexcept { return entries_; }
    const std::string &identifier(std::size_t i) const { return entries_.at(i).identifier; }
    double weight(std::size_t i) const { return entries_.at(i).weight; }

    std::vector<double> weights() const;
    std::vector<std::string> identifiers() const;

    /// Position of an identifier, if present.
    std::optional<std::size_t> find(const std::string &identifier) const;

    double max_weight() const;
    /// Number of strictly positive weights.
    std::size_t positive_count() const;

    /// Same identifiers and order, new weights. Validates the result.
    WeightVector with_weights(std::span<const double> weights) const;

    friend bool operator==(const WeightVector &, const WeightVector &) = default;

private:
    std::vector<WeightEntry> entries_;
};

/// Compensated (Neumaier) sum.
double accurate_sum(std::span<const double> values) noexcept;

/// Divides every entry by the total. Throws NegativeEntry for a negative or
/// non-finite entry and ZeroAggregate when the total is zero.
std::vector<double> normalize(std::span<const double> raw);

/// weight_i = cap_i / sum(cap). Throws EmptyUniverse, ZeroAggregate,
/// DuplicateIdentifier or NegativeMarketCap.
WeightVector weights_from_market_caps(std::span<const Constituent> universe);

} // namespace powerweights
