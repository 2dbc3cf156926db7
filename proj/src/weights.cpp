#include "powerweights/weights.hpp"

#include "powerweights/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace powerweights
{

Constituent Constituent::from_market_cap(std::string identifier, double market_cap)
{
    if (identifier.empty())
        throw Error(ErrorCode::InvalidConstituent, "constituent identifier is empty");
    if (!std::isfinite(market_cap) || market_cap < 0.0)
        throw Error(ErrorCode::NegativeMarketCap,
                    "market cap of '" + identifier + "' must be finite and nonnegative");
    Constituent c;
    c.identifier = std::move(identifier);
    c.market_cap = market_cap;
    return c;
}

Constituent Constituent::from_price_shares(std::string identifier, double price, double shares)
{
    if (identifier.empty())
        throw Error(ErrorCode::InvalidConstituent, "constituent identifier is empty");
    if (!std::isfinite(price) || price <= 0.0 || !std::isfinite(shares) || shares <= 0.0)
        throw Error(ErrorCode::InvalidConstituent,
                    "price and shares of '" + identifier + "' must be positive and finite");
    Constituent c;
    c.identifier = std::move(identifier);
    c.price = price;
    c.shares_outstanding = shares;
    c.market_cap = price * shares;
    if (!std::isfinite(c.market_cap))
        throw Error(ErrorCode::InvalidConstituent,
                    "market cap of '" + c.identifier + "' overflows");
    return c;
}

double accurate_sum(std::span<const double> values) noexcept
{
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values)
    {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    return sum + carry;
}

WeightVector::WeightVector(std::vector<WeightEntry> entries) : entries_(std::move(entries))
{
    if (entries_.empty())
        throw Error(ErrorCode::InvalidWeights, "weight vector is empty");

    std::unordered_set<std::string> seen;
    seen.reserve(entries_.size());
    std::vector<double> w;
    w.reserve(entries_.size());
    for (const auto &e : entries_)
    {
        if (e.identifier.empty())
            throw Error(ErrorCode::InvalidWeights, "weight vector has an empty identifier");
        if (!seen.insert(e.identifier).second)
            throw Error(ErrorCode::DuplicateIdentifier, "duplicate identifier '" + e.identifier + "'");
        if (!(e.weight >= 0.0 && e.weight <= 1.0))
            throw Error(ErrorCode::InvalidWeights,
                        "weight of '" + e.identifier + "' is outside [0,1]");
        w.push_back(e.weight);
    }
    const double total = accurate_sum(w);
    if (std::abs(total - 1.0) > kSumTolerance)
        throw Error(ErrorCode::InvalidWeights,
                    "weights sum to " + std::to_string(total) + ", not 1");
}

WeightVector WeightVector::from_parts(const std::vector<std::string> &identifiers,
                                      std::span<const double> weights)
{
    if (identifiers.size() != weights.size())
        throw Error(ErrorCode::InvalidWeights, "identifier and weight counts differ");
    std::vector<WeightEntry> entries;
    entries.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        entries.push_back({identifiers[i], weights[i]});
    return WeightVector(std::move(entries));
}

std::vector<double> WeightVector::weights() const
{
    std::vector<double> w;
    w.reserve(entries_.size());
    for (const auto &e : entries_)
        w.push_back(e.weight);
    return w;
}

std::vector<std::string> WeightVector::identifiers() const
{
    std::vector<std::string> ids;
    ids.reserve(entries_.size());
    for (const auto &e : entries_)
        ids.push_back(e.identifier);
    return ids;
}

std::optional<std::size_t> WeightVector::find(const std::string &identifier) const
{
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].identifier == identifier)
            return i;
    return std::nullopt;
}

double WeightVector::max_weight() const
{
    double m = 0.0;
    for (const auto &e : entries_)
        m = std::max(m, e.weight);
    return m;
}

std::size_t WeightVector::positive_count() const
{
    return static_cast<std::size_t>(std::count_if(
        entries_.begin(), entries_.end(), [](const WeightEntry &e) { return e.weight > 0.0; }));
}

WeightVector WeightVector::with_weights(std::span<const double> weights) const
{
    if (weights.size() != entries_.size())
        throw Error(ErrorCode::InvalidWeights, "weight count does not match identifiers");
    std::vector<WeightEntry> entries = entries_;
    for (std::size_t i = 0; i < entries.size(); ++i)
        entries[i].weight = weights[i];
    return WeightVector(std::move(entries));
}

std::vector<double> normalize(std::span<const double> raw)
{
    for (double v : raw)
        if (!std::isfinite(v) || v < 0.0)
            throw Error(ErrorCode::NegativeEntry, "normalize: entries must be finite and nonnegative");
    const double total = accurate_sum(raw);
    if (!(total > 0.0))
        throw Error(ErrorCode::ZeroAggregate, "normalize: entries sum to zero");
    std::vector<double> out;
    out.reserve(raw.size());
    for (double v : raw)
        out.push_back(v / total);
    return out;
}

WeightVector weights_from_market_caps(std::span<const Constituent> universe)
{
    if (universe.empty())
        throw Error(ErrorCode::EmptyUniverse, "universe has no constituents");

    std::unordered_set<std::string> seen;
    std::vector<std::string> ids;
    std::vector<double> caps;
    ids.reserve(universe.size());
    caps.reserve(universe.size());
    for (const auto &c : universe)
    {
        if (!seen.insert(c.identifier).second)
            throw Error(ErrorCode::DuplicateIdentifier, "duplicate identifier '" + c.identifier + "'");
        if (!std::isfinite(c.market_cap) || c.market_cap < 0.0)
            throw Error(ErrorCode::NegativeMarketCap,
                        "market cap of '" + c.identifier + "' is negative");
        ids.push_back(c.identifier);
        caps.push_back(c.market_cap);
    }
    if (!(accurate_sum(caps) > 0.0))
        throw Error(ErrorCode::ZeroAggregate, "all market caps are zero");
    return WeightVector::from_parts(ids, normalize(caps));
}

} // namespace powerweights
