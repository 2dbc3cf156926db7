#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace powerweights
{

enum class ErrorCode
{
    EmptyUniverse,
    ZeroAggregate,
    DuplicateIdentifier,
    NegativeMarketCap,
    NegativeEntry,
    InvalidConstituent,
    InvalidWeights,
    InvalidRule,
    AllWeightsZero,
    DegenerateComplement,
    InvalidTarget,
    KExceedsN,
    Infeasible,
    NonConvergence,
    IdentifierMismatch,
    InvalidArgument,
    MalformedHeader,
    MalformedRow,
    NonFiniteNumber,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's exit-code mapping) can branch on kind, not text.
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace powerweights
