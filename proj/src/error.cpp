#include "powerweights/error.hpp"

namespace powerweights
{

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::ZeroAggregate: return "ZeroAggregate";
    case ErrorCode::DuplicateIdentifier: return "DuplicateIdentifier";
    case ErrorCode::NegativeMarketCap: return "NegativeMarketCap";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::InvalidConstituent: return "InvalidConstituent";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidRule: return "InvalidRule";
    case ErrorCode::AllWeightsZero: return "AllWeightsZero";
    case ErrorCode::DegenerateComplement: return "DegenerateComplement";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::KExceedsN: return "KExceedsN";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::IdentifierMismatch: return "IdentifierMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonFiniteNumber: return "NonFiniteNumber";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace powerweights
