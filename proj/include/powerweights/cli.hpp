#pragma once

#include "powerweights/transforms.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace powerweights::cli
{

enum ExitCode : int
{
    kExitOk = 0,
    kExitUsage = 1,
    kExitInput = 2,
    kExitInfeasible = 3,
    kExitPathology = 4,
};

/// Parses a rule list such as "power:p=0.5;linpower:p=0.5,knot=0.02;cap".
/// Rules are separated by ';', parameters by ','. Missing cap and knot
/// parameters take their defaults; p is required for power and linpower.
/// Throws InvalidArgument on malformed input and InvalidRule on bad values.
std::vector<RebalanceRule> parse_method_spec(std::string_view spec);

/// Runs one subcommand. args excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace powerweights::cli
