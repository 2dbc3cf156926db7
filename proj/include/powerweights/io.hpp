/**
 * @file io.hpp
 * @brief Universe CSV ingestion and rebalance report serialization.
 *
 * Universe files use one of two literal headers:
 *
 *     id,market_cap
 *     id,price,shares
 *
 * Report files are CSV (id,weight_before,weight_after,delta followed by
 * "# key=value" summary lines) or JSON ({schema_version, method, params,
 * summary, rows}). Both render numbers as shortest round-trip decimals.
 */

#pragma once

#include "powerweights/diagnostics.hpp"
#include "powerweights/transforms.hpp"
#include "powerweights/weights.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace powerweights
{

inline constexpr int kReportSchemaVersion = 1;

/// Weight-file sums closer to one than this are accepted after renormalizing;
/// anything further off is rejected.
inline constexpr double kWeightFileRejectTolerance = 1e-3;

std::vector<Constituent> parse_universe(std::istream &in);
std::vector<Constituent> parse_universe_file(const std::filesystem::path &path);

struct RebalanceReport
{
    RebalanceRule rule;
    WeightVector before;
    WeightVector after;
    DiagnosticsReport summary;
};

RebalanceReport make_rebalance_report(const WeightVector &mu, const RebalanceRule &rule,
                                      double reporting_p = kDefaultReportingP);

enum class ReportFormat
{
    Csv,
    Json,
};

void write_report_csv(std::ostream &out, const RebalanceReport &report);
void write_report_json(std::ostream &out, const RebalanceReport &report);
void write_report(std::ostream &out, const RebalanceReport &report, ReportFormat format);

/// {schema_version, methods: [{method, params, summary, rows}, ...]}
void write_comparison_json(std::ostream &out, const WeightVector &mu,
                           const std::vector<MethodComparison> &comparisons);

/// Which column to take when reading a report file.
enum class WeightColumn
{
    Before,
    After,
};

/// Reads a weight vector from a JSON or CSV report (taking the requested
/// column) or a bare "id,weight" CSV. Sums off by less than
/// kWeightFileRejectTolerance are renormalized.
WeightVector read_weight_file(std::istream &in, WeightColumn column);
WeightVector read_weight_file(const std::filesystem::path &path, WeightColumn column);

/// Shortest decimal that round-trips to the same double.
std::string format_exact(double value);

} // namespace powerweights
