#include "powerweights/io.hpp"

#include "powerweights/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace powerweights
{

namespace
{

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true)
    {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return fields;
}

std::string row_prefix(std::size_t line_no) { return "row " + std::to_string(line_no) + ": "; }

/// Parses a finite nonnegative real; errors name the row and column.
double parse_number(std::string_view field, std::size_t line_no, std::string_view column)
{
    double value = 0.0;
    const auto *begin = field.data();
    const auto *end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (field.empty() || ec == std::errc::invalid_argument || ptr != end)
        throw Error(ErrorCode::MalformedRow, row_prefix(line_no) + std::string(column) + " '" +
                                                 std::string(field) + "' is not a number");
    if (ec == std::errc::result_out_of_range || !std::isfinite(value))
        throw Error(ErrorCode::NonFiniteNumber, row_prefix(line_no) + std::string(column) + " '" +
                                                    std::string(field) + "' is not finite");
    if (value < 0.0)
        throw Error(ErrorCode::MalformedRow, row_prefix(line_no) + std::string(column) + " '" +
                                                 std::string(field) + "' is negative");
    return value;
}

bool is_skippable(std::string_view line)
{
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

std::ifstream open_input(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    return in;
}

ordered_json params_json(const RebalanceRule &rule)
{
    ordered_json params = ordered_json::object();
    if (const auto *r = std::get_if<PowerRule>(&rule))
    {
        params["p"] = r->p;
    }
    else if (const auto *r = std::get_if<LinearizedPowerRule>(&rule))
    {
        params["p"] = r->p;
        params["knot"] = r->knot;
    }
    else if (const auto *r = std::get_if<CapRule>(&rule))
    {
        params["threshold"] = r->threshold;
        params["target_aggregate"] = r->target_aggregate;
    }
    return params;
}

WeightVector finish_weights(std::vector<std::string> ids, std::vector<double> weights)
{
    if (ids.empty())
        throw Error(ErrorCode::InvalidWeights, "weight file has no rows");
    std::unordered_set<std::string> seen;
    for (const auto &id : ids)
        if (!seen.insert(id).second)
            throw Error(ErrorCode::DuplicateIdentifier, "duplicate identifier '" + id + "'");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw Error(ErrorCode::InvalidWeights, "weight file has a negative or non-finite weight");

    const double total = accurate_sum(weights);
    const double deviation = std::abs(total - 1.0);
    if (deviation >= kWeightFileRejectTolerance)
        throw Error(ErrorCode::InvalidWeights,
                    "weights sum to " + format_exact(total) + "; too far from 1 to renormalize");
    if (deviation > kSumTolerance)
        weights = normalize(weights);
    return WeightVector::from_parts(ids, weights);
}

WeightVector read_weight_json(const std::string &text, WeightColumn column)
{
    ordered_json doc;
    try
    {
        doc = ordered_json::parse(text);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorCode::MalformedRow, std::string("report json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
        throw Error(ErrorCode::MalformedHeader, "report json has no rows array");
    if (doc.value("schema_version", 0) != kReportSchemaVersion)
        throw Error(ErrorCode::MalformedHeader, "report json has an unsupported schema_version");

    const char *key = column == WeightColumn::Before ? "weight_before" : "weight_after";
    std::vector<std::string> ids;
    std::vector<double> weights;
    std::size_t index = 0;
    for (const auto &row : doc["rows"])
    {
        ++index;
        if (!row.is_object() || !row.contains("id") || !row["id"].is_string() || !row.contains(key) ||
            !row[key].is_number())
            throw Error(ErrorCode::MalformedRow,
                        "report json: rows[" + std::to_string(index - 1) + "] lacks id or " + key);
        ids.push_back(row["id"].get<std::string>());
        weights.push_back(row[key].get<double>());
    }
    return finish_weights(std::move(ids), std::move(weights));
}

WeightVector read_weight_csv(const std::string &text, WeightColumn column)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> weight_index;
    std::size_t field_count = 0;
    std::vector<std::string> ids;
    std::vector<double> weights;
    while (std::getline(in, line))
    {
        ++line_no;
        if (is_skippable(line))
            continue;
        const auto fields = split_fields(line);
        if (!weight_index)
        {
            if (fields.size() == 2 && fields[0] == "id" && fields[1] == "weight")
                weight_index = 1;
            else if (fields.size() == 4 && fields[0] == "id" && fields[1] == "weight_before" &&
                     fields[2] == "weight_after" && fields[3] == "delta")
                weight_index = column == WeightColumn::Before ? 1 : 2;
            else
                throw Error(ErrorCode::MalformedHeader,
                            "expected header 'id,weight' or 'id,weight_before,weight_after,delta', got '" +
                                std::string(trim(line)) + "'");
            field_count = fields.size();
            continue;
        }
        if (fields.size() != field_count)
            throw Error(ErrorCode::MalformedRow, row_prefix(line_no) + "expected " +
                                                     std::to_string(field_count) + " fields");
        if (fields[0].empty())
            throw Error(ErrorCode::MalformedRow, row_prefix(line_no) + "empty identifier");
        ids.emplace_back(fields[0]);
        weights.push_back(parse_number(fields[*weight_index], line_no, "weight"));
    }
    if (!weight_index)
        throw Error(ErrorCode::MalformedHeader, "weight file has no header");
    return finish_weights(std::move(ids), std::move(weights));
}

} // namespace

std::string format_exact(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::vector<Constituent> parse_universe(std::istream &in)
{
    enum class Schema
    {
        MarketCap,
        PriceShares,
    };

    std::string line;
    std::size_t line_no = 0;
    std::optional<Schema> schema;
    std::vector<Constituent> out;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!schema)
        {
            if (trim(line).empty())
                continue;
            const auto header = split_fields(line);
            if (header == std::vector<std::string_view>{"id", "market_cap"})
                schema = Schema::MarketCap;
            else if (header == std::vector<std::string_view>{"id", "price", "shares"})
                schema = Schema::PriceShares;
            else
                throw Error(ErrorCode::MalformedHeader,
                            "expected header 'id,market_cap' or 'id,price,shares', got '" +
                                std::string(trim(line)) + "'");
            continue;
        }
        if (trim(line).empty())
            continue;

        const auto fields = split_fields(line);
        const std::size_t expected = *schema == Schema::MarketCap ? 2 : 3;
        if (fields.size() != expected)
            throw Error(ErrorCode::MalformedRow, row_prefix(line_no) + "expected " +
                                                     std::to_string(expected) + " fields, got " +
                                                     std::to_string(fields.size()));
        if (fields[0].empty())
            throw Error(ErrorCode::MalformedRow, row_prefix(line_no) + "empty identifier");
        std::string id(fields[0]);
        if (!seen.insert(id).second)
            throw Error(ErrorCode::DuplicateIdentifier,
                        row_prefix(line_no) + "duplicate identifier '" + id + "'");

        if (*schema == Schema::MarketCap)
        {
            out.push_back(Constituent::from_market_cap(std::move(id),
                                                       parse_number(fields[1], line_no, "market_cap")));
            continue;
        }
        const double price = parse_number(fields[1], line_no, "price");
        const double shares = parse_number(fields[2], line_no, "shares");
        if (price <= 0.0 || shares <= 0.0)
            throw Error(ErrorCode::MalformedRow, row_prefix(line_no) + "price and shares must be positive");
        try
        {
            out.push_back(Constituent::from_price_shares(std::move(id), price, shares));
        }
        catch (const Error &e)
        {
            throw Error(ErrorCode::MalformedRow, row_prefix(line_no) + e.what());
        }
    }
    if (!schema)
        throw Error(ErrorCode::MalformedHeader, "input is empty; expected a header line");
    return out;
}

std::vector<Constituent> parse_universe_file(const std::filesystem::path &path)
{
    auto in = open_input(path);
    return parse_universe(in);
}

RebalanceReport make_rebalance_report(const WeightVector &mu, const RebalanceRule &rule,
                                      double reporting_p)
{
    auto eta = apply_rule(mu, rule);
    auto summary = diagnose(mu, eta, reporting_p);
    return RebalanceReport{rule, mu, std::move(eta), std::move(summary)};
}

void write_report_csv(std::ostream &out, const RebalanceReport &report)
{
    out << "id,weight_before,weight_after,delta\n";
    for (std::size_t i = 0; i < report.before.size(); ++i)
    {
        const double before = report.before.weight(i);
        const double after = report.after.weight(i);
        out << report.before.identifier(i) << ',' << format_exact(before) << ','
            << format_exact(after) << ',' << format_exact(after - before) << '\n';
    }

    const auto &s = report.summary;
    out << "# schema_version=" << kReportSchemaVersion << '\n';
    out << "# method=" << method_name(report.rule) << '\n';
    const auto params = params_json(report.rule);
    for (const auto &[key, value] : params.items())
        out << "# " << key << '=' << format_exact(value.get<double>()) << '\n';
    out << "# turnover=" << format_exact(s.turnover) << '\n';
    out << "# max_before=" << format_exact(s.max_before) << '\n';
    out << "# max_after=" << format_exact(s.max_after) << '\n';
    out << "# max_increased=" << (s.max_increased ? "true" : "false") << '\n';
    out << "# order_violation_count=" << s.order_violations.size() << '\n';
    out << "# hhi_before=" << format_exact(s.hhi_before) << '\n';
    out << "# hhi_after=" << format_exact(s.hhi_after) << '\n';
    for (const auto &[k, pair] : s.top_k_sums)
    {
        out << "# top_" << k << "_before=" << format_exact(pair.first) << '\n';
        out << "# top_" << k << "_after=" << format_exact(pair.second) << '\n';
    }
    out << "# diversity_p=" << format_exact(s.reporting_p) << '\n';
    out << "# diversity_before=" << format_exact(s.diversity_before) << '\n';
    out << "# diversity_after=" << format_exact(s.diversity_after) << '\n';
}

static ordered_json report_body(const RebalanceRule &rule, const WeightVector &before,
                                const WeightVector &after, const DiagnosticsReport &s)
{
    ordered_json top_k = ordered_json::object();
    for (const auto &[k, pair] : s.top_k_sums)
        top_k[std::to_string(k)] = ordered_json{{"before", pair.first}, {"after", pair.second}};

    ordered_json violations = ordered_json::array();
    for (const auto &v : s.order_violations)
        violations.push_back({{"identifier_low", v.identifier_low},
                              {"identifier_high", v.identifier_high},
                              {"mu_low", v.mu_low},
                              {"mu_high", v.mu_high},
                              {"eta_low", v.eta_low},
                              {"eta_high", v.eta_high}});

    ordered_json summary;
    summary["turnover"] = s.turnover;
    summary["max_before"] = s.max_before;
    summary["max_after"] = s.max_after;
    summary["max_increased"] = s.max_increased;
    summary["order_violation_count"] = s.order_violations.size();
    summary["order_violations"] = std::move(violations);
    summary["hhi_before"] = s.hhi_before;
    summary["hhi_after"] = s.hhi_after;
    summary["top_k_sums"] = std::move(top_k);
    summary["diversity_p"] = s.reporting_p;
    summary["diversity_before"] = s.diversity_before;
    summary["diversity_after"] = s.diversity_after;

    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < before.size(); ++i)
    {
        const double w_before = before.weight(i);
        const double w_after = after.weight(i);
        rows.push_back({{"id", before.identifier(i)},
                        {"weight_before", w_before},
                        {"weight_after", w_after},
                        {"delta", w_after - w_before}});
    }

    ordered_json doc;
    doc["method"] = method_name(rule);
    doc["params"] = params_json(rule);
    doc["summary"] = std::move(summary);
    doc["rows"] = std::move(rows);
    return doc;
}

void write_report_json(std::ostream &out, const RebalanceReport &report)
{
    ordered_json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc.update(report_body(report.rule, report.before, report.after, report.summary));
    out << doc.dump(2) << '\n';
}

void write_comparison_json(std::ostream &out, const WeightVector &mu,
                           const std::vector<MethodComparison> &comparisons)
{
    ordered_json methods = ordered_json::array();
    for (const auto &c : comparisons)
        methods.push_back(report_body(c.rule, mu, c.eta, c.report));
    ordered_json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["methods"] = std::move(methods);
    out << doc.dump(2) << '\n';
}

void write_report(std::ostream &out, const RebalanceReport &report, ReportFormat format)
{
    if (format == ReportFormat::Json)
        write_report_json(out, report);
    else
        write_report_csv(out, report);
}

WeightVector read_weight_file(std::istream &in, WeightColumn column)
{
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return read_weight_json(text, column);
    return read_weight_csv(text, column);
}

WeightVector read_weight_file(const std::filesystem::path &path, WeightColumn column)
{
    auto in = open_input(path);
    return read_weight_file(in, column);
}

} // namespace powerweights
