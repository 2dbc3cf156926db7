#include "powerweights/cli.hpp"

#include "powerweights/calibration.hpp"
#include "powerweights/diagnostics.hpp"
#include "powerweights/error.hpp"
#include "powerweights/io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace powerweights::cli
{

namespace
{

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            return parts;
        start = pos + 1;
    }
}

/// 6 significant digits, for human-readable output.
std::string human(double value)
{
    std::ostringstream os;
    os << std::setprecision(6) << value;
    return os.str();
}

int exit_code_for(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::InvalidRule:
    case ErrorCode::InvalidTarget:
    case ErrorCode::InvalidArgument:
        return kExitUsage;
    case ErrorCode::Infeasible:
        return kExitInfeasible;
    default:
        return kExitInput;
    }
}

WeightVector load_universe_weights(const std::string &path)
{
    const auto universe = parse_universe_file(path);
    return weights_from_market_caps(universe);
}

void print_report_text(std::ostream &out, const DiagnosticsReport &r, std::size_t n)
{
    out << "constituents: " << n << '\n';
    out << "order violations: " << r.order_violations.size() << '\n';
    for (const auto &v : r.order_violations)
        out << "  " << v.identifier_low << " (" << human(v.mu_low) << " -> " << human(v.eta_low)
            << ") overtakes " << v.identifier_high << " (" << human(v.mu_high) << " -> "
            << human(v.eta_high) << ")\n";
    out << "max weight: " << human(r.max_before) << " -> " << human(r.max_after)
        << (r.max_increased ? " (increased)" : "") << '\n';
    out << "turnover: " << human(r.turnover) << '\n';
    out << "hhi: " << human(r.hhi_before) << " -> " << human(r.hhi_after) << '\n';
    for (const auto &[k, pair] : r.top_k_sums)
        out << "top-" << k << " sum: " << human(pair.first) << " -> " << human(pair.second) << '\n';
    out << "diversity D_" << human(r.reporting_p) << ": " << human(r.diversity_before) << " -> "
        << human(r.diversity_after) << '\n';
}

void print_comparison_text(std::ostream &out, const WeightVector &mu,
                           const std::vector<MethodComparison> &comparisons)
{
    std::vector<std::string> headers{"id", "before"};
    for (const auto &c : comparisons)
        headers.push_back(describe(c.rule));

    std::vector<std::vector<std::string>> table;
    for (std::size_t i = 0; i < mu.size(); ++i)
    {
        std::vector<std::string> row{mu.identifier(i), human(mu.weight(i))};
        for (const auto &c : comparisons)
            row.push_back(human(c.eta.weight(i)));
        table.push_back(std::move(row));
    }
    auto summary_row = [&](std::string label, auto before, auto after) {
        std::vector<std::string> row{std::move(label), before};
        for (const auto &c : comparisons)
            row.push_back(after(c.report));
        table.push_back(std::move(row));
    };
    summary_row("turnover", "", [](const DiagnosticsReport &r) { return human(r.turnover); });
    summary_row("max_weight", human(mu.max_weight()),
                [](const DiagnosticsReport &r) { return human(r.max_after); });
    summary_row("max_increased", "",
                [](const DiagnosticsReport &r) { return std::string(r.max_increased ? "yes" : "no"); });
    summary_row("order_violations", "",
                [](const DiagnosticsReport &r) { return std::to_string(r.order_violations.size()); });
    summary_row("hhi", human(hhi(mu)), [](const DiagnosticsReport &r) { return human(r.hhi_after); });
    const auto metrics = concentration_metrics(mu);
    for (const auto &[k, value] : metrics.top_k_sums)
        summary_row("top_" + std::to_string(k), human(value),
                    [k = k](const DiagnosticsReport &r) { return human(r.top_k_sums.at(k).second); });
    summary_row("diversity", human(metrics.diversity),
                [](const DiagnosticsReport &r) { return human(r.diversity_after); });

    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c)
        widths[c] = headers[c].size();
    for (const auto &row : table)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());

    auto print_row = [&](const std::vector<std::string> &row) {
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            if (c == 0)
                out << std::left << std::setw(static_cast<int>(widths[c])) << row[c];
            else
                out << "  " << std::right << std::setw(static_cast<int>(widths[c])) << row[c];
        }
        out << '\n';
    };
    print_row(headers);
    for (std::size_t i = 0; i < table.size(); ++i)
    {
        if (i == mu.size())
            out << '\n';
        print_row(table[i]);
    }
}

} // namespace

std::vector<RebalanceRule> parse_method_spec(std::string_view spec)
{
    std::vector<RebalanceRule> rules;
    if (trim(spec).empty())
        return rules;

    for (const auto item : split(spec, ';'))
    {
        if (item.empty())
            continue;
        const auto colon = item.find(':');
        const auto name = trim(item.substr(0, colon));

        std::optional<double> p;
        std::optional<double> knot;
        std::optional<double> threshold;
        std::optional<double> target;
        if (colon != std::string_view::npos)
        {
            for (const auto kv : split(item.substr(colon + 1), ','))
            {
                const auto eq = kv.find('=');
                if (eq == std::string_view::npos)
                    throw Error(ErrorCode::InvalidArgument, "method parameter '" + std::string(kv) +
                                                                "' is not key=value");
                const auto key = trim(kv.substr(0, eq));
                const auto text = trim(kv.substr(eq + 1));
                double value = 0.0;
                const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
                if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
                    throw Error(ErrorCode::InvalidArgument,
                                "method parameter '" + std::string(key) + "' has a non-numeric value");
                if (key == "p")
                    p = value;
                else if (key == "knot")
                    knot = value;
                else if (key == "threshold")
                    threshold = value;
                else if (key == "target_aggregate" || key == "target-aggregate" || key == "target")
                    target = value;
                else
                    throw Error(ErrorCode::InvalidArgument,
                                "unknown method parameter '" + std::string(key) + "'");
            }
        }

        if (name == "power" || name == "linpower")
        {
            if (!p)
                throw Error(ErrorCode::InvalidArgument, std::string(name) + " needs p=<value>");
            if (threshold || target)
                throw Error(ErrorCode::InvalidArgument, std::string(name) + " takes no cap parameters");
            if (name == "power")
            {
                if (knot)
                    throw Error(ErrorCode::InvalidArgument, "power takes no knot; use linpower");
                PowerRule rule{*p};
                rule.validate();
                rules.emplace_back(rule);
            }
            else
            {
                LinearizedPowerRule rule{*p, knot.value_or(kDefaultKnot)};
                rule.validate();
                rules.emplace_back(rule);
            }
        }
        else if (name == "cap")
        {
            if (p || knot)
                throw Error(ErrorCode::InvalidArgument, "cap takes only threshold and target_aggregate");
            CapRule rule{threshold.value_or(kDefaultCapThreshold), target.value_or(kDefaultCapTarget)};
            rule.validate();
            rules.emplace_back(rule);
        }
        else
        {
            throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
        }
    }
    return rules;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Rebalance capitalization-weighted index weights with power transforms"};
    app.name("powerweights");
    app.require_subcommand(1);

    // rebalance
    auto *rebalance = app.add_subcommand("rebalance", "Reweight a universe and write a report");
    std::string rb_input;
    std::string rb_method;
    std::optional<double> rb_p;
    double rb_knot = kDefaultKnot;
    double rb_threshold = kDefaultCapThreshold;
    double rb_target = kDefaultCapTarget;
    std::string rb_output;
    std::string rb_format = "csv";
    rebalance->add_option("--input", rb_input, "Universe CSV (id,market_cap or id,price,shares)")->required();
    rebalance->add_option("--method", rb_method, "Reweighting rule")
        ->required()
        ->check(CLI::IsMember({"power", "linpower", "cap"}));
    rebalance->add_option("--p", rb_p, "Exponent in [0,1] (power, linpower)")->check(CLI::Range(0.0, 1.0));
    rebalance->add_option("--knot", rb_knot, "Linearization knot in (0,1) (linpower)")->capture_default_str();
    rebalance->add_option("--threshold", rb_threshold, "Cap threshold (cap)")->capture_default_str();
    rebalance->add_option("--target-aggregate", rb_target, "Aggregate for capped weights (cap)")
        ->capture_default_str();
    rebalance->add_option("--output", rb_output, "Report path")->required();
    rebalance->add_option("--format", rb_format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // solve
    auto *solve = app.add_subcommand("solve", "Find the largest exponent meeting a concentration bound");
    std::string sv_input;
    std::string sv_target;
    std::optional<std::size_t> sv_k;
    double sv_bound = 0.0;
    double sv_tol = kDefaultSolveTolerance;
    std::string sv_format = "text";
    solve->add_option("--input", sv_input, "Universe CSV")->required();
    solve->add_option("--target", sv_target, "Statistic to bound")
        ->required()
        ->check(CLI::IsMember({"max", "top-k"}));
    solve->add_option("--k", sv_k, "Number of largest weights (top-k)");
    solve->add_option("--bound", sv_bound, "Upper bound on the statistic")->required();
    solve->add_option("--tol", sv_tol, "Bracket width tolerance on p")->capture_default_str();
    solve->add_option("--format", sv_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    // diagnose
    auto *diag = app.add_subcommand("diagnose", "Check a before/after pair for order and max-weight pathologies");
    std::string dg_before;
    std::string dg_after;
    std::string dg_format = "text";
    diag->add_option("--before", dg_before, "Weights before (report or id,weight CSV)")->required();
    diag->add_option("--after", dg_after, "Weights after (report or id,weight CSV)")->required();
    diag->add_option("--format", dg_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    // compare
    auto *compare = app.add_subcommand("compare", "Apply several rules to one universe side by side");
    std::string cp_input;
    std::string cp_methods;
    std::string cp_format = "text";
    compare->add_option("--input", cp_input, "Universe CSV")->required();
    compare->add_option("--methods", cp_methods, "e.g. \"power:p=0.5;linpower:p=0.5,knot=0.01;cap\"")
        ->required();
    compare->add_option("--format", cp_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &)
    {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    }
    catch (const CLI::ParseError &e)
    {
        err << "error: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    auto usage = [&](const std::string &message, const CLI::App *sub) {
        err << "error: " << message << '\n' << sub->help();
        return static_cast<int>(kExitUsage);
    };

    try
    {
        if (rebalance->parsed())
        {
            RebalanceRule rule;
            if (rb_method == "power" || rb_method == "linpower")
            {
                if (!rb_p)
                    return usage("--p is required for method " + rb_method, rebalance);
                if (rb_method == "power")
                    rule = PowerRule{*rb_p};
                else
                    rule = LinearizedPowerRule{*rb_p, rb_knot};
            }
            else
            {
                rule = CapRule{rb_threshold, rb_target};
            }
            std::visit([](const auto &r) { r.validate(); }, rule);

            const auto mu = load_universe_weights(rb_input);
            const auto report = make_rebalance_report(mu, rule);
            std::ofstream file(rb_output, std::ios::binary);
            if (!file)
                throw Error(ErrorCode::IoError, "cannot write '" + rb_output + "'");
            write_report(file, report, rb_format == "json" ? ReportFormat::Json : ReportFormat::Csv);
            file.close();
            if (!file)
                throw Error(ErrorCode::IoError, "failed writing '" + rb_output + "'");

            out << "method: " << describe(rule) << '\n';
            print_report_text(out, report.summary, mu.size());
            out << "report: " << rb_output << '\n';
            return kExitOk;
        }

        if (solve->parsed())
        {
            CalibrationTarget target;
            if (sv_target == "max")
            {
                target = CalibrationTarget::max_weight(sv_bound);
            }
            else
            {
                if (!sv_k)
                    return usage("--k is required for target top-k", solve);
                target = CalibrationTarget::top_k_sum(*sv_k, sv_bound);
            }
            const auto mu = load_universe_weights(sv_input);
            const auto result = solve_exponent(mu, target, sv_tol);

            if (sv_format == "json")
            {
                nlohmann::ordered_json doc;
                doc["schema_version"] = kReportSchemaVersion;
                doc["target"] = {{"kind", sv_target == "max" ? "max_weight" : "top_k_sum"},
                                 {"k", target.kind == TargetKind::TopKSum ? target.k : 1},
                                 {"bound", target.bound}};
                doc["p_star"] = result.p_star;
                doc["achieved"] = result.achieved;
                doc["iterations"] = result.iterations;
                doc["converged"] = result.converged;
                out << doc.dump(2) << '\n';
            }
            else
            {
                out << "target: "
                    << (target.kind == TargetKind::MaxWeight ? std::string("max weight")
                                                             : "top-" + std::to_string(target.k) + " sum")
                    << " <= " << human(target.bound) << '\n';
                out << "p_star: " << human(result.p_star) << '\n';
                out << "achieved: " << human(result.achieved) << '\n';
                out << "iterations: " << result.iterations << '\n';
                out << "converged: " << (result.converged ? "true" : "false") << '\n';
            }
            return result.converged ? kExitOk : kExitInput;
        }

        if (diag->parsed())
        {
            const auto before = read_weight_file(dg_before, WeightColumn::Before);
            const auto after = read_weight_file(dg_after, WeightColumn::After);
            const auto report = diagnose(before, after);
            if (dg_format == "json")
            {
                nlohmann::ordered_json doc;
                doc["schema_version"] = kReportSchemaVersion;
                doc["pathology"] = report.has_pathology();
                doc["order_violation_count"] = report.order_violations.size();
                nlohmann::ordered_json violations = nlohmann::ordered_json::array();
                for (const auto &v : report.order_violations)
                    violations.push_back({{"identifier_low", v.identifier_low},
                                          {"identifier_high", v.identifier_high},
                                          {"mu_low", v.mu_low},
                                          {"mu_high", v.mu_high},
                                          {"eta_low", v.eta_low},
                                          {"eta_high", v.eta_high}});
                doc["order_violations"] = std::move(violations);
                doc["max_before"] = report.max_before;
                doc["max_after"] = report.max_after;
                doc["max_increased"] = report.max_increased;
                doc["turnover"] = report.turnover;
                doc["hhi_before"] = report.hhi_before;
                doc["hhi_after"] = report.hhi_after;
                nlohmann::ordered_json top_k = nlohmann::ordered_json::object();
                for (const auto &[k, pair] : report.top_k_sums)
                    top_k[std::to_string(k)] = {{"before", pair.first}, {"after", pair.second}};
                doc["top_k_sums"] = std::move(top_k);
                doc["diversity_p"] = report.reporting_p;
                doc["diversity_before"] = report.diversity_before;
                doc["diversity_after"] = report.diversity_after;
                out << doc.dump(2) << '\n';
            }
            else
            {
                print_report_text(out, report, before.size());
                out << "pathology: " << (report.has_pathology() ? "yes" : "no") << '\n';
            }
            return report.has_pathology() ? kExitPathology : kExitOk;
        }

        if (compare->parsed())
        {
            std::vector<RebalanceRule> rules;
            try
            {
                rules = parse_method_spec(cp_methods);
            }
            catch (const Error &e)
            {
                return usage(e.what(), compare);
            }
            const auto mu = load_universe_weights(cp_input);
            const auto comparisons = compare_methods(mu, rules);
            if (cp_format == "json")
                write_comparison_json(out, mu, comparisons);
            else
                print_comparison_text(out, mu, comparisons);
            return kExitOk;
        }
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitUsage;
}

} // namespace powerweights::cli
