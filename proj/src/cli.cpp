#include "saddleperm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "saddleperm/errors.hpp"
#include "saddleperm/oracle.hpp"
#include "saddleperm/perm_test.hpp"
#include "saddleperm/rng.hpp"

namespace saddleperm::cli {

namespace {

using nlohmann::ordered_json;
using Command = RunConfig::Command;
using Format = RunConfig::Format;

// ---------------------------------------------------------------- CSV input

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    for (std::string& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
    }
    return fields;
}

double parse_number(const std::string& field, long line_no) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw MalformedCsv("not a number: '" + field + "'", line_no);
    }
    if (pos != field.size())
        throw MalformedCsv("trailing characters in number: '" + field + "'", line_no);
    return v;
}

int group_index(Dataset& data, const std::string& label) {
    for (std::size_t i = 0; i < data.group_labels.size(); ++i)
        if (data.group_labels[i] == label) return static_cast<int>(i);
    data.group_labels.push_back(label);
    return static_cast<int>(data.group_labels.size()) - 1;
}

Dataset parse_csv(const std::string& path, bool multivariate) {
    std::ifstream in(path);
    if (!in) throw MalformedCsv("cannot open '" + path + "'", 0);

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw MalformedCsv("empty file", 0);
    ++line_no;

    const std::vector<std::string> header = split_fields(line);
    if (header.empty() || header[0] != "group")
        throw MalformedCsv("first header column must be 'group'", line_no);
    if (!multivariate && (header.size() != 2 || header[1] != "value"))
        throw MalformedCsv("k-sample header must be 'group,value'", line_no);
    if (multivariate && header.size() < 2)
        throw MalformedCsv("two-sample header needs at least one value column", line_no);
    const std::size_t arity = header.size();

    Dataset data;
    data.multivariate = multivariate;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != arity)
            throw MixedArity("row has " + std::to_string(fields.size()) +
                                 " fields, header has " + std::to_string(arity),
                             line_no);
        data.groups.push_back(group_index(data, fields[0]));
        if (multivariate) {
            Vec row;
            row.reserve(arity - 1);
            for (std::size_t j = 1; j < arity; ++j)
                row.push_back(parse_number(fields[j], line_no));
            data.rows.push_back(std::move(row));
        } else {
            data.values.push_back(parse_number(fields[1], line_no));
        }
    }
    if (data.groups.empty()) throw MalformedCsv("no data rows", line_no);
    return data;
}

// ------------------------------------------------------- built-in datasets

Dataset table1_data() {
    Dataset data;
    data.group_labels = {"g1", "g2", "g3", "g4"};
    for (int m = 0; m < 20; ++m) {
        data.groups.push_back(m / 5);
        data.values.push_back(static_cast<double>(m + 1));
    }
    return data;
}

Dataset table2_data(std::uint64_t seed) {
    Rng rng = derive_stream(seed, streams::data_generation, 0);
    Dataset data;
    data.group_labels = {"g1", "g2", "g3", "g4"};
    for (int m = 0; m < 40; ++m) {
        data.groups.push_back(m / 10);
        data.values.push_back(-std::log(rng.next_positive()));
    }
    return data;
}

Dataset table3_data(std::uint64_t seed) {
    Rng rng = derive_stream(seed, streams::data_generation, 0);
    Dataset data;
    data.multivariate = true;
    data.group_labels = {"s1", "s2"};
    for (int m = 0; m < 80; ++m) {
        data.groups.push_back(m / 40);
        Vec row(3);
        for (double& v : row) v = -std::log(rng.next_positive());
        data.rows.push_back(std::move(row));
    }
    return data;
}

// -------------------------------------------------------------- assembly

struct GridCell {
    TestReport report;
    std::optional<PermutationOutcome> mc_lambda;
    std::optional<PermutationOutcome> mc_comparison;
};

struct RunOutput {
    std::string command_name;
    ModelKind kind;
    GroupDesign design;
    bool use_ranks = true;
    int d0 = 0, d1 = 0;
    long sphere_samples = 0, mc_reps = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    bool grid_mode = false;
    std::vector<GridCell> cells;                    // grid mode
    std::optional<TestReport> observed;             // observed mode
    std::optional<double> comparison_value;         // observed mode
    std::optional<PermutationOutcome> observed_mc;  // observed mode
    std::string comparison_name;                    // "KruskalWallis" etc.
};

OracleStatistic comparison_kind(ModelKind kind, bool use_ranks) {
    if (kind == ModelKind::TwoSampleMV) return OracleStatistic::Quadratic;
    return use_ranks ? OracleStatistic::KruskalWallis : OracleStatistic::AnovaSS;
}

// Threshold putting the comparison statistic on the same chi-square scale as
// the cell level u: the classical between-group statistics are asymptotically
// chi^2_{d1} at N u^2, the two-sample quadratic form x1^T x1 at p q u^2.
double comparison_threshold(const TiltingModel& model, OracleStatistic kind, double u) {
    if (kind == OracleStatistic::Quadratic) {
        const double p = model.design().proportion(0);
        return p * (1.0 - p) * u * u;
    }
    return static_cast<double>(model.population()) * u * u;
}

RunOutput execute(const RunConfig& config, const std::string& command_name,
                  const TiltingModel& model, const std::vector<int>& assignment,
                  bool use_ranks, const Vec& u_grid, long mc_reps) {
    TailOptions tail_options;
    tail_options.sphere_samples = config.sphere_samples;
    tail_options.seed = config.seed;
    tail_options.workers = config.workers;

    RunOutput out;
    out.command_name = command_name;
    out.kind = model.kind();
    out.design = model.design();
    out.use_ranks = use_ranks;
    out.d0 = model.d0();
    out.d1 = model.d1();
    out.sphere_samples = config.sphere_samples;
    out.mc_reps = mc_reps;
    out.seed = config.seed;
    out.workers = config.workers;
    out.grid_mode = !u_grid.empty();

    const OracleStatistic comp = comparison_kind(model.kind(), use_ranks);
    out.comparison_name = to_string(comp);

    if (!out.grid_mode) {
        out.observed = observed_report(model, assignment, tail_options);
        out.comparison_value =
            classical_statistic(comp, model.scores(), model.design(), assignment);
        if (mc_reps > 0)
            out.observed_mc = mc_tail(model, OracleStatistic::Lambda,
                                      out.observed->lambda_obs, mc_reps, config.seed,
                                      config.workers);
        return out;
    }

    std::vector<TestReport> reports = grid_reports(model, u_grid, tail_options);
    std::vector<PermutationOutcome> mc_lambda, mc_comp;
    if (mc_reps > 0) {
        Vec lambda_thresholds, comp_thresholds;
        for (double u : u_grid) {
            lambda_thresholds.push_back(0.5 * u * u);
            comp_thresholds.push_back(comparison_threshold(model, comp, u));
        }
        mc_lambda = mc_tail_multi(model, OracleStatistic::Lambda, lambda_thresholds,
                                  mc_reps, config.seed, config.workers);
        mc_comp = mc_tail_multi(model, comp, comp_thresholds, mc_reps, config.seed,
                                config.workers);
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
        GridCell cell;
        cell.report = std::move(reports[i]);
        if (mc_reps > 0) {
            cell.mc_lambda = mc_lambda[i];
            cell.mc_comparison = mc_comp[i];
        }
        out.cells.push_back(std::move(cell));
    }
    return out;
}

// ------------------------------------------------------------- formatting

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::size_t display_width(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++w;  // count UTF-8 lead bytes
    return w;
}

std::string pad_to(const std::string& s, std::size_t width) {
    std::string out = s;
    for (std::size_t w = display_width(s); w < width; ++w) out += ' ';
    return out;
}

std::string comparison_label(ModelKind kind, bool use_ranks) {
    if (kind == ModelKind::TwoSampleMV) return "Quadratic";
    return use_ranks ? "MC K-W" : "MC ANOV";
}

std::string chisq_label(int d1) { return "\xCF\x87\xC2\xB2_" + std::to_string(d1); }

std::string format_text_grid(const RunOutput& out) {
    struct Row {
        std::string label;
        Vec values;
    };
    std::vector<Row> rows;
    const std::string comp_label = comparison_label(out.kind, out.use_ranks);

    Vec u_values, mc_l, mc_c, chisq, lr, bn;
    for (const GridCell& cell : out.cells) {
        u_values.push_back(cell.report.u_obs);
        chisq.push_back(cell.report.tail.p_chisq);
        lr.push_back(cell.report.tail.p_lr);
        bn.push_back(cell.report.tail.p_bn);
        if (cell.mc_lambda) mc_l.push_back(cell.mc_lambda->tail_prob);
        if (cell.mc_comparison) mc_c.push_back(cell.mc_comparison->tail_prob);
    }

    const bool with_mc = !mc_l.empty();
    if (out.kind == ModelKind::KSample) {
        if (with_mc) rows.push_back({"MC \xCE\x9B", mc_l});
        if (with_mc) rows.push_back({comp_label, mc_c});
        rows.push_back({chisq_label(out.d1), chisq});
        rows.push_back({"SP LR \xCE\x9B", lr});
        rows.push_back({"SP BN \xCE\x9B", bn});
    } else {
        if (with_mc) rows.push_back({"MC \xCE\x9B", mc_l});
        rows.push_back({chisq_label(out.d1), chisq});
        rows.push_back({"SP LR \xCE\x9B", lr});
        rows.push_back({"SP BN \xCE\x9B", bn});
        if (with_mc) rows.push_back({comp_label, mc_c});
    }

    std::size_t label_width = display_width("\xC3\xBB");
    for (const Row& r : rows) label_width = std::max(label_width, display_width(r.label));
    label_width += 2;

    std::ostringstream os;
    os << pad_to("\xC3\xBB", label_width);
    for (double u : u_values) {
        std::string cell = compact(u);
        os << std::string(cell.size() < 8 ? 8 - cell.size() : 1, ' ') << cell;
    }
    os << '\n';
    for (const Row& r : rows) {
        os << pad_to(r.label, label_width);
        for (double v : r.values) os << "  " << fixed4(v);
        os << '\n';
    }
    return os.str();
}

std::string comparison_display_name(const std::string& machine_name) {
    if (machine_name == "KruskalWallis") return "Kruskal-Wallis";
    if (machine_name == "AnovaSS") return "between-group SS";
    return "quadratic form";
}

std::string format_text_observed(const RunOutput& out) {
    const TestReport& rep = *out.observed;
    std::ostringstream os;
    os << (out.kind == ModelKind::KSample ? "k-sample" : "two-sample")
       << " test: N=" << out.design.total() << ", k=" << out.design.groups()
       << ", d0=" << out.d0 << ", d1=" << out.d1 << ", seed=" << out.seed << "\n";
    os << "lambda_obs = " << rep.lambda_obs << ", u_obs = " << rep.u_obs << "\n";
    os << "G = " << rep.tail.G << " (se " << rep.tail.G_se << ", M = " << rep.tail.M
       << ")\n";
    os << "p_lr    = " << fixed4(rep.tail.p_lr) << "\n";
    os << "p_bn    = " << fixed4(rep.tail.p_bn) << "\n";
    os << "p_chisq = " << fixed4(rep.tail.p_chisq) << "\n";
    if (out.comparison_value)
        os << comparison_display_name(out.comparison_name) << " = "
           << *out.comparison_value << "\n";
    if (out.observed_mc)
        os << "MC p = " << fixed4(out.observed_mc->tail_prob) << " (se "
           << out.observed_mc->se << ", replicates " << out.observed_mc->replicates
           << ")\n";
    return os.str();
}

ordered_json tail_to_json(const TailResult& tail) {
    return ordered_json{{"u", tail.u},
                        {"lambda", tail.lambda},
                        {"G", tail.G},
                        {"G_se", tail.G_se},
                        {"u_star", tail.u_star},
                        {"p_lr", tail.p_lr},
                        {"p_bn", tail.p_bn},
                        {"p_chisq", tail.p_chisq},
                        {"M", tail.M},
                        {"seed", tail.seed},
                        {"p_lr_clamped", tail.p_lr_clamped}};
}

ordered_json outcome_to_json(const PermutationOutcome& mc) {
    ordered_json j{{"statistic", to_string(mc.statistic)},
                   {"threshold", mc.threshold},
                   {"tail_prob", mc.tail_prob},
                   {"exact", mc.exact},
                   {"boundary_count", mc.boundary_count}};
    if (mc.exact) {
        j["total_arrangements"] = mc.total_arrangements;
        j["tail_count"] = mc.tail_count;
    } else {
        j["replicates"] = mc.replicates;
        j["se"] = mc.se;
    }
    return j;
}

ordered_json to_json(const RunOutput& out) {
    ordered_json j;
    j["schema_version"] = 1;
    j["command"] = out.command_name;
    j["kind"] = out.kind == ModelKind::KSample ? "ksample" : "twosample";
    if (out.kind == ModelKind::KSample) j["scores"] = out.use_ranks ? "rank" : "raw";
    j["design"] = ordered_json{{"sizes", out.design.sizes()},
                               {"N", out.design.total()},
                               {"k", out.design.groups()}};
    j["d0"] = out.d0;
    j["d1"] = out.d1;
    j["seed"] = out.seed;
    j["sphere_samples"] = out.sphere_samples;
    j["mc_reps"] = out.mc_reps;
    j["workers"] = out.workers;
    j["mode"] = out.grid_mode ? "grid" : "observed";

    if (out.grid_mode) {
        ordered_json cells = ordered_json::array();
        for (const GridCell& cell : out.cells) {
            ordered_json c{{"u", cell.report.u_obs},
                           {"lambda", cell.report.lambda_obs},
                           {"tail", tail_to_json(cell.report.tail)}};
            if (cell.mc_lambda) c["mc_lambda"] = outcome_to_json(*cell.mc_lambda);
            if (cell.mc_comparison)
                c["mc_comparison"] = outcome_to_json(*cell.mc_comparison);
            cells.push_back(std::move(c));
        }
        j["cells"] = std::move(cells);
    } else {
        const TestReport& rep = *out.observed;
        j["lambda_obs"] = rep.lambda_obs;
        j["u_obs"] = rep.u_obs;
        j["tail"] = tail_to_json(rep.tail);
        if (out.comparison_value)
            j["comparison"] = ordered_json{{"kind", out.comparison_name},
                                           {"value", *out.comparison_value}};
        if (out.observed_mc) j["mc_lambda"] = outcome_to_json(*out.observed_mc);
    }
    return j;
}

std::string comparison_csv_name(const std::string& machine_name) {
    if (machine_name == "KruskalWallis") return "mc_kw";
    if (machine_name == "AnovaSS") return "mc_anov";
    return "mc_quadratic";
}

std::string format_csv(const RunOutput& out) {
    std::ostringstream os;
    if (out.grid_mode) {
        os << "method,u,value\n";
        const std::string comp = comparison_csv_name(out.comparison_name);
        for (const GridCell& cell : out.cells) {
            const std::string u = compact(cell.report.u_obs);
            if (cell.mc_lambda)
                os << "mc_lambda," << u << "," << fixed4(cell.mc_lambda->tail_prob) << "\n";
            if (cell.mc_comparison)
                os << comp << "," << u << "," << fixed4(cell.mc_comparison->tail_prob)
                   << "\n";
            os << "chisq," << u << "," << fixed4(cell.report.tail.p_chisq) << "\n";
            os << "sp_lr," << u << "," << fixed4(cell.report.tail.p_lr) << "\n";
            os << "sp_bn," << u << "," << fixed4(cell.report.tail.p_bn) << "\n";
        }
    } else {
        const TestReport& rep = *out.observed;
        os << "field,value\n";
        os << "lambda_obs," << rep.lambda_obs << "\n";
        os << "u_obs," << rep.u_obs << "\n";
        os << "p_lr," << rep.tail.p_lr << "\n";
        os << "p_bn," << rep.tail.p_bn << "\n";
        os << "p_chisq," << rep.tail.p_chisq << "\n";
        if (out.comparison_value)
            os << comparison_csv_name(out.comparison_name) << "_value,"
               << *out.comparison_value << "\n";
        if (out.observed_mc) os << "mc_p," << out.observed_mc->tail_prob << "\n";
    }
    return os.str();
}

std::string render(const RunOutput& out, Format format) {
    switch (format) {
        case Format::Text:
            return out.grid_mode ? format_text_grid(out) : format_text_observed(out);
        case Format::Csv: return format_csv(out);
        case Format::Json: return to_json(out).dump(2) + "\n";
    }
    return {};
}

Vec default_grid(Command command) {
    switch (command) {
        case Command::Table1: return {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        case Command::Table2Style: return {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
        case Command::Table3Style: return {0.3, 0.4, 0.5, 0.6, 0.7};
        default: return {};
    }
}

void validate(const RunConfig& config) {
    if (config.sphere_samples < 1) throw DomainError("sphere sample count must be >= 1");
    if (config.workers < 1) throw DomainError("worker count must be >= 1");
    for (std::size_t i = 0; i < config.u_grid.size(); ++i) {
        if (config.u_grid[i] <= 0.0) throw DomainError("u grid values must be > 0");
        if (i > 0 && config.u_grid[i] <= config.u_grid[i - 1])
            throw DomainError("u grid must be strictly increasing");
    }
    const bool needs_input =
        config.command == Command::KSample || config.command == Command::TwoSample;
    if (needs_input && config.input_path.empty())
        throw DomainError("this command requires --input");
}

std::string command_name(Command c) {
    switch (c) {
        case Command::KSample: return "ksample";
        case Command::TwoSample: return "twosample";
        case Command::Table1: return "table1";
        case Command::Table2Style: return "table2-style";
        case Command::Table3Style: return "table3-style";
    }
    return "?";
}

}  // namespace

Dataset parse_input(const std::string& path, RunConfig::Command command) {
    return parse_csv(path, command == Command::TwoSample ||
                               command == Command::Table3Style);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config);

        const bool table_command = config.command != Command::KSample &&
                                   config.command != Command::TwoSample;
        const long mc_reps = config.mc_reps >= 0 ? config.mc_reps
                             : table_command     ? 100000
                                                 : 0;
        Vec u_grid = config.u_grid;
        if (u_grid.empty() && table_command) u_grid = default_grid(config.command);

        Dataset data;
        bool use_ranks = config.use_ranks;
        switch (config.command) {
            case Command::Table1:
                data = table1_data();
                use_ranks = true;
                break;
            case Command::Table2Style:
                data = table2_data(config.seed);
                use_ranks = false;
                break;
            case Command::Table3Style: data = table3_data(config.seed); break;
            default: data = parse_input(config.input_path, config.command); break;
        }

        RunOutput result = [&] {
            if (data.multivariate) {
                auto [model, assignment] = build_twosample(data.groups, data.rows);
                return execute(config, command_name(config.command), model, assignment,
                               use_ranks, u_grid, mc_reps);
            }
            auto [model, assignment] = build_ksample(data.groups, data.values, use_ranks);
            return execute(config, command_name(config.command), model, assignment,
                           use_ranks, u_grid, mc_reps);
        }();

        const std::string text = render(result, config.format);
        if (config.output_path.empty()) {
            out << text;
        } else {
            std::ofstream file(config.output_path, std::ios::binary);
            if (!file)
                throw DomainError("cannot open output file '" + config.output_path + "'");
            file << text;
        }
        return 0;
    } catch (const Error& e) {
        ordered_json obj{{"error", {{"code", e.code()}, {"message", e.what()}}}};
        if (const auto* csv = dynamic_cast<const MalformedCsv*>(&e))
            obj["error"]["line"] = csv->line();
        if (const auto* csv = dynamic_cast<const MixedArity*>(&e))
            obj["error"]["line"] = csv->line();
        err << obj.dump() << "\n";
        if (e.code() == "MalformedCsv" || e.code() == "MixedArity") return 3;
        if (e.code() == "DomainError") return 2;
        return 4;
    } catch (const std::exception& e) {
        ordered_json obj{{"error", {{"code", "Internal"}, {"message", e.what()}}}};
        err << obj.dump() << "\n";
        return 4;
    }
}

}  // namespace saddleperm::cli
