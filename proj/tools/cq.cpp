#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cqkit/dsl.hpp"
#include "cqkit/errors.hpp"
#include "cqkit/examples.hpp"
#include "cqkit/random_model.hpp"
#include "cqkit/registry.hpp"
#include "cqkit/report.hpp"
#include "cqkit/theorem.hpp"

using namespace cqkit;

namespace {

enum Exit { kOk = 0, kUsage = 1, kViolation = 2, kGoldenMismatch = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string direction;
    std::string json_path;
    std::optional<double> tol_active;
    std::optional<double> margin;
    std::optional<std::uint64_t> seed;
    int parallel = 1;
    bool quiet = false;
};

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(item);
    }
    return out;
}

Vec parse_vector(const std::string& s, const char* what) {
    const auto parts = split_commas(s);
    if (parts.empty()) {
        throw UsageError(std::string("empty ") + what);
    }
    Vec v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        try {
            v[static_cast<Eigen::Index>(i)] = parse_rational(parts[i]).get_d();
        } catch (const std::exception&) {
            throw UsageError(std::string("malformed ") + what + " '" + s + "'");
        }
    }
    return v;
}

Vec checked_direction(const Vec& p, std::size_t dim) {
    if (static_cast<std::size_t>(p.size()) != dim) {
        throw UsageError("direction has " + std::to_string(p.size()) + " components, model has " +
                         std::to_string(dim) + " parameters");
    }
    if (p.norm() == 0.0) {
        throw UsageError("direction must be nonzero");
    }
    return p.normalized();
}

Config make_config(const Globals& g) {
    Config cfg = Config::from_environment();
    if (g.tol_active) cfg.tol_active = *g.tol_active;
    if (g.margin) cfg.margin = *g.margin;
    if (g.seed) cfg.seed = *g.seed;
    cfg.parallel = g.parallel;
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open '" + path + "': file not found or unreadable");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw UsageError("cannot write '" + path + "'");
    }
}

void emit_json(const Globals& g, const nlohmann::json& j) {
    if (!g.json_path.empty()) {
        write_file(g.json_path, j.dump(2) + "\n");
    }
}

int report_exit(const CheckReport& rep) {
    return rep.audit_clean() ? kOk : kViolation;
}

// ---- check -----------------------------------------------------------------

int cmd_check(const Globals& g, const std::string& path) {
    const MomentModel model = parse_model(ModelSource{read_file(path), path});
    Vec p;
    if (!g.direction.empty()) {
        p = checked_direction(parse_vector(g.direction, "direction"), model.dim());
    } else if (auto d = model.default_direction()) {
        p = *d;
    } else {
        throw UsageError("no direction: pass --direction or add a 'direction:' line to the model");
    }
    const Config cfg = make_config(g);
    const CheckReport rep = run_check(model, p, cfg);
    if (!g.quiet) {
        std::cout << report_text(rep);
    }
    emit_json(g, report_json(rep, cfg));
    return report_exit(rep);
}

// ---- example ---------------------------------------------------------------

struct Golden {
    std::vector<std::string> mismatches;
    nlohmann::json json = nlohmann::json::object();
};

void check_point(Golden& gold, const CheckReport& rep, const Vec& target, double tol) {
    const auto& pt = rep.points[rep.closest_point(target)];
    const double err = (pt.point - target).norm();
    gold.json["expected_point"] = std::vector<double>(target.data(), target.data() + target.size());
    gold.json["point_error"] = err;
    if (err > tol) {
        std::ostringstream os;
        os << "support point off by " << err;
        gold.mismatches.push_back(os.str());
    }
}

void check_nodes(Golden& gold, const NodeStatus& got, const NodeStatus& expected) {
    nlohmann::json e;
    for (const auto& [n, s] : expected) {
        e[std::string(to_string(n))] = to_string(s);
    }
    gold.json["expected_verdicts"] = e;
    for (auto& m : golden_mismatches(got, expected)) {
        gold.mismatches.push_back(std::move(m));
    }
}

int finish_example(const Globals& g, const Config& cfg, const CheckReport& rep, Golden& gold,
                   const std::string& name) {
    if (!g.quiet) {
        std::cout << "example " << name << "\n" << report_text(rep);
        if (gold.mismatches.empty()) {
            std::cout << "golden: pass\n";
        } else {
            for (const auto& m : gold.mismatches) {
                std::cout << "golden mismatch: " << m << "\n";
            }
        }
    }
    nlohmann::json j = report_json(rep, cfg);
    gold.json["pass"] = gold.mismatches.empty();
    gold.json["mismatches"] = gold.mismatches;
    j["example"] = name;
    j["golden"] = gold.json;
    emit_json(g, j);
    if (!rep.audit_clean()) {
        return kViolation;
    }
    return gold.mismatches.empty() ? kOk : kGoldenMismatch;
}

int example_registry(const Globals& g, const std::string& name, const std::string& out) {
    const RegistryEntry entry = registry_get(name);
    if (!out.empty()) {
        write_file(out, serialize_model(entry.model));
    }
    const Vec p = g.direction.empty() ? entry.direction
                                      : checked_direction(parse_vector(g.direction, "direction"), entry.model.dim());
    const Config cfg = make_config(g);
    const CheckReport rep = run_check(entry.model, p, cfg);
    Golden gold;
    const bool stated_direction = (p - entry.direction.normalized()).norm() < 1e-12;
    gold.json["source"] = entry.source;
    if (stated_direction) {
        std::size_t idx = 0;
        if (entry.known_support_point) {
            check_point(gold, rep, *entry.known_support_point, 1e-6);
            idx = rep.closest_point(*entry.known_support_point);
        }
        check_nodes(gold, rep.points[idx].nodes, entry.expected);
    } else {
        gold.json["note"] = "no stated verdicts for this direction";
    }
    return finish_example(g, cfg, rep, gold, name);
}

int example_entry_game(const Globals& g, const std::string& pi_text, bool bounds, const std::string& out) {
    EntryGameSpec spec{Rational(1, 3), Rational(1, 3), Rational(1, 3), bounds};
    if (!pi_text.empty()) {
        const auto parts = split_commas(pi_text);
        if (parts.size() != 3) {
            throw UsageError("--pi takes pi11,pi10,pi01");
        }
        try {
            spec.pi11 = parse_rational(parts[0]);
            spec.pi10 = parse_rational(parts[1]);
            spec.pi01 = parse_rational(parts[2]);
        } catch (const Error&) {
            throw UsageError("malformed --pi '" + pi_text + "'");
        }
    }
    const MomentModel model = build_entry_game(spec);
    if (!out.empty()) {
        write_file(out, serialize_model(model));
    }
    Vec p0(2);
    p0 << 0, 1;
    const Vec p = g.direction.empty() ? p0 : checked_direction(parse_vector(g.direction, "direction"), 2);
    const Config cfg = make_config(g);
    const CheckReport rep = run_check(model, p, cfg);

    Golden gold;
    std::size_t idx = 0;
    if (auto closed = entry_game_support_point(spec, p)) {
        check_point(gold, rep, *closed, 1e-6);
        idx = rep.closest_point(*closed);
    }
    if ((p - p0).norm() < 1e-12) {
        check_nodes(gold, rep.points[idx].nodes,
                    {{Node::A2, Status::Fails},
                     {Node::A3, Status::Holds},
                     {Node::A4, Status::Holds},
                     {Node::A5, Status::Holds},
                     {Node::A7, Status::Holds},
                     {Node::LICQ, Status::Holds},
                     {Node::ACQ, Status::Holds}});
    } else if (std::abs(p[0] + p[1]) < 1e-12 && p[0] > 0) {
        check_nodes(gold, rep.points[idx].nodes,
                    {{Node::A4, Status::Fails}, {Node::A5, Status::Fails}, {Node::A7, Status::Fails}});
    }
    return finish_example(g, cfg, rep, gold, "entry-game");
}

int example_interval(const Globals& g, const std::string& csv, const std::string& out) {
    IntervalRegressionSpec spec = hexagon_spec();
    if (!csv.empty()) {
        std::istringstream in(read_file(csv));
        spec = ingest_interval_data(read_interval_csv(in));
    }
    const IntervalModel im = build_interval_regression(spec);
    if (!out.empty()) {
        write_file(out, serialize_model(im.model));
    }
    const std::size_t d = im.model.dim();
    Vec p0 = Vec::Zero(static_cast<Eigen::Index>(d));
    p0[static_cast<Eigen::Index>(d) - 1] = 1;
    const Vec p = g.direction.empty() ? p0 : checked_direction(parse_vector(g.direction, "direction"), d);
    const Config cfg = make_config(g);
    const CheckReport rep = run_check(im.model, p, cfg);

    Golden gold;
    const double lp = interval_lp_value(im, p);
    gold.json["lp_value"] = lp;
    if (std::abs(lp - rep.support.value) > 1e-8) {
        gold.mismatches.push_back("support value differs from the LP optimum");
    }
    if (im.conditions.validated()) {
        const FaceClassification face = classify_support_face(im, p);
        gold.json["face"] = to_string(face.kind);
        for (const auto& pt : rep.points) {
            check_nodes(gold, pt.nodes, face.predicted);
        }
    } else {
        gold.json["note"] = "polytope conditions not met; no face prediction";
    }
    return finish_example(g, cfg, rep, gold, "interval-regression");
}

// ---- ingest ------------------------------------------------------------------

int cmd_ingest(const std::string& csv, const std::string& out) {
    std::istringstream in(read_file(csv));
    const auto rows = read_interval_csv(in);
    const IntervalRegressionSpec spec = ingest_interval_data(rows);
    const IntervalModel im = build_interval_regression(spec);
    std::ostringstream os;
    os << "# interval regression ingested from " << csv << "\n";
    os << "# rows " << rows.size() << ", cells " << spec.cells.size() << ", d " << im.model.dim() << "\n";
    for (const auto& c : spec.cells) {
        os << "# z = (";
        for (Eigen::Index i = 0; i < c.z.size(); ++i) {
            os << (i ? ", " : "") << c.z[i];
        }
        os << ")  pi " << c.pi << "  E[W0|z] " << c.mean_w0 << "  E[W1|z] " << c.mean_w1 << "  Var[W0|z] "
           << c.var_w0 << "  Var[W1|z] " << c.var_w1 << "\n";
    }
    for (const auto& m : im.conditions.messages) {
        os << "# note: " << m << "\n";
    }
    os << serialize_model(im.model);
    if (out.empty()) {
        std::cout << os.str();
    } else {
        write_file(out, os.str());
    }
    return kOk;
}

// ---- audit-random ------------------------------------------------------------

int cmd_audit_random(const Globals& g, int count, int degree) {
    if (count < 1) {
        throw UsageError("--count must be at least 1");
    }
    if (degree < 1 || degree > 2) {
        throw UsageError("--degree must be 1 or 2");
    }
    const Config cfg = make_config(g);
    RandomModelOptions opts;
    opts.max_degree = degree;
    const RandomAuditSummary s = audit_random(static_cast<std::size_t>(count), cfg.seed, cfg, opts, g.parallel);
    if (!g.quiet) {
        for (std::size_t i = 0; i < s.entries.size(); ++i) {
            const auto& e = s.entries[i];
            std::cout << "model " << i << "  seed " << e.seed << "  " << e.fingerprint << "  points " << e.points
                      << "  inconclusive " << e.inconclusive << "/" << e.verdicts;
            for (const auto& v : e.violations) {
                std::cout << "  VIOLATION " << v;
            }
            std::cout << "\n";
        }
        std::cout << "models " << count << "  violations " << s.violations << "  inconclusive " << s.inconclusive
                  << "/" << s.verdicts << " (" << 100.0 * s.inconclusive_rate() << "%)\n";
    }
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["tool_version"] = kToolVersion;
    j["seed"] = cfg.seed;
    j["degree"] = degree;
    j["count"] = count;
    j["violations"] = s.violations;
    j["inconclusive"] = s.inconclusive;
    j["verdicts"] = s.verdicts;
    j["inconclusive_rate"] = s.inconclusive_rate();
    nlohmann::json models = nlohmann::json::array();
    for (const auto& e : s.entries) {
        models.push_back({{"seed", e.seed},
                          {"model", e.model_text},
                          {"violations", e.violations},
                          {"report", e.report}});
    }
    j["models"] = models;
    j["config"] = cfg;
    emit_json(g, j);
    return s.violations == 0 ? kOk : kViolation;
}

// ---- graph -------------------------------------------------------------------

int cmd_graph(const std::string& out) {
    if (out.empty()) {
        std::cout << graph_dot();
    } else {
        write_file(out, graph_dot());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint-qualification and regularity checks for moment (in)equality models", "cq"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--direction", g.direction, "Direction p as x,y[,...]");
    app.add_option("--json", g.json_path, "Write the JSON report to PATH");
    app.add_option("--tol-active", g.tol_active, "Active-set tolerance")->check(CLI::PositiveNumber);
    app.add_option("--margin", g.margin, "Decision margin for the assumption checks")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Random seed (default: CQKIT_SEED or built-in)");
    app.add_option("--parallel", g.parallel, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("-q,--quiet", g.quiet, "Suppress the text report");

    std::string model_path;
    auto* check = app.add_subcommand("check", "Check a model file");
    check->add_option("model", model_path, "Model file")->required();

    std::string example_name, pi_text, csv_path, out_path;
    bool bounds = false;
    auto* example = app.add_subcommand("example", "Run a built-in example and compare with its golden verdicts");
    example->add_option("name", example_name, "Registry name, entry-game or interval-regression")->required();
    example->add_option("--pi", pi_text, "Entry game: pi11,pi10,pi01");
    example->add_flag("--explicit-bounds", bounds, "Entry game: add 0 <= theta_i <= 1 as constraints");
    example->add_option("--csv", csv_path, "Interval regression: data instead of the built-in instance");
    example->add_option("--out", out_path, "Write the model DSL to PATH");

    int count = 0;
    int degree = 2;
    auto* audit_cmd = app.add_subcommand("audit-random", "Audit the implication graph on random models");
    audit_cmd->add_option("--count", count, "Number of models")->required();
    audit_cmd->add_option("--degree", degree, "Maximum polynomial degree (1 or 2)");

    std::string ingest_csv, ingest_out;
    auto* ingest = app.add_subcommand("ingest", "Convert interval data to a model file");
    ingest->add_option("csv", ingest_csv, "CSV with header w0,w1,z1,...,zd")->required();
    ingest->add_option("-o,--output", ingest_out, "Output path (default stdout)");

    std::string graph_out;
    auto* graph = app.add_subcommand("graph", "Print the implication graph as DOT");
    graph->add_option("-o,--output", graph_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*check) {
            return cmd_check(g, model_path);
        }
        if (*example) {
            if (example_name == "entry-game") {
                return example_entry_game(g, pi_text, bounds, out_path);
            }
            if (example_name == "interval-regression") {
                return example_interval(g, csv_path, out_path);
            }
            return example_registry(g, example_name, out_path);
        }
        if (*audit_cmd) {
            return cmd_audit_random(g, count, degree);
        }
        if (*ingest) {
            return cmd_ingest(ingest_csv, ingest_out);
        }
        if (*graph) {
            return cmd_graph(graph_out);
        }
    } catch (const UsageError& e) {
        std::cerr << "cq: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "cq: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
