// Command-line front end: axiom audits, convergence certificates, Picard
// solves, the incompleteness-witness audit, and the contraction demo.
//
// Exit codes: 0 when every requested check passed or certified, 1 when a
// check failed or a certificate came back invalid (including exhausted
// budgets), 2 on usage, file or domain errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmet/pmet.hpp"

namespace {

using pmet::Json;

struct SpaceSelection {
    pmet::PartialMetricSpace space;
    bool punctured = false;
};

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write output file: " << out_path << "\n";
        return 2;
    }
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    return 0;
}

int emit_json(const Json& artifact, const std::string& out_path) {
    return emit(artifact.dump(2), out_path);
}

/// Parses --space {max|punctured|table:<path>}. Throws table_rejected with
/// the violation list when a table file fails validation.
struct table_rejected {
    Json violations;
};

SpaceSelection select_space(const std::string& spec) {
    if (spec == "max") return {pmet::make_max_space(), false};
    if (spec == "punctured") return {pmet::make_punctured_interval().base(), true};
    if (spec.rfind("table:", 0) == 0) {
        const std::string path = spec.substr(6);
        pmet::FiniteSpaceResult result = pmet::load_finite_table(path);
        if (!result.accepted()) {
            Json violations = Json::array();
            for (const auto& v : result.violations) violations.push_back(pmet::to_json(v));
            throw table_rejected{violations};
        }
        return {*result.space, false};
    }
    throw CLI::ValidationError("--space must be max, punctured or table:<path>");
}

pmet::SelfMap select_map(const std::string& spec, const pmet::PartialMetricSpace& space) {
    if (spec == "halve") {
        return pmet::SelfMap{[](pmet::Point p) { return pmet::Point{p.value / 2.0}; }, "halve"};
    }
    if (spec.rfind("scale:", 0) == 0) {
        const double r = std::stod(spec.substr(6));
        if (!(r >= 0.0 && r < 1.0)) {
            throw CLI::ValidationError("--map scale:<r> requires r in [0, 1)");
        }
        return pmet::SelfMap{[r](pmet::Point p) { return pmet::Point{r * p.value}; }, "scale"};
    }
    if (spec.rfind("file:", 0) == 0) {
        if (space.kind() != pmet::CarrierKind::FiniteTable) {
            throw CLI::ValidationError("--map file:<path> requires a table space");
        }
        const std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in) throw CLI::ValidationError("cannot open map file: " + path);
        std::vector<std::size_t> targets;
        std::size_t t = 0;
        while (in >> t) targets.push_back(t);
        if (targets.size() != space.table_size()) {
            throw CLI::ValidationError("map file must list one target index per carrier point");
        }
        for (std::size_t target : targets) {
            if (target >= space.table_size()) {
                throw CLI::ValidationError("map file target index out of range");
            }
        }
        return pmet::SelfMap::from_index_table(targets);
    }
    throw CLI::ValidationError("--map must be halve, scale:<r> or file:<path>");
}

std::vector<pmet::Point> parse_grid(const std::string& csv) {
    std::vector<pmet::Point> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) grid.push_back(pmet::Point{std::stod(item)});
    }
    return grid;
}

Json trace_rows(const pmet::SequenceTrace& trace, pmet::Point anchor, std::uint64_t stride) {
    Json rows = Json::array();
    for (std::uint64_t n = 1; n <= trace.horizon(); n += stride) {
        const pmet::Point xn = trace.at(n);
        rows.push_back({n, xn.value, trace.eval(anchor, xn), trace.eval(xn, xn)});
    }
    return rows;
}

int run_audit(const std::string& space_spec, std::uint64_t trials, std::uint64_t seed, double tol,
              const std::string& out_path) {
    const SpaceSelection sel = select_space(space_spec);
    const pmet::AxiomAuditReport report = pmet::audit_axioms(sel.space, trials, seed, tol);
    Json artifact{{"command", "audit"}, {"space", sel.space.label()}, {"seed", seed},
                  {"tol", tol}};
    artifact["report"] = pmet::to_json(report);
    const int io = emit_json(artifact, out_path);
    if (io != 0) return io;
    return report.passed() ? 0 : 1;
}

int run_converge(const std::string& space_spec, const std::string& seq, double x0, double ratio,
                 std::uint64_t horizon, std::uint64_t window, double eps,
                 std::optional<double> anchor, const std::string& grid_csv, std::uint64_t stride,
                 const std::string& format, const std::string& out_path) {
    const SpaceSelection sel = select_space(space_spec);
    if (sel.space.kind() == pmet::CarrierKind::FiniteTable) {
        throw CLI::ValidationError("converge expects an interval space (max or punctured)");
    }

    pmet::SequenceTrace::Generator gen;
    if (seq == "harmonic") {
        gen = [](std::uint64_t n) { return pmet::Point{1.0 / static_cast<double>(n)}; };
    } else if (seq == "geometric") {
        gen = [x0, ratio](std::uint64_t n) {
            return pmet::Point{x0 * std::pow(ratio, static_cast<double>(n))};
        };
    } else if (seq == "constant") {
        gen = [x0](std::uint64_t) { return pmet::Point{x0}; };
    } else {
        throw CLI::ValidationError("--seq must be harmonic, geometric or constant");
    }
    const pmet::SequenceTrace trace(sel.space, gen, horizon);

    if (format == "csv") {
        const std::optional<pmet::Point> a =
            anchor ? std::optional<pmet::Point>{pmet::Point{*anchor}} : std::nullopt;
        return emit(pmet::trace_csv(trace, a, stride), out_path);
    }

    bool all_certified = true;
    Json artifact{{"command", "converge"},
                  {"space", sel.space.label()},
                  {"sequence", seq},
                  {"resolution", {{"N", horizon}, {"W", window}, {"eps", eps}}}};

    const pmet::ConvergenceReport cauchy = pmet::detect_cauchy(trace, window, eps);
    artifact["cauchy"] = pmet::to_json(cauchy);
    all_certified = all_certified && cauchy.certified();

    artifact["anchor"] = nullptr;
    artifact["tau"] = nullptr;
    artifact["proper"] = nullptr;
    artifact["pairwise_identity"] = nullptr;
    if (anchor) {
        const pmet::Point x{*anchor};
        artifact["anchor"] = x.value;
        const pmet::ConvergenceReport tau = pmet::analyze_tau_convergence(trace, x, window, eps);
        const pmet::ConvergenceReport proper =
            pmet::analyze_proper_convergence(trace, x, window, eps);
        artifact["tau"] = pmet::to_json(tau);
        artifact["proper"] = pmet::to_json(proper);
        all_certified = all_certified && tau.certified() && proper.certified();
        if (proper.certified()) {
            artifact["pairwise_identity"] =
                pmet::to_json(pmet::check_pairwise_limit_identity(trace, x, window, eps));
        }
    }

    artifact["tau_limits"] = nullptr;
    if (!grid_csv.empty()) {
        const auto certified = pmet::enumerate_tau_limits(trace, parse_grid(grid_csv), window, eps);
        Json limits = Json::array();
        for (const auto& [point, report] : certified) {
            limits.push_back({{"x", point.value}, {"max_tail_residual", report.max_tail_residual}});
        }
        artifact["tau_limits"] = limits;
        all_certified = all_certified && !certified.empty();
    }

    const int io = emit_json(artifact, out_path);
    if (io != 0) return io;
    return all_certified ? 0 : 1;
}

int run_solve(const std::string& space_spec, const std::string& map_spec, double x0,
              std::uint64_t max_iter, double eps, std::uint64_t horizon, std::uint64_t window,
              const std::string& out_path) {
    const SpaceSelection sel = select_space(space_spec);
    const pmet::SelfMap f = select_map(map_spec, sel.space);
    pmet::SolveOptions options;
    options.max_iter = max_iter;
    options.tol = eps;
    options.proper_horizon = horizon;
    options.proper_window = window;
    const pmet::FixedPointCertificate cert = pmet::picard_solve(sel.space, f, pmet::Point{x0}, options);
    Json artifact{{"command", "solve"}, {"space", sel.space.label()}, {"map", f.label},
                  {"x0", x0}};
    artifact["certificate"] = pmet::to_json(cert);
    const int io = emit_json(artifact, out_path);
    if (io != 0) return io;
    return cert.valid ? 0 : 1;
}

int run_witness(std::uint64_t samples, std::uint64_t seed, double eps, std::uint64_t depth,
                const std::string& out_path) {
    const pmet::CompletionView view = pmet::make_punctured_interval();
    const pmet::WitnessMap witness(view);
    const pmet::WitnessAuditReport report = pmet::audit_witness(witness, samples, seed, eps, depth);
    Json artifact{{"command", "witness"},
                  {"space", view.base().label()},
                  {"completion", pmet::completion_sidecar_json(view)}};
    artifact["report"] = pmet::to_json(report);
    const int io = emit_json(artifact, out_path);
    if (io != 0) return io;
    return report.passed() ? 0 : 1;
}

int run_demo(double eps, const std::string& format, const std::string& out_path) {
    const pmet::PartialMetricSpace space = pmet::make_max_space();
    const pmet::SelfMap halve{[](pmet::Point p) { return pmet::Point{p.value / 2.0}; }, "halve"};
    pmet::SolveOptions options;
    options.max_iter = 100;
    options.tol = eps;
    const pmet::FixedPointCertificate cert = pmet::picard_solve(space, halve, pmet::Point{1.0}, options);

    const pmet::SequenceTrace trace(
        space, [](std::uint64_t n) { return pmet::Point{std::pow(0.5, static_cast<double>(n))}; },
        options.proper_horizon);
    if (format == "csv") {
        const int io = emit(pmet::trace_csv(trace, cert.candidate, 1), out_path);
        if (io != 0) return io;
        return cert.valid ? 0 : 1;
    }
    Json artifact{{"command", "demo"}, {"space", space.label()}, {"map", "halve"}, {"x0", 1.0}};
    artifact["certificate"] = pmet::to_json(cert);
    artifact["trace"] = {{"columns", {"n", "x_n", "p(x_star|x_n)", "p(x_n|x_n)"}},
                         {"rows", trace_rows(trace, cert.candidate, 1)}};
    const int io = emit_json(artifact, out_path);
    if (io != 0) return io;
    return cert.valid ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partial-metric toolkit: axiom audits, convergence certificates, Picard solves "
                 "and the incompleteness witness"};
    app.require_subcommand(1);

    std::string space_spec = "max";
    std::string out_path;
    std::string format = "json";
    std::uint64_t seed = 0;
    std::uint64_t trials = 10000;
    std::uint64_t depth = 64;
    std::uint64_t max_iter = 1000;
    std::uint64_t horizon = 10000;
    std::uint64_t window = 64;
    std::uint64_t samples = 10000;
    std::uint64_t stride = 1;
    double eps = 1e-9;
    double audit_tol = 0.0;
    double x0 = 1.0;
    double ratio = 0.5;
    std::string seq = "harmonic";
    std::string map_spec = "halve";
    std::string grid_csv;
    std::optional<double> anchor;

    CLI::App* audit = app.add_subcommand("audit", "sample triples and audit the axioms");
    audit->add_option("--space", space_spec, "max, punctured or table:<path>")
        ->capture_default_str();
    audit->add_option("--trials", trials, "number of sampled triples")->capture_default_str();
    audit->add_option("--seed", seed, "sampler seed")->capture_default_str();
    audit->add_option("--eps", audit_tol, "inequality tolerance (0 = exact)")
        ->capture_default_str();
    audit->add_option("--out", out_path, "write the JSON artifact here instead of stdout");

    CLI::App* converge = app.add_subcommand("converge", "classify a sequence at a resolution");
    converge->add_option("--space", space_spec, "max or punctured")->capture_default_str();
    converge->add_option("--seq", seq, "harmonic, geometric or constant")->capture_default_str();
    converge->add_option("--x0", x0, "seed value for geometric/constant sequences")
        ->capture_default_str();
    converge->add_option("--ratio", ratio, "ratio for geometric sequences")->capture_default_str();
    converge->add_option("--horizon", horizon, "sequence horizon N")->capture_default_str();
    converge->add_option("--window", window, "tail window W")->capture_default_str();
    converge->add_option("--eps", eps, "certification tolerance")->capture_default_str();
    converge->add_option("--x", anchor, "anchor point for tau/proper analysis");
    converge->add_option("--grid", grid_csv, "comma-separated anchor grid for tau-limit search");
    converge->add_option("--stride", stride, "row stride for csv export")->capture_default_str();
    converge->add_option("--format", format, "json or csv (csv = trace table)")
        ->capture_default_str();
    converge->add_option("--out", out_path, "artifact path");

    CLI::App* solve = app.add_subcommand("solve", "Picard-iterate a self-map to a certificate");
    solve->add_option("--space", space_spec, "max, punctured or table:<path>")
        ->capture_default_str();
    solve->add_option("--map", map_spec, "halve, scale:<r> or file:<path>")->capture_default_str();
    solve->add_option("--x0", x0, "start point (carrier value or table index)")
        ->capture_default_str();
    solve->add_option("--max-iter", max_iter, "iteration budget")->capture_default_str();
    solve->add_option("--eps", eps, "pm1 stopping tolerance")->capture_default_str();
    solve->add_option("--horizon", horizon, "trace length for the attached report")
        ->default_val(100);
    solve->add_option("--window", window, "tail window for the attached report")->default_val(32);
    solve->add_option("--out", out_path, "artifact path");

    CLI::App* witness = app.add_subcommand("witness", "audit the fixed-point-free witness map");
    witness->add_option("--samples", samples, "sample count")->capture_default_str();
    witness->add_option("--seed", seed, "sampler seed")->capture_default_str();
    witness->add_option("--eps", eps, "reporting tolerance")->capture_default_str();
    witness->add_option("--depth", depth, "orbit truncation depth")->capture_default_str();
    witness->add_option("--out", out_path, "artifact path");

    CLI::App* demo = app.add_subcommand("demo", "halving map on the max space from x0 = 1");
    demo->add_option("--eps", eps, "pm1 stopping tolerance")->capture_default_str();
    demo->add_option("--format", format, "json or csv (csv = proper-convergence table)")
        ->capture_default_str();
    demo->add_option("--out", out_path, "artifact path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (audit->parsed()) return run_audit(space_spec, trials, seed, audit_tol, out_path);
        if (converge->parsed()) {
            return run_converge(space_spec, seq, x0, ratio, horizon, window, eps, anchor, grid_csv,
                                stride, format, out_path);
        }
        if (solve->parsed()) {
            return run_solve(space_spec, map_spec, x0, max_iter, eps, horizon, window, out_path);
        }
        if (witness->parsed()) return run_witness(samples, seed, eps, depth, out_path);
        if (demo->parsed()) return run_demo(eps, format, out_path);
    } catch (const table_rejected& rejection) {
        std::cerr << Json{{"error", "table rejected"}, {"violations", rejection.violations}}.dump(2)
                  << "\n";
        return 2;
    } catch (const pmet::resource_error& e) {
        std::cerr << Json{{"error", e.what()}}.dump(2) << "\n";
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 2;
}
