// hess2lab: verification suites, Dirichlet solves and probes for the
// 2-Hessian equation sigma_2(D^2 u) = 1, with seeded, machine-readable
// outputs. Subcommands: verify, solve, probe, report.
//
// Exit codes:
//   0  success, all invariants hold
//   1  violations found / probe invariant failed
//   2  sampler starvation, spec error, or missing artifact
//   3  solver nonconvergence
//   4  ellipticity (Gamma_2) loss
//   64 usage error

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hess2/hess2.hpp"

namespace fs = std::filesystem;
using hess2::json;

namespace {

constexpr int kExitViolations = 1;
constexpr int kExitArtifact = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitEllipticityLoss = 4;
constexpr int kExitUsage = 64;

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    std::uint64_t seed, const std::vector<std::string>& artifacts,
                    int exit_code) {
    json m{{"schema_version", hess2::kSchemaVersion},
           {"tool_version", hess2::kVersion},
           {"command", command},
           {"config", config},
           {"seed", seed},
           {"artifacts", artifacts},  // paths relative to this manifest
           {"exit_code", exit_code}};
    hess2::write_text_file((out_dir / (command + "_manifest.json")).string(), m.dump(2) + "\n");
}

struct VerifyArgs {
    std::string suite = "all";
    std::uint64_t count = 100000;
    std::uint64_t seed = 42;
    int n = 3;
    double eps = 1.0 / 25.0;
    std::string eps_grid = "0,0.01,0.02,0.03,0.04,0.049";
    std::string out = "out";
    int workers = 1;
    double tol = 1e-9;
};

int run_verify(const VerifyArgs& args) {
    fs::create_directories(args.out);
    hess2::SampleConfig cfg;
    cfg.n = args.n;
    cfg.count = args.count;
    cfg.seed = args.seed;
    cfg.workers = args.workers;
    cfg.tol = args.tol;
    cfg.eps = args.eps;

    std::vector<std::string> suites;
    if (args.suite == "all")
        suites = {"lemma21", "cor22", "lemma23", "cor24", "eps"};
    else
        suites = {args.suite};

    std::vector<std::string> artifacts;
    std::uint64_t total_violations = 0;
    for (const auto& which : suites) {
        const auto rep = hess2::sample_verify(which, cfg);
        total_violations += rep.violations;
        const std::string name = "verify_" + which + ".json";
        hess2::write_text_file((fs::path(args.out) / name).string(),
                               hess2::to_json(rep).dump(2) + "\n");
        artifacts.push_back(name);
        std::cout << which << ": evaluated=" << rep.evaluated << " vacuous=" << rep.vacuous
                  << " rejected=" << rep.rejected << " violations=" << rep.violations
                  << " min_margin=" << hess2::fmt_double(rep.min_margin) << "\n";
        if (rep.violations > 0)
            std::cout << "  violation witness: " << hess2::to_json(rep.argmin).dump() << "\n";
    }

    const bool with_frontier = args.suite == "eps" || args.suite == "all";
    if (with_frontier) {
        const auto grid = parse_double_list(args.eps_grid);
        const auto table = hess2::epsilon_frontier(cfg, grid);
        for (const auto& row : table.rows) total_violations += row.violations;
        hess2::write_text_file((fs::path(args.out) / "epsilon_frontier.csv").string(),
                               hess2::frontier_csv(table));
        hess2::write_text_file((fs::path(args.out) / "epsilon_frontier.json").string(),
                               hess2::to_json(table).dump(2) + "\n");
        artifacts.push_back("epsilon_frontier.csv");
        artifacts.push_back("epsilon_frontier.json");
        std::cout << "epsilon_frontier: largest nonnegative grid eps = "
                  << hess2::fmt_double(table.largest_nonneg_eps) << "\n";
        for (const auto& row : table.rows)
            if (row.violations > 0)
                std::cout << "  eps=" << hess2::fmt_double(row.eps) << " violations="
                          << row.violations << " argmin_lambda=["
                          << hess2::fmt_double(row.argmin_lambda[0]) << ","
                          << hess2::fmt_double(row.argmin_lambda[1]) << ","
                          << hess2::fmt_double(row.argmin_lambda[2]) << "]\n";
    }

    const int code = total_violations == 0 ? 0 : kExitViolations;
    json config{{"suite", args.suite}, {"count", args.count},   {"n", args.n},
                {"eps", args.eps},     {"eps_grid", args.eps_grid}, {"workers", args.workers},
                {"tol", args.tol},     {"scale_law", cfg.scale_law()}};
    write_manifest(args.out, "verify", config, args.seed, artifacts, code);
    return code;
}

struct SolveArgs {
    int n = 3;
    int m = 17;
    std::string box = "-1,1";
    std::string data = "zero";
    std::string init = "auto";  // auto | barrier | quadratic
    std::string out = "out";
    double tol_residual = 1e-10;
    int max_newton = 50;
};

int run_solve(const SolveArgs& args) {
    fs::create_directories(args.out);
    const auto corners = parse_double_list(args.box);
    if (corners.size() != 2) throw CLI::ValidationError("--box expects lo,hi");
    const hess2::GridDomain dom(args.n, corners[0], corners[1], args.m);

    // Dirichlet data: zero, or quadratic[:d1,...,dn[,offset]].
    std::function<double(const hess2::Point&)> g;
    std::vector<double> diag;
    double offset = 0.0;
    bool quadratic_data = false;
    if (args.data == "zero") {
        g = [](const hess2::Point&) { return 0.0; };
    } else if (args.data.rfind("quadratic", 0) == 0) {
        quadratic_data = true;
        if (args.data.size() > 9 && args.data[9] == ':') {
            auto vals = parse_double_list(args.data.substr(10));
            if (static_cast<int>(vals.size()) == args.n) {
                diag = vals;
            } else if (static_cast<int>(vals.size()) == args.n + 1) {
                offset = vals.back();
                vals.pop_back();
                diag = vals;
            } else {
                throw CLI::ValidationError("--data quadratic expects n or n+1 values");
            }
        } else {
            diag.assign(static_cast<std::size_t>(args.n),
                        std::sqrt(2.0 / (args.n * (args.n - 1))));
        }
        g = [diag, offset](const hess2::Point& p) {
            double v = offset;
            for (std::size_t i = 0; i < diag.size(); ++i) v += 0.5 * diag[i] * p[i] * p[i];
            return v;
        };
    } else {
        throw CLI::ValidationError("--data must be zero or quadratic[:...]");
    }

    hess2::SolveConfig cfg;
    cfg.tol_residual = args.tol_residual;
    cfg.max_newton = args.max_newton;

    std::optional<hess2::ScalarField> init;
    if (args.init == "quadratic" || (args.init == "auto" && quadratic_data))
        init = hess2::ScalarField::from_function(dom, g);
    else if (args.init != "auto" && args.init != "barrier")
        throw CLI::ValidationError("--init must be auto, barrier, or quadratic");

    const auto rep = hess2::newton_solve(dom, g, cfg, init);

    hess2::write_field((fs::path(args.out) / "solve_field").string(), rep.field);
    hess2::write_text_file((fs::path(args.out) / "solve_report.json").string(),
                           hess2::to_json(rep).dump(2) + "\n");

    std::cout << "converged in " << rep.iterations
              << " iterations, final residual=" << hess2::fmt_double(rep.residual_history.back())
              << " gamma2_certified=" << (rep.gamma2_certified ? "true" : "false") << "\n";
    if (quadratic_data) {
        double err = 0.0;
        dom.for_each_node([&](const hess2::MultiIndex& ix) {
            err = std::max(err, std::abs(rep.field[ix] - g(dom.point(ix))));
        });
        std::cout << "max error vs quadratic data: " << hess2::fmt_double(err) << "\n";
    }

    const int code = rep.gamma2_certified ? 0 : kExitEllipticityLoss;
    json config{{"n", args.n},       {"m", args.m},
                {"box", args.box},   {"data", args.data},
                {"init", args.init}, {"tol_residual", args.tol_residual},
                {"max_newton", args.max_newton}};
    write_manifest(args.out, "solve", config, 0,
                   {"solve_field.json", "solve_field.csv", "solve_report.json"}, code);
    return code;
}

struct ProbeArgs {
    std::string kind;
    std::uint64_t count = 1000;
    std::uint64_t seed = 7;
    std::string solve_artifact;  // base path of a field artifact (no extension)
    double alpha = 50.0;
    std::string variant = "laplacian";
    std::string base = "quadratic";
    std::string r_list = "1,2,4";
    int rescale_m = 17;
    double box_halfwidth = 3.0;
    std::string out = "out";
};

hess2::SolveReport load_solve(const std::string& base_path) {
    if (!fs::exists(base_path + ".json"))
        throw std::runtime_error("missing solve artifact: " + base_path + ".json");
    hess2::ScalarField f = hess2::read_field(base_path);
    return hess2::SolveReport{std::move(f), {}, true, 0, 0.0};
}

int run_probe(const ProbeArgs& args) {
    fs::create_directories(args.out);
    std::vector<std::string> artifacts;
    int code = 0;
    json config{{"kind", args.kind}, {"count", args.count}, {"alpha", args.alpha}};

    if (args.kind == "warren") {
        const auto rep = hess2::warren_validate(args.count, args.seed, args.box_halfwidth);
        config["box_halfwidth"] = args.box_halfwidth;
        hess2::write_text_file((fs::path(args.out) / "probe_warren.json").string(),
                               hess2::to_json(rep).dump(2) + "\n");
        artifacts.push_back("probe_warren.json");
        const bool ok = rep.equation_violations == 0 && rep.gamma2_failures == 0 &&
                        rep.fits_violated == rep.fits_tested;
        std::cout << "warren: max_equation_dev=" << hess2::fmt_double(rep.max_equation_dev)
                  << " gamma2_failures=" << rep.gamma2_failures << " fits_violated="
                  << rep.fits_violated << "/" << rep.fits_tested << "\n";
        code = ok ? 0 : kExitViolations;
    } else if (args.kind == "phase") {
        const auto rep = hess2::phase_identity_check(args.count, args.seed);
        hess2::write_text_file((fs::path(args.out) / "probe_phase.json").string(),
                               hess2::to_json(rep).dump(2) + "\n");
        artifacts.push_back("probe_phase.json");
        const bool ok = rep.phase_violations == 0 && rep.im_sign_failures == 0 &&
                        rep.max_re_identity_dev <= 1e-12 && rep.max_im_identity_dev <= 1e-12 &&
                        rep.control_phase_dev > 0.1;
        std::cout << "phase: max_dev=" << hess2::fmt_double(rep.max_phase_dev)
                  << " violations=" << rep.phase_violations << "\n";
        code = ok ? 0 : kExitViolations;
    } else if (args.kind == "pogorelov") {
        const auto solve = load_solve(args.solve_artifact);
        hess2::PogorelovConfig pcfg;
        pcfg.alpha = args.alpha;
        pcfg.variant = args.variant == "largest-eigenvalue"
                           ? hess2::PogorelovVariant::largest_eigenvalue
                           : hess2::PogorelovVariant::laplacian;
        const auto rep = hess2::pogorelov_quantity(solve, pcfg);
        const auto aux = hess2::aux_function_field(solve, pcfg);
        json j = hess2::to_json(rep);
        j["aux_max"] = aux.max_value;
        j["aux_interior_max_certified"] = aux.interior_max_certified;
        j["aux_grad_norm_at_argmax"] = aux.grad_norm_at_argmax;
        config["variant"] = args.variant;
        config["solve"] = args.solve_artifact;
        hess2::write_text_file((fs::path(args.out) / "probe_pogorelov.json").string(),
                               j.dump(2) + "\n");
        artifacts.push_back("probe_pogorelov.json");
        const bool ok = std::isfinite(rep.value) && rep.value >= 0.0 &&
                        rep.attained_strictly_interior && aux.interior_max_certified;
        std::cout << "pogorelov: value=" << hess2::fmt_double(rep.value) << " argmax=("
                  << rep.argmax[0] << "," << rep.argmax[1] << "," << rep.argmax[2]
                  << ") depth=" << rep.argmax_depth << "\n";
        code = ok ? 0 : kExitViolations;
    } else if (args.kind == "rescale") {
        hess2::RescaleSpec spec{hess2::candidate_by_name(args.base),
                                parse_double_list(args.r_list), 0.0};
        const auto rep = hess2::rescale_family(spec, args.rescale_m, args.alpha);
        config["base"] = args.base;
        config["R"] = args.r_list;
        config["rescale_m"] = args.rescale_m;
        hess2::write_text_file((fs::path(args.out) / "probe_rescale.json").string(),
                               hess2::to_json(rep).dump(2) + "\n");
        hess2::write_text_file((fs::path(args.out) / "probe_rescale.csv").string(),
                               hess2::rescale_csv(rep));
        artifacts.push_back("probe_rescale.json");
        artifacts.push_back("probe_rescale.csv");
        bool ok = true;
        if (args.base == "quadratic") {
            for (const auto& row : rep.rows)
                if (std::abs(row.sup_hess - rep.rows.front().sup_hess) > 1e-9) ok = false;
        }
        for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
            if (rep.rows[i + 1].osc > rep.rows[i].osc * 1.10 + 1e-12) ok = false;
        for (const auto& row : rep.rows) {
            std::cout << "R=" << hess2::fmt_double(row.r)
                      << " sup_hess=" << hess2::fmt_double(row.sup_hess)
                      << " osc=" << hess2::fmt_double(row.osc)
                      << " nodes=" << row.nodes_in_mask << "\n";
        }
        code = ok ? 0 : kExitViolations;
    } else if (args.kind == "diffeq") {
        const auto solve = load_solve(args.solve_artifact);
        const auto rep = hess2::differentiated_equation_residual(solve);
        config["solve"] = args.solve_artifact;
        hess2::write_text_file((fs::path(args.out) / "probe_diffeq.json").string(),
                               hess2::to_json(rep).dump(2) + "\n");
        artifacts.push_back("probe_diffeq.json");
        std::cout << "diffeq: max |sigma_2^{ij} u_ijk| = " << hess2::fmt_double(rep.max_overall)
                  << " over " << rep.nodes << " nodes\n";
        code = std::isfinite(rep.max_overall) ? 0 : kExitViolations;
    } else {
        throw CLI::ValidationError("--kind must be one of warren, phase, pogorelov, rescale, diffeq");
    }

    write_manifest(args.out, "probe_" + args.kind, config, args.seed, artifacts, code);
    return code;
}

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string out = "out";
};

int run_report(const ReportArgs& args) {
    if (args.inputs.empty()) throw CLI::ValidationError("report: empty input list");
    fs::create_directories(args.out);

    json summary{{"schema_version", hess2::kSchemaVersion}, {"sections", json::array()}};
    std::string table = "section | detail | pass\n";
    std::vector<std::string> artifacts;

    for (const auto& manifest_path : args.inputs) {
        if (!fs::exists(manifest_path))
            throw std::runtime_error("missing manifest: " + manifest_path);
        const json manifest = json::parse(hess2::read_text_file(manifest_path));
        const fs::path dir = fs::path(manifest_path).parent_path();
        const std::string command = manifest.at("command").get<std::string>();
        const int code = manifest.at("exit_code").get<int>();

        json section{{"command", command},
                     {"manifest", manifest_path},
                     {"exit_code", code},
                     {"pass", code == 0},
                     {"artifacts", json::array()}};

        for (const auto& art : manifest.at("artifacts")) {
            const fs::path p = dir / art.get<std::string>();
            if (!fs::exists(p)) throw std::runtime_error("missing artifact: " + p.string());
            json info{{"file", art.get<std::string>()}};
            if (p.extension() == ".json") {
                const json content = json::parse(hess2::read_text_file(p.string()));
                if (content.contains("min_margin")) info["min_margin"] = content["min_margin"];
                if (content.contains("violations")) info["violations"] = content["violations"];
                if (content.contains("final_residual"))
                    info["final_residual"] = content["final_residual"];
                if (content.contains("gamma2_certified"))
                    info["gamma2_certified"] = content["gamma2_certified"];
                // plot-ready two-column series from frontier tables
                if (content.contains("rows") && content.contains("largest_nonneg_eps")) {
                    std::string plot;
                    for (const auto& row : content["rows"])
                        plot += hess2::fmt_double(row["eps"].get<double>()) + " " +
                                hess2::fmt_double(row["min_margin"].get<double>()) + "\n";
                    const std::string name = "plot_frontier.dat";
                    hess2::write_text_file((fs::path(args.out) / name).string(), plot);
                    artifacts.push_back(name);
                }
                if (content.contains("rows") && content.contains("base")) {
                    std::string plot;
                    for (const auto& row : content["rows"])
                        plot += hess2::fmt_double(row["R"].get<double>()) + " " +
                                hess2::fmt_double(row["osc"].get<double>()) + "\n";
                    const std::string name = "plot_rescale_osc.dat";
                    hess2::write_text_file((fs::path(args.out) / name).string(), plot);
                    artifacts.push_back(name);
                }
            }
            section["artifacts"].push_back(info);
        }
        summary["sections"].push_back(section);
        table += command + " | exit=" + std::to_string(code) + " | " +
                 (code == 0 ? "pass" : "FAIL") + "\n";
    }

    hess2::write_text_file((fs::path(args.out) / "summary.json").string(),
                           summary.dump(2) + "\n");
    hess2::write_text_file((fs::path(args.out) / "summary.txt").string(), table);
    artifacts.push_back("summary.json");
    artifacts.push_back("summary.txt");
    std::cout << table;

    json config{{"inputs", args.inputs}};
    write_manifest(args.out, "report", config, 0, artifacts, 0);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the 2-Hessian equation sigma_2(D^2 u) = 1"};
    app.require_subcommand(1);

    VerifyArgs vargs;
    auto* verify = app.add_subcommand("verify", "randomized inequality verification suites");
    verify->add_option("--suite", vargs.suite, "lemma21|cor22|lemma23|cor24|eps|all")
        ->check(CLI::IsMember({"lemma21", "cor22", "lemma23", "cor24", "eps", "all"}));
    verify->add_option("--count", vargs.count, "samples per suite");
    verify->add_option("--seed", vargs.seed, "stream seed");
    verify->add_option("--n", vargs.n, "dimension")->check(CLI::Range(2, 8));
    verify->add_option("--eps", vargs.eps, "epsilon for the eps suite");
    verify->add_option("--eps-grid", vargs.eps_grid, "comma-separated eps grid in [0, 0.5]");
    verify->add_option("--out", vargs.out, "output directory");
    verify->add_option("--workers", vargs.workers, "worker threads (outputs unchanged)");
    verify->add_option("--tol", vargs.tol, "relative violation tolerance");

    SolveArgs sargs;
    auto* solve = app.add_subcommand("solve", "Dirichlet solve of sigma_2(D^2 u) = 1 on a box");
    solve->add_option("--n", sargs.n, "dimension (2 or 3)")->check(CLI::Range(2, 3));
    solve->add_option("--m", sargs.m, "nodes per axis (>= 5)");
    solve->add_option("--box", sargs.box, "lo,hi cube corners");
    solve->add_option("--data", sargs.data, "zero | quadratic[:d1,..,dn[,offset]]");
    solve->add_option("--init", sargs.init, "auto | barrier | quadratic");
    solve->add_option("--out", sargs.out, "output directory");
    solve->add_option("--tol-residual", sargs.tol_residual, "residual max-norm target");
    solve->add_option("--max-newton", sargs.max_newton, "Newton iteration cap");

    ProbeArgs pargs;
    auto* probe = app.add_subcommand("probe", "numerical experiments");
    probe->add_option("--kind", pargs.kind, "warren|phase|pogorelov|rescale|diffeq")->required();
    probe->add_option("--count", pargs.count, "sample count");
    probe->add_option("--seed", pargs.seed, "stream seed");
    probe->add_option("--solve", pargs.solve_artifact, "field artifact base path (pogorelov, diffeq)");
    probe->add_option("--alpha", pargs.alpha, "interior weight exponent");
    probe->add_option("--variant", pargs.variant, "laplacian | largest-eigenvalue")
        ->check(CLI::IsMember({"laplacian", "largest-eigenvalue"}));
    probe->add_option("--base", pargs.base, "rescale base: quadratic|quad_bump|warren");
    probe->add_option("--R", pargs.r_list, "comma-separated rescale radii");
    probe->add_option("--rescale-m", pargs.rescale_m, "rescale grid nodes per axis");
    probe->add_option("--box-halfwidth", pargs.box_halfwidth, "warren sample box halfwidth");
    probe->add_option("--out", pargs.out, "output directory");

    ReportArgs rargs;
    auto* report = app.add_subcommand("report", "aggregate manifests into a summary");
    report->add_option("--inputs", rargs.inputs, "manifest files")->delimiter(',');
    report->add_option("--out", rargs.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (verify->parsed()) return run_verify(vargs);
        if (solve->parsed()) return run_solve(sargs);
        if (probe->parsed()) return run_probe(pargs);
        if (report->parsed()) return run_report(rargs);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const hess2::SamplerStarvation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArtifact;
    } catch (const hess2::NonconvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonconvergence;
    } catch (const hess2::EllipticityLossError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEllipticityLoss;
    } catch (const hess2::SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArtifact;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArtifact;
    }
    return kExitUsage;
}
