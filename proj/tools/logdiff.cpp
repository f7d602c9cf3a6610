// Command-line front end: solve/export profiles, run simulations, and run
// the verification experiments. Exit codes: 0 all assertions pass, 1 failed
// assertions or runtime errors, 2 usage errors.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logdiff/experiment.hpp"
#include "logdiff/pde.hpp"
#include "logdiff/profile.hpp"

namespace fs = std::filesystem;
using namespace logdiff;

namespace {

std::string resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("LOGDIFF_OUT_DIR"); env && *env) return env;
    return "logdiff_out";
}

void apply_param_overrides(ExperimentConfig& cfg, const std::vector<std::string>& params) {
    for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--param", "expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (!cfg.params.contains(key))
            throw CLI::ValidationError("--param", "unknown parameter '" + key + "' for kind " +
                                                      kind_name(cfg.kind));
        json parsed = json::parse(val, nullptr, false);
        cfg.params[key] = parsed.is_discarded() ? json(val) : parsed;
    }
}

void print_report(const ExperimentReport& rep) {
    for (const auto& a : rep.assertions) {
        std::printf("  [%s] %s: measured=%.6g %s %.6g", a.pass ? "PASS" : "FAIL",
                    a.name.c_str(), a.measured,
                    a.comparator == "abs" ? "vs" : (a.comparator == "le" ? "<=" : ">="),
                    a.expected);
        if (a.comparator == "abs") std::printf(" (tol %.3g)", a.tolerance);
        std::printf("  [%s]\n", a.anchor.c_str());
    }
    for (const auto& note : rep.notes) std::printf("  note: %s\n", note.c_str());
    std::printf("[%s] %s (%.2f s)\n", rep.pass ? "PASS" : "FAIL", kind_name(rep.kind).c_str(),
                rep.runtime_seconds);
}

int cmd_profile(int n, double beta, double lambda, double alpha_in, double rmax, double tol,
                int npd, const std::string& out, const std::string& in, double eval_r,
                bool do_eval) {
    ProfileParams params;
    params.n = n;
    params.beta = beta;
    params.lambda = lambda;
    params.alpha = alpha_in > 0 ? alpha_in : 2.0 * beta;

    RadialProfile prof;
    if (!in.empty()) {
        prof = read_profile_csv(in, params);
    } else {
        SolveOptions so;
        so.nodes_per_decade = npd;
        prof = solve_profile(params, rmax, tol, so);
    }
    if (!out.empty()) {
        fs::create_directories(fs::path(out).parent_path().empty()
                                   ? fs::path(".")
                                   : fs::path(out).parent_path());
        write_profile_csv(prof, out);
        std::printf("wrote %zu nodes to %s\n", prof.size(), out.c_str());
    }
    if (do_eval) {
        const auto pv = eval_profile(prof, eval_r);
        std::printf("psi(%.17g) = %.17g  dpsi = %.17g\n", eval_r, pv.psi, pv.dpsi);
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) {
        std::fprintf(stderr, "cannot open config %s\n", config_path.c_str());
        return 1;
    }
    const json j = json::parse(in);
    auto cfg = sim_config_from_json(j);
    auto traj = run(cfg);
    fs::create_directories(out_dir);
    const auto csv_path = (fs::path(out_dir) / "snapshots.csv").string();
    const auto meta_path = (fs::path(out_dir) / "metadata.json").string();
    write_snapshots_csv(traj, csv_path);
    write_trajectory_metadata(traj, sim_config_to_json(cfg), meta_path);
    std::printf("wrote %s and %s (%zu snapshots, %zu steps)\n", csv_path.c_str(),
                meta_path.c_str(), traj.snapshots.size(), traj.steps.size());
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg, bool csv_paths_only) {
    auto rep = run_experiment(cfg);
    if (csv_paths_only) {
        for (const auto& f : rep.csv_files) std::printf("%s\n", f.c_str());
        std::printf("[%s] %s\n", rep.pass ? "PASS" : "FAIL", kind_name(rep.kind).c_str());
    } else {
        print_report(rep);
    }
    return rep.pass ? 0 : 1;
}

int cmd_suite(const std::string& out_dir, bool quick, unsigned jobs) {
    std::vector<ExperimentConfig> configs;
    for (auto kind : all_experiment_kinds()) {
        auto cfg = ExperimentConfig::make(kind,
                                          (fs::path(out_dir) / kind_name(kind)).string());
        if (quick && (kind == ExperimentKind::exact_selfsimilar ||
                      kind == ExperimentKind::exact_barenblatt))
            cfg.params["refine_check"] = false;
        configs.push_back(std::move(cfg));
    }

    std::vector<ExperimentReport> reports(configs.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) reports[i] = run_experiment(configs[i]);
    } else {
        std::vector<std::future<ExperimentReport>> futures;
        for (const auto& cfg : configs)
            futures.push_back(std::async(std::launch::async,
                                         [&cfg] { return run_experiment(cfg); }));
        for (std::size_t i = 0; i < futures.size(); ++i) reports[i] = futures[i].get();
    }

    bool all_pass = true;
    for (const auto& rep : reports) {
        std::printf("[%s] %-22s %6.2f s  (%zu assertions, report in %s)\n",
                    rep.pass ? "PASS" : "FAIL", kind_name(rep.kind).c_str(),
                    rep.runtime_seconds, rep.assertions.size(),
                    rep.config_echo["out_dir"].get<std::string>().c_str());
        all_pass = all_pass && rep.pass;
    }
    std::printf("suite: %s\n", all_pass ? "all experiments passed" : "FAILURES present");
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for radial logarithmic diffusion u_t = div(grad u / u)"};
    app.require_subcommand(1);

    // profile
    auto* sp = app.add_subcommand("profile", "solve a self-similar profile and export/evaluate it");
    int n = 3, npd = 64;
    double beta = 1.0, lambda = 1.0, alpha = 0.0, rmax = 1e6, tol = 1e-10, eval_r = 0.0;
    std::string out_csv, in_csv;
    sp->add_option("--n", n, "space dimension (>= 3)");
    sp->add_option("--beta", beta, "scaling exponent beta > 0");
    sp->add_option("--lambda", lambda, "center value psi(0)");
    sp->add_option("--alpha", alpha, "zeroth-order coefficient (default 2*beta)");
    sp->add_option("--rmax", rmax, "outer radius of the profile");
    sp->add_option("--tol", tol, "relative integration tolerance");
    sp->add_option("--npd", npd, "stored nodes per decade");
    sp->add_option("--out", out_csv, "output CSV path (r,psi,dpsi,moment)");
    sp->add_option("--in", in_csv, "import a previously exported CSV instead of solving");
    auto* eval_opt = sp->add_option("--eval", eval_r, "evaluate the profile at this radius");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one simulation described by a JSON config");
    std::string sim_config, sim_out;
    sim->add_option("--config", sim_config, "simulation config JSON")->required();
    sim->add_option("--out", sim_out, "output directory");

    // verify / plotdata
    std::string verify_kind, verify_out, verify_config;
    std::vector<std::string> verify_params;
    std::uint64_t seed = 0;
    int vn = 0;
    double vbeta = 0.0, vlambda = 0.0;
    auto add_verify_opts = [&](CLI::App* cmd) {
        cmd->add_option("--kind", verify_kind, "experiment kind");
        cmd->add_option("--config", verify_config, "experiment config JSON file");
        cmd->add_option("--out", verify_out, "output directory");
        cmd->add_option("--param", verify_params, "override: key=value (repeatable)");
        cmd->add_option("--seed", seed, "seed for randomized perturbation placement");
        cmd->add_option("--n", vn, "override dimension parameter");
        cmd->add_option("--beta", vbeta, "override beta parameter");
        cmd->add_option("--lambda", vlambda, "override lambda parameter");
    };
    auto* ver = app.add_subcommand("verify", "run one verification experiment");
    add_verify_opts(ver);
    auto* plot = app.add_subcommand("plotdata", "run an experiment and list its tidy CSV outputs");
    add_verify_opts(plot);

    // suite
    auto* suite = app.add_subcommand("suite", "run the whole verification battery");
    std::string suite_out;
    bool quick = false;
    unsigned jobs = 1;
    suite->add_option("--out", suite_out, "output directory");
    suite->add_flag("--quick", quick, "skip the refinement sub-studies");
    suite->add_option("--jobs", jobs, "run experiments in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage errors exit 2; --help stays 0
    }

    try {
        if (sp->parsed()) {
            if (in_csv.empty() && out_csv.empty() && !*eval_opt) {
                std::fprintf(stderr, "profile: nothing to do (need --out and/or --eval)\n");
                return 2;
            }
            return cmd_profile(n, beta, lambda, alpha, rmax, tol, npd, out_csv, in_csv, eval_r,
                               static_cast<bool>(*eval_opt));
        }
        if (sim->parsed()) return cmd_simulate(sim_config, resolve_out_dir(sim_out));
        if (ver->parsed() || plot->parsed()) {
            ExperimentConfig cfg;
            if (!verify_config.empty()) {
                std::ifstream in(verify_config);
                if (!in) {
                    std::fprintf(stderr, "cannot open config %s\n", verify_config.c_str());
                    return 1;
                }
                cfg = ExperimentConfig::from_json(json::parse(in));
                if (!verify_kind.empty() && kind_from_name(verify_kind) != cfg.kind) {
                    std::fprintf(stderr, "--kind disagrees with config file\n");
                    return 2;
                }
            } else {
                if (verify_kind.empty()) {
                    std::fprintf(stderr, "need --kind or --config\n");
                    return 2;
                }
                cfg = ExperimentConfig::make(kind_from_name(verify_kind), ".");
            }
            std::string out = verify_out;
            if (out.empty() && cfg.out_dir != ".") out = cfg.out_dir; // from the config file
            cfg.out_dir = resolve_out_dir(out);
            cfg.seed = seed;
            if (vn > 0 && cfg.params.contains("n")) cfg.params["n"] = vn;
            if (vbeta > 0 && cfg.params.contains("beta")) cfg.params["beta"] = vbeta;
            if (vlambda > 0 && cfg.params.contains("lambda")) cfg.params["lambda"] = vlambda;
            apply_param_overrides(cfg, verify_params);
            return cmd_verify(cfg, plot->parsed());
        }
        if (suite->parsed()) return cmd_suite(resolve_out_dir(suite_out), quick, jobs);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
