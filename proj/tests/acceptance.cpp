// Acceptance battery: every stated criterion runs at its stated tolerance and
// prints one pass/fail line. Exit status is 0 only if all criteria pass.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "logdiff/experiment.hpp"

using namespace logdiff;
namespace fs = std::filesystem;

namespace {

struct CriterionResult {
    int id;
    std::string title;
    bool pass;
    std::string detail;
};

std::vector<CriterionResult> g_results;

void record(int id, const std::string& title, bool pass, const std::string& detail) {
    g_results.push_back({id, title, pass, detail});
}

// collects the pass state and measured values of all assertions whose name
// starts with one of the given prefixes
struct Picked {
    bool all_pass = true;
    int found = 0;
    std::string detail;
};

Picked pick(const ExperimentReport& rep, const std::vector<std::string>& prefixes) {
    Picked p;
    std::ostringstream ss;
    for (const auto& a : rep.assertions) {
        for (const auto& prefix : prefixes) {
            if (a.name.rfind(prefix, 0) == 0) {
                p.all_pass = p.all_pass && a.pass;
                p.found++;
                if (p.found > 1) ss << "; ";
                ss << a.name << " = " << a.measured;
                break;
            }
        }
    }
    p.detail = ss.str();
    if (p.found == 0) p.all_pass = false;
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig kind_config(ExperimentKind kind, const fs::path& root,
                             const std::string& name) {
    return ExperimentConfig::make(kind, (root / name).string());
}

} // namespace

int main() {
    const fs::path root = fs::path("acceptance_out");
    fs::remove_all(root);
    fs::create_directories(root);

    // --- criteria 1 + 2: profile asymptotics for three (n, beta) pairs ----------
    {
        bool slope_ok = true, raw_ok = true, flux_ok = true, time_ok = true;
        std::ostringstream d1, d2;
        for (auto [n, beta] : {std::pair{3, 1.0}, {4, 1.0}, {5, 2.0}}) {
            auto cfg = kind_config(ExperimentKind::profile_asymptotics, root,
                                   "asymptotics_n" + std::to_string(n));
            cfg.params["n"] = n;
            cfg.params["beta"] = beta;
            auto rep = run_experiment(cfg);
            auto slope = pick(rep, {"fitted slope"});
            auto raw = pick(rep, {"raw ratio"});
            auto flux = pick(rep, {"flux ratio"});
            slope_ok = slope_ok && slope.all_pass;
            raw_ok = raw_ok && raw.all_pass;
            flux_ok = flux_ok && flux.all_pass;
            time_ok = time_ok && rep.runtime_seconds <= 10.0;
            d1 << "n=" << n << ": " << slope.detail << "; " << raw.detail << "  ";
            d2 << "n=" << n << ": " << flux.detail << "  ";
        }
        record(1, "profile tail ratio: fitted slope within 2%, raw ratio within 10%, <= 10 s/case",
               slope_ok && raw_ok && time_ok, d1.str());
        record(2, "scaled flux within 10% of (n-2)/beta at r = 1e4", flux_ok, d2.str());
    }

    // --- criteria 3 + 4: scaling identity, ordering and sign laws ----------------
    {
        auto rep = run_experiment(
            kind_config(ExperimentKind::scaling_monotonicity, root, "scaling"));
        auto scaling = pick(rep, {"max relative scaling mismatch"});
        record(3, "family scaling identity exact to 1e-6 for lambda in {0.25, 4}",
               scaling.all_pass && scaling.found == 2, scaling.detail);
        auto mono = pick(rep, {"ordering violations", "sign-law violations"});
        record(4, "zero lambda-ordering and sign-law violations at stored nodes",
               mono.all_pass && mono.found == 2, mono.detail);
    }

    // --- criterion 5: non-integrability growth ------------------------------------
    {
        auto rep =
            run_experiment(kind_config(ExperimentKind::nonintegrability, root, "nonint"));
        auto ratios = pick(rep, {"doubling ratio"});
        record(5, "difference-mass doubling ratio within 20% of 2^{n-2} for n in {3, 4}",
               ratios.all_pass && ratios.found == 2, ratios.detail);
    }

    // --- criterion 6: exact-solution reproduction + refinement --------------------
    {
        auto rep_ss =
            run_experiment(kind_config(ExperimentKind::exact_selfsimilar, root, "exact_ss"));
        auto rep_bb =
            run_experiment(kind_config(ExperimentKind::exact_barenblatt, root, "exact_bb"));
        auto ss = pick(rep_ss, {"max relative error", "error reduction"});
        auto bb = pick(rep_bb, {"max relative error", "error reduction"});
        const bool time_ok = rep_ss.runtime_seconds <= 120.0 && rep_bb.runtime_seconds <= 120.0;
        record(6,
               "exact-solution runs: max inner error <= 1%, halving gain in [1.5, 3], <= 2 min",
               ss.all_pass && bb.all_pass && ss.found == 3 && bb.found == 3 && time_ok,
               "self-similar: " + ss.detail + " | barenblatt: " + bb.detail);
    }

    // --- criterion 7: L1 contraction ----------------------------------------------
    {
        auto rep =
            run_experiment(kind_config(ExperimentKind::l1_contraction, root, "contraction"));
        auto picked = pick(rep, {"worst relative increase", "number of snapshots"});
        record(7, "L1 distance non-increasing within 1e-6 across >= 20 snapshots",
               picked.all_pass && picked.found == 2, picked.detail);
    }

    // --- criteria 8 + 9 + 10: rescaled decay, sandwich, compact convergence --------
    double decay_runtime = 0.0;
    {
        auto rep = run_experiment(kind_config(ExperimentKind::theorem1_decay, root, "decay"));
        decay_runtime = rep.runtime_seconds;
        auto decay = pick(rep, {"worst D(t)", "rescaled L1 distance strictly decreasing"});
        record(8,
               "rescaled L1 decay D(t) <= e^{-(n-2) beta t} D(0) * 1.05, strictly decreasing, "
               "<= 5 min",
               decay.all_pass && decay.found == 2 && decay_runtime <= 300.0, decay.detail);
        auto sandwich = pick(rep, {"worst sandwich violation"});
        record(9, "rescaled state stays between psi_{0.5} and psi_{2} within 1e-8",
               sandwich.all_pass && sandwich.found == 1, sandwich.detail);
        auto compacts = pick(rep, {"sup over the compact window", "final sup"});
        record(10, "sup on |x| <= 5 decreasing and below 10% of its first value by t = 2",
               compacts.all_pass && compacts.found == 2, compacts.detail);
    }

    // --- criterion 11: time-slope inequality ----------------------------------------
    {
        auto rep = run_experiment(kind_config(ExperimentKind::aronson_benilan, root, "ab"));
        auto picked = pick(rep, {"worst margin of u_t <= u/t"});
        record(11, "u_t <= u/t holds with ab_tol = 1e-6 max(u)/t on both trajectories",
               picked.all_pass && picked.found == 2, picked.detail);
    }

    // --- criterion 12: tail envelope of the hole-filling run -------------------------
    {
        auto rep =
            run_experiment(kind_config(ExperimentKind::theorem2_envelope, root, "envelope"));
        auto picked = pick(rep, {"lower envelope constant", "envelope spread"});
        std::string constants;
        for (const auto& note : rep.notes)
            if (note.rfind("envelope constants", 0) == 0) constants = note;
        record(12, "bracket c <= u~ (1+|x|^2)/log|x| <= C on [3, 20] with C/c <= 100",
               picked.all_pass && picked.found == 2, picked.detail + " | " + constants);
    }

    // --- criterion 13: determinism ----------------------------------------------------
    {
        bool identical = true;
        int compared = 0;
        std::string detail;
        for (auto kind : all_experiment_kinds()) {
            auto cfg_a = kind_config(kind, root, "det_a_" + kind_name(kind));
            auto cfg_b = kind_config(kind, root, "det_b_" + kind_name(kind));
            auto rep_a = run_experiment(cfg_a);
            auto rep_b = run_experiment(cfg_b);
            for (std::size_t i = 0; i < rep_a.csv_files.size(); ++i) {
                ++compared;
                if (slurp(rep_a.csv_files[i]) != slurp(rep_b.csv_files[i])) {
                    identical = false;
                    detail += "mismatch in " + rep_a.csv_files[i] + "; ";
                }
            }
        }
        record(13, "re-running every experiment kind reproduces byte-identical CSVs", identical,
               std::to_string(compared) + " csv files compared across all kinds" +
                   (detail.empty() ? "" : ": " + detail));
    }

    bool all_pass = true;
    std::printf("\n==== acceptance criteria ====\n");
    for (const auto& r : g_results) {
        std::printf("[%s] criterion %2d: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str());
        if (!r.detail.empty()) std::printf("        %s\n", r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    std::printf("==== %s ====\n", all_pass ? "ALL CRITERIA PASSED" : "FAILURES PRESENT");
    return all_pass ? 0 : 1;
}
