#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "logdiff/profile.hpp"

using namespace logdiff;

namespace {

RadialProfile& psi1_n3() {
    static RadialProfile p = solve_profile(ProfileParams::self_similar(3, 1.0, 1.0), 1e6, 1e-10);
    return p;
}

// second-order nonuniform three-point derivative
double deriv3(double fm, double f0, double fp, double hm, double hp) {
    return (fp * hm * hm - fm * hp * hp + f0 * (hp * hp - hm * hm)) / (hm * hp * (hm + hp));
}

} // namespace

TEST_CASE("start of integration matches the small-r series", "[profile]") {
    // v = lambda - (alpha lambda^2 / 2n) r^2 + O(r^4); for (3,2,1,1) this is 1 - r^2/3
    const auto& p = psi1_n3();
    REQUIRE(eval_profile(p, 0.0).psi == 1.0);
    REQUIRE(eval_profile(p, 0.0).dpsi == 0.0);
    const double r = 1e-4;
    REQUIRE(eval_profile(p, r).psi == Catch::Approx(1.0 - r * r / 3.0).epsilon(1e-12));

    // generic (alpha != 2 beta) parameters
    ProfileParams q{4, 3.0, 1.5, 2.0};
    auto pq = solve_profile(q, 10.0, 1e-10);
    const double coeff = q.alpha * q.lambda * q.lambda / (2.0 * q.n);
    REQUIRE(eval_profile(pq, r).psi ==
            Catch::Approx(q.lambda - coeff * r * r).epsilon(1e-10));
    REQUIRE(pq.values[0] == q.lambda);
    REQUIRE(pq.derivs[0] == 0.0);
}

TEST_CASE("stored fields satisfy the profile equation to stencil accuracy", "[profile]") {
    // residual of (g)' + (n-1)/r g + alpha v + beta r v', g = v'/v, with the
    // derivative of g taken by finite differences; second order in the node
    // spacing, so ~1e-4 at 64 nodes/decade and ~4x smaller at 128
    auto fd_residual = [](const RadialProfile& p) {
        double worst = 0;
        for (std::size_t i = 2; i + 1 < p.size(); ++i) {
            const double rm = p.radii[i - 1], r0 = p.radii[i], rp = p.radii[i + 1];
            const double gm = p.derivs[i - 1] / p.values[i - 1];
            const double g0 = p.derivs[i] / p.values[i];
            const double gp = p.derivs[i + 1] / p.values[i + 1];
            const double dg = deriv3(gm, g0, gp, r0 - rm, rp - r0);
            const auto& par = p.params;
            const double res = dg + (par.n - 1) / r0 * g0 + par.alpha * p.values[i] +
                               par.beta * r0 * p.derivs[i];
            const double scale = std::abs((par.n - 1) / r0 * g0) +
                                 std::abs(par.alpha * p.values[i]) +
                                 std::abs(par.beta * r0 * p.derivs[i]);
            worst = std::max(worst, std::abs(res) / scale);
        }
        return worst;
    };
    auto params = ProfileParams::self_similar(3, 1.0, 1.0);
    const double res64 = fd_residual(solve_profile(params, 1e4, 1e-9));
    SolveOptions fine;
    fine.nodes_per_decade = 128;
    const double res128 = fd_residual(solve_profile(params, 1e4, 1e-9, fine));
    REQUIRE(res64 < 2e-4);
    REQUIRE(res64 / res128 > 3.0); // second-order stencil: ~4
}

TEST_CASE("tail ratio at 1e6 lies inside the stated band", "[profile]") {
    const auto pv = eval_profile(psi1_n3(), 1e6);
    const double ratio = 1e12 * pv.psi / std::log(1e6);
    REQUIRE(ratio > 1.8);
    REQUIRE(ratio < 2.2);
}

TEST_CASE("evaluation is exact at nodes and monotone off them", "[profile]") {
    const auto& p = psi1_n3();
    for (std::size_t i : {std::size_t{0}, std::size_t{5}, p.size() / 2, p.size() - 1}) {
        auto pv = eval_profile(p, p.radii[i]);
        REQUIRE(pv.psi == p.values[i]);
        REQUIRE(pv.dpsi == p.derivs[i]);
    }
    double prev = eval_profile(p, 0.0).psi;
    for (double r = 0.0137; r < 1e6; r *= 3.7) {
        const double v = eval_profile(p, r).psi;
        REQUIRE(v > 0);
        REQUIRE(v < prev); // alpha > 0: strictly decreasing
        prev = v;
    }
    REQUIRE_THROWS_AS(eval_profile(p, -1.0), std::out_of_range);
    REQUIRE_THROWS_AS(eval_profile(p, 2e6), std::out_of_range);
}

TEST_CASE("sign laws hold at every stored node", "[profile]") {
    for (auto params : {ProfileParams::self_similar(3, 1.0, 1.0), ProfileParams{4, 3.0, 1.5, 0.5}}) {
        auto p = solve_profile(params, 1e3, 1e-9);
        for (std::size_t i = 1; i < p.size(); ++i) {
            REQUIRE(p.values[i] > 0);
            REQUIRE(p.derivs[i] < 0); // alpha > 0
            REQUIRE(p.values[i] + (params.beta / params.alpha) * p.radii[i] * p.derivs[i] > 0);
        }
        for (std::size_t i = 1; i < p.size(); ++i) REQUIRE(p.moment[i] >= p.moment[i - 1]);
    }
}

TEST_CASE("family scaling identity holds to solver precision", "[profile]") {
    const double tol = 1e-9;
    auto psi1 = solve_profile(ProfileParams::self_similar(3, 1.0, 1.0), 2.5e3, tol);
    REQUIRE(rescaled_profile(psi1, 1.0, 17.3) == eval_profile(psi1, 17.3).psi);
    for (double lam : {0.25, 4.0}) {
        REQUIRE(rescaled_profile(psi1, lam, 0.0) == Catch::Approx(lam).epsilon(1e-14));
        auto plam = solve_profile(ProfileParams::self_similar(3, 1.0, lam), 1e3, tol);
        double worst = 0.0;
        for (std::size_t i = 0; i < plam.size(); ++i) {
            const double r = plam.radii[i];
            if (std::sqrt(lam) * r > psi1.r_max) break;
            worst = std::max(worst, std::abs(rescaled_profile(psi1, lam, r) - plam.values[i]) /
                                        plam.values[i]);
        }
        REQUIRE(worst <= 10.0 * tol);
    }
    // two independent integrations of the same family member
    auto p4 = solve_profile(ProfileParams::self_similar(3, 1.0, 4.0), 10.0, tol);
    REQUIRE(std::abs(rescaled_profile(psi1, 4.0, 1.0) - eval_profile(p4, 1.0).psi) <=
            10.0 * tol * eval_profile(p4, 1.0).psi);
    REQUIRE_THROWS_AS(rescaled_profile(p4, 2.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(rescaled_profile(psi1, 4.0, 2e3), std::out_of_range);
}

TEST_CASE("profiles are strictly ordered in lambda", "[profile]") {
    auto params1 = ProfileParams::self_similar(3, 1.0, 1.0);
    auto params2 = ProfileParams::self_similar(3, 1.0, 2.0);
    REQUIRE(params1.monotone_family());
    auto p1 = solve_profile(params1, 1e3, 1e-9);
    auto p2 = solve_profile(params2, 1e3, 1e-9);
    int violations = 0;
    for (double r : p1.radii)
        if (!(eval_profile(p2, r).psi > eval_profile(p1, r).psi)) ++violations;
    for (double r : p2.radii)
        if (!(eval_profile(p2, r).psi > eval_profile(p1, r).psi)) ++violations;
    REQUIRE(violations == 0);
}

TEST_CASE("asymptotic diagnostics recover the tail limits", "[profile]") {
    // r^2 psi / log r -> 2(n-2)/beta and r^2 (psi + r psi'/2) -> (n-2)/beta
    {
        const auto& p = psi1_n3();
        std::vector<double> samples;
        for (double r : p.radii)
            if (r >= 10.0) samples.push_back(r);
        auto diag = asymptotic_diagnostics(p, samples);
        REQUIRE(diag.extrapolated_ratio_log == Catch::Approx(2.0).margin(0.04));
        REQUIRE(diag.extrapolated_flux == Catch::Approx(1.0).margin(0.02));
        for (const auto& row : diag.rows)
            if (std::abs(row.r - 1e4) < 1e-6)
                REQUIRE(row.flux_ratio == Catch::Approx(1.0).margin(0.1));
    }
    {
        auto p = solve_profile(ProfileParams::self_similar(5, 2.0, 1.0), 1e6, 1e-10);
        std::vector<double> samples;
        for (double r : p.radii)
            if (r >= 1e4) samples.push_back(r);
        auto diag = asymptotic_diagnostics(p, samples);
        REQUIRE(diag.extrapolated_ratio_log == Catch::Approx(3.0).margin(0.06));
    }
    REQUIRE_THROWS_AS(asymptotic_diagnostics(psi1_n3(), {10.0, 100.0}), std::invalid_argument);
}

TEST_CASE("log-slope diagnostic decays toward zero", "[profile]") {
    auto p = solve_profile(ProfileParams::self_similar(3, 1.0, 1.0), 1e9, 1e-10);
    double prev = 10.0;
    for (double r : {1e2, 1e4, 1e6, 1e9}) {
        auto pv = eval_profile(p, r);
        const double slope = 2.0 + r * pv.dpsi / pv.psi;
        REQUIRE(slope > 0);
        REQUIRE(slope < prev);
        prev = slope;
    }
    auto pv6 = eval_profile(p, 1e6);
    REQUIRE(std::abs(2.0 + 1e6 * pv6.dpsi / pv6.psi) < 0.1);
    auto pv9 = eval_profile(p, 1e9);
    REQUIRE(std::abs(2.0 + 1e9 * pv9.dpsi / pv9.psi) < 0.05);
}

TEST_CASE("difference mass grows like R^{n-2}", "[profile]") {
    for (int n : {3, 4}) {
        auto p2 = solve_profile(ProfileParams::self_similar(n, 1.0, 2.0), 4e4, 1e-9);
        auto p1 = solve_profile(ProfileParams::self_similar(n, 1.0, 1.0), 4e4, 1e-9);
        REQUIRE(difference_mass(p2, p1, 0.0) == 0.0);
        double prev = 0.0;
        for (double R : {0.1, 1.0, 10.0, 100.0, 1e3, 1e4}) {
            const double dm = difference_mass(p2, p1, R);
            REQUIRE(dm > prev); // positive integrand
            prev = dm;
        }
        const double ratio = difference_mass(p2, p1, 2e4) / difference_mass(p2, p1, 1e4);
        const double expect = std::pow(2.0, n - 2);
        REQUIRE(ratio > 0.8 * expect);
        REQUIRE(ratio < 1.2 * expect);
    }
    auto a = solve_profile(ProfileParams::self_similar(3, 1.0, 2.0), 10.0, 1e-9);
    auto b = solve_profile(ProfileParams::self_similar(4, 1.0, 1.0), 10.0, 1e-9);
    REQUIRE_THROWS_AS(difference_mass(a, b, 1.0), std::invalid_argument);
    auto c = solve_profile(ProfileParams::self_similar(3, 1.0, 1.0), 10.0, 1e-9);
    REQUIRE_THROWS_AS(difference_mass(c, a, 1.0), std::invalid_argument); // lambda_a < lambda_b
}

TEST_CASE("difference mass agrees with the stored-moment route", "[profile]") {
    // independent evaluation: omega_n (M_a(R) - M_b(R)) with M interpolated
    // by Hermite using the exact derivative M' = r^{n-1} psi
    auto moment_at = [](const RadialProfile& p, double R) {
        auto it = std::lower_bound(p.radii.begin(), p.radii.end(), R);
        const std::size_t j = static_cast<std::size_t>(it - p.radii.begin());
        if (p.radii[j] == R) return p.moment[j];
        const std::size_t i = j - 1;
        const double h = p.radii[j] - p.radii[i];
        const double t = (R - p.radii[i]) / h;
        const double m0 = std::pow(p.radii[i], p.params.n - 1) * p.values[i];
        const double m1 = std::pow(p.radii[j], p.params.n - 1) * p.values[j];
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * p.moment[i] + (t3 - 2 * t2 + t) * h * m0 +
               (-2 * t3 + 3 * t2) * p.moment[j] + (t3 - t2) * h * m1;
    };
    auto p2 = solve_profile(ProfileParams::self_similar(3, 1.0, 2.0), 2e4, 1e-9);
    auto p1 = solve_profile(ProfileParams::self_similar(3, 1.0, 1.0), 2e4, 1e-9);
    for (double R : {10.0, 1e3, 1e4}) {
        const double dm = difference_mass(p2, p1, R);
        const double via_moment = omega_n(3) * (moment_at(p2, R) - moment_at(p1, R));
        REQUIRE(dm == Catch::Approx(via_moment).epsilon(3e-4));
    }
}

TEST_CASE("moment differentiation recovers the shell integrand", "[profile]") {
    auto p = solve_profile(ProfileParams::self_similar(3, 1.0, 1.0), 1e3, 1e-9);
    double worst = 0;
    for (std::size_t i = 2; i + 1 < p.size(); ++i) {
        const double dM = deriv3(p.moment[i - 1], p.moment[i], p.moment[i + 1],
                                 p.radii[i] - p.radii[i - 1], p.radii[i + 1] - p.radii[i]);
        const double expect = p.radii[i] * p.radii[i] * p.values[i];
        worst = std::max(worst, std::abs(dM - expect) / expect);
    }
    REQUIRE(worst < 1e-3);
}

TEST_CASE("self-similar evaluation composes profile and scaling", "[profile]") {
    const auto& p = psi1_n3();
    REQUIRE(self_similar_eval(p, 7.0, 0.0) == eval_profile(p, 7.0).psi);
    for (double t : {0.3, 1.0, 2.5})
        REQUIRE(self_similar_eval(p, 0.0, t) == Catch::Approx(std::exp(-2.0 * t)).epsilon(1e-14));
    // one-step-in-time comparison: phi(x, t-1) <= e^{2 beta} phi(x, t)
    for (double t : {1.0, 2.0, 4.0})
        for (double x : {0.0, 0.5, 3.0, 40.0})
            REQUIRE(self_similar_eval(p, x, t - 1) <=
                    std::exp(2.0) * self_similar_eval(p, x, t) * (1 + 1e-12));
    REQUIRE_THROWS_AS(self_similar_eval(p, 1.0, -0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(self_similar_eval(p, 2e6, 0.0), std::out_of_range);
}

TEST_CASE("barenblatt closed form evaluates and extinguishes", "[profile]") {
    REQUIRE(barenblatt_eval(1.0, 1.0, 3, 0.0, 0.0) == 2.0);
    REQUIRE(barenblatt_eval(2.0, 1.0, 4, 1.0, 0.0) == Catch::Approx(4.0 / 3.0).epsilon(1e-15));
    REQUIRE(barenblatt_eval(1.0, 1.0, 3, 5.0, 1.0) == 0.0); // t = T
    REQUIRE(barenblatt_eval(1.0, 1.0, 3, 5.0, 2.0) == 0.0); // t > T
    REQUIRE(barenblatt_eval(1.0, 1.0, 5, 0.0, 0.5) > 0.0);
    REQUIRE_THROWS_AS(barenblatt_eval(0.0, 1.0, 3, 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(barenblatt_eval(1.0, -1.0, 3, 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(barenblatt_eval(1.0, 1.0, 2, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("profile csv round-trips bit-exactly", "[profile]") {
    namespace fs = std::filesystem;
    const auto params = ProfileParams::self_similar(3, 1.0, 1.0);
    auto p = solve_profile(params, 100.0, 1e-9);
    const auto path = (fs::temp_directory_path() / "logdiff_profile_roundtrip.csv").string();
    write_profile_csv(p, path);
    auto q = read_profile_csv(path, params);
    REQUIRE(q.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        REQUIRE(q.radii[i] == p.radii[i]);
        REQUIRE(q.values[i] == p.values[i]);
        REQUIRE(q.derivs[i] == p.derivs[i]);
        REQUIRE(q.moment[i] == p.moment[i]);
    }
    REQUIRE(eval_profile(q, 17.31).psi == eval_profile(p, 17.31).psi);
    fs::remove(path);
    REQUIRE_THROWS_AS(read_profile_csv("/nonexistent/file.csv", params), std::runtime_error);
}

TEST_CASE("invalid solve inputs are rejected", "[profile]") {
    REQUIRE_THROWS_AS(solve_profile(ProfileParams{2, 2.0, 1.0, 1.0}, 10, 1e-9),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(solve_profile(ProfileParams{3, 2.0, -1.0, 1.0}, 10, 1e-9),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(solve_profile(ProfileParams{3, 2.0, 1.0, 0.0}, 10, 1e-9),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(solve_profile(ProfileParams::self_similar(3, 1.0, 1.0), -5.0, 1e-9),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(solve_profile(ProfileParams::self_similar(3, 1.0, 1.0), 10.0, 0.0),
                      std::invalid_argument);
}
