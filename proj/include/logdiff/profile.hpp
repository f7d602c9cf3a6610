#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "logdiff/common.hpp"
#include "logdiff/csv.hpp"
#include "logdiff/interp.hpp"
#include "logdiff/ode45.hpp"

namespace logdiff {

/// Parameters of one radial profile ODE instance:
///   (v'/v)' + (n-1)/r * v'/v + alpha*v + beta*r*v' = 0,  v(0)=lambda, v'(0)=0.
/// The self-similar profiles psi_lambda use alpha = 2*beta.
struct ProfileParams {
    int n = 3;
    double alpha = 2.0;
    double beta = 1.0;
    double lambda = 1.0;

    void validate() const {
        if (n < 3) throw std::invalid_argument("ProfileParams: n must be >= 3");
        if (!(beta > 0)) throw std::invalid_argument("ProfileParams: beta must be > 0");
        if (!(lambda > 0)) throw std::invalid_argument("ProfileParams: lambda must be > 0");
    }

    /// Hypothesis under which profiles are strictly ordered in lambda.
    bool monotone_family() const { return alpha > 0 && n * beta > alpha; }

    bool same_family(const ProfileParams& o, double tol = 1e-12) const {
        return n == o.n && std::abs(alpha - o.alpha) <= tol * std::max(1.0, std::abs(alpha)) &&
               std::abs(beta - o.beta) <= tol * std::max(1.0, beta);
    }

    static ProfileParams self_similar(int n, double beta, double lambda) {
        return ProfileParams{n, 2.0 * beta, beta, lambda};
    }
};

/// A computed radial profile on [0, r_max]: node radii (first node exactly 0),
/// values psi(r_i) > 0, derivatives psi'(r_i), and the running moment
/// M(r_i) = integral_0^{r_i} rho^{n-1} psi(rho) drho.
struct RadialProfile {
    ProfileParams params;
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> derivs;
    std::vector<double> moment;
    double r_max = 0.0;
    double tol = 0.0; // solve tolerance; 0 when unknown (imported data)

    std::shared_ptr<const CubicHermite> log_interp; // (log1p r, log psi)

    std::size_t size() const { return radii.size(); }
};

struct ProfileValue {
    double psi;
    double dpsi;
};

struct SolveOptions {
    int nodes_per_decade = 64;
};

namespace detail {

inline double profile_rhs_v(const ProfileParams& p, double r, double v, double M) {
    return -p.beta * r * v * v +
           (p.n * p.beta - p.alpha) * v * M / std::pow(r, p.n - 1);
}

inline void build_log_interp(RadialProfile& prof) {
    std::vector<double> s(prof.size()), f(prof.size()), m(prof.size());
    for (std::size_t i = 0; i < prof.size(); ++i) {
        s[i] = std::log1p(prof.radii[i]);
        f[i] = std::log(prof.values[i]);
        m[i] = i == 0 ? 0.0
                      : prof.derivs[i] * (1.0 + prof.radii[i]) / prof.values[i];
    }
    prof.log_interp = std::make_shared<const CubicHermite>(
        CubicHermite::from_slopes(std::move(s), std::move(f), m));
}

inline void check_profile_invariants(const RadialProfile& prof) {
    const auto& p = prof.params;
    for (std::size_t i = 1; i < prof.size(); ++i) {
        const double r = prof.radii[i], v = prof.values[i], dv = prof.derivs[i];
        if (!(v > 0) || !std::isfinite(v))
            throw solver_error("profile: nonpositive value at r=" + std::to_string(r));
        if (p.alpha > 0 && !(dv < 0))
            throw solver_error("profile: derivative not negative at r=" + std::to_string(r));
        if (p.alpha != 0.0 && !(v + (p.beta / p.alpha) * r * dv > 0))
            throw solver_error("profile: v + (beta/alpha) r v' not positive at r=" +
                               std::to_string(r));
        if (!std::isfinite(prof.moment[i]))
            throw solver_error("profile: moment overflow; r_max too large for double range");
        if (prof.moment[i] < prof.moment[i - 1])
            throw solver_error("profile: moment not nondecreasing");
    }
}

} // namespace detail

/// Integrates the profile ODE as the augmented first-order system
///   v' = -beta r v^2 + (n beta - alpha) v M / r^{n-1},   M' = r^{n-1} v,
/// in the variable s = log r, starting from the series expansion
///   v = lambda - (alpha lambda^2 / 2n) r^2,  M = lambda r^n / n
/// at r0 = 1e-3/sqrt(lambda). Nodes are stored geometrically.
inline RadialProfile solve_profile(const ProfileParams& params, double r_max, double tol,
                                   const SolveOptions& opts = {}) {
    params.validate();
    if (!(r_max > 0)) throw std::invalid_argument("solve_profile: r_max must be > 0");
    if (!(tol > 0)) throw std::invalid_argument("solve_profile: tol must be > 0");
    if (opts.nodes_per_decade < 4)
        throw std::invalid_argument("solve_profile: nodes_per_decade too small");

    const double r0 = std::min(1e-3 / std::sqrt(params.lambda), r_max / 8.0);

    std::vector<double> nodes;
    const double decades = std::log10(r_max / r0);
    const int total = static_cast<int>(std::ceil(decades * opts.nodes_per_decade));
    nodes.reserve(total + 2);
    for (int k = 0; k <= total; ++k) {
        double r = r0 * std::pow(10.0, static_cast<double>(k) / opts.nodes_per_decade);
        if (r >= r_max * (1.0 - 1e-12)) {
            nodes.push_back(r_max);
            break;
        }
        nodes.push_back(r);
    }
    if (nodes.back() != r_max) nodes.push_back(r_max);

    using Solver = Dopri5<2>;
    Solver::Options oo;
    oo.rel_tol = tol;
    oo.abs_tol = 0.0;
    Solver ode(
        [&params](double s, const Solver::State& y, Solver::State& dy) {
            const double r = std::exp(s);
            dy[0] = r * detail::profile_rhs_v(params, r, y[0], y[1]);
            dy[1] = r * std::pow(r, params.n - 1) * y[0];
        },
        oo);
    ode.set_guard([](const Solver::State& y) { return y[0] > 0.0 && y[1] > 0.0; });

    const double lam = params.lambda;
    Solver::State y0{lam - (params.alpha * lam * lam / (2.0 * params.n)) * r0 * r0,
                     lam * std::pow(r0, params.n) / params.n};
    ode.init(std::log(r0), y0);

    RadialProfile prof;
    prof.params = params;
    prof.r_max = r_max;
    prof.tol = tol;
    prof.radii.reserve(nodes.size() + 1);
    prof.values.reserve(nodes.size() + 1);
    prof.radii.push_back(0.0);
    prof.values.push_back(lam);
    prof.derivs.push_back(0.0);
    prof.moment.push_back(0.0);
    for (double r : nodes) {
        try {
            const auto& y = ode.advance_to(std::log(r));
            prof.radii.push_back(r);
            prof.values.push_back(y[0]);
            prof.derivs.push_back(detail::profile_rhs_v(params, r, y[0], y[1]));
            prof.moment.push_back(y[1]);
        } catch (const solver_error& e) {
            throw solver_error("solve_profile: integration aborted before r=" +
                               std::to_string(r) + " (nonpositive value or step underflow): " +
                               e.what());
        }
    }

    detail::check_profile_invariants(prof);
    detail::build_log_interp(prof);
    return prof;
}

/// Monotone interpolation of (psi, psi'); exact at stored nodes.
inline ProfileValue eval_profile(const RadialProfile& prof, double r) {
    if (!(r >= 0) || r > prof.r_max * (1.0 + 1e-12))
        throw std::out_of_range("eval_profile: r outside [0, r_max]");
    r = std::min(r, prof.r_max);
    auto it = std::lower_bound(prof.radii.begin(), prof.radii.end(), r);
    if (it != prof.radii.end() && *it == r) {
        const std::size_t i = static_cast<std::size_t>(it - prof.radii.begin());
        return {prof.values[i], prof.derivs[i]};
    }
    const auto e = prof.log_interp->eval(std::log1p(r));
    const double psi = std::exp(e.value);
    return {psi, psi * e.deriv / (1.0 + r)};
}

/// psi_lambda(r) from the lambda = 1 profile via the family scaling
/// psi_lambda(x) = lambda * psi_1(sqrt(lambda) |x|).
inline double rescaled_profile(const RadialProfile& psi1, double lambda, double r) {
    if (std::abs(psi1.params.lambda - 1.0) > 1e-12)
        throw std::invalid_argument("rescaled_profile: base profile must have lambda = 1");
    if (std::abs(psi1.params.alpha - 2.0 * psi1.params.beta) >
        1e-12 * std::max(1.0, psi1.params.alpha))
        throw std::invalid_argument("rescaled_profile: base profile must have alpha = 2 beta");
    if (!(lambda > 0)) throw std::invalid_argument("rescaled_profile: lambda must be > 0");
    const double rr = std::sqrt(lambda) * r;
    if (rr > psi1.r_max * (1.0 + 1e-12))
        throw std::out_of_range("rescaled_profile: sqrt(lambda) * r exceeds r_max");
    return lambda * eval_profile(psi1, rr).psi;
}

/// Tail diagnostics of a profile: the ratio r^2 psi / log r, the scaled flux
/// r^2 (psi + r psi'/2), and the logarithmic slope 2 + r psi'/psi, together
/// with least-squares extrapolations over the largest sampled decade.
struct AsymptoticRow {
    double r;
    double ratio_log;  // r^2 psi(r) / log r
    double flux_ratio; // r^2 (psi + r psi'/2)
    double log_slope;  // 2 + r psi'/psi
};

struct AsymptoticDiagnostics {
    std::vector<AsymptoticRow> rows;
    double extrapolated_ratio_log = 0.0; // slope of r^2 psi against log r
    double extrapolated_flux = 0.0;      // intercept of flux_ratio against 1/log r
};

inline AsymptoticDiagnostics asymptotic_diagnostics(const RadialProfile& prof,
                                                    const std::vector<double>& sample_radii) {
    if (sample_radii.size() < 3)
        throw std::invalid_argument("asymptotic_diagnostics: need >= 3 sample radii (fit underdetermined)");
    AsymptoticDiagnostics diag;
    diag.rows.reserve(sample_radii.size());
    for (double r : sample_radii) {
        if (!(r > 1.0) || r > prof.r_max * (1.0 + 1e-12))
            throw std::invalid_argument("asymptotic_diagnostics: sample radii must lie in (1, r_max]");
        const auto pv = eval_profile(prof, r);
        AsymptoticRow row;
        row.r = r;
        row.ratio_log = r * r * pv.psi / std::log(r);
        row.flux_ratio = r * r * (pv.psi + 0.5 * r * pv.dpsi);
        row.log_slope = 2.0 + r * pv.dpsi / pv.psi;
        diag.rows.push_back(row);
    }

    double r_top = 0.0;
    for (const auto& row : diag.rows) r_top = std::max(r_top, row.r);
    std::vector<const AsymptoticRow*> fit;
    for (const auto& row : diag.rows)
        if (row.r >= r_top / 10.0 * (1.0 - 1e-12)) fit.push_back(&row);
    if (fit.size() < 3) {
        fit.clear();
        for (const auto& row : diag.rows) fit.push_back(&row);
    }

    // Slope of y = r^2 psi against x = log r. The tail carries a slowly
    // drifting log(log r) term, so a plain straight-line slope is biased by
    // O(1/log r); fitting y = a x + b log x + c and reporting a removes it.
    {
        const std::size_t m = fit.size();
        double mx = 0, ml = 0;
        for (const auto* row : fit) {
            mx += std::log(row->r);
            ml += std::log(std::log(row->r));
        }
        mx /= m;
        ml /= m;
        long double G[3][3] = {}, rhs[3] = {};
        for (const auto* row : fit) {
            const double x = std::log(row->r);
            const double y = row->ratio_log * x;
            const double col[3] = {x - mx, std::log(x) - ml, 1.0};
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) G[a][b] += static_cast<long double>(col[a]) * col[b];
                rhs[a] += static_cast<long double>(col[a]) * y;
            }
        }
        for (int c = 0; c < 3; ++c) {
            int piv = c;
            for (int r = c + 1; r < 3; ++r)
                if (std::abs(static_cast<double>(G[r][c])) >
                    std::abs(static_cast<double>(G[piv][c])))
                    piv = r;
            std::swap(G[c], G[piv]);
            std::swap(rhs[c], rhs[piv]);
            for (int r = c + 1; r < 3; ++r) {
                const long double f = G[r][c] / G[c][c];
                for (int cc = c; cc < 3; ++cc) G[r][cc] -= f * G[c][cc];
                rhs[r] -= f * rhs[c];
            }
        }
        long double sol[3];
        for (int r = 2; r >= 0; --r) {
            long double s = rhs[r];
            for (int c = r + 1; c < 3; ++c) s -= G[r][c] * sol[c];
            sol[r] = s / G[r][r];
        }
        diag.extrapolated_ratio_log = static_cast<double>(sol[0]);
    }
    // intercept of flux_ratio against 1/log r (Richardson-style tail model)
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto* row : fit) {
            const double x = 1.0 / std::log(row->r);
            const double y = row->flux_ratio;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double nfit = static_cast<double>(fit.size());
        const double slope = (nfit * sxy - sx * sy) / (nfit * sxx - sx * sx);
        diag.extrapolated_flux = (sy - slope * sx) / nfit;
    }
    return diag;
}

/// omega_n * integral_0^R rho^{n-1} (psi_a - psi_b) drho by composite
/// trapezoid with exact shell weights on the merged node set (each merged
/// interval halved once). The integral grows like R^{n-2}: the difference of
/// two profiles is not integrable over R^n.
inline double difference_mass(const RadialProfile& a, const RadialProfile& b, double R) {
    if (!a.params.same_family(b.params))
        throw std::invalid_argument("difference_mass: profiles from different parameter families");
    if (!(a.params.lambda > b.params.lambda))
        throw std::invalid_argument("difference_mass: requires lambda_a > lambda_b");
    if (!(R >= 0) || R > std::min(a.r_max, b.r_max) * (1.0 + 1e-12))
        throw std::out_of_range("difference_mass: R outside both profiles' range");
    if (R == 0.0) return 0.0;

    std::vector<double> xs;
    xs.reserve(a.size() + b.size() + 2);
    for (double r : a.radii)
        if (r < R) xs.push_back(r);
    for (double r : b.radii)
        if (r < R) xs.push_back(r);
    xs.push_back(R);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double u, double v) { return v - u < 1e-14 * std::max(1.0, v); }),
             xs.end());

    const int n = a.params.n;
    auto g = [&](double r) { return eval_profile(a, r).psi - eval_profile(b, r).psi; };
    double acc = 0.0;
    double x0 = xs[0], g0 = g(x0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double x1 = xs[i], g1 = g(x1);
        const double xm = 0.5 * (x0 + x1), gm = g(xm);
        acc += 0.5 * (g0 + gm) * shell_weight(n, x0, xm);
        acc += 0.5 * (gm + g1) * shell_weight(n, xm, x1);
        x0 = x1;
        g0 = g1;
    }
    return omega_n(n) * acc;
}

/// The exact self-similar solution phi_lambda(x,t) = e^{-2 beta t} psi_lambda(e^{-beta t} x).
inline double self_similar_eval(const RadialProfile& prof, double x_radius, double t) {
    if (!(t >= 0)) throw std::invalid_argument("self_similar_eval: t must be >= 0");
    if (std::abs(prof.params.alpha - 2.0 * prof.params.beta) >
        1e-12 * std::max(1.0, prof.params.alpha))
        throw std::invalid_argument("self_similar_eval: profile must have alpha = 2 beta");
    const double beta = prof.params.beta;
    const double rho = std::exp(-beta * t) * x_radius;
    if (rho > prof.r_max * (1.0 + 1e-12))
        throw std::out_of_range("self_similar_eval: e^{-beta t} |x| exceeds r_max");
    return std::exp(-2.0 * beta * t) * eval_profile(prof, rho).psi;
}

/// The Barenblatt solution
///   B_k(x,t) = 2(n-2) (T-t)_+^{n/(n-2)} / (k + (T-t)_+^{2/(n-2)} |x|^2),
/// which extinguishes at t = T.
inline double barenblatt_eval(double k, double T, int n, double x_radius, double t) {
    if (!(k > 0)) throw std::invalid_argument("barenblatt_eval: k must be > 0");
    if (!(T > 0)) throw std::invalid_argument("barenblatt_eval: T must be > 0");
    if (n < 3) throw std::invalid_argument("barenblatt_eval: n must be >= 3");
    const double s = T - t;
    if (s <= 0.0) return 0.0;
    const double num = 2.0 * (n - 2) * std::pow(s, static_cast<double>(n) / (n - 2));
    const double den = k + std::pow(s, 2.0 / (n - 2)) * x_radius * x_radius;
    return num / den;
}

inline void write_profile_csv(const RadialProfile& prof, const std::string& path) {
    csv::Writer w("r,psi,dpsi,moment");
    for (std::size_t i = 0; i < prof.size(); ++i)
        w.row(prof.radii[i], prof.values[i], prof.derivs[i], prof.moment[i]);
    w.save(path);
}

/// Reads a profile previously written by write_profile_csv. The CSV carries
/// only the field data, so the parameters it was solved with must be supplied.
inline RadialProfile read_profile_csv(const std::string& path, const ProfileParams& params) {
    params.validate();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_profile_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || csv::split_line(line) != std::vector<std::string>{"r", "psi", "dpsi", "moment"})
        throw std::runtime_error("read_profile_csv: bad header in " + path);
    RadialProfile prof;
    prof.params = params;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = csv::split_line(line);
        if (cells.size() != 4) throw std::runtime_error("read_profile_csv: bad row in " + path);
        prof.radii.push_back(csv::parse_double(cells[0]));
        prof.values.push_back(csv::parse_double(cells[1]));
        prof.derivs.push_back(csv::parse_double(cells[2]));
        prof.moment.push_back(csv::parse_double(cells[3]));
    }
    if (prof.size() < 2 || prof.radii.front() != 0.0)
        throw std::runtime_error("read_profile_csv: profile must start at r = 0");
    prof.r_max = prof.radii.back();
    prof.tol = 0.0;
    detail::check_profile_invariants(prof);
    detail::build_log_interp(prof);
    return prof;
}

} // namespace logdiff
