#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "logdiff/common.hpp"
#include "logdiff/grid.hpp"
#include "logdiff/interp.hpp"
#include "logdiff/profile.hpp"

namespace logdiff {

/// Values that are exactly zero in an initial-data spec are lifted to this
/// floor so the solver can work in log u.
constexpr double kPositivityFloor = 1e-300;

/// One time slice of the radial solution field; u > 0 at every node.
struct State {
    GridPtr grid;
    double t = 0.0;
    std::vector<double> u;
};

/// Dirichlet data at r = R_dom.
class BoundaryCondition {
public:
    enum class Kind { exact_self_similar, exact_barenblatt, pinned_initial };

    static BoundaryCondition self_similar(std::shared_ptr<const RadialProfile> psi) {
        BoundaryCondition bc;
        bc.kind_ = Kind::exact_self_similar;
        bc.profile_ = std::move(psi);
        return bc;
    }
    static BoundaryCondition barenblatt(double k, double T, int n) {
        BoundaryCondition bc;
        bc.kind_ = Kind::exact_barenblatt;
        bc.k_ = k;
        bc.T_ = T;
        bc.n_ = n;
        return bc;
    }
    static BoundaryCondition pinned(double value) {
        if (!(value > 0)) throw std::invalid_argument("BoundaryCondition: pinned value must be > 0");
        BoundaryCondition bc;
        bc.kind_ = Kind::pinned_initial;
        bc.pinned_ = value;
        return bc;
    }

    Kind kind() const { return kind_; }
    double barenblatt_k() const { return k_; }
    double barenblatt_T() const { return T_; }
    double pinned_value() const { return pinned_; }
    const std::shared_ptr<const RadialProfile>& profile() const { return profile_; }

    double value(double r, double t) const {
        double g = 0.0;
        switch (kind_) {
        case Kind::exact_self_similar:
            g = self_similar_eval(*profile_, r, t);
            break;
        case Kind::exact_barenblatt:
            g = barenblatt_eval(k_, T_, n_, r, t);
            break;
        case Kind::pinned_initial:
            g = pinned_;
            break;
        }
        if (!(g > 0))
            throw solver_error("BoundaryCondition: nonpositive boundary value at t=" +
                               std::to_string(t));
        return g;
    }

private:
    Kind kind_ = Kind::pinned_initial;
    double k_ = 0, T_ = 0, pinned_ = 1.0;
    int n_ = 3;
    std::shared_ptr<const RadialProfile> profile_;
};

/// Compactly supported bump A * (1 - (r/radius)^2)_+^2.
struct BumpSpec {
    double amplitude = 0.0;
    double radius = 1.0;

    double operator()(double r) const {
        const double q = 1.0 - sq(r / radius);
        return q > 0 ? amplitude * sq(q) : 0.0;
    }
};

/// Initial-data spec: a profile with an optional radial perturbation, a
/// Barenblatt slice, a pointwise table, or a profile plus seeded random bumps.
struct InitialSpec {
    enum class Kind { profile, profile_bump, profile_random_bumps, barenblatt, table };

    Kind kind = Kind::profile;
    std::shared_ptr<const RadialProfile> profile; // for the profile kinds
    BumpSpec bump;                                // profile_bump
    double k = 1.0, T = 1.0;                      // barenblatt
    std::function<double(double)> table;          // table
    std::uint64_t seed = 0;                       // profile_random_bumps
    int bump_count = 0;
    double bump_amp_scale = 0.0;
    double bump_zone = 1.0;

    static InitialSpec from_profile(std::shared_ptr<const RadialProfile> p) {
        InitialSpec s;
        s.kind = Kind::profile;
        s.profile = std::move(p);
        return s;
    }
    static InitialSpec profile_plus_bump(std::shared_ptr<const RadialProfile> p, double amplitude,
                                         double radius) {
        InitialSpec s;
        s.kind = Kind::profile_bump;
        s.profile = std::move(p);
        s.bump = {amplitude, radius};
        return s;
    }
};

inline State init_state(const GridPtr& grid, const InitialSpec& spec) {
    State st;
    st.grid = grid;
    st.t = 0.0;
    st.u.resize(grid->size());

    std::vector<BumpSpec> bumps;
    if (spec.kind == InitialSpec::Kind::profile_bump) bumps.push_back(spec.bump);
    std::vector<double> centers;
    if (spec.kind == InitialSpec::Kind::profile_random_bumps) {
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> pos(0.0, spec.bump_zone);
        std::uniform_real_distribution<double> amp(-spec.bump_amp_scale, spec.bump_amp_scale);
        std::uniform_real_distribution<double> wid(0.1 * spec.bump_zone, 0.4 * spec.bump_zone);
        for (int j = 0; j < spec.bump_count; ++j) {
            centers.push_back(pos(rng));
            bumps.push_back({amp(rng), wid(rng)});
        }
    }

    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->radii[i];
        double v = 0.0;
        switch (spec.kind) {
        case InitialSpec::Kind::profile:
            v = eval_profile(*spec.profile, r).psi;
            break;
        case InitialSpec::Kind::profile_bump:
            v = eval_profile(*spec.profile, r).psi + spec.bump(r);
            break;
        case InitialSpec::Kind::profile_random_bumps: {
            v = eval_profile(*spec.profile, r).psi;
            for (std::size_t j = 0; j < bumps.size(); ++j) {
                const double q = 1.0 - sq((r - centers[j]) / bumps[j].radius);
                if (q > 0) v += bumps[j].amplitude * sq(q);
            }
            break;
        }
        case InitialSpec::Kind::barenblatt:
            v = barenblatt_eval(spec.k, spec.T, grid->n, r, 0.0);
            break;
        case InitialSpec::Kind::table:
            v = spec.table(r);
            break;
        }
        if (!std::isfinite(v))
            throw std::invalid_argument("init_state: initial spec not finite at r=" +
                                        std::to_string(r));
        st.u[i] = std::max(v, kPositivityFloor);
    }
    return st;
}

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
};

class newton_failure : public solver_error {
public:
    newton_failure(const std::string& what, int iters, double residual)
        : solver_error(what), iterations(iters), last_residual(residual) {}
    int iterations;
    double last_residual;
};

struct StepInfo {
    int newton_iters = 0;
    double residual = 0.0;
};

namespace detail {

/// Face transmissibilities omega_n * faces[i]^{n-1} / (r_i - r_{i-1}) for the
/// conservative discretization of the radial Laplacian. Entry 0 (the r = 0
/// face) is zero by symmetry; at the origin the stencil reduces to
/// 2 n (f(r_1) - f(0)) / r_1^2.
inline std::vector<double> transmissibilities(const RadialGrid& g) {
    std::vector<double> tw(g.size() + 1, 0.0);
    const double wn = omega_n(g.n);
    for (std::size_t i = 1; i < g.size(); ++i)
        tw[i] = wn * std::pow(g.faces[i], g.n - 1) / (g.radii[i] - g.radii[i - 1]);
    return tw;
}

/// Thomas elimination for a tridiagonal system; overwrites rhs with the
/// solution. Diagonals are (lower, diag, upper) with lower[0], upper[N-1]
/// unused.
inline void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                              std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t N = diag.size();
    for (std::size_t i = 1; i < N; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[N - 1] /= diag[N - 1];
    for (std::size_t i = N - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

struct ImplicitStage {
    // residual of V_i (c_new e^{w_i} + rhs_i) - dt * (L w)_i, where rhs_i
    // collects the known time levels. Backward Euler: c_new = 1, rhs = -u_old.
    double c_new = 1.0;
    std::vector<double> rhs;
};

inline std::vector<double> newton_log_solve(const RadialGrid& grid,
                                            const std::vector<double>& tw,
                                            const ImplicitStage& stage, double dt,
                                            std::vector<double> w, double w_boundary,
                                            const NewtonOptions& opts, StepInfo* info) {
    const std::size_t N = grid.size();
    w[N - 1] = w_boundary;

    auto residual = [&](const std::vector<double>& wv, std::vector<double>& res) {
        double norm = 0.0;
        for (std::size_t i = 0; i + 1 < N; ++i) {
            double lap = tw[i + 1] * (wv[i + 1] - wv[i]);
            if (i > 0) lap += tw[i] * (wv[i - 1] - wv[i]);
            const double ew = std::exp(wv[i]);
            res[i] = grid.shell_vol[i] * (stage.c_new * ew + stage.rhs[i]) - dt * lap;
            norm = std::max(norm, std::abs(res[i]) / grid.shell_vol[i]);
        }
        res[N - 1] = 0.0;
        return norm;
    };

    std::vector<double> res(N), lower(N), diag(N), upper(N), delta(N), trial(N);
    double norm = residual(w, res);
    int iter = 0;
    for (; iter < opts.max_iter && !(norm <= opts.tol); ++iter) {
        for (std::size_t i = 0; i + 1 < N; ++i) {
            diag[i] = grid.shell_vol[i] * stage.c_new * std::exp(w[i]) + dt * tw[i + 1] +
                      (i > 0 ? dt * tw[i] : 0.0);
            lower[i] = i > 0 ? -dt * tw[i] : 0.0;
            upper[i] = -dt * tw[i + 1];
        }
        diag[N - 1] = 1.0;
        lower[N - 1] = 0.0;
        upper[N - 2] = -dt * tw[N - 1]; // row N-2 couples to the fixed boundary node
        upper[N - 1] = 0.0;
        for (std::size_t i = 0; i < N; ++i) delta[i] = -res[i];
        solve_tridiagonal(lower, diag, upper, delta);

        // damp by halving until the residual norm decreases
        double s = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 40; ++halvings) {
            for (std::size_t i = 0; i < N; ++i) trial[i] = w[i] + s * delta[i];
            const double trial_norm = residual(trial, res);
            if (trial_norm < norm) {
                w.swap(trial);
                norm = trial_norm;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted)
            throw newton_failure("newton_log_solve: damping failed to reduce residual", iter,
                                 norm);
        // res currently holds the accepted state's residual; norm is in sync
    }
    if (!(norm <= opts.tol))
        throw newton_failure("newton_log_solve: no convergence in " +
                                 std::to_string(opts.max_iter) + " iterations",
                             iter, norm);
    if (info) {
        info->newton_iters = iter;
        info->residual = norm;
    }
    return w;
}

} // namespace detail

/// One backward-Euler step of u_t = Delta log u: solves
///   u_new - dt * Delta_r log u_new = u_old
/// by damped Newton iteration in w = log u (which keeps u positive), with the
/// Dirichlet value from bc at R_dom and the symmetry stencil at r = 0.
inline State step(const State& state, double dt, const BoundaryCondition& bc,
                  const NewtonOptions& opts = {}, StepInfo* info = nullptr) {
    if (!(dt > 0)) throw std::invalid_argument("step: dt must be > 0");
    const RadialGrid& g = *state.grid;
    const std::size_t N = g.size();
    const double t_new = state.t + dt;
    const double gval = bc.value(g.r_dom(), t_new);

    const auto tw = detail::transmissibilities(g);
    detail::ImplicitStage stage;
    stage.c_new = 1.0;
    stage.rhs.resize(N);
    for (std::size_t i = 0; i < N; ++i) stage.rhs[i] = -state.u[i];

    std::vector<double> w(N);
    for (std::size_t i = 0; i < N; ++i) w[i] = std::log(state.u[i]);
    w = detail::newton_log_solve(g, tw, stage, dt, std::move(w), std::log(gval), opts, info);

    State out;
    out.grid = state.grid;
    out.t = t_new;
    out.u.resize(N);
    for (std::size_t i = 0; i + 1 < N; ++i) out.u[i] = std::exp(w[i]);
    out.u[N - 1] = gval;
    return out;
}

enum class TimeScheme { backward_euler, bdf2 };

struct SimConfig {
    int n = 3;
    double beta = 1.0;
    double r_dom = 100.0;
    double inner_h = 0.02;
    int nodes_per_decade = 48;
    double dt_init = 1e-4;
    double dt_max = 1e-2;
    bool adaptive_dt = true;
    TimeScheme scheme = TimeScheme::backward_euler;
    BoundaryCondition bc = BoundaryCondition::pinned(1.0);
    InitialSpec initial;
    double t_end = 1.0;
    std::vector<double> snapshot_times;
    NewtonOptions newton;

    void validate() const {
        if (!(r_dom > 0)) throw std::invalid_argument("SimConfig: r_dom must be > 0");
        if (!(t_end >= 0)) throw std::invalid_argument("SimConfig: t_end must be >= 0");
        if (!(dt_init > 0) || !(dt_max >= dt_init))
            throw std::invalid_argument("SimConfig: need 0 < dt_init <= dt_max");
        for (double ts : snapshot_times)
            if (ts < 0 || ts > t_end * (1 + 1e-12))
                throw std::invalid_argument("SimConfig: snapshot times must lie in [0, t_end]");
    }
};

struct StepDiagnostics {
    double t = 0.0;
    double dt = 0.0;
    int newton_iters = 0;
    double residual = 0.0;
};

struct Trajectory {
    std::vector<State> snapshots;
    std::vector<StepDiagnostics> steps;
};

namespace detail {

inline State step_bdf2(const State& prev, const State& curr, double dt,
                       const BoundaryCondition& bc, const NewtonOptions& opts,
                       StepInfo* info) {
    const RadialGrid& g = *curr.grid;
    const std::size_t N = g.size();
    const double dt_prev = curr.t - prev.t;
    const double rho = dt / dt_prev;
    const double a = (1 + 2 * rho) / (1 + rho);
    const double b = -(1 + rho);
    const double c = rho * rho / (1 + rho);

    const double t_new = curr.t + dt;
    const double gval = bc.value(g.r_dom(), t_new);
    const auto tw = transmissibilities(g);
    ImplicitStage stage;
    stage.c_new = a;
    stage.rhs.resize(N);
    for (std::size_t i = 0; i < N; ++i) stage.rhs[i] = b * curr.u[i] + c * prev.u[i];

    std::vector<double> w(N);
    for (std::size_t i = 0; i < N; ++i) w[i] = std::log(curr.u[i]);
    w = newton_log_solve(g, tw, stage, dt, std::move(w), std::log(gval), opts, info);

    State out;
    out.grid = curr.grid;
    out.t = t_new;
    out.u.resize(N);
    for (std::size_t i = 0; i + 1 < N; ++i) out.u[i] = std::exp(w[i]);
    out.u[N - 1] = gval;
    return out;
}

} // namespace detail

/// Time loop over `step`: snapshots are hit exactly by clipping dt, Newton
/// failures halve dt, and after 5 clean steps dt grows by 1.2x up to dt_max.
inline Trajectory run(const SimConfig& config) {
    config.validate();
    auto grid = build_grid(config.r_dom, config.n, config.inner_h, config.nodes_per_decade);
    State state = init_state(grid, config.initial);

    std::vector<double> events = config.snapshot_times;
    events.push_back(0.0);
    events.push_back(config.t_end);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end(),
                             [&](double x, double y) {
                                 return y - x <= 1e-12 * std::max(1.0, config.t_end);
                             }),
                 events.end());

    Trajectory traj;
    traj.snapshots.push_back(state);
    std::size_t next_event = 1; // events[0] == 0 is the initial snapshot

    double dt = std::min(config.dt_init, config.dt_max);
    int clean_streak = 0;
    State prev_state; // for BDF2
    bool have_prev = false;

    while (next_event < events.size()) {
        const double target = events[next_event];
        const double dt_eff = std::min(dt, target - state.t);
        StepInfo info;
        try {
            State next =
                (config.scheme == TimeScheme::bdf2 && have_prev)
                    ? detail::step_bdf2(prev_state, state, dt_eff, config.bc, config.newton, &info)
                    : step(state, dt_eff, config.bc, config.newton, &info);
            prev_state = std::move(state);
            have_prev = true;
            state = std::move(next);
        } catch (const newton_failure&) {
            dt = 0.5 * dt_eff; // halve the step actually attempted
            clean_streak = 0;
            if (dt < 1e-12)
                throw solver_error("run: dt underflow after repeated Newton failures at t=" +
                                   std::to_string(state.t));
            continue;
        }
        traj.steps.push_back({state.t, dt_eff, info.newton_iters, info.residual});
        if (config.adaptive_dt && ++clean_streak >= 5) {
            dt = std::min(dt * 1.2, config.dt_max);
            clean_streak = 0;
        }
        if (state.t >= target * (1 - 1e-15)) {
            state.t = target;
            traj.snapshots.push_back(state);
            ++next_event;
        }
    }
    return traj;
}

/// The rescaled field u~(y, t) = e^{2 beta t} u(e^{beta t} y, t) on
/// target_grid; only defined while e^{beta t} * target radius <= R_dom.
inline State rescale_state(const State& state, double beta, const GridPtr& target_grid) {
    const double factor = std::exp(beta * state.t);
    const double usable = state.grid->r_dom() / factor;
    if (target_grid->r_dom() > usable * (1.0 + 1e-12))
        throw std::out_of_range("rescale_state: target grid exceeds usable radius R_dom*e^{-beta t} = " +
                                std::to_string(usable));

    const auto& src = state.grid->radii;
    std::vector<double> s(src.size()), f(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        s[i] = std::log1p(src[i]);
        f[i] = std::log(state.u[i]);
    }
    const auto interp = CubicHermite::pchip(std::move(s), std::move(f));

    const double amp = std::exp(2.0 * beta * state.t);
    State out;
    out.grid = target_grid;
    out.t = state.t;
    out.u.resize(target_grid->size());
    for (std::size_t i = 0; i < target_grid->size(); ++i) {
        const double r_src = factor * target_grid->radii[i];
        auto it = std::lower_bound(src.begin(), src.end(), r_src);
        if (it != src.end() && *it == r_src) {
            out.u[i] = amp * state.u[static_cast<std::size_t>(it - src.begin())];
        } else {
            out.u[i] = amp * std::exp(interp.value(std::log1p(std::min(r_src, src.back()))));
        }
    }
    return out;
}

/// omega_n * integral_0^R r^{n-1} |a - b| dr by dual-cell shell quadrature
/// (cells clipped at R). Exact for constant integrands.
inline double l1_distance(const State& a, const State& b, double R) {
    if (!a.grid->same_layout(*b.grid))
        throw std::invalid_argument("l1_distance: states on different grids");
    if (!(R >= 0) || R > a.grid->r_dom() * (1.0 + 1e-12))
        throw std::invalid_argument("l1_distance: R outside [0, R_dom]");
    const RadialGrid& g = *a.grid;
    const double wn = omega_n(g.n);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double lo = g.faces[i];
        if (lo >= R) break;
        const double hi = std::min(g.faces[i + 1], R);
        acc += std::abs(a.u[i] - b.u[i]) * wn * shell_weight(g.n, lo, hi);
    }
    return acc;
}

/// max over nodes with r <= R of |a - b|.
inline double sup_distance(const State& a, const State& b, double R) {
    if (!a.grid->same_layout(*b.grid))
        throw std::invalid_argument("sup_distance: states on different grids");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.grid->size(); ++i) {
        if (a.grid->radii[i] > R) break;
        worst = std::max(worst, std::abs(a.u[i] - b.u[i]));
    }
    return worst;
}

inline State state_from_function(const GridPtr& grid, double t,
                                 const std::function<double(double)>& f) {
    State st;
    st.grid = grid;
    st.t = t;
    st.u.resize(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i)
        st.u[i] = std::max(f(grid->radii[i]), kPositivityFloor);
    return st;
}

using Oracle = std::function<double(double r, double t)>;

inline Oracle make_self_similar_oracle(std::shared_ptr<const RadialProfile> psi) {
    return [psi](double r, double t) { return self_similar_eval(*psi, r, t); };
}

inline Oracle make_barenblatt_oracle(double k, double T, int n) {
    return [k, T, n](double r, double t) { return barenblatt_eval(k, T, n, r, t); };
}

/// Per-snapshot error of a trajectory against an exact solution.
struct ErrorRow {
    double t;
    double linf_rel_full;  // max relative error over all nodes
    double linf_rel_inner; // max relative error over r <= inner_radius
    double l1_rel;         // shell-weighted L1 relative error
};

struct ErrorReport {
    std::vector<ErrorRow> rows;
    double worst_linf_inner = 0.0;
};

inline ErrorReport residual_exact(const Trajectory& traj, const Oracle& oracle,
                                  double inner_radius) {
    ErrorReport rep;
    for (const auto& snap : traj.snapshots) {
        const RadialGrid& g = *snap.grid;
        ErrorRow row{snap.t, 0.0, 0.0, 0.0};
        double l1_num = 0.0, l1_den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double ex = oracle(g.radii[i], snap.t);
            if (!(ex > 0)) throw std::invalid_argument("residual_exact: oracle not positive");
            const double rel = std::abs(snap.u[i] - ex) / ex;
            row.linf_rel_full = std::max(row.linf_rel_full, rel);
            if (g.radii[i] <= inner_radius) row.linf_rel_inner = std::max(row.linf_rel_inner, rel);
            l1_num += g.shell_vol[i] * std::abs(snap.u[i] - ex);
            l1_den += g.shell_vol[i] * ex;
        }
        row.l1_rel = l1_num / l1_den;
        rep.rows.push_back(row);
        rep.worst_linf_inner = std::max(rep.worst_linf_inner, row.linf_rel_inner);
    }
    return rep;
}

/// Discrete comparison-principle check: with ordered initial data the maximum
/// positive excess max(a - b)_+ over all snapshots must stay at roundoff.
struct ComparisonReport {
    double max_violation = 0.0;
    double tol = 0.0;
    bool pass = false;
};

inline ComparisonReport comparison_check(const Trajectory& ta, const Trajectory& tb,
                                         double ordering_tol_factor = 1e-8) {
    if (ta.snapshots.size() != tb.snapshots.size())
        throw std::invalid_argument("comparison_check: snapshot counts differ");
    if (ta.snapshots.empty()) throw std::invalid_argument("comparison_check: empty trajectory");
    if (!ta.snapshots[0].grid->same_layout(*tb.snapshots[0].grid))
        throw std::invalid_argument("comparison_check: trajectories on different grids");

    double scale = 0.0;
    {
        const auto& a0 = ta.snapshots[0];
        const auto& b0 = tb.snapshots[0];
        for (double v : b0.u) scale = std::max(scale, v);
        for (double v : a0.u) scale = std::max(scale, v);
        for (std::size_t i = 0; i < a0.u.size(); ++i)
            if (a0.u[i] > b0.u[i] + 1e-14 * scale)
                throw std::invalid_argument("comparison_check: initial data not ordered a0 <= b0");
    }

    ComparisonReport rep;
    for (std::size_t k = 0; k < ta.snapshots.size(); ++k) {
        const auto& a = ta.snapshots[k];
        const auto& b = tb.snapshots[k];
        if (std::abs(a.t - b.t) > 1e-12 * std::max(1.0, a.t))
            throw std::invalid_argument("comparison_check: snapshot times differ");
        for (std::size_t i = 0; i < a.u.size(); ++i) {
            rep.max_violation = std::max(rep.max_violation, a.u[i] - b.u[i]);
            scale = std::max(scale, std::max(a.u[i], b.u[i]));
        }
    }
    rep.max_violation = std::max(rep.max_violation, 0.0);
    rep.tol = ordering_tol_factor * scale;
    rep.pass = rep.max_violation <= rep.tol;
    return rep;
}

/// Snapshot check of u_t <= u/t: the forward difference between consecutive
/// snapshots must not exceed u(t1)/t1 beyond ab_tol = factor * max(u)/t1.
struct AbPair {
    double t1, t2;
    double worst; // max over nodes of forward difference minus u/t
    double tol;
};

struct AbReport {
    std::vector<AbPair> pairs;
    double worst_margin = -std::numeric_limits<double>::infinity(); // worst - tol
    bool pass = false;
};

inline AbReport aronson_benilan_check(const Trajectory& traj, double ab_tol_factor = 1e-6) {
    std::vector<const State*> snaps;
    for (const auto& s : traj.snapshots)
        if (s.t > 0) snaps.push_back(&s);
    if (snaps.size() < 3)
        throw std::invalid_argument("aronson_benilan_check: need >= 3 snapshots at t > 0");

    AbReport rep;
    for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
        const State& s1 = *snaps[k];
        const State& s2 = *snaps[k + 1];
        double umax = 0.0;
        for (double v : s1.u) umax = std::max(umax, v);
        AbPair pair{s1.t, s2.t, -std::numeric_limits<double>::infinity(),
                    ab_tol_factor * umax / s1.t};
        const double idt = 1.0 / (s2.t - s1.t);
        for (std::size_t i = 0; i < s1.u.size(); ++i) {
            const double rate = (s2.u[i] - s1.u[i]) * idt;
            pair.worst = std::max(pair.worst, rate - s1.u[i] / s1.t);
        }
        rep.worst_margin = std::max(rep.worst_margin, pair.worst - pair.tol);
        rep.pairs.push_back(pair);
    }
    rep.pass = rep.worst_margin <= 0.0;
    return rep;
}

/// Residual of the rescaled flow u~_t = Delta log u~ + 2 beta u~ + beta r u~_r
/// between consecutive snapshots (midpoint in time, conservative stencil in
/// space), maximised over nodes with r in [r_lo, r_hi]. Shrinks under
/// simultaneous space/time refinement.
inline std::vector<double> rescaled_residual(const Trajectory& traj, double beta, double r_lo,
                                             double r_hi) {
    if (traj.snapshots.size() < 2)
        throw std::invalid_argument("rescaled_residual: need >= 2 snapshots");
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < traj.snapshots.size(); ++k) {
        const State& s1 = traj.snapshots[k];
        const State& s2 = traj.snapshots[k + 1];
        const double usable = s1.grid->r_dom() * std::exp(-beta * s2.t);
        if (usable <= r_hi * 1.05)
            throw std::invalid_argument("rescaled_residual: window shrank below r_hi");
        auto target = truncate_grid(*s1.grid, usable);
        const State u1 = rescale_state(s1, beta, target);
        const State u2 = rescale_state(s2, beta, target);

        const auto tw = detail::transmissibilities(*target);
        std::vector<double> um(target->size()), lg(target->size());
        for (std::size_t i = 0; i < um.size(); ++i) {
            um[i] = 0.5 * (u1.u[i] + u2.u[i]);
            lg[i] = std::log(um[i]);
        }
        const double idt = 1.0 / (s2.t - s1.t);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < target->size(); ++i) {
            const double r = target->radii[i];
            if (r < r_lo || r > r_hi) continue;
            const double lap =
                (tw[i + 1] * (lg[i + 1] - lg[i]) + tw[i] * (lg[i - 1] - lg[i])) /
                target->shell_vol[i];
            const double hm = r - target->radii[i - 1];
            const double hp = target->radii[i + 1] - r;
            const double grad = (um[i + 1] * hm * hm - um[i - 1] * hp * hp +
                                 um[i] * (hp * hp - hm * hm)) /
                                (hm * hp * (hm + hp));
            const double ut = (u2.u[i] - u1.u[i]) * idt;
            worst = std::max(std::abs(ut - lap - 2.0 * beta * um[i] - beta * r * grad), worst);
        }
        out.push_back(worst);
    }
    return out;
}

/// Bracket of q(r) = u(r) (1 + r^2) / log r over nodes with r in [r_lo, r_hi].
struct EnvelopeBracket {
    double lo = 0.0;
    double hi = 0.0;
    int nodes = 0;
};

inline EnvelopeBracket envelope_bracket(const State& state, double r_lo, double r_hi) {
    if (!(r_lo > 1.0) || !(r_hi > r_lo))
        throw std::invalid_argument("envelope_bracket: need 1 < r_lo < r_hi");
    EnvelopeBracket br;
    br.lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.grid->size(); ++i) {
        const double r = state.grid->radii[i];
        if (r < r_lo || r > r_hi) continue;
        const double q = state.u[i] * (1.0 + r * r) / std::log(r);
        br.lo = std::min(br.lo, q);
        br.hi = std::max(br.hi, q);
        br.nodes++;
    }
    if (br.nodes == 0) throw std::invalid_argument("envelope_bracket: no nodes in range");
    return br;
}

} // namespace logdiff
