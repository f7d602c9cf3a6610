#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "logdiff/common.hpp"

namespace logdiff {

/// Embedded Dormand-Prince 5(4) integrator for small fixed-size systems.
///
/// Step size is controlled componentwise against sc_i = abs_tol + rel_tol *
/// max(|y_i|, |y_trial_i|). A user guard can veto a trial state (e.g. to keep
/// a component positive); vetoed steps are retried at half the step size.
template <std::size_t N>
class Dopri5 {
public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(double, const State&, State&)>;
    using Guard = std::function<bool(const State&)>;

    struct Options {
        double rel_tol = 1e-9;
        double abs_tol = 0.0;
        double max_step = std::numeric_limits<double>::infinity();
        std::size_t max_steps = 50'000'000;
    };

    Dopri5(Rhs rhs, Options opts) : rhs_(std::move(rhs)), opts_(opts) {}

    void set_guard(Guard g) { guard_ = std::move(g); }

    void init(double t0, const State& y0) {
        t_ = t0;
        y_ = y0;
        rhs_(t_, y_, k_[0]);
        have_k1_ = true;
        h_ = 0.0;
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    std::size_t steps_accepted() const { return n_accept_; }
    std::size_t steps_rejected() const { return n_reject_; }

    /// Integrate from the current time to t1 (t1 > t). The final step is
    /// clipped so the integrator lands on t1 exactly.
    const State& advance_to(double t1) {
        if (!(t1 >= t_)) throw std::invalid_argument("Dopri5: target time is in the past");
        if (t1 == t_) return y_;
        if (h_ <= 0.0) h_ = initial_step(t1 - t_);
        std::size_t local_steps = 0;
        while (t_ < t1) {
            if (++local_steps > opts_.max_steps)
                throw solver_error("Dopri5: step limit exceeded");
            const bool clipped = t_ + h_ >= t1;
            const double h = clipped ? t1 - t_ : h_;
            double err = attempt(h);
            if (!(err <= 1.0)) { // rejected (also catches NaN)
                n_reject_++;
                const double shrink = std::isfinite(err)
                    ? std::max(0.2, 0.9 * std::pow(err, -0.2))
                    : 0.2;
                h_ = h * shrink;
                if (h_ < 1e-14 * std::max(1.0, std::abs(t_)))
                    throw solver_error("Dopri5: step size underflow");
                continue;
            }
            n_accept_++;
            t_ = clipped ? t1 : t_ + h;
            y_ = y_trial_;
            k_[0] = k_[6]; // FSAL
            double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h_ = std::min(h * std::clamp(grow, 0.2, 5.0), opts_.max_step);
        }
        return y_;
    }

private:
    // Classic Dormand-Prince coefficients.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double initial_step(double span) const {
        return std::min(opts_.max_step, 1e-3 * span);
    }

    // Returns the scaled error estimate of a trial step of size h; fills
    // y_trial_ and k_[6] on the way. Infinity signals a guard veto.
    double attempt(double h) {
        State tmp;
        auto stage = [&](double c, std::initializer_list<std::pair<double, int>> terms, int out) {
            for (std::size_t i = 0; i < N; ++i) {
                double acc = y_[i];
                for (auto [a, j] : terms) acc += h * a * k_[j][i];
                tmp[i] = acc;
            }
            rhs_(t_ + c * h, tmp, k_[out]);
        };
        if (!have_k1_) { rhs_(t_, y_, k_[0]); have_k1_ = true; }
        stage(c2, {{a21, 0}}, 1);
        stage(c3, {{a31, 0}, {a32, 1}}, 2);
        stage(c4, {{a41, 0}, {a42, 1}, {a43, 2}}, 3);
        stage(c5, {{a51, 0}, {a52, 1}, {a53, 2}, {a54, 3}}, 4);
        stage(1.0, {{a61, 0}, {a62, 1}, {a63, 2}, {a64, 3}, {a65, 4}}, 5);
        for (std::size_t i = 0; i < N; ++i)
            y_trial_[i] = y_[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] +
                                       b5 * k_[4][i] + b6 * k_[5][i]);
        for (std::size_t i = 0; i < N; ++i)
            if (!std::isfinite(y_trial_[i])) return std::numeric_limits<double>::infinity();
        if (guard_ && !guard_(y_trial_)) return std::numeric_limits<double>::infinity();
        rhs_(t_ + h, y_trial_, k_[6]);

        double err2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                                  e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
            const double sc = opts_.abs_tol +
                              opts_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_trial_[i]));
            if (sc == 0.0) {
                if (e != 0.0) return std::numeric_limits<double>::infinity();
                continue;
            }
            err2 += sq(e / sc);
        }
        return std::sqrt(err2 / N);
    }

    Rhs rhs_;
    Options opts_;
    Guard guard_;
    double t_ = 0.0;
    double h_ = 0.0;
    State y_{};
    State y_trial_{};
    std::array<State, 7> k_{};
    bool have_k1_ = false;
    std::size_t n_accept_ = 0, n_reject_ = 0;
};

} // namespace logdiff
