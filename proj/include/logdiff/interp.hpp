#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "logdiff/common.hpp"

namespace logdiff {

/// Piecewise cubic Hermite interpolant with a Fritsch-Carlson slope limiter.
///
/// Built either from caller-supplied node slopes (limited only where they
/// would break monotonicity of the local data) or, via pchip(), from values
/// alone using shape-preserving slope estimates. On data that is monotone per
/// interval the interpolant never leaves the interval's value range.
class CubicHermite {
public:
    struct Eval {
        double value;
        double deriv;
    };

    static CubicHermite from_slopes(std::vector<double> x, std::vector<double> f,
                                    const std::vector<double>& m) {
        CubicHermite s(std::move(x), std::move(f));
        if (m.size() != s.x_.size())
            throw std::invalid_argument("CubicHermite: slope array size mismatch");
        s.assign_limited_slopes(m);
        return s;
    }

    static CubicHermite pchip(std::vector<double> x, std::vector<double> f) {
        CubicHermite s(std::move(x), std::move(f));
        s.assign_limited_slopes(s.pchip_slopes());
        return s;
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    Eval eval(double xq) const {
        if (xq < x_.front() || xq > x_.back())
            throw std::out_of_range("CubicHermite: query outside data range");
        const std::size_t i = interval(xq);
        const double h = x_[i + 1] - x_[i];
        const double t = (xq - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        const double v = h00 * f_[i] + h * h10 * ml_[i] + h01 * f_[i + 1] + h * h11 * mr_[i];
        const double dh00 = 6 * t2 - 6 * t, dh10 = 3 * t2 - 4 * t + 1;
        const double dh01 = -dh00, dh11 = 3 * t2 - 2 * t;
        const double d = (dh00 * f_[i] + dh01 * f_[i + 1]) / h + dh10 * ml_[i] + dh11 * mr_[i];
        return {v, d};
    }

    double value(double xq) const { return eval(xq).value; }

private:
    CubicHermite(std::vector<double> x, std::vector<double> f)
        : x_(std::move(x)), f_(std::move(f)) {
        if (x_.size() < 2 || x_.size() != f_.size())
            throw std::invalid_argument("CubicHermite: need >= 2 nodes with matching values");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("CubicHermite: abscissae must be strictly increasing");
    }

    std::size_t interval(double xq) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), xq);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i == 0) return 0;
        if (i >= x_.size()) return x_.size() - 2;
        return i - 1;
    }

    // Limits slopes interval by interval: clamps the ratio to the secant into
    // [0, 3], which keeps the cubic inside the Fritsch-Carlson monotone region.
    void assign_limited_slopes(const std::vector<double>& m) {
        const std::size_t nseg = x_.size() - 1;
        ml_.resize(nseg);
        mr_.resize(nseg);
        for (std::size_t i = 0; i < nseg; ++i) {
            const double delta = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
            if (delta == 0.0) {
                ml_[i] = mr_[i] = 0.0;
                continue;
            }
            ml_[i] = std::clamp(m[i] / delta, 0.0, 3.0) * delta;
            mr_[i] = std::clamp(m[i + 1] / delta, 0.0, 3.0) * delta;
        }
    }

    std::vector<double> pchip_slopes() const {
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1), delta(n - 1), m(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (f_[i + 1] - f_[i]) / h[i];
        }
        if (n == 2) {
            m[0] = m[1] = delta[0];
            return m;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                m[i] = 0.0;
            } else {
                const double w1 = 2 * h[i] + h[i - 1];
                const double w2 = h[i] + 2 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        m[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
        m[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        return m;
    }

    static double edge_slope(double h0, double h1, double d0, double d1) {
        double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return m;
    }

    std::vector<double> x_, f_;
    std::vector<double> ml_, mr_; // per-interval left/right slopes after limiting
};

} // namespace logdiff
