#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace logdiff {

/// Surface area of the unit sphere S^{n-1} in R^n.
inline double omega_n(int n) {
    if (n < 1) throw std::invalid_argument("omega_n: dimension must be >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the ball of radius R in R^n.
inline double ball_volume(int n, double R) {
    return omega_n(n) * std::pow(R, n) / n;
}

/// Exact integral of r^{n-1} over [a, b], i.e. (b^n - a^n)/n.
inline double shell_weight(int n, double a, double b) {
    return (std::pow(b, n) - std::pow(a, n)) / n;
}

inline double sq(double x) { return x * x; }

/// Raised when an iterative solver fails to reach its tolerance.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace logdiff
