#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "logdiff/common.hpp"

namespace logdiff {

/// Truncated radial mesh for R^n: uniform nodes on [0,1], geometric beyond.
/// Each node i owns the dual cell bounded by faces[i], faces[i+1] (the first
/// and last faces sit at 0 and R_dom), and shell_vol[i] is the exact volume
/// omega_n * (faces[i+1]^n - faces[i]^n)/n of that cell, so the shell volumes
/// telescope to the volume of the ball B_{R_dom}.
struct RadialGrid {
    int n = 3;
    std::vector<double> radii;
    std::vector<double> faces;     // size() + 1 entries
    std::vector<double> shell_vol; // omega_n-weighted dual-cell volumes

    std::size_t size() const { return radii.size(); }
    double r_dom() const { return radii.back(); }

    bool same_layout(const RadialGrid& o) const {
        return n == o.n && radii == o.radii;
    }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

namespace detail {

inline void finish_grid(RadialGrid& g) {
    const std::size_t N = g.radii.size();
    g.faces.resize(N + 1);
    g.faces[0] = g.radii[0];
    for (std::size_t i = 1; i < N; ++i) g.faces[i] = 0.5 * (g.radii[i - 1] + g.radii[i]);
    g.faces[N] = g.radii[N - 1];
    g.shell_vol.resize(N);
    const double wn = omega_n(g.n);
    for (std::size_t i = 0; i < N; ++i)
        g.shell_vol[i] = wn * shell_weight(g.n, g.faces[i], g.faces[i + 1]);
}

} // namespace detail

inline GridPtr build_grid(double R_dom, int n, double inner_h, int nodes_per_decade) {
    if (!(R_dom > 1.0)) throw std::invalid_argument("build_grid: R_dom must be > 1");
    if (!(inner_h > 0)) throw std::invalid_argument("build_grid: inner_h must be > 0");
    if (nodes_per_decade < 1) throw std::invalid_argument("build_grid: nodes_per_decade must be >= 1");

    auto g = std::make_shared<RadialGrid>();
    g->n = n;
    const int m = std::max(1, static_cast<int>(std::lround(1.0 / inner_h)));
    for (int i = 0; i <= m; ++i) g->radii.push_back(static_cast<double>(i) / m);
    const int total = static_cast<int>(std::ceil(nodes_per_decade * std::log10(R_dom)));
    for (int k = 1; k <= total; ++k) {
        const double r = std::pow(10.0, static_cast<double>(k) / nodes_per_decade);
        if (r >= R_dom * (1.0 - 1e-12)) break;
        g->radii.push_back(r);
    }
    g->radii.push_back(R_dom);
    if (g->radii.size() < 16)
        throw std::invalid_argument("build_grid: parameters yield fewer than 16 nodes");
    detail::finish_grid(*g);
    return g;
}

/// Sub-grid of the nodes with r <= R_new, with a node appended at exactly
/// R_new when it is not already present. Used for the shrinking rescaled
/// domain |y| <= R_dom e^{-beta t}.
inline GridPtr truncate_grid(const RadialGrid& src, double R_new) {
    if (!(R_new > 0) || R_new > src.r_dom() * (1.0 + 1e-12))
        throw std::invalid_argument("truncate_grid: R_new outside (0, R_dom]");
    auto g = std::make_shared<RadialGrid>();
    g->n = src.n;
    for (double r : src.radii)
        if (r <= R_new * (1.0 + 1e-12)) g->radii.push_back(std::min(r, R_new));
    if (g->radii.back() < R_new * (1.0 - 1e-12)) g->radii.push_back(R_new);
    if (g->radii.size() < 2) throw std::invalid_argument("truncate_grid: too few nodes retained");
    detail::finish_grid(*g);
    return g;
}

} // namespace logdiff
