#pragma once

// Random problem instances shared by the unit tests and the acceptance driver.

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "phibvp/error.hpp"
#include "phibvp/grid.hpp"
#include "phibvp/hypothesis.hpp"
#include "phibvp/solver.hpp"

namespace gen {

using namespace phibvp;

inline MonotoneBranch random_branch(std::mt19937_64& rng, double& s_center) {
    std::uniform_int_distribution<int> pick(0, 6);
    switch (pick(rng)) {
    case 0: s_center = 0.0; return find_branch(catalog::r_laplacian(3.0), 0.0);
    case 1: s_center = 0.0; return find_branch(catalog::mean_curvature(), 0.0);
    case 2: s_center = 0.0; return find_branch(catalog::relativistic(), 0.0, Interval{-1, 1});
    case 3: s_center = 0.0; return find_branch(catalog::p_relativistic(3.0), 0.0, Interval{-1, 1});
    case 4: s_center = 0.0; return find_branch(catalog::perona_malik(), 0.0, Interval{-1, 1});
    case 5:
        s_center = std::numbers::pi;
        return find_branch(catalog::sine(), std::numbers::pi,
                           Interval{std::numbers::pi / 2, 3 * std::numbers::pi / 2});
    default: s_center = 2.0; return find_branch(catalog::difference(2.0, 1.0), 2.0);
    }
}

/// A problem on [0, T] with f = c cos(a x + t) sin(b y + 1) cos(t), psi = |c|;
/// nullopt when Phi(s*) -/+ 2L leaves the image.
inline std::optional<BvpProblem> random_problem(std::mt19937_64& rng, std::size_t cells) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double center = 0.0;
    MonotoneBranch b = random_branch(rng, center);
    const double T = 0.5 + U(rng);
    const double kb = U(rng);
    Weight w{[kb](double t) { return 1.0 + kb * t; }, {},
             [kb](double t) { return kb == 0.0 ? t : std::log1p(kb * t) / kb; }, {}};
    const double k1 = w.antiderivative(T);
    const double s = center + 0.2 * (2 * U(rng) - 1);
    const double nu1 = 2 * U(rng) - 1;
    const double nu2 = nu1 + s * k1;
    const double c = 0.15 * U(rng) / T;
    const double a = 2 * U(rng), bb = 2 * U(rng);
    Rhs rhs{[=](double t, double x, double y) {
                return c * std::cos(a * x + t) * std::sin(bb * y + 1.0) * std::cos(t);
            },
            [c](double) { return c; }, {}};
    auto p = make_problem(b, w, rhs, nu1, nu2, T, cells);
    try {
        (void)derive_scalars(p, ScalarSource::quadrature);
    } catch (const Error&) {
        return std::nullopt;
    }
    return p;
}

} // namespace gen
