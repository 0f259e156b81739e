#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "phibvp/grid.hpp"
#include "phibvp/phi.hpp"

namespace phibvp {

/// Envelope value used at zeros of k, where A*/k and B*/k are unbounded.
inline constexpr double kEnvelopeSentinel = 1e300;

/// Weight k > 0 a.e. on [0, T]; zeros listed in singular_points.
struct Weight {
    std::function<double(double)> k;
    std::vector<double> singular_points;
    /// K(t) = integral of 1/k over [0, t], when known in closed form.
    std::function<double(double)> antiderivative;
    /// Integral of 1/k over [0, +inf), when known.
    std::optional<double> integral_to_infinity;

    double operator()(double t) const { return k(t); }
    bool has_antiderivative() const noexcept { return static_cast<bool>(antiderivative); }
    bool singular_at(double t) const;
};

/// Right-hand side f(t, x, y) with a user-declared dominating bound psi(t) >= 0.
struct Rhs {
    std::function<double(double, double, double)> f;
    std::function<double(double)> psi;
    /// Exact integral of psi over [0, +inf), when known.
    std::optional<double> psi_integral_to_infinity;
};

/// (Phi(k x'))' = f(t, x, x') on [0, T], x(0) = nu1, x(T) = nu2.
struct BvpProblem {
    MonotoneBranch branch;
    Weight weight;
    Rhs rhs;
    double nu1 = 0.0;
    double nu2 = 0.0;
    double T = 1.0;
    double p = 1.0;
    MeshPtr mesh;

    /// Validates T, p and that the mesh spans [0, T].
    void validate() const;
};

/// Builds a problem with a mesh of `cells` cells graded toward the zeros of k.
BvpProblem make_problem(MonotoneBranch branch, Weight weight, Rhs rhs, double nu1, double nu2,
                        double T, std::size_t cells = 1000, double p = 1.0,
                        GradingSpec grading = {});

struct DerivedScalars {
    double k1 = 0.0;          // ||1/k||_L1
    double kp = 0.0;          // ||1/k||_Lp
    double s_star = 0.0;      // (nu2 - nu1) / k1
    double phi_s_star = 0.0;  // Phi(s*)
    double L = 0.0;           // ||psi||_L1
    double A = 0.0;           // Phi^{-1}(Phi(s*) - 2L)
    double B = 0.0;           // Phi^{-1}(Phi(s*) + 2L)
    double N1 = 0.0;          // nu1 + k1 * slope_lower
    double N2 = 0.0;          // nu1 + k1 * slope_upper
    /// Range of g_x: [min(nu1, N1), max(nu1, N2)].
    double x_lower = 0.0;
    double x_upper = 0.0;

    double slope_lower() const noexcept { return A < B ? A : B; }
    double slope_upper() const noexcept { return A < B ? B : A; }

    bool operator==(const DerivedScalars&) const = default;
};

enum class ScalarSource {
    /// Mesh quadrature throughout; consistent with the discrete solver.
    quadrature,
    /// Closed-form antiderivative of 1/k when the weight provides one.
    exact_when_available,
};

/// 1/k sampled on the problem mesh, midpoint-patched on singular cells.
GridFunction inverse_weight(const BvpProblem& problem);

DerivedScalars derive_scalars(const BvpProblem& problem,
                              ScalarSource source = ScalarSource::exact_when_available);

struct Envelopes {
    GridFunction lower; // eta_1 = slope_lower / k
    GridFunction upper; // eta_2 = slope_upper / k
};

Envelopes envelopes(const BvpProblem& problem, const DerivedScalars& scalars);

/// max(lo, min(value, hi)); throws InvalidEnvelope when lo > hi.
double truncate(double value, double lo, double hi);

/// Compares the closed-form antiderivative with mesh quadrature of 1/k.
bool check_antiderivative(const BvpProblem& problem, double rel_tol);

/// (Phi(k x'))' = f(t, x, x') on [0, +inf), x(0) = nu1, x(+inf) = nu2.
struct HalflineProblem {
    MonotoneBranch branch;
    Weight weight;
    Rhs rhs;
    double nu1 = 0.0;
    double nu2 = 0.0;
    std::vector<double> schedule{5, 10, 20, 40, 80, 160};
    double tol_h = 1e-3;
    double density = 200.0;  // cells per unit length on each [0, n]
    GradingSpec grading;

    void validate() const;
    /// The Dirichlet problem on [0, n] with p = 1.
    BvpProblem on_interval(double n) const;
};

/// An integral over [0, +inf) with its provenance.
struct TailIntegral {
    double value = 0.0;
    bool exact = false;
    /// Numeric case: estimate of the part beyond the cutoff (already added).
    double truncation = 0.0;
    double cutoff = 0.0;
};

/// Integral over [0, +inf) by a uniform-then-geometric mesh up to `cutoff`,
/// plus the tail estimate g(X) X (exact for 1/t^2 decay).
TailIntegral integrate_to_infinity(const std::function<double(double)>& g,
                                   const std::vector<double>& singular_points = {},
                                   double cutoff = 1e6);

/// k_inf = ||1/k||_L1(R+), exact when the weight provides it.
TailIntegral k_infinity(const HalflineProblem& hp);
/// ||psi||_L1(R+), exact when the rhs provides it.
TailIntegral psi_l1_infinity(const HalflineProblem& hp);
/// k_t = ||1/k||_L1([0, t]): antiderivative when available, else quadrature.
double k_partial(const HalflineProblem& hp, double t);

} // namespace phibvp
