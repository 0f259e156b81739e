#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phibvp/problem.hpp"

namespace phibvp {

enum class Acceleration { none, secant };

struct IterationConfig {
    double damping = 0.5;
    int max_iters = 500;
    double tol_fp = 1e-10;     // discrete W^{1,p} distance between iterates
    double tol_beta = 1e-12;
    Acceleration acceleration = Acceleration::none;
    int window = 3;
    std::size_t refine = 4;    // verification mesh refinement factor
    int stagnation = 10;       // iterations without progress before halving the damping
    double min_damping = 1.0 / 16.0;
    bool keep_iterates = false;

    void validate() const;
    bool operator==(const IterationConfig&) const = default;
};

const char* to_string(Acceleration a) noexcept;
Acceleration acceleration_from_string(const std::string& s);

enum class SolveStatus { converged, max_iters, hypothesis_violation };
const char* to_string(SolveStatus s) noexcept;
SolveStatus solve_status_from_string(const std::string& s);

struct Verification {
    double left_defect = 0.0;      // |x(0) - nu1|
    double boundary_defect = 0.0;  // |x(T) - nu2|
    double u_defect = 0.0;         // max |u - beta - int f(s, x, x') ds| on the refined mesh
    double x_excess = 0.0;         // worst excursion of x outside [x_lower, x_upper]
    double dx_excess = 0.0;        // worst excursion of x' outside [A*/k, B*/k]
    bool x_in_envelope = false;
    bool dx_in_envelope = false;
    std::size_t refine = 1;

    bool operator==(const Verification&) const = default;
};

struct SolveReport {
    SolveStatus status = SolveStatus::max_iters;
    std::string message;
    GridFunction x;
    GridFunction dx;
    GridFunction u;   // Phi(k x')
    double beta = 0.0;  // u(0)
    int iterations = 0;
    std::vector<double> trace;  // ||x_{m+1} - x_m||
    double residual = 0.0;      // forward-difference defect of u against f(t, x, x')
    double fixed_point_gap = 0.0;  // ||g(x) - x|| at the returned solution
    bool x_in_envelope = false;
    bool dx_in_envelope = false;
    std::size_t truncation_active = 0;
    std::size_t psi_clipped = 0;
    double final_damping = 0.0;
    DerivedScalars scalars;
    Verification verification;
    std::vector<GridFunction> iterates_x;   // when keep_iterates
    std::vector<GridFunction> iterates_dx;
};

/// Precomputed data of one solve: oriented operator, 1/k, psi, envelopes.
class FixedPointMap {
public:
    explicit FixedPointMap(const BvpProblem& problem, double tol_beta = 1e-12);

    struct Result {
        GridFunction x, dx, u;  // u in the user's orientation
        double beta = 0.0;      // u(0)
        std::size_t clipped = 0;      // nodes where x or x' was truncated
        std::size_t psi_clipped = 0;  // nodes where |F| was cut back to psi
    };

    /// One application of g.
    Result operator()(const GridFunction& x, const GridFunction& dx) const;

    /// F(t_j) = f(t_j, T(x_j), T(x'_j)), |F| <= psi; oriented sign.
    GridFunction truncated_rhs(const GridFunction& x, const GridFunction& dx,
                               std::size_t* clipped = nullptr,
                               std::size_t* psi_clipped = nullptr) const;
    /// Root of phi(xi) = nu2 - nu1 for the cumulative integral Fc (oriented).
    double beta_solve(const GridFunction& Fc) const;
    /// phi(xi) = int (1/k) Phi^{-1}(xi + Fc); oriented operator.
    double phi(double xi, const GridFunction& Fc) const;
    /// (Phi(s*) - L, Phi(s*) + L) widened, clipped to the image (oriented).
    std::pair<double, double> beta_bracket() const;

    /// K-affine guess nu1 + (nu2 - nu1) K(t) / k1 and its derivative.
    std::pair<GridFunction, GridFunction> initial_guess() const;

    /// W^{1,p} distance.
    double distance(const GridFunction& x0, const GridFunction& dx0, const GridFunction& x1,
                    const GridFunction& dx1) const;
    /// Whether (x, x') lies in the hull / envelopes within tol (relative).
    bool in_envelope(const GridFunction& x, const GridFunction& dx, double tol,
                     double* x_excess = nullptr, double* dx_excess = nullptr) const;

    const BvpProblem& problem() const noexcept { return problem_; }
    const DerivedScalars& scalars() const noexcept { return scalars_; }
    const Envelopes& envelopes() const noexcept { return env_; }
    const GridFunction& inverse_weight() const noexcept { return inv_; }
    double orientation() const noexcept { return sign_; }

private:
    GridFunction derivative(double xi, const GridFunction& Fc) const;

    BvpProblem problem_;
    MonotoneBranch oriented_;
    double sign_;
    double tol_beta_;
    GridFunction inv_;
    GridFunction psi_;
    DerivedScalars scalars_;
    Envelopes env_;
};

/// g applied to (x, x'); see FixedPointMap.
FixedPointMap::Result g_map(const BvpProblem& problem, const GridFunction& x,
                            const GridFunction& dx, double tol_beta = 1e-12);

struct InitialGuess {
    GridFunction x;
    GridFunction dx;
};

SolveReport solve(const BvpProblem& problem, const IterationConfig& config = {},
                  const std::optional<InitialGuess>& initial = std::nullopt);

/// Re-checks a report on a mesh refined by `refine`.
Verification verify(const SolveReport& report, const BvpProblem& problem, std::size_t refine = 4);

} // namespace phibvp
