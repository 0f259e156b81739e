#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phibvp/solver.hpp"

namespace phibvp {

enum class HalflineStatus { converged, schedule_exhausted, interval_failed };
const char* to_string(HalflineStatus s) noexcept;
HalflineStatus halfline_status_from_string(const std::string& s);

/// |x_n(t) - nu1| <= C and k(t) x_n'(t) in [K_lo, K_hi] for every n.
struct UniformBounds {
    double C = 0.0;
    double K_lo = 0.0;
    double K_hi = 0.0;
};

/// From A*_inf, B*_inf when Phi(s*_inf) -/+ 2 ell_inf lies in the image,
/// else the symmetric odd-operator box at the first schedule entry.
std::optional<UniformBounds> halfline_bounds(const HalflineProblem& hp);

struct HeteroclinicReport {
    HalflineStatus status = HalflineStatus::schedule_exhausted;
    std::string message;
    std::vector<double> schedule;        // intervals actually solved
    std::vector<SolveReport> intervals;
    std::vector<double> gaps;            // gaps[j-1] = sup |x_j - x_{j-1}|, nu2-extended
    std::vector<double> k_n;
    std::vector<double> s_n;
    bool slopes_monotone = true;
    std::optional<UniformBounds> bounds;
    bool uniform_envelope = true;
    std::vector<double> boundary_defects;  // max(|x(0) - nu1|, |x(n) - nu2|) per interval
    double tail_value = 0.0;
    double tail_defect = 0.0;
};

/// Linear interpolation of x on [0, n], nu2 beyond. Throws DomainError for t < 0.
std::vector<double> extend_by_nu2(const GridFunction& x, double nu2, std::span<const double> points);

struct HalflineOptions {
    std::optional<UniformBounds> bounds;  // computed by halfline_bounds when absent
    bool seed_previous = true;            // start each interval from the previous solution
};

HeteroclinicReport solve_halfline(const HalflineProblem& hp, const IterationConfig& config = {},
                                  const HalflineOptions& options = {});

} // namespace phibvp
