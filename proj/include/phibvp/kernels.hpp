#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "phibvp/phi.hpp"

// Nodewise kernels of the solver and the hypothesis checker. Each kernel has a
// serial reference and an OpenMP version; both produce bit-identical output
// (no reductions over floating-point sums are parallelised).

namespace phibvp::kernels {

using RhsFn = std::function<double(double, double, double)>;

/// out[i] = Phi^{-1}(y[i] + shift) * scale[i]
struct InverseMapArgs {
    const MonotoneBranch* branch;
    std::span<const double> y;
    std::span<const double> scale;
    double shift = 0.0;
    std::span<double> out;
};

/// out[i] = f(t[i], x[i], y[i]); non-finite results are reported by index.
struct RhsMapArgs {
    const RhsFn* f;
    std::span<const double> t;
    std::span<const double> x;
    std::span<const double> y;
    std::span<double> out;
};

/// One t-slab of the admissible box for the domination check.
struct LatticeSlab {
    double t;
    double psi;
    double x_lo, x_hi;
    double y_lo, y_hi;
};

struct LatticeResult {
    double max_ratio = 0.0;
    double t = 0.0, x = 0.0, y = 0.0;  // location of the worst ratio
    std::size_t points = 0;
    std::size_t violations = 0;        // points with |f| > psi (1 + 1e-9)
    std::size_t non_finite = 0;

    bool operator==(const LatticeResult&) const = default;
};

struct LatticeArgs {
    const RhsFn* f;
    std::span<const LatticeSlab> slabs;
    std::size_t nx = 20;
    std::size_t ny = 20;
    std::uint64_t seed = 0;  // 0: plain lattice; otherwise jittered per point
};

/// Index of the first non-finite output, or npos.
inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

namespace serial {
void inverse_map(const InverseMapArgs& args);
std::size_t rhs_map(const RhsMapArgs& args);
LatticeResult lattice_max_ratio(const LatticeArgs& args);
} // namespace serial

namespace omp {
void inverse_map(const InverseMapArgs& args);
std::size_t rhs_map(const RhsMapArgs& args);
LatticeResult lattice_max_ratio(const LatticeArgs& args);
/// Whether the library was built with OpenMP.
bool enabled() noexcept;
int max_threads() noexcept;
void set_threads(int n) noexcept;
} // namespace omp

/// Dispatch: OpenMP above `parallel_threshold()` nodes, serial otherwise.
void inverse_map(const InverseMapArgs& args);
std::size_t rhs_map(const RhsMapArgs& args);
LatticeResult lattice_max_ratio(const LatticeArgs& args);

std::size_t parallel_threshold() noexcept;
void set_parallel_threshold(std::size_t n) noexcept;

/// Coordinates of lattice point (i of n) in [lo, hi], jittered when seed != 0.
double lattice_coordinate(double lo, double hi, std::size_t i, std::size_t n, std::uint64_t seed,
                          std::uint64_t key);
double domination_ratio(double f, double psi);

} // namespace phibvp::kernels
