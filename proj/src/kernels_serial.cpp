#include <atomic>
#include <cmath>

#include "phibvp/kernels.hpp"

namespace phibvp::kernels {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::atomic<std::size_t> g_threshold{4096};

} // namespace

double lattice_coordinate(double lo, double hi, std::size_t i, std::size_t n, std::uint64_t seed,
                          std::uint64_t key) {
    if (n <= 1 || hi == lo) return 0.5 * (lo + hi);
    const double step = 1.0 / static_cast<double>(n - 1);
    double u = static_cast<double>(i) * step;
    if (seed != 0) {
        const double r = static_cast<double>(splitmix(seed ^ splitmix(key)) >> 11) * 0x1.0p-53;
        u = std::min(1.0, std::max(0.0, u + (r - 0.5) * step));
    }
    return lo + (hi - lo) * u;
}

double domination_ratio(double f, double psi) {
    const double a = std::abs(f);
    if (psi > 0.0) return a / psi;
    return a == 0.0 ? 0.0 : HUGE_VAL;
}

namespace detail {

// Evaluates one slab; shared by the serial and OpenMP paths.
LatticeResult lattice_slab(const LatticeArgs& args, std::size_t s) {
    LatticeResult r;
    const LatticeSlab& slab = args.slabs[s];
    bool first = true;
    for (std::size_t i = 0; i < args.nx; ++i) {
        for (std::size_t j = 0; j < args.ny; ++j) {
            const std::uint64_t key = (static_cast<std::uint64_t>(s) * args.nx + i) * args.ny + j;
            const double x = lattice_coordinate(slab.x_lo, slab.x_hi, i, args.nx, args.seed, 2 * key);
            const double y =
                lattice_coordinate(slab.y_lo, slab.y_hi, j, args.ny, args.seed, 2 * key + 1);
            const double fv = (*args.f)(slab.t, x, y);
            ++r.points;
            if (!std::isfinite(fv)) {
                ++r.non_finite;
                continue;
            }
            const double ratio = domination_ratio(fv, slab.psi);
            if (std::abs(fv) > slab.psi * (1.0 + 1e-9)) ++r.violations;
            if (first || ratio > r.max_ratio) {
                r.max_ratio = ratio;
                r.t = slab.t;
                r.x = x;
                r.y = y;
                first = false;
            }
        }
    }
    return r;
}

void merge(LatticeResult& into, const LatticeResult& part, bool first) {
    if (first || part.max_ratio > into.max_ratio) {
        into.max_ratio = part.max_ratio;
        into.t = part.t;
        into.x = part.x;
        into.y = part.y;
    }
    into.points += part.points;
    into.violations += part.violations;
    into.non_finite += part.non_finite;
}

} // namespace detail

namespace serial {

void inverse_map(const InverseMapArgs& a) {
    for (std::size_t i = 0; i < a.y.size(); ++i) {
        a.out[i] = a.branch->inverse(a.y[i] + a.shift) * a.scale[i];
    }
}

std::size_t rhs_map(const RhsMapArgs& a) {
    std::size_t bad = npos;
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        a.out[i] = (*a.f)(a.t[i], a.x[i], a.y[i]);
        if (bad == npos && !std::isfinite(a.out[i])) bad = i;
    }
    return bad;
}

LatticeResult lattice_max_ratio(const LatticeArgs& args) {
    LatticeResult total;
    for (std::size_t s = 0; s < args.slabs.size(); ++s) {
        detail::merge(total, detail::lattice_slab(args, s), s == 0);
    }
    return total;
}

} // namespace serial

std::size_t parallel_threshold() noexcept { return g_threshold.load(); }
void set_parallel_threshold(std::size_t n) noexcept { g_threshold.store(n); }

void inverse_map(const InverseMapArgs& args) {
    if (args.y.size() >= parallel_threshold()) {
        omp::inverse_map(args);
    } else {
        serial::inverse_map(args);
    }
}

std::size_t rhs_map(const RhsMapArgs& args) {
    return args.t.size() >= parallel_threshold() ? omp::rhs_map(args) : serial::rhs_map(args);
}

LatticeResult lattice_max_ratio(const LatticeArgs& args) {
    const std::size_t work = args.slabs.size() * args.nx * args.ny;
    return work >= parallel_threshold() ? omp::lattice_max_ratio(args)
                                        : serial::lattice_max_ratio(args);
}

} // namespace phibvp::kernels
