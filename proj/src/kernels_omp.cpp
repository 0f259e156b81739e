#include <cmath>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "phibvp/kernels.hpp"

namespace phibvp::kernels {

namespace detail {
LatticeResult lattice_slab(const LatticeArgs& args, std::size_t s);
void merge(LatticeResult& into, const LatticeResult& part, bool first);
} // namespace detail

namespace omp {

namespace {

// Exceptions cannot leave a parallel region; keep the first and rethrow.
class ErrorSlot {
public:
    template <class Fn>
    void run(Fn&& fn) noexcept {
        try {
            fn();
        } catch (...) {
#pragma omp critical(phibvp_error_slot)
            if (!error_) error_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::exception_ptr error_;
};

} // namespace

void inverse_map(const InverseMapArgs& a) {
    ErrorSlot slot;
    const auto n = static_cast<std::ptrdiff_t>(a.y.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        slot.run([&] {
            const auto k = static_cast<std::size_t>(i);
            a.out[k] = a.branch->inverse(a.y[k] + a.shift) * a.scale[k];
        });
    }
    slot.rethrow();
}

std::size_t rhs_map(const RhsMapArgs& a) {
    ErrorSlot slot;
    const auto n = static_cast<std::ptrdiff_t>(a.t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        slot.run([&] {
            const auto k = static_cast<std::size_t>(i);
            a.out[k] = (*a.f)(a.t[k], a.x[k], a.y[k]);
        });
    }
    slot.rethrow();
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        if (!std::isfinite(a.out[i])) return i;
    }
    return npos;
}

LatticeResult lattice_max_ratio(const LatticeArgs& args) {
    std::vector<LatticeResult> parts(args.slabs.size());
    ErrorSlot slot;
    const auto n = static_cast<std::ptrdiff_t>(args.slabs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t s = 0; s < n; ++s) {
        slot.run([&] {
            parts[static_cast<std::size_t>(s)] =
                detail::lattice_slab(args, static_cast<std::size_t>(s));
        });
    }
    slot.rethrow();
    LatticeResult total;
    for (std::size_t s = 0; s < parts.size(); ++s) detail::merge(total, parts[s], s == 0);
    return total;
}

bool enabled() noexcept {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace omp

} // namespace phibvp::kernels
