// Serial reference vs OpenMP kernels, and a full solve with 1 and all threads.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "phibvp/expr.hpp"
#include "phibvp/kernels.hpp"
#include "phibvp/solver.hpp"

using namespace phibvp;
using namespace phibvp::kernels;

namespace {

struct Data {
    std::vector<double> t, x, y, scale, out;
    explicit Data(std::size_t n) : t(n), x(n), y(n), scale(n, 1.0), out(n) {
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = static_cast<double>(i) / static_cast<double>(n);
            x[i] = std::sin(7.0 * t[i]);
            y[i] = 0.4 * std::cos(3.0 * t[i]);
        }
    }
};

// p-relativistic has an analytic inverse; the difference operator falls back to bisection
const MonotoneBranch& analytic_branch() {
    static const auto b = find_branch(catalog::p_relativistic(3.0), 0.0, Interval{-1, 1});
    return b;
}
const MonotoneBranch& bisection_branch() {
    static const auto b = find_branch(catalog::difference(2.0, 1.0), 2.0);
    return b;
}

template <void (*Kernel)(const InverseMapArgs&)>
void inverse(benchmark::State& st, const MonotoneBranch& b, double shift) {
    Data d(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        Kernel({&b, d.y, d.scale, shift, d.out});
        benchmark::DoNotOptimize(d.out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_inverse_analytic_serial(benchmark::State& st) { inverse<serial::inverse_map>(st, analytic_branch(), 0.0); }
void BM_inverse_analytic_omp(benchmark::State& st) { inverse<omp::inverse_map>(st, analytic_branch(), 0.0); }
void BM_inverse_bisect_serial(benchmark::State& st) { inverse<serial::inverse_map>(st, bisection_branch(), 5.0); }
void BM_inverse_bisect_omp(benchmark::State& st) { inverse<omp::inverse_map>(st, bisection_branch(), 5.0); }

template <std::size_t (*Kernel)(const RhsMapArgs&)>
void rhs(benchmark::State& st) {
    const auto e = Expression::parse("t^4 * cos(x) * y / (1 + y^2) + exp(-t) * atan(x * y)");
    const RhsFn f = [&e](double t, double x, double y) { return e(t, x, y); };
    Data d(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        benchmark::DoNotOptimize(Kernel({&f, d.t, d.x, d.y, d.out}));
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_rhs_serial(benchmark::State& st) { rhs<serial::rhs_map>(st); }
void BM_rhs_omp(benchmark::State& st) { rhs<omp::rhs_map>(st); }

template <LatticeResult (*Kernel)(const LatticeArgs&)>
void lattice(benchmark::State& st) {
    const RhsFn f = [](double t, double x, double y) { return t * t * std::cos(x) * y * y * y; };
    std::vector<LatticeSlab> slabs;
    for (std::int64_t i = 0; i < st.range(0); ++i) {
        const double t = 1.0 + static_cast<double>(i);
        slabs.push_back({t, 0.06, -1.0, 1.0, -0.3 / (1 + t * t), 0.3 / (1 + t * t)});
    }
    for (auto _ : st) {
        benchmark::DoNotOptimize(Kernel({&f, slabs, 20, 20, 7}));
    }
    st.SetItemsProcessed(st.iterations() * st.range(0) * 400);
}

void BM_lattice_serial(benchmark::State& st) { lattice<serial::lattice_max_ratio>(st); }
void BM_lattice_omp(benchmark::State& st) { lattice<omp::lattice_max_ratio>(st); }

// x'' = cos(x) x'^4 style instance on the p-Laplacian branch
void BM_solve(benchmark::State& st) {
    const auto b = find_branch(catalog::r_laplacian(2.0), 0.3);
    Weight w{[](double) { return 1.0; }, {}, [](double t) { return t; }, {}};
    Rhs r{[](double, double x, double y) { return std::cos(x) * std::pow(y, 4); },
          [](double) { return 0.0366; }, {}};
    const auto p = make_problem(b, w, r, 0.0, 0.3, 1.0, static_cast<std::size_t>(st.range(0)));
    const int threads = static_cast<int>(st.range(1));
    const std::size_t before = parallel_threshold();
    if (threads == 1) set_parallel_threshold(static_cast<std::size_t>(-1));
    for (auto _ : st) {
        const auto rep = solve(p);
        benchmark::DoNotOptimize(rep.beta);
    }
    set_parallel_threshold(before);
}

} // namespace

BENCHMARK(BM_inverse_analytic_serial)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_inverse_analytic_omp)->RangeMultiplier(10)->Range(1000, 1000000)->UseRealTime();
BENCHMARK(BM_inverse_bisect_serial)->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_inverse_bisect_omp)->RangeMultiplier(10)->Range(1000, 100000)->UseRealTime();
BENCHMARK(BM_rhs_serial)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_rhs_omp)->RangeMultiplier(10)->Range(1000, 1000000)->UseRealTime();
BENCHMARK(BM_lattice_serial)->Arg(50)->Arg(500);
BENCHMARK(BM_lattice_omp)->Arg(50)->Arg(500)->UseRealTime();
BENCHMARK(BM_solve)->Args({4000, 1})->Args({4000, 0})->Args({64000, 1})->Args({64000, 0})->UseRealTime()
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
