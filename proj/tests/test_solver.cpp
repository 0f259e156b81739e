#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "phibvp/error.hpp"
#include "phibvp/solver.hpp"

using namespace phibvp;
using std::numbers::pi;

namespace {

Weight unit_weight() { return {[](double) { return 1.0; }, {}, [](double t) { return t; }, {}}; }
MonotoneBranch identity_branch() { return find_branch(catalog::identity(), 0.0); }

Rhs constant_rhs(double c) {
    return {[c](double, double, double) { return c; }, [c](double) { return std::abs(c); }, {}};
}

double sup_error(const GridFunction& g, double (*exact)(double)) {
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(g[i] - exact(g.mesh()[i])));
    return e;
}

} // namespace

TEST_CASE("x'' = 2 with zero boundary values") {
    auto p = make_problem(identity_branch(), unit_weight(), constant_rhs(2.0), 0, 0, 1, 1000);
    const auto r = solve(p);
    CHECK(r.status == SolveStatus::converged);
    CHECK(sup_error(r.x, [](double t) { return t * t - t; }) <= 1e-7);
    CHECK(r.beta == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(r.residual < 1e-8);
    CHECK(r.verification.u_defect < 1e-8);
    CHECK(r.truncation_active == 0);
}

TEST_CASE("f = 0 gives the K-affine profile for any operator") {
    Weight w{[](double t) { return 1 + t * t; }, {}, [](double t) { return std::atan(t); }, {}};
    for (auto phi : {catalog::perona_malik(), catalog::relativistic(), catalog::r_laplacian(3)}) {
        auto b = find_branch(phi, 0.3 / (pi / 4), Interval{-1, 1});
        auto p = make_problem(b, w, constant_rhs(0.0), 0, 0.3, 1, 800);
        const auto r = solve(p);
        REQUIRE(r.status == SolveStatus::converged);
        double e = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            const double t = r.x.mesh()[i];
            e = std::max(e, std::abs(r.x[i] - 0.3 * std::atan(t) / std::atan(1.0)));
        }
        CHECK(e < 1e-6);
        // one application of g already lands on the profile
        FixedPointMap g(p);
        auto [x0, dx0] = g.initial_guess();
        const auto z = g(x0, dx0);
        CHECK(g.distance(z.x, z.dx, x0, dx0) < 1e-6);
    }
}

TEST_CASE("observed order on x'' = pi^2 sin(pi t)") {
    Rhs rhs{[](double t, double, double) { return pi * pi * std::sin(pi * t); },
            [](double) { return pi * pi; }, {}};
    std::vector<double> err;
    for (std::size_t n : {250, 500, 1000, 2000}) {
        auto p = make_problem(identity_branch(), unit_weight(), rhs, 0, 0, 1, n);
        const auto r = solve(p);
        REQUIRE(r.status == SolveStatus::converged);
        err.push_back(sup_error(r.x, [](double t) { return -std::sin(pi * t); }));
    }
    for (std::size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) >= 1.9);
}

TEST_CASE("beta equation: bracket, accuracy, monotone phi") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int done = 0;
    while (done < 200) {
        auto p = gen::random_problem(rng, 200);
        if (!p) continue;
        FixedPointMap g(*p);
        const double L = g.scalars().L;
        std::vector<double> F(p->mesh->size());
        const double a = U(rng), b = U(rng);
        for (std::size_t i = 0; i < F.size(); ++i) {
            F[i] = L / p->T * std::sin(7 * a * (*p->mesh)[i] + b);
        }
        const auto Fc = cumulative_integral(GridFunction(p->mesh, F));
        const double beta = g.beta_solve(Fc);
        const double c = p->branch.oriented()(g.scalars().s_star);
        CHECK(beta >= c - L - 1e-12 * std::max(1.0, std::abs(c)));
        CHECK(beta <= c + L + 1e-12 * std::max(1.0, std::abs(c)));
        CHECK(std::abs(g.phi(beta, Fc) - (p->nu2 - p->nu1)) <= 1e-10);
        auto [lo, hi] = g.beta_bracket();
        double prev = g.phi(lo, Fc);
        for (int j = 1; j <= 8; ++j) {
            const double v = g.phi(lo + (hi - lo) * j / 8.0, Fc);
            CHECK(v > prev);
            prev = v;
        }
        ++done;
    }
}

TEST_CASE("decreasing sine branch") {
    auto b = find_branch(catalog::sine(), 3.0, Interval{pi / 2, 3 * pi / 2});
    REQUIRE(b.direction() == Direction::decreasing);
    Rhs rhs{[](double t, double x, double y) { return std::pow(t, 3) * std::cos(x) * std::sin(y); },
            [](double t) { return std::pow(t, 3); }, {}};
    auto p = make_problem(b, unit_weight(), rhs, 0, 3.0, 1, 1000);
    const auto r = solve(p);
    CHECK(r.status == SolveStatus::converged);
    CHECK(r.residual < 1e-5);
    for (std::size_t i = 0; i < r.dx.size(); ++i) {
        CHECK(r.dx[i] > pi / 2);
        CHECK(r.dx[i] < 3 * pi / 2);
    }
    // u = Phi(k x') holds nodewise
    CHECK(std::abs(r.u[10] - std::sin(r.dx[10])) < 1e-10);
}

TEST_CASE("secant acceleration reaches the same fixed point") {
    auto b = find_branch(catalog::r_laplacian(2), 0.3);
    Rhs rhs{[](double, double x, double y) { return std::cos(x) * std::pow(y, 4); },
            [](double) { return 0.0366; }, {}};
    auto p = make_problem(b, unit_weight(), rhs, 0, 0.3, 1, 500);
    IterationConfig plain;
    IterationConfig acc;
    acc.acceleration = Acceleration::secant;
    const auto r0 = solve(p, plain);
    const auto r1 = solve(p, acc);
    REQUIRE(r0.status == SolveStatus::converged);
    REQUIRE(r1.status == SolveStatus::converged);
    double d = 0.0;
    for (std::size_t i = 0; i < r0.x.size(); ++i) d = std::max(d, std::abs(r0.x[i] - r1.x[i]));
    CHECK(d < 1e-8);
    CHECK(r1.iterations <= r0.iterations);
}

TEST_CASE("iterates stay in the envelopes") {
    std::mt19937_64 rng(99);
    int done = 0;
    while (done < 10) {
        auto p = gen::random_problem(rng, 200);
        if (!p) continue;
        IterationConfig cfg;
        cfg.keep_iterates = true;
        const auto r = solve(*p, cfg);
        FixedPointMap g(*p);
        for (std::size_t m = 0; m < r.iterates_x.size(); ++m) {
            CHECK(g.in_envelope(r.iterates_x[m], r.iterates_dx[m], 1e-8));
        }
        if (r.status == SolveStatus::converged) CHECK(r.truncation_active == 0);
        ++done;
    }
}

TEST_CASE("singular weight sqrt(t)") {
    Weight w{[](double t) { return std::sqrt(t); }, {0.0}, [](double t) { return 2 * std::sqrt(t); }, {}};
    auto p = make_problem(identity_branch(), w, constant_rhs(0.0), 0, 1, 1, 1000);
    const auto r = solve(p);
    REQUIRE(r.status == SolveStatus::converged);
    CHECK(std::abs(r.scalars.k1 - 2.0) < 1e-3);
    double e = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double t = r.x.mesh()[i];
        if (t >= 0.01) e = std::max(e, std::abs(r.x[i] - std::sqrt(t)));
    }
    CHECK(e < 1e-3);
}

TEST_CASE("hypothesis violation is a status, not an exception") {
    auto b = find_branch(catalog::perona_malik(), 0.15, Interval{-1, 1});
    Rhs rhs{[](double t, double, double) { return std::pow(t, 4); },
            [](double t) { return std::pow(t, 4); }, {}};
    auto p = make_problem(b, unit_weight(), rhs, 0, 0.15, 1, 200);
    const auto r = solve(p);
    CHECK(r.status == SolveStatus::hypothesis_violation);
    CHECK_FALSE(r.message.empty());
}

TEST_CASE("non-finite rhs is reported with the node") {
    Rhs rhs{[](double t, double, double) { return t > 0.5 ? NAN : 0.0; }, [](double) { return 1.0; }, {}};
    auto p = make_problem(identity_branch(), unit_weight(), rhs, 0, 0, 1, 100);
    CHECK_THROWS_AS(solve(p), RhsEvaluationError);
}

TEST_CASE("config validation") {
    IterationConfig c;
    c.damping = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c.damping = 1.0;
    c.tol_fp = -1;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    for (auto s : {SolveStatus::converged, SolveStatus::max_iters, SolveStatus::hypothesis_violation}) {
        CHECK(solve_status_from_string(to_string(s)) == s);
    }
}

TEST_CASE("max-iters returns the best iterate") {
    auto b = find_branch(catalog::r_laplacian(2), 0.3);
    Rhs rhs{[](double, double x, double y) { return std::cos(x) * std::pow(y, 4); },
            [](double) { return 0.0366; }, {}};
    auto p = make_problem(b, unit_weight(), rhs, 0, 0.3, 1, 200);
    IterationConfig c;
    c.max_iters = 2;
    const auto r = solve(p, c);
    CHECK(r.status == SolveStatus::max_iters);
    CHECK(r.iterations == 2);
    CHECK(r.fixed_point_gap > 0.0);
}
