#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phibvp/error.hpp"
#include "phibvp/halfline.hpp"

using namespace phibvp;
using std::numbers::pi;

namespace {

Weight arctan_weight() {
    return {[](double t) { return 1 + t * t; }, {}, [](double t) { return std::atan(t); }, pi / 2};
}

HalflineProblem zero_rhs(double lambda) {
    Rhs rhs{[](double, double, double) { return 0.0; }, [](double) { return 0.0; }, 0.0};
    HalflineProblem hp{find_branch(catalog::identity(), 0.0), arctan_weight(), rhs, 0.0, lambda};
    hp.schedule = {5, 10, 20, 40, 80};
    return hp;
}

} // namespace

TEST_CASE("extension by nu2") {
    auto mesh = share(Mesh::uniform(4.0, 8));
    auto x = GridFunction::sample(mesh, [](double t) { return t / 4.0; });
    const std::vector<double> pts{0.0, 1.5, 2.0, 4.0, 8.0};
    const auto v = extend_by_nu2(x, 1.0, pts);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(0.375));
    CHECK(v[2] == x[4]);
    CHECK(v[3] == 1.0);
    CHECK(v[4] == 1.0);
    const std::vector<double> neg{-0.5};
    CHECK_THROWS_AS(extend_by_nu2(x, 1.0, neg), DomainError);
}

TEST_CASE("f = 0: per-interval arctan profiles and shrinking gaps") {
    const double lambda = 0.2;
    const auto rep = solve_halfline(zero_rhs(lambda));
    REQUIRE(rep.intervals.size() == 5);
    for (std::size_t j = 0; j < rep.intervals.size(); ++j) {
        const auto& x = rep.intervals[j].x;
        const double n = rep.schedule[j];
        double e = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double t = x.mesh()[i];
            e = std::max(e, std::abs(x[i] - lambda * std::atan(t) / std::atan(n)));
        }
        CHECK(e <= 1e-6);
    }
    REQUIRE(rep.gaps.size() == 4);
    for (std::size_t j = 1; j < rep.gaps.size(); ++j) CHECK(rep.gaps[j] < rep.gaps[j - 1]);
    // the gap between [0, m] and [0, 2m] solutions is attained near t = m:
    // lambda (1 - atan(m) / atan(2m))
    for (std::size_t j = 0; j < rep.gaps.size(); ++j) {
        const double m = rep.schedule[j];
        CHECK(rep.gaps[j] == doctest::Approx(lambda * (1 - std::atan(m) / std::atan(2 * m))).epsilon(1e-3));
    }
    CHECK(rep.slopes_monotone);
    for (double d : rep.boundary_defects) CHECK(d < 1e-10);
}

TEST_CASE("converged status requires the last gap under tol_h") {
    auto hp = zero_rhs(0.2);
    hp.tol_h = 5e-3;
    const auto rep = solve_halfline(hp);
    CHECK(rep.status == HalflineStatus::converged);
    CHECK(rep.gaps.back() <= hp.tol_h);
    CHECK(rep.intervals.size() == 4);
    hp.tol_h = 1e-6;
    CHECK(solve_halfline(hp).status == HalflineStatus::schedule_exhausted);
}

TEST_CASE("equal boundary values: the constant profile") {
    Rhs rhs{[](double t, double x, double y) { return std::exp(-t) * std::atan(x * y); },
            [](double t) { return pi / 2 * std::exp(-t); }, pi / 2};
    HalflineProblem hp{find_branch(catalog::identity(), 0.0), arctan_weight(), rhs, 0.7, 0.7};
    const auto rep = solve_halfline(hp);
    CHECK(rep.status == HalflineStatus::converged);
    REQUIRE(rep.gaps.size() == 1);
    CHECK(rep.gaps[0] < 1e-12);
    for (std::size_t i = 0; i < rep.intervals[0].x.size(); ++i) {
        CHECK(rep.intervals[0].x[i] == doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_CASE("example 5.4: uniform bounds and residuals") {
    const double r0 = std::pow(pi + 4.0, -1.5);
    Rhs rhs{[](double t, double x, double y) { return t * t * std::cos(x) * y * y * y; },
            [r0](double t) { return r0 * std::min(1.0, 1.0 / (t * t)); }, 2 * r0};
    HalflineProblem hp{find_branch(catalog::identity(), 0.0), arctan_weight(), rhs, 0.0, 0.2};
    hp.schedule = {5, 10, 20};
    const auto b = halfline_bounds(hp);
    REQUIRE(b.has_value());
    // identity: K = [s_inf - 4 r0, s_inf + 4 r0]
    CHECK(b->K_lo == doctest::Approx(0.4 / pi - 4 * r0));
    CHECK(b->K_hi == doctest::Approx(0.4 / pi + 4 * r0));
    const auto rep = solve_halfline(hp);
    CHECK(rep.uniform_envelope);
    for (const auto& r : rep.intervals) CHECK(r.residual <= 1e-5);
    CHECK(std::abs(rep.tail_value - 0.2) < 1e-3);
}

TEST_CASE("a failing interval aborts the schedule") {
    auto hp = zero_rhs(0.2);
    IterationConfig c;
    c.max_iters = 1;
    c.tol_fp = 1e-15;
    hp.rhs.f = [](double t, double, double y) { return 0.01 * std::sin(t) * y; };
    hp.rhs.psi = [](double) { return 0.01; };
    hp.rhs.psi_integral_to_infinity = std::nullopt;
    const auto rep = solve_halfline(hp, c);
    CHECK(rep.status == HalflineStatus::interval_failed);
    CHECK(rep.intervals.size() == 1);
}
