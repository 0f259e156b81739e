#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phibvp/error.hpp"
#include "phibvp/problem.hpp"

using namespace phibvp;

namespace {

Weight unit_weight() { return {[](double) { return 1.0; }, {}, [](double t) { return t; }, {}}; }
Rhs bounded(double c) {
    return {[c](double, double, double) { return c; }, [c](double) { return std::abs(c); }, {}};
}
MonotoneBranch identity_branch() { return find_branch(catalog::identity(), 0.0); }

} // namespace

TEST_CASE("scalars for the identity operator") {
    auto p = make_problem(identity_branch(), unit_weight(), bounded(0.25), 0.0, 1.0, 2.0, 200);
    auto d = derive_scalars(p);
    CHECK(d.k1 == doctest::Approx(2.0));
    CHECK(d.s_star == doctest::Approx(0.5));
    CHECK(d.L == doctest::Approx(0.5));
    // identity: A* = s* - 2L, B* = s* + 2L
    CHECK(d.A == doctest::Approx(-0.5));
    CHECK(d.B == doctest::Approx(1.5));
    CHECK(d.N1 == doctest::Approx(-1.0));
    CHECK(d.N2 == doctest::Approx(3.0));
    CHECK(d.x_lower == doctest::Approx(-1.0));
    CHECK(d.x_upper == doctest::Approx(3.0));
}

TEST_CASE("Perona-Malik compatibility") {
    auto b = find_branch(catalog::perona_malik(), 0.05, Interval{-1, 1});
    Rhs rhs{[](double t, double, double) { return std::pow(t, 4); },
            [](double t) { return std::pow(t, 4); }, {}};
    auto ok = make_problem(b, unit_weight(), rhs, 0.0, 0.05, 1.0, 400);
    CHECK_NOTHROW(derive_scalars(ok));
    auto b2 = find_branch(catalog::perona_malik(), 0.15, Interval{-1, 1});
    auto bad = make_problem(b2, unit_weight(), rhs, 0.0, 0.15, 1.0, 400);
    CHECK_THROWS_AS(derive_scalars(bad), CompatibilityError);
}

TEST_CASE("s* outside the branch") {
    auto b = find_branch(catalog::relativistic(), 0.0, Interval{-1, 1});
    auto p = make_problem(b, unit_weight(), bounded(0.0), 0.0, 2.0, 1.0, 50);
    CHECK_THROWS_AS(derive_scalars(p), DomainError);
}

TEST_CASE("singular weight sqrt(t)") {
    Weight w{[](double t) { return std::sqrt(t); }, {0.0}, [](double t) { return 2 * std::sqrt(t); }, {}};
    auto p = make_problem(identity_branch(), w, bounded(0.0), 0.0, 1.0, 1.0, 1000);
    CHECK(std::abs(derive_scalars(p, ScalarSource::quadrature).k1 - 2.0) < 1e-3);
    CHECK(derive_scalars(p).k1 == 2.0);
    CHECK(check_antiderivative(p, 1e-3));
    auto env = envelopes(p, derive_scalars(p));
    CHECK(env.upper[0] == kEnvelopeSentinel);
}

TEST_CASE("wrong antiderivative is detected") {
    Weight w{[](double t) { return 1.0 + t; }, {}, [](double t) { return t; }, {}};
    auto p = make_problem(identity_branch(), w, bounded(0.0), 0.0, 1.0, 1.0, 200);
    CHECK_FALSE(check_antiderivative(p, 1e-6));
}

TEST_CASE("truncation") {
    CHECK(truncate(2.0, -1.0, 1.0) == 1.0);
    CHECK(truncate(-2.0, -1.0, 1.0) == -1.0);
    CHECK(truncate(0.3, -1.0, 1.0) == 0.3);
    CHECK_THROWS_AS(truncate(0.0, 1.0, -1.0), InvalidEnvelope);
}

TEST_CASE("invalid problems") {
    CHECK_THROWS_AS(make_problem(identity_branch(), unit_weight(), bounded(0), 0, 1, -1.0, 10),
                    InvalidInput);
    CHECK_THROWS_AS(make_problem(identity_branch(), unit_weight(), bounded(0), 0, 1, 1.0, 10, 0.5),
                    InvalidInput);
    Rhs neg{[](double, double, double) { return 0.0; }, [](double) { return -1.0; }, {}};
    auto p = make_problem(identity_branch(), unit_weight(), neg, 0, 1, 1, 10);
    CHECK_THROWS_AS(derive_scalars(p), InvalidInput);
}

TEST_CASE("integrals over the half-line") {
    // 1/(1+t^2) -> pi/2, the oracle being the closed form
    auto r = integrate_to_infinity([](double t) { return 1.0 / (1.0 + t * t); });
    CHECK(std::abs(r.value - std::numbers::pi / 2) < 1e-6);
    CHECK_FALSE(r.exact);
    auto e = integrate_to_infinity([](double t) { return std::exp(-t); });
    CHECK(std::abs(e.value - 1.0) < 1e-6);
    auto s = integrate_to_infinity([](double t) { return 0.5 / std::sqrt(t) / (1 + t * t); }, {0.0});
    // int_0^inf t^(-1/2)/(1+t^2) dt = pi / sqrt(2)
    CHECK(std::abs(s.value - 0.5 * std::numbers::pi / std::sqrt(2.0)) < 2e-3);
}

TEST_CASE("half-line problem") {
    Weight w{[](double t) { return 1 + t * t; }, {}, [](double t) { return std::atan(t); },
             std::numbers::pi / 2};
    HalflineProblem hp{identity_branch(), w, bounded(0.0), 0.0, 0.2};
    CHECK_NOTHROW(hp.validate());
    CHECK(k_infinity(hp).exact);
    CHECK(k_partial(hp, 1.0) == doctest::Approx(std::numbers::pi / 4));
    auto p = hp.on_interval(5.0);
    CHECK(p.mesh->cells() == 1000);
    CHECK(p.T == 5.0);
    hp.schedule = {5, 5};
    CHECK_THROWS_AS(hp.validate(), InvalidInput);
    hp.schedule = {5, 10};
    hp.tol_h = 0.0;
    CHECK_THROWS_AS(hp.validate(), InvalidInput);
    hp.tol_h = 1e-3;
    hp.weight.antiderivative = nullptr;
    CHECK(k_partial(hp, 1.0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-6));
}
