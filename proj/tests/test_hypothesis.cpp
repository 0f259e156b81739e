#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phibvp/error.hpp"
#include "phibvp/hypothesis.hpp"

using namespace phibvp;
using std::numbers::pi;

namespace {

Weight unit_weight() { return {[](double) { return 1.0; }, {}, [](double t) { return t; }, {}}; }

BvpProblem perona(double lambda) {
    auto b = find_branch(catalog::perona_malik(), lambda, Interval{-1, 1});
    Rhs rhs{[](double t, double x, double y) { return std::pow(t, 4) * std::cos(x) * y; },
            [](double t) { return std::pow(t, 4); }, {}};
    return make_problem(b, unit_weight(), rhs, 0.0, lambda, 1.0, 400);
}

BvpProblem relativistic(double lambda) {
    auto b = find_branch(catalog::relativistic(), lambda, Interval{-1, 1});
    Rhs rhs{[](double, double x, double y) { return 0.5 * std::cos(x) * y; },
            [](double) { return 0.5; }, {}};
    return make_problem(b, unit_weight(), rhs, 0.0, lambda, 1.0, 400);
}

HalflineProblem example54(double lambda) {
    const double r0 = std::pow(pi + 4.0, -1.5);
    Weight w{[](double t) { return 1 + t * t; }, {}, [](double t) { return std::atan(t); }, pi / 2};
    Rhs rhs{[](double t, double x, double y) { return t * t * std::cos(x) * y * y * y; },
            [r0](double t) { return r0 * std::min(1.0, 1.0 / (t * t)); }, 2 * r0};
    return {find_branch(catalog::identity(), 0.0), w, rhs, 0.0, lambda};
}

} // namespace

TEST_CASE("verdict precedence") {
    HypothesisReport r;
    r.checks.push_back({"a", Verdict::pass, {}, {}});
    CHECK(r.overall() == Verdict::pass);
    r.checks.push_back({"b", Verdict::sampled_pass, {}, {}});
    CHECK(r.overall() == Verdict::sampled_pass);
    CHECK(r.admits());
    r.checks.push_back({"c", Verdict::inconclusive, {}, {}});
    CHECK(r.overall() == Verdict::inconclusive);
    r.checks.push_back({"d", Verdict::fail, {}, {}});
    CHECK(r.overall() == Verdict::fail);
    CHECK_FALSE(r.admits());
    CHECK(r.find("c") != nullptr);
    CHECK(r.find("zz") == nullptr);
    for (auto v : {Verdict::pass, Verdict::fail, Verdict::sampled_pass, Verdict::inconclusive}) {
        CHECK(verdict_from_string(to_string(v)) == v);
    }
}

TEST_CASE("Perona-Malik: admissible below the threshold only") {
    const auto ok = check_theorem1(perona(0.05));
    CHECK(ok.admits());
    const auto bad = check_theorem1(perona(0.15));
    CHECK(bad.overall() == Verdict::fail);
    REQUIRE(bad.find("bound") != nullptr);
    CHECK(bad.find("bound")->verdict == Verdict::fail);
    // Phi(s) = 1/2 - 2MN/(alpha + 1) = 0.1 has the root 5 - sqrt(24)
    CHECK(std::abs(perona_condition(4, 1, 1).bound - (5 - std::sqrt(24.0))) < 1e-12);
}

TEST_CASE("sine threshold") {
    CHECK(std::abs(sine_condition(3, 1, 1).bound - pi / 6) < 1e-12);
    CHECK(sine_condition(3, 1, 1).admits(0.5));
    CHECK_FALSE(sine_condition(3, 1, 1).admits(0.6));
}

TEST_CASE("p-Laplacian bound p = 2, beta = 4, N = 1") {
    // l(z) = z^(1/4) - 2z, l'(z) = 0 at z = (1/8)^(4/3) = 1/16, l(1/16) = 3/8
    const auto pl = plaplacian_bound(2, 4, 1);
    CHECK(std::abs(pl.max_ell - 0.375) < 1e-9);
    CHECK(std::abs(pl.z_max - 0.0625) < 1e-8);
    CHECK(pl.bound == pl.max_ell);
    CHECK(plaplacian_critical_point(2, 4, 1) == doctest::Approx(0.0625).epsilon(1e-12));
    const auto z = pl.z_bar(0.3);
    REQUIRE(z.has_value());
    CHECK(std::pow(0.3 + 2 * *z, 4.0) <= *z * (1 + 1e-12));
    CHECK_FALSE(pl.z_bar(0.4).has_value());
    CHECK_THROWS_AS(plaplacian_bound(2, 1, 1), DegenerateExponent);
    CHECK(std::isinf(plaplacian_bound(3, 1, 1).bound));
    CHECK(std::isinf(plaplacian_bound(2, 0, 1).bound));
}

TEST_CASE("p-Laplacian with large p: maximiser agrees with the closed form") {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        for (double beta : {p, p + 1, 2 * p + 3}) {
            const auto pl = plaplacian_bound(p, beta, 2.0);
            CHECK(pl.z_max == doctest::Approx(plaplacian_critical_point(p, beta, 2.0)).epsilon(1e-6));
        }
    }
}

TEST_CASE("surjective corollary for the r-Laplacian") {
    auto b = find_branch(catalog::r_laplacian(2), 0.3);
    const auto zb = *plaplacian_bound(2, 4, 1).z_bar(0.3);
    Rhs rhs{[](double, double x, double y) { return std::cos(x) * std::pow(y, 4); },
            [zb](double) { return zb; }, {}};
    auto p = make_problem(b, unit_weight(), rhs, 0, 0.3, 1, 400);
    CHECK(applicable_theorem(p.branch) == TheoremTag::cor1);
    CHECK(check_corollary_surjective(p).admits());
    CHECK_THROWS_AS(check_corollary_singular(p), WrongCorollary);
}

TEST_CASE("singular corollary for the relativistic operator") {
    for (double lambda : {-0.9, 0.0, 0.9}) {
        auto p = relativistic(lambda);
        CHECK(applicable_theorem(p.branch) == TheoremTag::cor2);
        CHECK(check_corollary_singular(p).admits());
    }
    CHECK_THROWS_AS(check_corollary_surjective(perona(0.05)), WrongCorollary);
}

TEST_CASE("domination failure is reported with its location") {
    auto b = find_branch(catalog::identity(), 0.0);
    Rhs rhs{[](double t, double, double) { return 2.0 * t; }, [](double t) { return t; }, {}};
    auto p = make_problem(b, unit_weight(), rhs, 0, 0, 1, 100);
    const auto r = check_theorem1(p);
    CHECK(r.overall() == Verdict::fail);
    REQUIRE(r.find("norm") != nullptr);
    CHECK(r.find("norm")->values.at("max_ratio") > 1.5);
}

TEST_CASE("odd operators: |B*| equals the Remark radius") {
    for (auto phi : {catalog::relativistic(), catalog::perona_malik(), catalog::sine()}) {
        const double hi = phi->name() == "sine" ? pi / 2 : 1.0;
        auto b = find_branch(phi, 0.0, Interval{-hi, hi});
        for (double s : {-0.3, 0.0, 0.2}) {
            const double L = 0.05;
            const double A = b.inverse(b(s) - 2 * L), B = b.inverse(b(s) + 2 * L);
            CHECK(std::abs(std::max(std::abs(A), std::abs(B)) - odd_radius(b, s, L)) <= 1e-10);
        }
    }
}

TEST_CASE("example 5.4 on the half-line") {
    const double r0 = halfline1_r0();
    CHECK(r0 == doctest::Approx(std::pow(pi + 4, -1.5)).epsilon(1e-15));
    CHECK(r0 * pi * pi / 2 == doctest::Approx(0.2586).epsilon(1e-3));
    HalflineCheckOptions o;
    o.M = r0;
    CHECK(check_halfline(example54(0.2), o).admits());
    const auto bad = check_halfline(example54(0.5), o);
    CHECK(bad.overall() == Verdict::fail);
    CHECK(bad.find("psiH")->verdict == Verdict::fail);
    // M estimated from the tail of psi k when not supplied
    CHECK(check_halfline(example54(0.2)).admits());
}

TEST_CASE("odd half-line theorem with a witness interval") {
    // (Phi((1+t^2) x'))' = exp(-t) atan(x x'), relativistic: needs 2 lambda / pi in (-1, 1)
    Weight w{[](double t) { return 1 + t * t; }, {}, [](double t) { return std::atan(t); }, pi / 2};
    Rhs rhs{[](double t, double x, double y) { return std::exp(-t) * std::atan(x * y); },
            [](double t) { return pi / 2 * std::exp(-t); }, pi / 2};
    HalflineProblem hp{find_branch(catalog::relativistic(), 0.0, Interval{-1, 1}), w, rhs, 0.0, 1.0};
    const auto r = check_halfline_odd(hp);
    CHECK(r.admits());
    REQUIRE(r.find("witness_T") != nullptr);
    HalflineProblem far = hp;
    far.nu2 = 2.0;  // s_inf = 4 / pi > 1
    CHECK_FALSE(check_halfline_odd(far).admits());
    HalflineProblem notodd{find_branch(catalog::perona_malik(), 2.0, Interval{1, kInf}), w, rhs, 0, 1};
    CHECK_THROWS_AS(check_halfline_odd(notodd), WrongCorollary);
}

TEST_CASE("divergent 1/k is inconclusive or failing") {
    auto b = find_branch(catalog::identity(), 0.0);
    Weight w{[](double t) { return t; }, {0.0}, {}, {}};
    Rhs rhs{[](double, double, double) { return 0.0; }, [](double) { return 0.0; }, {}};
    auto p = make_problem(b, w, rhs, 0, 1, 1, 200);
    CHECK_FALSE(check_theorem1(p).admits());
}
