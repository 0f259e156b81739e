#include <doctest.h>

#include <cmath>

#include "phibvp/error.hpp"
#include "phibvp/grid.hpp"

using namespace phibvp;

TEST_CASE("uniform mesh nodes and widths") {
    const Mesh m = Mesh::uniform(2.0, 4);
    REQUIRE(m.size() == 5);
    CHECK(m[0] == 0.0);
    CHECK(m.T() == 2.0);
    CHECK(m.width(1) == doctest::Approx(0.5));
    CHECK(m.locate(1.2) == 2);
    CHECK(m.locate(-1.0) == 0);
    CHECK(m.locate(9.0) == 3);
}

TEST_CASE("mesh rejects unsorted nodes") {
    CHECK_THROWS_AS(Mesh(std::vector<double>{0.0, 0.5, 0.4, 1.0}), InvalidInput);
    CHECK_THROWS_AS(Mesh(std::vector<double>{0.0}), InvalidInput);
}

TEST_CASE("graded mesh resolves the singular point") {
    const Mesh m = Mesh::graded(1.0, 100, {0.0});
    REQUIRE(m.singular_nodes().size() == 1);
    CHECK(m.singular_nodes()[0] == 0);
    CHECK(m.width(0) < 1e-3);
    for (std::size_t c = 0; c + 1 < m.cells(); ++c) CHECK(m.width(c) > 0.0);
    CHECK(m.T() == 1.0);
}

TEST_CASE("interior singular point becomes a node") {
    const Mesh m = Mesh::graded(2.0, 50, {1.0});
    REQUIRE(m.singular_nodes().size() == 1);
    CHECK(m[m.singular_nodes()[0]] == 1.0);
    CHECK(m.singular_cells().size() == 2);
}

TEST_CASE("trapezoid integrates linear functions exactly") {
    auto mesh = share(Mesh::uniform(3.0, 7));
    auto g = GridFunction::sample(mesh, [](double t) { return 2.0 * t - 1.0; });
    CHECK(integrate(g) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("trapezoid is second order on smooth integrands") {
    double prev = 0.0;
    for (std::size_t n : {50, 100, 200}) {
        auto mesh = share(Mesh::uniform(1.0, n));
        const double err =
            std::abs(integrate(GridFunction::sample(mesh, [](double t) { return std::exp(t); })) -
                     (std::exp(1.0) - 1.0));
        if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.02));
        prev = err;
    }
}

TEST_CASE("t^(-1/2) on a graded mesh with midpoint patch") {
    auto mesh = share(Mesh::graded(1.0, 400, {0.0}));
    auto g = GridFunction::sample(mesh, [](double t) { return 1.0 / std::sqrt(t); }, true);
    REQUIRE(g.patched());
    CHECK(std::abs(integrate(g) - 2.0) < 1e-3);
}

TEST_CASE("cumulative integral ends at the full integral") {
    auto mesh = share(Mesh::graded(1.0, 300, {0.0}));
    auto g = GridFunction::sample(mesh, [](double t) { return std::pow(t, -0.3) + t; }, true);
    const auto G = cumulative_integral(g);
    CHECK(G[0] == 0.0);
    CHECK(G[G.size() - 1] == integrate(g));
    for (std::size_t i = 1; i < G.size(); ++i) CHECK(G[i] > G[i - 1]);
}

TEST_CASE("norms") {
    auto mesh = share(Mesh::uniform(1.0, 1000));
    auto g = GridFunction::sample(mesh, [](double t) { return t; });
    CHECK(norm(g, NormSpec(1.0)) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(norm(g, NormSpec(2.0)) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-5));
    CHECK(norm(g, NormSpec::inf()) == 1.0);
    CHECK_THROWS_AS(NormSpec(0.5), InvalidInput);
}

TEST_CASE("forward difference residual of an exact antiderivative pair") {
    auto mesh = share(Mesh::uniform(1.0, 64));
    // u = t^2, rhs = 2t: the difference quotient equals rhs at midpoints
    auto u = GridFunction::sample(mesh, [](double t) { return t * t; });
    auto f = GridFunction::sample(mesh, [](double t) { return 2.0 * t; });
    CHECK(forward_difference_residual(u, f) < 1e-12);
}

TEST_CASE("lincomb and mesh mismatch") {
    auto a = share(Mesh::uniform(1.0, 4));
    auto b = share(Mesh::uniform(1.0, 5));
    auto g = GridFunction::constant(a, 1.0);
    auto h = GridFunction::constant(a, 2.0);
    auto r = lincomb(2.0, g, -1.0, h);
    for (double v : r.values()) CHECK(v == 0.0);
    CHECK_THROWS_AS(lincomb(1.0, g, 1.0, GridFunction::constant(b, 1.0)), MeshMismatch);
}

TEST_CASE("interpolation onto a refined mesh") {
    auto coarse = share(Mesh::uniform(1.0, 10));
    auto fine = share(coarse->refined(4));
    CHECK(fine->cells() == 40);
    auto g = GridFunction::sample(coarse, [](double t) { return 3.0 * t + 1.0; });
    auto gi = interpolate(g, fine);
    for (std::size_t i = 0; i < fine->size(); ++i) {
        CHECK(gi[i] == doctest::Approx(3.0 * (*fine)[i] + 1.0).epsilon(1e-14));
    }
    CHECK(g.at(0.55) == doctest::Approx(2.65));
}
