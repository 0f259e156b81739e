// Acceptance driver: one PASS/FAIL line per criterion.
//
//   acceptance [--only N] [--known-fail N,M,...]
//
// The exit status is 0 when every failing criterion is listed in --known-fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "generators.hpp"
#include "phibvp/cli.hpp"
#include "phibvp/halfline.hpp"
#include "phibvp/hypothesis.hpp"
#include "phibvp/solver.hpp"

using namespace phibvp;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Weight unit_weight() { return {[](double) { return 1.0; }, {}, [](double t) { return t; }, {}}; }
Weight arctan_weight() {
    return {[](double t) { return 1 + t * t; }, {}, [](double t) { return std::atan(t); }, pi / 2};
}
Rhs constant_rhs(double c) {
    return {[c](double, double, double) { return c; }, [c](double) { return std::abs(c); }, {}};
}

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("phibvp_accept_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string file(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    }
};

int quiet_check(const std::string& cfg) {
    std::ostringstream out, err;
    return cmd_check(cfg, {}, out, err);
}

Outcome plaplacian_threshold() {
    const auto b = plaplacian_bound(2, 4, 1);
    const bool values = std::abs(b.max_ell - 0.375) <= 1e-9 && std::abs(b.z_max - 0.0625) <= 1e-8;
    Scratch s;
    const auto cfg = s.file("pl.yaml", "rhs: {example: plaplacian, params: {p: 2, beta: 4, N: 1}}\n"
                                       "boundary: {nu1: 0, nu2: 0.3, T: 1}\n"
                                       "sweep: {min: 0.30, max: 0.45, count: 31}\n");
    std::ostringstream out, err;
    const int code = cmd_sweep(cfg, (s.dir / "sweep").string(), {}, out, err);
    std::ifstream in(s.dir / "sweep" / "sweep.csv");
    std::string line;
    std::getline(in, line);
    double last_pass = -1, first_fail = -1;
    bool single_flip = true;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string idx, lam, verdict;
        std::getline(ss, idx, ',');
        std::getline(ss, lam, ',');
        std::getline(ss, verdict, ',');
        const bool fail = verdict == "fail";
        if (fail && first_fail < 0) first_fail = std::stod(lam);
        if (!fail) {
            if (first_fail >= 0) single_flip = false;
            last_pass = std::stod(lam);
        }
    }
    const bool flip = code == 0 && single_flip && last_pass >= 0 && first_fail >= 0 &&
                      std::abs(last_pass - 0.375) <= 0.005 + 1e-12 &&
                      std::abs(first_fail - 0.375) <= 0.005 + 1e-12;
    return {values && flip, fmt("max l = %.12g at z = %.12g; last pass %.3f, first fail %.3f",
                                b.max_ell, b.z_max, last_pass, first_fail)};
}

Outcome perona_region() {
    const double bound = perona_condition(4, 1, 1).bound;
    const double exact = 5 - 2 * std::sqrt(6.0);
    Scratch s;
    auto cfg = [&](double lambda) {
        return s.file(fmt("p%g.yaml", lambda),
                      fmt("rhs: {example: perona, params: {alpha: 4, M: 1, N: 1}}\n"
                          "boundary: {nu1: 0, nu2: %.17g, T: 1}\n",
                          lambda));
    };
    const int lo = quiet_check(cfg(0.05)), hi = quiet_check(cfg(0.15));
    return {std::abs(bound - exact) <= 1e-6 && lo == 0 && hi == 2,
            fmt("bound %.9f (5 - 2 sqrt 6 = %.9f); exit %d at 0.05, %d at 0.15", bound, exact, lo, hi)};
}

Outcome sine_branch() {
    const double bound = sine_condition(3, 1, 1).bound;
    auto b = find_branch(catalog::sine(), 3.0, Interval{pi / 2, 3 * pi / 2});
    Rhs rhs{[](double t, double x, double y) { return t * t * t * std::cos(x) * std::sin(y); },
            [](double t) { return t * t * t; }, {}};
    auto p = make_problem(b, unit_weight(), rhs, 0, 3.0, 1, 1000);
    const auto r = solve(p);
    bool inside = true;
    for (std::size_t i = 0; i < r.dx.size(); ++i) inside = inside && r.dx[i] > pi / 2 && r.dx[i] < 3 * pi / 2;
    const bool dec = b.direction() == Direction::decreasing;
    return {std::abs(bound - pi / 6) <= 1e-9 && dec && r.status == SolveStatus::converged && inside,
            fmt("bound %.12f (pi/6 = %.12f); branch %s; %s in %d iterations, residual %.2e", bound,
                pi / 6, dec ? "decreasing" : "increasing", to_string(r.status), r.iterations, r.residual)};
}

Outcome closed_form() {
    auto sup = [](const SolveReport& r, auto exact) {
        double e = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) e = std::max(e, std::abs(r.x[i] - exact(r.x.mesh()[i])));
        return e;
    };
    const auto id = find_branch(catalog::identity(), 0.0);
    const std::vector<std::size_t> ns{250, 500, 1000, 2000};
    double e1000 = 0.0, worst_quad = 0.0;
    std::vector<double> esin;
    Rhs sine_rhs{[](double t, double, double) { return pi * pi * std::sin(pi * t); },
                 [](double) { return pi * pi; }, {}};
    for (auto n : ns) {
        const auto r = solve(make_problem(id, unit_weight(), constant_rhs(2.0), 0, 0, 1, n));
        const double e = sup(r, [](double t) { return t * t - t; });
        worst_quad = std::max(worst_quad, e);
        if (n == 1000) e1000 = e;
        const auto rs = solve(make_problem(id, unit_weight(), sine_rhs, 0, 0, 1, n));
        esin.push_back(sup(rs, [](double t) { return -std::sin(pi * t); }));
    }
    // x = t^2 - t is reproduced to roundoff, so the observed order is taken on
    // x'' = pi^2 sin(pi t), whose error is driven by discretisation
    double order = 1e300;
    for (std::size_t i = 1; i < esin.size(); ++i) order = std::min(order, std::log2(esin[i - 1] / esin[i]));
    return {e1000 <= 1e-7 && order >= 1.9,
            fmt("t^2 - t error %.2e at n = 1000 (max %.2e over the study); min order %.3f", e1000,
                worst_quad, order)};
}

Outcome beta_suite() {
    std::mt19937_64 rng(20240);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int done = 0, bad_bracket = 0, bad_root = 0, bad_mono = 0;
    double worst = 0.0;
    while (done < 1000) {
        auto p = gen::random_problem(rng, 200);
        if (!p) continue;
        FixedPointMap g(*p);
        const double L = g.scalars().L;
        std::vector<double> F(p->mesh->size());
        const double a = U(rng), b = U(rng);
        for (std::size_t i = 0; i < F.size(); ++i) F[i] = L / p->T * std::sin(7 * a * (*p->mesh)[i] + b);
        const auto Fc = cumulative_integral(GridFunction(p->mesh, F));
        const double beta = g.beta_solve(Fc);
        const double c = p->branch.oriented()(g.scalars().s_star);
        const double slack = 1e-12 * std::max(1.0, std::abs(c));
        if (beta < c - L - slack || beta > c + L + slack) ++bad_bracket;
        const double defect = std::abs(g.phi(beta, Fc) - (p->nu2 - p->nu1));
        worst = std::max(worst, defect);
        if (defect > 1e-10) ++bad_root;
        auto [lo, hi] = g.beta_bracket();
        double prev = g.phi(lo, Fc);
        for (int j = 1; j <= 16; ++j) {
            const double v = g.phi(lo + (hi - lo) * j / 16.0, Fc);
            if (!(v > prev)) ++bad_mono;
            prev = v;
        }
        ++done;
    }
    return {bad_bracket == 0 && bad_root == 0 && bad_mono == 0,
            fmt("%d instances; bracket misses %d, root misses %d, monotonicity misses %d; worst defect %.2e",
                done, bad_bracket, bad_root, bad_mono, worst)};
}

Outcome envelope_invariant() {
    std::mt19937_64 rng(606);
    int done = 0, outside = 0, unconverged = 0, truncated = 0;
    std::size_t iterates = 0;
    while (done < 100) {
        auto p = gen::random_problem(rng, 400);
        if (!p || !check_theorem1(*p).admits()) continue;
        IterationConfig cfg;
        cfg.keep_iterates = true;
        const auto r = solve(*p, cfg);
        FixedPointMap g(*p);
        for (std::size_t m = 0; m < r.iterates_x.size(); ++m) {
            if (!g.in_envelope(r.iterates_x[m], r.iterates_dx[m], 1e-8)) ++outside;
        }
        iterates += r.iterates_x.size();
        if (r.status != SolveStatus::converged) ++unconverged;
        else if (r.truncation_active != 0) ++truncated;
        ++done;
    }
    return {outside == 0 && unconverged == 0 && truncated == 0,
            fmt("%d problems, %zu iterates; outside %d, unconverged %d, truncation active %d", done,
                iterates, outside, unconverged, truncated)};
}

Outcome singular_weight() {
    Weight w{[](double t) { return std::sqrt(t); }, {0.0}, [](double t) { return 2 * std::sqrt(t); }, {}};
    auto p = make_problem(find_branch(catalog::identity(), 0.0), w, constant_rhs(0.0), 0, 1, 1, 1000);
    const auto quad = derive_scalars(p, ScalarSource::quadrature);
    const auto r = solve(p);
    double e = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double t = r.x.mesh()[i];
        if (t >= 0.01) e = std::max(e, std::abs(r.x[i] - std::sqrt(t)));
    }
    return {r.status == SolveStatus::converged && std::abs(quad.k1 - 2.0) <= 1e-3 && e <= 1e-3,
            fmt("k1 by quadrature %.6f; sup |x - sqrt t| on t >= 0.01: %.2e", quad.k1, e)};
}

Outcome heteroclinic() {
    const double r0 = halfline1_r0();
    const double lambda = 0.2;
    Rhs rhs{[](double t, double x, double y) { return t * t * std::cos(x) * y * y * y; },
            [r0](double t) { return r0 * std::min(1.0, 1.0 / (t * t)); }, 2 * r0};
    HalflineProblem hp{find_branch(catalog::identity(), 0.0), arctan_weight(), rhs, 0.0, lambda};
    hp.schedule = {5, 10, 20, 40, 80};
    hp.tol_h = 1e-3;
    HalflineCheckOptions o;
    o.M = r0;
    const bool admits = check_halfline(hp, o).admits();
    const auto rep = solve_halfline(hp);
    bool decreasing = rep.gaps.size() + 1 == hp.schedule.size();
    for (std::size_t j = 1; j < rep.gaps.size(); ++j) decreasing = decreasing && rep.gaps[j] < rep.gaps[j - 1];
    double worst_res = 0.0;
    for (const auto& iv : rep.intervals) worst_res = std::max(worst_res, iv.residual);
    const double final_gap = rep.gaps.empty() ? 1e300 : rep.gaps.back();
    const double x80 = rep.intervals.empty() ? 1e300 : rep.intervals.back().x.values().back();

    // f = 0: lambda atan(t) / atan(n) on each [0, n]
    HalflineProblem zp{find_branch(catalog::identity(), 0.0), arctan_weight(),
                       {[](double, double, double) { return 0.0; }, [](double) { return 0.0; }, 0.0},
                       0.0, lambda};
    zp.schedule = hp.schedule;
    const auto zr = solve_halfline(zp);
    double ez = zr.intervals.size() == zp.schedule.size() ? 0.0 : 1e300;
    for (std::size_t j = 0; j < zr.intervals.size(); ++j) {
        const auto& x = zr.intervals[j].x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double t = x.mesh()[i];
            ez = std::max(ez, std::abs(x[i] - lambda * std::atan(t) / std::atan(zr.schedule[j])));
        }
    }
    const bool pass = admits && decreasing && final_gap <= 1e-3 && worst_res <= 1e-5 &&
                      std::abs(x80 - lambda) <= 1e-3 && ez <= 1e-6;
    return {pass, fmt("check %s; gaps %s; final gap %.3e (f = 0: %.3e); max residual %.2e; "
                      "x(80) = %.6f; f = 0 profile error %.2e",
                      admits ? "admits" : "rejects", decreasing ? "decreasing" : "not decreasing",
                      final_gap, zr.gaps.empty() ? 0.0 : zr.gaps.back(), worst_res, x80, ez)};
}

Outcome relativistic() {
    int ok = 0;
    double worst = 0.0;
    for (double lambda : {-0.9, 0.0, 0.9}) {
        auto b = find_branch(catalog::relativistic(), lambda, Interval{-1, 1});
        Rhs rhs{[](double, double x, double y) { return 0.5 * std::cos(x) * y; },
                [](double) { return 0.5; }, {}};
        auto p = make_problem(b, unit_weight(), rhs, 0.0, lambda, 1.0, 1000);
        const bool admits = check_corollary_singular(p).admits();
        const auto r = solve(p);
        bool inside = true;
        for (std::size_t i = 0; i < r.dx.size(); ++i) {
            inside = inside && std::abs(r.dx[i]) < 1.0;
            worst = std::max(worst, std::abs(r.dx[i]));
        }
        if (admits && r.status == SolveStatus::converged && inside) ++ok;
    }
    return {ok == 3, fmt("%d of 3 admitted and converged; max |x'| = %.6f", ok, worst)};
}

Outcome round_trip() {
    const std::vector<MonotoneBranch> branches{
        find_branch(catalog::r_laplacian(3.0), 0.5),
        find_branch(catalog::mean_curvature(), 0.0),
        find_branch(catalog::relativistic(), 0.0, Interval{-1, 1}),
        find_branch(catalog::p_relativistic(3.0), 0.0, Interval{-1, 1}),
        find_branch(catalog::perona_malik(), 0.0, Interval{-1, 1}),
        find_branch(catalog::sine(), pi, Interval{pi / 2, 3 * pi / 2}),
        find_branch(catalog::difference(2.0, 1.0), 2.0),
    };
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    std::string who;
    for (const auto& b : branches) {
        const double lo = std::max(b.interval().lo, -10.0), hi = std::min(b.interval().hi, 10.0);
        const double a = lo + 1e-3 * (hi - lo), c = hi - 1e-3 * (hi - lo);
        for (int i = 0; i < 1000; ++i) {
            const double s = a + (c - a) * U(rng);
            const double e = std::abs(partial_inverse(b, b(s)) - s);
            if (e > worst) {
                worst = e;
                who = b.phi().name();
            }
        }
    }
    return {worst <= 1e-10, fmt("7 operators x 1000 samples; worst |inv(Phi(s)) - s| = %.2e (%s)", worst,
                                who.c_str())};
}

std::set<int> parse_ids(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.insert(std::stoi(tok));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> only, known;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) only = parse_ids(argv[++i]);
        else if (a == "--known-fail" && i + 1 < argc) known = parse_ids(argv[++i]);
        else {
            std::fprintf(stderr, "usage: %s [--only N,...] [--known-fail N,...]\n", argv[0]);
            return 1;
        }
    }
    const std::vector<Criterion> all{
        {1, "p-Laplacian threshold", 5, plaplacian_threshold},
        {2, "Perona-Malik region", 1, perona_region},
        {3, "sine decreasing branch", 5, sine_branch},
        {4, "closed-form oracle and order", 5, closed_form},
        {5, "beta equation suite", 10, beta_suite},
        {6, "envelope invariant", 60, envelope_invariant},
        {7, "singular weight sqrt(t)", 5, singular_weight},
        {8, "half-line heteroclinic", 120, heteroclinic},
        {9, "relativistic operator", 10, relativistic},
        {10, "catalog inverse round trip", 2, round_trip},
    };
    int unexpected = 0, failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && dt <= c.budget;
        if (!pass) {
            ++failed;
            if (!known.count(c.id)) ++unexpected;
        }
        std::printf("%s AC%d %s: %s [%.2f s, budget %.0f s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), dt, c.budget,
                    !pass && known.count(c.id) ? " (known)" : "");
        std::fflush(stdout);
    }
    std::printf("%d failed, %d unexpected\n", failed, unexpected);
    return unexpected == 0 ? 0 : 1;
}
