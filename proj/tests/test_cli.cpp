#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phibvp/cli.hpp"
#include "phibvp/error.hpp"
#include "phibvp/kernels.hpp"

using namespace phibvp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("phibvp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return (path / name).string();
    }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

struct Run {
    int code;
    std::string out, err;
};

template <class F>
Run run(F&& f) {
    std::ostringstream out, err;
    const int code = f(out, err);
    return {code, out.str(), err.str()};
}

const char* kPerona = "rhs: {example: perona, params: {alpha: 4, M: 1, N: 1}}\n"
                      "boundary: {nu1: 0, nu2: 0.05, T: 1}\n";
const char* kSine = "rhs: {example: sine, params: {alpha: 3}}\nboundary: {nu2: 0.6, T: 1}\n";
const char* kQuadratic = "operator: {name: identity}\n"
                         "rhs: {f: \"2\", psi: \"2\"}\n"
                         "boundary: {nu1: 0, nu2: 0, T: 1}\n"
                         "mesh: {n: 1000}\n";
const char* kPlap = "rhs: {example: plaplacian, params: {p: 2, beta: 4, N: 1}}\n"
                    "boundary: {nu1: 0, nu2: 0.3, T: 1}\n"
                    "sweep: {min: 0.3, max: 0.45, count: 31}\n";

} // namespace

TEST_CASE("config round trip") {
    const std::vector<std::string> texts{
        kPerona, kSine, kQuadratic, kPlap,
        "operator: {name: relativistic, branch: [-1, 1]}\n"
        "weight: {k: \"sqrt(t)\", singular: [0], antiderivative: \"2*sqrt(t)\"}\n"
        "rhs: {f: \"0\", psi: \"0\"}\nboundary: {nu2: 0.5, T: 1}\np: 1.5\n"
        "solver: {acceleration: secant, damping: 0.25}\ncheck: {theorem: cor2, seed: 7}\n",
        "operator: {name: perona_malik, branch: [1, .inf]}\nrhs: {f: \"0\", psi: \"0\"}\n"
        "boundary: {nu2: 3, T: 1}\n",
        "rhs: {example: halfline1}\nboundary: {nu2: 0.2}\n"
        "halfline: {schedule: [5, 10, 20], tol: 1e-3, M: 0.05}\nweight: {k_inf: 1.5707963267948966}\n",
    };
    for (const auto& t : texts) {
        const auto c = parse_config(t);
        const auto again = parse_config(emit_config(c));
        CHECK(again == c);
    }
    const auto c = parse_config(texts[4]);
    CHECK(c.op.branch == Interval{-1, 1});
    CHECK(c.weight.singular == std::vector<double>{0.0});
    CHECK(c.solver.acceleration == Acceleration::secant);
    CHECK(c.check.lattice.seed == 7);
    CHECK(std::isinf(parse_config(texts[5]).op.branch->hi));
}

TEST_CASE("config errors carry line and column") {
    auto where = [](const std::string& text) -> std::pair<int, int> {
        try {
            (void)parse_config(text);
        } catch (const ParseError& e) {
            return {e.line(), e.column()};
        }
        return {0, 0};
    };
    CHECK(where("rhs: {f: \"1\", psi: \"1\"}\nboundary: {T: 1}\nmesh: {n: [1}\n").first == 3);
    CHECK(where("rhs:\n  f: \"2 * (x + \"\n  psi: \"1\"\nboundary: {T: 1}\n") == std::pair{2, 16});
    CHECK(where("rhs: {f: \"1\", psi: \"1\"}\nboundary: {T: 1}\nbogus: 1\n").first == 3);
    CHECK(where("rhs: {f: \"1\", psi: \"1\"}\nboundary: {T: one}\n").first == 2);
    CHECK(where("rhs: {f: \"1\", psi: \"1\"}\n").first == 1);  // neither T nor halfline
    CHECK(where("rhs: {f: \"1\", psi: \"1\"}\nboundary: {T: 1}\nhalfline: {}\n").first == 1);
    CHECK(where("operator: {name: warp}\nrhs: {f: \"1\", psi: \"1\"}\nboundary: {T: 1}\n").first == 1);
    CHECK(where("rhs: {example: nope}\nboundary: {T: 1}\n").first == 1);
}

TEST_CASE("sweep values") {
    SweepSpec s{0.0, 1.0, 5};
    CHECK(s.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(SweepSpec{0.0, 1.0, 0}.values().empty());
}

TEST_CASE("check command exit codes") {
    TempDir d;
    CHECK(run([&](auto& o, auto& e) { return cmd_check(d.write("p.yaml", kPerona), {}, o, e); }).code == 0);
    CHECK(run([&](auto& o, auto& e) { return cmd_check(d.write("s.yaml", kSine), {}, o, e); }).code == 2);
    const auto bad = run([&](auto& o, auto& e) {
        return cmd_check(d.write("b.yaml", "rhs: {f: \"sin(\", psi: 1}\nboundary: {T: 1}\n"), {}, o, e);
    });
    CHECK(bad.code == 1);
    CHECK(bad.err.find("line 1") != std::string::npos);
    CHECK(run([&](auto& o, auto& e) { return cmd_check(d.sub("missing.yaml"), {}, o, e); }).code == 1);
    // 1/k = 1/(1+t) is not integrable on the half-line
    const auto inc = run([&](auto& o, auto& e) {
        return cmd_check(d.write("i.yaml", "operator: {name: identity}\nweight: {k: \"1 + t\"}\n"
                                           "rhs: {f: \"0\", psi: \"exp(-t)\", psi_l1: 1}\n"
                                           "boundary: {nu2: 0.2}\nhalfline: {}\n"),
                         {}, o, e);
    });
    CHECK(inc.code == 3);
}

TEST_CASE("check output is a run record that round-trips") {
    TempDir d;
    const auto r = run([&](auto& o, auto& e) { return cmd_check(d.write("p.yaml", kPerona), {}, o, e); });
    const auto rec = parse_record(r.out);
    CHECK(rec.command == "check");
    REQUIRE(rec.hypothesis.has_value());
    CHECK(rec.hypothesis->find("example") != nullptr);
    CHECK(parse_record(emit_record(rec)) == rec);
}

TEST_CASE("solve command") {
    TempDir d;
    const auto q = run([&](auto& o, auto& e) {
        return cmd_solve(d.write("q.yaml", kQuadratic), d.sub("q"), {}, o, e);
    });
    REQUIRE(q.code == 0);
    const auto tab = read_solution(d.sub("q") + "/solution.csv");
    REQUIRE(tab.t.size() == 1001);
    double e = 0.0;
    for (std::size_t i = 0; i < tab.t.size(); ++i) e = std::max(e, std::abs(tab.x[i] - (tab.t[i] * tab.t[i] - tab.t[i])));
    CHECK(e <= 1e-8);
    CHECK(slurp(d.sub("q") + "/solution.csv").rfind("t,x,dx,u\n", 0) == 0);

    const auto rec = parse_record(slurp(d.sub("q") + "/run_record.yaml"));
    REQUIRE(rec.solve.has_value());
    CHECK(rec.solve->status == "converged");
    CHECK(parse_record(emit_record(rec)) == rec);

    // f = 0 with k = 1 + t^2: the K-affine profile
    const auto z = run([&](auto& o, auto& e) {
        return cmd_solve(d.write("z.yaml", "operator: {name: perona_malik, branch: [-1, 1]}\n"
                                           "weight: {k: \"1 + t^2\", antiderivative: \"atan(t)\"}\n"
                                           "rhs: {f: \"0\", psi: \"0\"}\nboundary: {nu2: 0.3, T: 1}\n"),
                         d.sub("z"), {}, o, e);
    });
    REQUIRE(z.code == 0);
    const auto zt = read_solution(d.sub("z") + "/solution.csv");
    double ez = 0.0;
    for (std::size_t i = 0; i < zt.t.size(); ++i) {
        ez = std::max(ez, std::abs(zt.x[i] - 0.3 * std::atan(zt.t[i]) / std::atan(1.0)));
    }
    CHECK(ez < 1e-6);

    const auto pl = run([&](auto& o, auto& e) { return cmd_solve(d.write("pl.yaml", kPlap), d.sub("pl"), {}, o, e); });
    CHECK(pl.code == 0);
    CHECK(parse_record(slurp(d.sub("pl") + "/run_record.yaml")).solve->residual <= 1e-5);

    GlobalOptions few;
    few.max_iters = 1;
    few.tol_fp = 1e-15;
    const auto nc = run([&](auto& o, auto& e) { return cmd_solve(d.sub("pl.yaml"), d.sub("nc"), few, o, e); });
    CHECK(nc.code == 4);

    const auto hv = run([&](auto& o, auto& e) { return cmd_solve(d.write("s.yaml", kSine), d.sub("s"), {}, o, e); });
    CHECK(hv.code == 2);
    CHECK_FALSE(fs::exists(d.sub("s") + "/solution.csv"));
}

TEST_CASE("global options override the config") {
    ProblemConfig c = parse_config(kQuadratic);
    GlobalOptions g;
    g.mesh_n = 64;
    g.damping = 0.25;
    g.seed = 5;
    g.apply(c);
    CHECK(c.mesh.n == 64);
    CHECK(c.solver.damping == 0.25);
    CHECK(c.check.lattice.seed == 5);
}

TEST_CASE("sweep: ordered, deterministic, flips at 3/8") {
    TempDir d;
    const auto cfg = d.write("pl.yaml", kPlap);
    GlobalOptions one, many;
    one.threads = 1;
    many.threads = 4;
    REQUIRE(run([&](auto& o, auto& e) { return cmd_sweep(cfg, d.sub("a"), one, o, e); }).code == 0);
    REQUIRE(run([&](auto& o, auto& e) { return cmd_sweep(cfg, d.sub("b"), many, o, e); }).code == 0);
    CHECK(slurp(d.sub("a") + "/sweep.csv") == slurp(d.sub("b") + "/sweep.csv"));
    const auto rows = csv(d.sub("a") + "/sweep.csv");
    REQUIRE(rows.size() == 32);
    CHECK(rows[0] == std::vector<std::string>{"index", "lambda", "verdict", "status", "iterations", "residual"});
    double last_pass = -1, first_fail = -1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stoul(rows[i][0]) == i - 1);
        const double lambda = std::stod(rows[i][1]);
        const bool fail = rows[i][2] == "fail";
        if (!fail) last_pass = lambda;
        if (fail && first_fail < 0) first_fail = lambda;
        if (!fail) CHECK(rows[i][3] == "converged");
    }
    CHECK(last_pass == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(first_fail == doctest::Approx(0.38).epsilon(1e-12));
    const auto rec = parse_record(slurp(d.sub("a") + "/run_record.yaml"));
    CHECK(rec.sweep.size() == 31);
    CHECK(parse_record(emit_record(rec)) == rec);
    kernels::omp::set_threads(kernels::omp::max_threads());

    const auto empty = d.write("e.yaml", "rhs: {example: perona}\nboundary: {T: 1}\nsweep: {min: 0, max: 0, count: 0}\n");
    CHECK(run([&](auto& o, auto& e) { return cmd_sweep(empty, d.sub("e"), {}, o, e); }).code == 0);
    CHECK(csv(d.sub("e") + "/sweep.csv").size() == 1);
}

TEST_CASE("halfline command") {
    TempDir d;
    const auto zero = d.write("z.yaml", "operator: {name: identity}\n"
                                        "weight: {k: \"1 + t^2\", antiderivative: \"atan(t)\", k_inf: 1.5707963267948966}\n"
                                        "rhs: {f: \"0\", psi: \"0\", psi_l1: 0}\n"
                                        "boundary: {nu1: 0, nu2: 0.2}\nhalfline: {}\ncheck: {theorem: thm_halfline}\n");
    const auto r = run([&](auto& o, auto& e) { return cmd_halfline(zero, d.sub("z"), {}, o, e); });
    // psi = 0 with nu1 != nu2 cannot satisfy the psi-threshold: forced through as a failure
    CHECK(r.code == 2);

    const auto ex = d.write("h.yaml", "rhs: {example: halfline1}\nboundary: {nu2: 0.2}\nhalfline: {}\n");
    const auto h = run([&](auto& o, auto& e) { return cmd_halfline(ex, d.sub("h"), {}, o, e); });
    CHECK(h.code == 0);
    const auto gaps = csv(d.sub("h") + "/gaps.csv");
    REQUIRE(gaps.size() >= 3);
    for (std::size_t i = 2; i < gaps.size(); ++i) CHECK(std::stod(gaps[i][3]) < std::stod(gaps[i - 1][3]));
    CHECK(fs::exists(d.sub("h") + "/interval_5.csv"));
    const auto rec = parse_record(slurp(d.sub("h") + "/run_record.yaml"));
    REQUIRE(rec.halfline.has_value());
    CHECK(rec.halfline->status == "converged");
    CHECK(parse_record(emit_record(rec)) == rec);

    const auto far = d.write("f.yaml", "rhs: {example: halfline1}\nboundary: {nu2: 0.5}\nhalfline: {}\n");
    CHECK(run([&](auto& o, auto& e) { return cmd_halfline(far, d.sub("f"), {}, o, e); }).code == 2);

    const auto tight = d.write("t.yaml", "rhs: {example: halfline1}\nboundary: {nu2: 0.2}\n"
                                         "halfline: {schedule: [5, 10], tol: 1e-6}\n");
    CHECK(run([&](auto& o, auto& e) { return cmd_halfline(tight, d.sub("t"), {}, o, e); }).code == 4);
}

TEST_CASE("verify command") {
    TempDir d;
    const auto cfg = d.write("pl.yaml", kPlap);
    REQUIRE(run([&](auto& o, auto& e) { return cmd_solve(cfg, d.sub("s"), {}, o, e); }).code == 0);
    const auto table = d.sub("s") + "/solution.csv";
    const auto ok = run([&](auto& o, auto& e) { return cmd_verify(table, cfg, {}, o, e); });
    CHECK(ok.code == 0);
    CHECK(ok.out.find("verified: true") != std::string::npos);

    // perturb one x value
    auto text = slurp(table);
    auto rows = csv(table);
    std::ofstream(d.sub("bad.csv")) << "t,x,dx,u\n";
    {
        std::ofstream out(d.sub("bad.csv"), std::ios::app);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double u = std::stod(rows[i][3]) + (i == 500 ? 1e-3 : 0.0);
            out << rows[i][0] << ',' << rows[i][1] << ',' << rows[i][2] << ',' << u << '\n';
        }
    }
    CHECK(run([&](auto& o, auto& e) { return cmd_verify(d.sub("bad.csv"), cfg, {}, o, e); }).code == 4);
    GlobalOptions coarse;
    coarse.mesh_n = 100;
    CHECK(run([&](auto& o, auto& e) { return cmd_verify(table, cfg, coarse, o, e); }).code == 1);
    std::ofstream(d.sub("junk.csv")) << "t,x\n1,2\n";
    CHECK(run([&](auto& o, auto& e) { return cmd_verify(d.sub("junk.csv"), cfg, {}, o, e); }).code == 1);
}
