#include "phibvp/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "phibvp/error.hpp"
#include "phibvp/expr.hpp"
#include "yaml_io.hpp"

namespace phibvp {

std::vector<double> SweepSpec::values() const {
    std::vector<double> v;
    if (count == 0) return v;
    if (count == 1) return {min};
    for (std::size_t i = 0; i < count; ++i) {
        v.push_back(min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return v;
}

std::vector<std::string> example_tags() {
    return {"perona", "sine", "plaplacian", "relativistic", "halfline1", "halfline2"};
}

namespace {

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& msg) {
    const auto m = n.Mark();
    throw ParseError(msg, m.line + 1, m.column + 1);
}

void expect_keys(const YAML::Node& n, const std::string& section, std::set<std::string> keys) {
    if (!n.IsMap()) fail_at(n, "section '" + section + "' must be a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (!keys.count(key)) fail_at(kv.first, "unknown key '" + key + "' in " + section);
    }
}

template <class T>
T as(const YAML::Node& n, const std::string& what) {
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail_at(n, "bad value for '" + what + "'");
    }
}

template <class T>
void read(const YAML::Node& parent, const char* key, T& out) {
    if (auto n = parent[key]) out = as<T>(n, key);
}

template <class T>
void read(const YAML::Node& parent, const char* key, std::optional<T>& out) {
    if (auto n = parent[key]) out = as<T>(n, key);
}

std::map<std::string, double> read_params(const YAML::Node& n) {
    std::map<std::string, double> out;
    if (!n) return out;
    if (!n.IsMap()) fail_at(n, "params must be a mapping");
    for (const auto& kv : n) out[kv.first.as<std::string>()] = as<double>(kv.second, "params");
    return out;
}

// column of an expression error counted from the start of the YAML scalar
void check_expression(const YAML::Node& n, const std::string& text) {
    if (text.empty()) return;
    try {
        (void)Expression::parse(text);
    } catch (const ParseError& e) {
        const auto m = n.Mark();
        throw ParseError(e.message(), m.line + 1,
                         m.column + 1 + std::max(0, e.column() - 1) + (n.Tag() == "!" ? 1 : 0));
    }
}

void read_expr(const YAML::Node& parent, const char* key, std::string& out) {
    if (auto n = parent[key]) {
        out = as<std::string>(n, key);
        check_expression(n, out);
    }
}

} // namespace

ProblemConfig parse_config(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    return detail::config_from_yaml(root);
}

ProblemConfig detail::config_from_yaml(const YAML::Node& root) {
    if (!root.IsMap()) throw ParseError("config must be a mapping", 1, 1);
    expect_keys(root, "config",
                {"operator", "weight", "rhs", "boundary", "p", "mesh", "solver", "check", "sweep",
                 "halfline"});
    ProblemConfig c;

    if (auto op = root["operator"]) {
        expect_keys(op, "operator", {"name", "params", "branch"});
        read(op, "name", c.op.name);
        c.op.params = read_params(op["params"]);
        if (auto b = op["branch"]) {
            if (!b.IsSequence() || b.size() != 2) fail_at(b, "branch must be [lo, hi]");
            c.op.branch = Interval{as<double>(b[0], "branch"), as<double>(b[1], "branch")};
            if (!(c.op.branch->lo < c.op.branch->hi)) fail_at(b, "branch must have lo < hi");
        }
        if (!c.op.name.empty()) {
            const auto names = catalog::names();
            if (std::find(names.begin(), names.end(), c.op.name) == names.end()) {
                fail_at(op["name"], "unknown operator '" + c.op.name + "'");
            }
        }
    }
    if (auto w = root["weight"]) {
        expect_keys(w, "weight", {"k", "singular", "antiderivative", "k_inf"});
        read_expr(w, "k", c.weight.k);
        read_expr(w, "antiderivative", c.weight.antiderivative);
        read(w, "singular", c.weight.singular);
        read(w, "k_inf", c.weight.k_inf);
    }
    if (auto r = root["rhs"]) {
        expect_keys(r, "rhs", {"example", "params", "f", "psi", "psi_l1"});
        read(r, "example", c.rhs.example);
        c.rhs.params = read_params(r["params"]);
        read_expr(r, "f", c.rhs.f);
        read_expr(r, "psi", c.rhs.psi);
        read(r, "psi_l1", c.rhs.psi_l1);
        if (!c.rhs.example.empty()) {
            const auto tags = example_tags();
            if (std::find(tags.begin(), tags.end(), c.rhs.example) == tags.end()) {
                fail_at(r["example"], "unknown example '" + c.rhs.example + "'");
            }
        } else if (c.rhs.f.empty() || c.rhs.psi.empty()) {
            fail_at(r, "rhs needs an example tag or both f and psi");
        }
    } else {
        throw ParseError("missing section 'rhs'", 1, 1);
    }
    if (auto b = root["boundary"]) {
        expect_keys(b, "boundary", {"nu1", "nu2", "T"});
        read(b, "nu1", c.nu1);
        read(b, "nu2", c.nu2);
        read(b, "T", c.T);
    }
    read(root, "p", c.p);
    if (auto m = root["mesh"]) {
        expect_keys(m, "mesh", {"n", "grading_ratio", "grading_cells"});
        read(m, "n", c.mesh.n);
        read(m, "grading_ratio", c.mesh.grading.ratio);
        read(m, "grading_cells", c.mesh.grading.cells);
    }
    if (auto s = root["solver"]) {
        expect_keys(s, "solver",
                    {"damping", "max_iters", "tol_fp", "tol_beta", "acceleration", "window",
                     "refine", "stagnation", "min_damping"});
        auto& it = c.solver;
        read(s, "damping", it.damping);
        read(s, "max_iters", it.max_iters);
        read(s, "tol_fp", it.tol_fp);
        read(s, "tol_beta", it.tol_beta);
        if (auto a = s["acceleration"]) {
            try {
                it.acceleration = acceleration_from_string(as<std::string>(a, "acceleration"));
            } catch (const InvalidInput& e) {
                fail_at(a, e.what());
            }
        }
        read(s, "window", it.window);
        read(s, "refine", it.refine);
        read(s, "stagnation", it.stagnation);
        read(s, "min_damping", it.min_damping);
    }
    if (auto ch = root["check"]) {
        expect_keys(ch, "check", {"theorem", "nt", "nx", "ny", "seed"});
        read(ch, "theorem", c.check.theorem);
        if (c.check.theorem != "auto") {
            try {
                (void)theorem_from_string(c.check.theorem);
            } catch (const InvalidInput& e) {
                fail_at(ch["theorem"], e.what());
            }
        }
        read(ch, "nt", c.check.lattice.nt);
        read(ch, "nx", c.check.lattice.nx);
        read(ch, "ny", c.check.lattice.ny);
        read(ch, "seed", c.check.lattice.seed);
    }
    if (auto sw = root["sweep"]) {
        expect_keys(sw, "sweep", {"min", "max", "count"});
        SweepSpec s;
        read(sw, "min", s.min);
        read(sw, "max", s.max);
        read(sw, "count", s.count);
        c.sweep = s;
    }
    if (auto h = root["halfline"]) {
        expect_keys(h, "halfline", {"schedule", "tol", "density", "lipschitz", "delta", "M"});
        HalflineSpec s;
        read(h, "schedule", s.schedule);
        read(h, "tol", s.tol);
        read(h, "density", s.density);
        read(h, "lipschitz", s.lipschitz);
        read(h, "delta", s.delta);
        read(h, "M", s.M);
        c.halfline = s;
    }
    if (c.T.has_value() == c.halfline.has_value()) {
        throw ParseError("exactly one of boundary.T and a halfline section is required", 1, 1);
    }
    return c;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

void emit_params(YAML::Emitter& e, const std::map<std::string, double>& params) {
    e << YAML::Flow << YAML::BeginMap;
    for (const auto& [k, v] : params) e << YAML::Key << k << YAML::Value << v;
    e << YAML::EndMap;
}

} // namespace

std::string emit_config(const ProblemConfig& c) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    detail::config_to_yaml(e, c);
    return std::string(e.c_str()) + "\n";
}

void detail::config_to_yaml(YAML::Emitter& e, const ProblemConfig& c) {
    e << YAML::BeginMap;
    e << YAML::Key << "operator" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << c.op.name;
    e << YAML::Key << "params" << YAML::Value;
    emit_params(e, c.op.params);
    if (c.op.branch) {
        e << YAML::Key << "branch" << YAML::Value << YAML::Flow << YAML::BeginSeq << c.op.branch->lo
          << c.op.branch->hi << YAML::EndSeq;
    }
    e << YAML::EndMap;

    e << YAML::Key << "weight" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "k" << YAML::Value << YAML::DoubleQuoted << c.weight.k;
    e << YAML::Key << "singular" << YAML::Value << YAML::Flow << c.weight.singular;
    e << YAML::Key << "antiderivative" << YAML::Value << YAML::DoubleQuoted
      << c.weight.antiderivative;
    if (c.weight.k_inf) e << YAML::Key << "k_inf" << YAML::Value << *c.weight.k_inf;
    e << YAML::EndMap;

    e << YAML::Key << "rhs" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "example" << YAML::Value << c.rhs.example;
    e << YAML::Key << "params" << YAML::Value;
    emit_params(e, c.rhs.params);
    e << YAML::Key << "f" << YAML::Value << YAML::DoubleQuoted << c.rhs.f;
    e << YAML::Key << "psi" << YAML::Value << YAML::DoubleQuoted << c.rhs.psi;
    if (c.rhs.psi_l1) e << YAML::Key << "psi_l1" << YAML::Value << *c.rhs.psi_l1;
    e << YAML::EndMap;

    e << YAML::Key << "boundary" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "nu1" << YAML::Value << c.nu1;
    e << YAML::Key << "nu2" << YAML::Value << c.nu2;
    if (c.T) e << YAML::Key << "T" << YAML::Value << *c.T;
    e << YAML::EndMap;

    e << YAML::Key << "p" << YAML::Value << c.p;
    e << YAML::Key << "mesh" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n" << YAML::Value << c.mesh.n;
    e << YAML::Key << "grading_ratio" << YAML::Value << c.mesh.grading.ratio;
    e << YAML::Key << "grading_cells" << YAML::Value << c.mesh.grading.cells;
    e << YAML::EndMap;

    const auto& it = c.solver;
    e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "damping" << YAML::Value << it.damping;
    e << YAML::Key << "max_iters" << YAML::Value << it.max_iters;
    e << YAML::Key << "tol_fp" << YAML::Value << it.tol_fp;
    e << YAML::Key << "tol_beta" << YAML::Value << it.tol_beta;
    e << YAML::Key << "acceleration" << YAML::Value << to_string(it.acceleration);
    e << YAML::Key << "window" << YAML::Value << it.window;
    e << YAML::Key << "refine" << YAML::Value << it.refine;
    e << YAML::Key << "stagnation" << YAML::Value << it.stagnation;
    e << YAML::Key << "min_damping" << YAML::Value << it.min_damping;
    e << YAML::EndMap;

    e << YAML::Key << "check" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "theorem" << YAML::Value << c.check.theorem;
    e << YAML::Key << "nt" << YAML::Value << c.check.lattice.nt;
    e << YAML::Key << "nx" << YAML::Value << c.check.lattice.nx;
    e << YAML::Key << "ny" << YAML::Value << c.check.lattice.ny;
    e << YAML::Key << "seed" << YAML::Value << c.check.lattice.seed;
    e << YAML::EndMap;

    if (c.sweep) {
        e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "min" << YAML::Value << c.sweep->min;
        e << YAML::Key << "max" << YAML::Value << c.sweep->max;
        e << YAML::Key << "count" << YAML::Value << c.sweep->count;
        e << YAML::EndMap;
    }
    if (c.halfline) {
        const auto& h = *c.halfline;
        e << YAML::Key << "halfline" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "schedule" << YAML::Value << YAML::Flow << h.schedule;
        e << YAML::Key << "tol" << YAML::Value << h.tol;
        e << YAML::Key << "density" << YAML::Value << h.density;
        e << YAML::Key << "lipschitz" << YAML::Value << h.lipschitz;
        e << YAML::Key << "delta" << YAML::Value << h.delta;
        if (h.M) e << YAML::Key << "M" << YAML::Value << *h.M;
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double param(const std::map<std::string, double>& p, const char* key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

struct Expanded {
    std::string op;
    std::map<std::string, double> op_params;
    std::optional<Interval> branch;
    std::string k, K;
    std::optional<double> k_inf;
    std::string f, psi;
    std::optional<double> psi_l1;
    std::optional<double> M;
    std::optional<ExampleCondition> condition;
};

Expanded expand(const ProblemConfig& c, double lambda) {
    Expanded x;
    x.op = c.op.name;
    x.op_params = c.op.params;
    x.branch = c.op.branch;
    x.k = c.weight.k;
    x.K = c.weight.antiderivative;
    x.k_inf = c.weight.k_inf;
    x.f = c.rhs.f;
    x.psi = c.rhs.psi;
    x.psi_l1 = c.rhs.psi_l1;
    const auto& tag = c.rhs.example;
    const auto& pr = c.rhs.params;
    auto set_op = [&](const char* name) {
        if (x.op.empty()) x.op = name;
    };
    auto halfline_weight = [&] {
        if (x.k.empty()) {
            x.k = "1 + t^2";
            if (x.K.empty()) x.K = "atan(t)";
            if (!x.k_inf) x.k_inf = std::numbers::pi / 2;
        }
    };
    if (tag == "perona") {
        const double a = param(pr, "alpha", 4), M = param(pr, "M", 1), N = param(pr, "N", 1);
        set_op("perona_malik");
        if (!x.branch) x.branch = Interval{-1.0, 1.0};
        x.f = num(M * N) + " * t^" + num(a) + " * cos(x) * y";
        x.psi = num(M * N) + " * t^" + num(a);
        x.condition = perona_condition(a, M, N);
    } else if (tag == "sine") {
        const double a = param(pr, "alpha", 3), M = param(pr, "M", 1), N = param(pr, "N", 1);
        set_op("sine");
        x.f = num(M * N) + " * t^" + num(a) + " * cos(x) * sin(y)";
        x.psi = num(M * N) + " * t^" + num(a);
        x.condition = sine_condition(a, M, N);
    } else if (tag == "plaplacian") {
        const double p = param(pr, "p", 2), b = param(pr, "beta", 4), N = param(pr, "N", 1);
        set_op("r_laplacian");
        if (!x.op_params.count("r")) x.op_params["r"] = p;
        const auto pl = plaplacian_bound(p, b, N);
        const auto z = pl.z_bar(lambda);
        x.f = num(N) + " * cos(x) * abs(y)^" + num(b);
        x.psi = num(z ? *z : (pl.z_max > 0 ? pl.z_max : N));
        x.condition = plaplacian_condition(p, b, N);
    } else if (tag == "relativistic") {
        const double M = param(pr, "M", 0.5);
        set_op("relativistic");
        if (!x.branch) x.branch = Interval{-1.0, 1.0};
        x.f = num(M) + " * cos(x) * y";
        x.psi = num(M);
        x.condition = relativistic_condition();
    } else if (tag == "halfline1") {
        const double r = param(pr, "r", halfline1_r0());
        set_op("identity");
        halfline_weight();
        x.f = "t^2 * cos(x) * y^3";
        x.psi = num(r) + " * min(1, 1 / t^2)";
        x.psi_l1 = 2 * r;
        x.M = r;
        x.condition = halfline1_condition(r);
    } else if (tag == "halfline2") {
        set_op("identity");
        halfline_weight();
        x.f = "exp(-t) * atan(x * y)";
        x.psi = "pi / 2 * exp(-t)";
        x.psi_l1 = std::numbers::pi / 2;
        x.M = 0.0;
    }
    if (x.op.empty()) throw InvalidInput("operator name is required");
    if (x.k.empty()) {
        x.k = "1";
        if (x.K.empty()) x.K = "t";
    }
    return x;
}

std::function<double(double)> of_t(const std::string& text) {
    auto e = Expression::parse(text);
    return [e](double t) { return e(t); };
}

} // namespace

BuiltProblem build_problem(const ProblemConfig& config) { return build_problem(config, config.nu2); }

BuiltProblem build_problem(const ProblemConfig& c, double nu2) {
    const Expanded x = expand(c, nu2);
    BuiltProblem out;
    out.f_source = x.f;
    out.psi_source = x.psi;
    out.example = x.condition;

    Weight w;
    w.k = of_t(x.k);
    w.singular_points = c.weight.singular;
    if (!x.K.empty()) w.antiderivative = of_t(x.K);
    w.integral_to_infinity = x.k_inf;

    const auto fe = Expression::parse(x.f);
    Rhs rhs;
    rhs.f = [fe](double t, double xx, double y) { return fe(t, xx, y); };
    rhs.psi = of_t(x.psi);
    rhs.psi_integral_to_infinity = x.psi_l1;

    auto phi = catalog::by_name(x.op, x.op_params);

    if (c.T) {
        const double T = *c.T;
        double k1;
        if (w.has_antiderivative()) {
            k1 = w.antiderivative(T) - w.antiderivative(0.0);
        } else {
            std::vector<double> sing;
            for (double s : w.singular_points) {
                if (s >= 0 && s <= T) sing.push_back(s);
            }
            auto mesh = share(Mesh::make(T, c.mesh.n, sing, c.mesh.grading));
            k1 = integrate(GridFunction::sample(
                mesh, [&](double t) { return 1.0 / w.k(t); }, true));
        }
        const double s_star = (nu2 - c.nu1) / k1;
        auto branch = find_branch(phi, s_star, x.branch);
        out.bvp = make_problem(std::move(branch), std::move(w), std::move(rhs), c.nu1, nu2, T,
                               c.mesh.n, c.p, c.mesh.grading);
    } else {
        const auto& h = *c.halfline;
        const double k_inf = w.integral_to_infinity
                                 ? *w.integral_to_infinity
                                 : integrate_to_infinity([&](double t) { return 1.0 / w.k(t); },
                                                         w.singular_points)
                                       .value;
        HalflineProblem hp{find_branch(phi, (nu2 - c.nu1) / k_inf, x.branch), w, rhs, c.nu1, nu2,
                           h.schedule, h.tol, h.density, c.mesh.grading};
        hp.validate();
        out.halfline = std::move(hp);
        out.halfline_options.lipschitz = h.lipschitz;
        out.halfline_options.delta = h.delta;
        out.halfline_options.M = h.M ? h.M : x.M;
        out.halfline_options.lattice = c.check.lattice;
    }
    return out;
}

} // namespace phibvp
