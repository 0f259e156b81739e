#include <yaml-cpp/yaml.h>

#include "phibvp/cli.hpp"
#include "phibvp/error.hpp"
#include "yaml_io.hpp"

namespace phibvp {

SolveSummary SolveSummary::of(const SolveReport& r) {
    SolveSummary s;
    s.status = to_string(r.status);
    s.message = r.message;
    s.iterations = r.iterations;
    s.nodes = r.x.size();
    s.beta = r.beta;
    s.residual = r.residual;
    s.fixed_point_gap = r.fixed_point_gap;
    s.final_damping = r.final_damping;
    s.x_in_envelope = r.x_in_envelope;
    s.dx_in_envelope = r.dx_in_envelope;
    s.truncation_active = r.truncation_active;
    s.psi_clipped = r.psi_clipped;
    s.scalars = r.scalars;
    s.verification = r.verification;
    s.trace = r.trace;
    return s;
}

HalflineSummary HalflineSummary::of(const HeteroclinicReport& r) {
    HalflineSummary s;
    s.status = to_string(r.status);
    s.message = r.message;
    s.schedule = r.schedule;
    s.gaps = r.gaps;
    s.k_n = r.k_n;
    s.s_n = r.s_n;
    s.boundary_defects = r.boundary_defects;
    s.slopes_monotone = r.slopes_monotone;
    s.uniform_envelope = r.uniform_envelope;
    if (r.bounds) {
        s.C = r.bounds->C;
        s.K_lo = r.bounds->K_lo;
        s.K_hi = r.bounds->K_hi;
    }
    s.tail_value = r.tail_value;
    s.tail_defect = r.tail_defect;
    for (const auto& i : r.intervals) s.intervals.push_back(SolveSummary::of(i));
    return s;
}

namespace {

using YAML::Key;
using YAML::Value;

void put_map(YAML::Emitter& e, const std::map<std::string, double>& m) {
    e << YAML::Flow << YAML::BeginMap;
    for (const auto& [k, v] : m) e << Key << k << Value << v;
    e << YAML::EndMap;
}

void put(YAML::Emitter& e, const DerivedScalars& d) {
    e << YAML::Flow << YAML::BeginMap;
    e << Key << "k1" << Value << d.k1 << Key << "kp" << Value << d.kp;
    e << Key << "s_star" << Value << d.s_star << Key << "phi_s_star" << Value << d.phi_s_star;
    e << Key << "L" << Value << d.L << Key << "A" << Value << d.A << Key << "B" << Value << d.B;
    e << Key << "N1" << Value << d.N1 << Key << "N2" << Value << d.N2;
    e << Key << "x_lower" << Value << d.x_lower << Key << "x_upper" << Value << d.x_upper;
    e << YAML::EndMap;
}

void put(YAML::Emitter& e, const Verification& v) {
    e << YAML::Flow << YAML::BeginMap;
    e << Key << "left_defect" << Value << v.left_defect;
    e << Key << "boundary_defect" << Value << v.boundary_defect;
    e << Key << "u_defect" << Value << v.u_defect;
    e << Key << "x_excess" << Value << v.x_excess;
    e << Key << "dx_excess" << Value << v.dx_excess;
    e << Key << "x_in_envelope" << Value << v.x_in_envelope;
    e << Key << "dx_in_envelope" << Value << v.dx_in_envelope;
    e << Key << "refine" << Value << v.refine;
    e << YAML::EndMap;
}

void put(YAML::Emitter& e, const SolveSummary& s) {
    e << YAML::BeginMap;
    e << Key << "status" << Value << s.status;
    e << Key << "message" << Value << YAML::DoubleQuoted << s.message;
    e << Key << "iterations" << Value << s.iterations;
    e << Key << "nodes" << Value << s.nodes;
    e << Key << "beta" << Value << s.beta;
    e << Key << "residual" << Value << s.residual;
    e << Key << "fixed_point_gap" << Value << s.fixed_point_gap;
    e << Key << "final_damping" << Value << s.final_damping;
    e << Key << "x_in_envelope" << Value << s.x_in_envelope;
    e << Key << "dx_in_envelope" << Value << s.dx_in_envelope;
    e << Key << "truncation_active" << Value << s.truncation_active;
    e << Key << "psi_clipped" << Value << s.psi_clipped;
    e << Key << "scalars" << Value;
    put(e, s.scalars);
    e << Key << "verification" << Value;
    put(e, s.verification);
    e << Key << "trace" << Value << YAML::Flow << s.trace;
    e << YAML::EndMap;
}

void put(YAML::Emitter& e, const HypothesisReport& h) {
    e << YAML::BeginMap;
    e << Key << "theorem" << Value << to_string(h.theorem);
    e << Key << "overall" << Value << to_string(h.overall());
    e << Key << "constants" << Value;
    put_map(e, h.constants);
    e << Key << "checks" << Value << YAML::BeginSeq;
    for (const auto& c : h.checks) {
        e << YAML::BeginMap;
        e << Key << "name" << Value << c.name;
        e << Key << "verdict" << Value << to_string(c.verdict);
        e << Key << "detail" << Value << YAML::DoubleQuoted << c.detail;
        e << Key << "values" << Value;
        put_map(e, c.values);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::EndMap;
}

void put(YAML::Emitter& e, const HalflineSummary& h) {
    e << YAML::BeginMap;
    e << Key << "status" << Value << h.status;
    e << Key << "message" << Value << YAML::DoubleQuoted << h.message;
    e << Key << "schedule" << Value << YAML::Flow << h.schedule;
    e << Key << "gaps" << Value << YAML::Flow << h.gaps;
    e << Key << "k_n" << Value << YAML::Flow << h.k_n;
    e << Key << "s_n" << Value << YAML::Flow << h.s_n;
    e << Key << "boundary_defects" << Value << YAML::Flow << h.boundary_defects;
    e << Key << "slopes_monotone" << Value << h.slopes_monotone;
    e << Key << "uniform_envelope" << Value << h.uniform_envelope;
    if (h.C) e << Key << "C" << Value << *h.C;
    if (h.K_lo) e << Key << "K_lo" << Value << *h.K_lo;
    if (h.K_hi) e << Key << "K_hi" << Value << *h.K_hi;
    e << Key << "tail_value" << Value << h.tail_value;
    e << Key << "tail_defect" << Value << h.tail_defect;
    e << Key << "intervals" << Value << YAML::BeginSeq;
    for (const auto& s : h.intervals) put(e, s);
    e << YAML::EndSeq;
    e << YAML::EndMap;
}

[[noreturn]] void bad(const YAML::Node& n, const std::string& what) {
    const auto m = n.Mark();
    throw ParseError("bad or missing field '" + what + "'", m.line + 1, m.column + 1);
}

template <class T>
T get(const YAML::Node& n, const char* key) {
    const auto v = n[key];
    if (!v) bad(n, key);
    try {
        return v.as<T>();
    } catch (const YAML::Exception&) {
        bad(v, key);
    }
}

std::map<std::string, double> get_map(const YAML::Node& n, const char* key) {
    std::map<std::string, double> out;
    const auto v = n[key];
    if (!v || !v.IsMap()) bad(n, key);
    for (const auto& kv : v) {
        try {
            out[kv.first.as<std::string>()] = kv.second.as<double>();
        } catch (const YAML::Exception&) {
            bad(kv.second, key);
        }
    }
    return out;
}

DerivedScalars get_scalars(const YAML::Node& n) {
    DerivedScalars d;
    d.k1 = get<double>(n, "k1");
    d.kp = get<double>(n, "kp");
    d.s_star = get<double>(n, "s_star");
    d.phi_s_star = get<double>(n, "phi_s_star");
    d.L = get<double>(n, "L");
    d.A = get<double>(n, "A");
    d.B = get<double>(n, "B");
    d.N1 = get<double>(n, "N1");
    d.N2 = get<double>(n, "N2");
    d.x_lower = get<double>(n, "x_lower");
    d.x_upper = get<double>(n, "x_upper");
    return d;
}

Verification get_verification(const YAML::Node& n) {
    Verification v;
    v.left_defect = get<double>(n, "left_defect");
    v.boundary_defect = get<double>(n, "boundary_defect");
    v.u_defect = get<double>(n, "u_defect");
    v.x_excess = get<double>(n, "x_excess");
    v.dx_excess = get<double>(n, "dx_excess");
    v.x_in_envelope = get<bool>(n, "x_in_envelope");
    v.dx_in_envelope = get<bool>(n, "dx_in_envelope");
    v.refine = get<std::size_t>(n, "refine");
    return v;
}

SolveSummary get_solve(const YAML::Node& n) {
    SolveSummary s;
    s.status = get<std::string>(n, "status");
    s.message = get<std::string>(n, "message");
    s.iterations = get<int>(n, "iterations");
    s.nodes = get<std::size_t>(n, "nodes");
    s.beta = get<double>(n, "beta");
    s.residual = get<double>(n, "residual");
    s.fixed_point_gap = get<double>(n, "fixed_point_gap");
    s.final_damping = get<double>(n, "final_damping");
    s.x_in_envelope = get<bool>(n, "x_in_envelope");
    s.dx_in_envelope = get<bool>(n, "dx_in_envelope");
    s.truncation_active = get<std::size_t>(n, "truncation_active");
    s.psi_clipped = get<std::size_t>(n, "psi_clipped");
    if (!n["scalars"]) bad(n, "scalars");
    s.scalars = get_scalars(n["scalars"]);
    if (!n["verification"]) bad(n, "verification");
    s.verification = get_verification(n["verification"]);
    s.trace = get<std::vector<double>>(n, "trace");
    return s;
}

HypothesisReport get_hypothesis(const YAML::Node& n) {
    HypothesisReport h;
    h.theorem = theorem_from_string(get<std::string>(n, "theorem"));
    h.constants = get_map(n, "constants");
    const auto checks = n["checks"];
    if (!checks || !checks.IsSequence()) bad(n, "checks");
    for (const auto& c : checks) {
        HypothesisCheck hc;
        hc.name = get<std::string>(c, "name");
        hc.verdict = verdict_from_string(get<std::string>(c, "verdict"));
        hc.detail = get<std::string>(c, "detail");
        hc.values = get_map(c, "values");
        h.checks.push_back(std::move(hc));
    }
    return h;
}

template <class T>
std::optional<T> get_opt(const YAML::Node& n, const char* key) {
    if (!n[key]) return std::nullopt;
    return get<T>(n, key);
}

HalflineSummary get_halfline(const YAML::Node& n) {
    HalflineSummary h;
    h.status = get<std::string>(n, "status");
    h.message = get<std::string>(n, "message");
    h.schedule = get<std::vector<double>>(n, "schedule");
    h.gaps = get<std::vector<double>>(n, "gaps");
    h.k_n = get<std::vector<double>>(n, "k_n");
    h.s_n = get<std::vector<double>>(n, "s_n");
    h.boundary_defects = get<std::vector<double>>(n, "boundary_defects");
    h.slopes_monotone = get<bool>(n, "slopes_monotone");
    h.uniform_envelope = get<bool>(n, "uniform_envelope");
    h.C = get_opt<double>(n, "C");
    h.K_lo = get_opt<double>(n, "K_lo");
    h.K_hi = get_opt<double>(n, "K_hi");
    h.tail_value = get<double>(n, "tail_value");
    h.tail_defect = get<double>(n, "tail_defect");
    const auto iv = n["intervals"];
    if (!iv || !iv.IsSequence()) bad(n, "intervals");
    for (const auto& s : iv) h.intervals.push_back(get_solve(s));
    return h;
}

} // namespace

std::string emit_record(const RunRecord& r) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << Key << "command" << Value << r.command;
    e << Key << "timestamp" << Value << YAML::DoubleQuoted << r.timestamp;
    e << Key << "version" << Value << YAML::DoubleQuoted << r.version;
    e << Key << "exit_status" << Value << r.exit_status;
    e << Key << "warnings" << Value << YAML::BeginSeq;
    for (const auto& w : r.warnings) e << YAML::DoubleQuoted << w;
    e << YAML::EndSeq;
    e << Key << "config" << Value;
    detail::config_to_yaml(e, r.config);
    if (r.hypothesis) {
        e << Key << "hypothesis" << Value;
        put(e, *r.hypothesis);
    }
    if (r.solve) {
        e << Key << "solve" << Value;
        put(e, *r.solve);
    }
    if (r.halfline) {
        e << Key << "halfline" << Value;
        put(e, *r.halfline);
    }
    if (!r.sweep.empty()) {
        e << Key << "sweep" << Value << YAML::BeginSeq;
        for (const auto& row : r.sweep) {
            e << YAML::Flow << YAML::BeginMap;
            e << Key << "lambda" << Value << row.lambda;
            e << Key << "verdict" << Value << row.verdict;
            e << Key << "status" << Value << row.status;
            e << Key << "iterations" << Value << row.iterations;
            e << Key << "residual" << Value << row.residual;
            e << Key << "message" << Value << YAML::DoubleQuoted << row.message;
            e << YAML::EndMap;
        }
        e << YAML::EndSeq;
    }
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

RunRecord parse_record(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    if (!root.IsMap()) throw ParseError("run record must be a mapping", 1, 1);
    RunRecord r;
    r.command = get<std::string>(root, "command");
    r.timestamp = get<std::string>(root, "timestamp");
    r.version = get<std::string>(root, "version");
    r.exit_status = get<int>(root, "exit_status");
    r.warnings = get<std::vector<std::string>>(root, "warnings");
    if (!root["config"]) bad(root, "config");
    r.config = detail::config_from_yaml(root["config"]);
    try {
        if (root["hypothesis"]) r.hypothesis = get_hypothesis(root["hypothesis"]);
    } catch (const InvalidInput& e) {
        bad(root["hypothesis"], e.what());
    }
    if (root["solve"]) r.solve = get_solve(root["solve"]);
    if (root["halfline"]) r.halfline = get_halfline(root["halfline"]);
    if (auto sw = root["sweep"]) {
        for (const auto& row : sw) {
            SweepRow s;
            s.lambda = get<double>(row, "lambda");
            s.verdict = get<std::string>(row, "verdict");
            s.status = get<std::string>(row, "status");
            s.iterations = get<int>(row, "iterations");
            s.residual = get<double>(row, "residual");
            s.message = get<std::string>(row, "message");
            r.sweep.push_back(std::move(s));
        }
    }
    return r;
}

} // namespace phibvp
