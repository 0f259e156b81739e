#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phibvp/halfline.hpp"
#include "phibvp/hypothesis.hpp"
#include "phibvp/solver.hpp"

namespace phibvp {

struct OperatorSpec {
    std::string name;  // catalog name; filled from the example tag when empty
    std::map<std::string, double> params;
    std::optional<Interval> branch;  // hint for the monotone branch

    bool operator==(const OperatorSpec&) const = default;
};

struct WeightSpec {
    std::string k;  // expression in t; empty means 1 (or the example default)
    std::vector<double> singular;
    std::string antiderivative;  // K(t), optional
    std::optional<double> k_inf;

    bool operator==(const WeightSpec&) const = default;
};

/// Either an example tag (perona, sine, plaplacian, relativistic, halfline1,
/// halfline2) with parameters, or explicit f(t, x, y) and psi(t).
struct RhsSpec {
    std::string example;
    std::map<std::string, double> params;
    std::string f;
    std::string psi;
    std::optional<double> psi_l1;

    bool operator==(const RhsSpec&) const = default;
};

struct MeshSpec {
    std::size_t n = 1000;
    GradingSpec grading;

    bool operator==(const MeshSpec&) const = default;
};

struct CheckSpec {
    std::string theorem = "auto";
    LatticeOptions lattice;

    bool operator==(const CheckSpec&) const = default;
};

/// nu2 = lambda over count evenly spaced values in [min, max].
struct SweepSpec {
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;

    std::vector<double> values() const;
    bool operator==(const SweepSpec&) const = default;
};

struct HalflineSpec {
    std::vector<double> schedule{5, 10, 20, 40, 80, 160};
    double tol = 1e-3;
    double density = 200.0;
    double lipschitz = 1.0;
    double delta = 1.0;
    std::optional<double> M;

    bool operator==(const HalflineSpec&) const = default;
};

struct ProblemConfig {
    OperatorSpec op;
    WeightSpec weight;
    RhsSpec rhs;
    double nu1 = 0.0;
    double nu2 = 0.0;
    std::optional<double> T;  // exactly one of T and halfline
    double p = 1.0;
    MeshSpec mesh;
    IterationConfig solver;
    CheckSpec check;
    std::optional<SweepSpec> sweep;
    std::optional<HalflineSpec> halfline;

    bool operator==(const ProblemConfig&) const = default;
};

/// Throws ParseError with line and column (1-based) on malformed input.
ProblemConfig parse_config(std::string_view text);
ProblemConfig load_config(const std::string& path);
std::string emit_config(const ProblemConfig& config);

std::vector<std::string> example_tags();

/// The concrete problem for one value of nu2.
struct BuiltProblem {
    std::optional<BvpProblem> bvp;
    std::optional<HalflineProblem> halfline;
    std::optional<ExampleCondition> example;
    HalflineCheckOptions halfline_options;
    std::string f_source, psi_source;  // expressions actually used
};

BuiltProblem build_problem(const ProblemConfig& config);
BuiltProblem build_problem(const ProblemConfig& config, double nu2);

} // namespace phibvp
