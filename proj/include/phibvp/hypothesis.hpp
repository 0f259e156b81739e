#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phibvp/problem.hpp"

namespace phibvp {

enum class Verdict { pass, fail, sampled_pass, inconclusive };
enum class TheoremTag { thm1, cor1, cor2, thm_halfline, thm_halfline_odd };

const char* to_string(Verdict v) noexcept;
const char* to_string(TheoremTag t) noexcept;
Verdict verdict_from_string(const std::string& s);
TheoremTag theorem_from_string(const std::string& s);

struct HypothesisCheck {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    std::string detail;
    std::map<std::string, double> values;

    bool operator==(const HypothesisCheck&) const = default;
};

struct HypothesisReport {
    TheoremTag theorem = TheoremTag::thm1;
    std::vector<HypothesisCheck> checks;
    std::map<std::string, double> constants;

    /// fail > inconclusive > sampled_pass > pass.
    Verdict overall() const noexcept;
    bool admits() const noexcept {
        return overall() == Verdict::pass || overall() == Verdict::sampled_pass;
    }
    const HypothesisCheck* find(const std::string& name) const noexcept;
    bool operator==(const HypothesisReport&) const = default;
};

/// (t, x, y) lattice used for the psi-domination checks.
struct LatticeOptions {
    std::size_t nt = 50;
    std::size_t nx = 20;
    std::size_t ny = 20;
    std::uint64_t seed = 0;

    bool operator==(const LatticeOptions&) const = default;
};

HypothesisReport check_theorem1(const BvpProblem& problem, const LatticeOptions& lattice = {});
/// Throws WrongCorollary when the branch image is not all of R.
HypothesisReport check_corollary_surjective(const BvpProblem& problem,
                                            const LatticeOptions& lattice = {});
/// Throws WrongCorollary when J is unbounded.
HypothesisReport check_corollary_singular(const BvpProblem& problem,
                                          const LatticeOptions& lattice = {});

struct HalflineCheckOptions {
    double lipschitz = 1.0;
    double delta = 1.0;
    /// lim psi k supplied analytically; estimated from tail samples otherwise.
    std::optional<double> M;
    LatticeOptions lattice;
    std::vector<double> tail_samples{1e2, 1e3, 1e4, 1e5};
    double tail_spread = 1e-3;
    std::vector<double> witness_grid{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
};

HypothesisReport check_halfline(const HalflineProblem& hp, const HalflineCheckOptions& opts = {});
/// Throws WrongCorollary unless Phi is odd on a symmetric branch.
HypothesisReport check_halfline_odd(const HalflineProblem& hp,
                                    const HalflineCheckOptions& opts = {});

/// Picks the applicable finite-interval theorem: cor2 for a bounded J with
/// image R, cor1 for image R, thm1 otherwise.
TheoremTag applicable_theorem(const MonotoneBranch& branch) noexcept;
HypothesisReport check(const BvpProblem& problem, TheoremTag theorem,
                       const LatticeOptions& lattice = {});

/// Outer radius Phi^{-1}(Phi(|s*|) + 2L) of the symmetric box for odd operators.
double odd_radius(const MonotoneBranch& branch, double s_star, double L);

struct PlaplacianBound {
    double p = 2.0;
    double beta = 0.0;
    double N = 1.0;
    /// Admissible |lambda|; +inf when beta < p - 1 or beta == 0.
    double bound = 0.0;
    /// max over z >= 0 of l(z) and its location (beta > p - 1 only).
    double max_ell = 0.0;
    double z_max = 0.0;

    /// l(z) = (z/N)^((p-1)/beta) - 2z.
    double ell(double z) const;
    /// A z with (|lambda|^(p-1) + 2z)^(beta/(p-1)) <= z/N, if one exists.
    std::optional<double> z_bar(double lambda) const;
};

/// Throws DegenerateExponent for beta == p - 1.
PlaplacianBound plaplacian_bound(double p, double beta, double N);
/// Closed-form maximiser of l for beta > p - 1.
double plaplacian_critical_point(double p, double beta, double N);

struct ExampleCondition {
    std::string tag;
    std::map<std::string, double> params;
    /// Bound on |lambda|; +inf means every lambda in the branch.
    double bound = 0.0;
    bool strict = true;

    bool admits(double lambda) const noexcept {
        const double a = lambda < 0 ? -lambda : lambda;
        return strict ? a < bound : a <= bound;
    }
};

/// Phi(|lambda|) < 1/2 - 2MN/(alpha+1) for s/(1+s^2) on (-1, 1).
ExampleCondition perona_condition(double alpha, double M, double N);
/// sin|lambda| < 1 - 2MN/(alpha+1) on (-pi/2, pi/2).
ExampleCondition sine_condition(double alpha, double M, double N);
ExampleCondition plaplacian_condition(double p, double beta, double N);
/// Every lambda in (-1, 1).
ExampleCondition relativistic_condition();
/// |lambda| < r pi^2 / 2 for k = 1 + t^2, identity operator.
ExampleCondition halfline1_condition(double r);
/// (pi + 4)^(-3/2).
double halfline1_r0();
/// Identity operator: any lambda; branch J*: 2 lambda / pi in J* when the image is R.
ExampleCondition halfline2_condition(const MonotoneBranch& branch);

} // namespace phibvp
