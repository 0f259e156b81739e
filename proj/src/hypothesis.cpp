#include "phibvp/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phibvp/error.hpp"
#include "phibvp/kernels.hpp"

namespace phibvp {

const char* to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::sampled_pass: return "sampled-pass";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(TheoremTag t) noexcept {
    switch (t) {
    case TheoremTag::thm1: return "thm1";
    case TheoremTag::cor1: return "cor1";
    case TheoremTag::cor2: return "cor2";
    case TheoremTag::thm_halfline: return "thm_halfline";
    case TheoremTag::thm_halfline_odd: return "thm_halfline_odd";
    }
    return "?";
}

Verdict verdict_from_string(const std::string& s) {
    for (auto v : {Verdict::pass, Verdict::fail, Verdict::sampled_pass, Verdict::inconclusive}) {
        if (s == to_string(v)) return v;
    }
    throw InvalidInput("unknown verdict '" + s + "'");
}

TheoremTag theorem_from_string(const std::string& s) {
    for (auto t : {TheoremTag::thm1, TheoremTag::cor1, TheoremTag::cor2, TheoremTag::thm_halfline,
                   TheoremTag::thm_halfline_odd}) {
        if (s == to_string(t)) return t;
    }
    throw InvalidInput("unknown theorem tag '" + s + "'");
}

Verdict HypothesisReport::overall() const noexcept {
    bool inconclusive = false;
    bool sampled = false;
    for (const auto& c : checks) {
        if (c.verdict == Verdict::fail) return Verdict::fail;
        inconclusive |= c.verdict == Verdict::inconclusive;
        sampled |= c.verdict == Verdict::sampled_pass;
    }
    if (inconclusive) return Verdict::inconclusive;
    return sampled ? Verdict::sampled_pass : Verdict::pass;
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const noexcept {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

HypothesisCheck make_check(std::string name, bool ok, std::string detail = {}) {
    return {std::move(name), ok ? Verdict::pass : Verdict::fail, std::move(detail), {}};
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

HypothesisCheck lattice_check(std::string name, const std::function<double(double, double, double)>& f,
                              const std::vector<kernels::LatticeSlab>& slabs,
                              const LatticeOptions& opts) {
    const kernels::RhsFn fn = f;
    kernels::LatticeArgs args{&fn, slabs, opts.nx, opts.ny, opts.seed};
    const auto r = kernels::lattice_max_ratio(args);
    HypothesisCheck c{std::move(name), Verdict::sampled_pass, {}, {}};
    c.values = {{"max_ratio", r.max_ratio},
                {"worst_t", r.t},
                {"worst_x", r.x},
                {"worst_y", r.y},
                {"points", static_cast<double>(r.points)},
                {"violations", static_cast<double>(r.violations)},
                {"non_finite", static_cast<double>(r.non_finite)}};
    if (r.violations > 0) {
        c.verdict = Verdict::fail;
        c.detail = "|f| > psi at " + std::to_string(r.violations) + " of " +
                   std::to_string(r.points) + " lattice points; worst ratio " + fmt(r.max_ratio) +
                   " at (t, x, y) = (" + fmt(r.t) + ", " + fmt(r.x) + ", " + fmt(r.y) + ")";
    } else if (r.non_finite > 0) {
        c.verdict = Verdict::inconclusive;
        c.detail = "f not finite at " + std::to_string(r.non_finite) + " lattice points";
    } else {
        c.detail = "max |f|/psi = " + fmt(r.max_ratio) + " over " + std::to_string(r.points) +
                   " points";
    }
    return c;
}

// Evenly spaced (by index) regular nodes of the mesh.
std::vector<double> lattice_times(const Mesh& m, std::size_t nt) {
    std::vector<std::size_t> regular;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m.is_singular_node(i)) regular.push_back(i);
    }
    std::vector<double> ts;
    if (regular.empty() || nt == 0) return ts;
    const std::size_t n = std::min(nt, regular.size());
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = n == 1 ? 0 : j * (regular.size() - 1) / (n - 1);
        ts.push_back(m[regular[k]]);
    }
    return ts;
}

// Closed box shrunk to its interior by a relative margin.
std::pair<double, double> inset(double lo, double hi, double rel = 1e-9) {
    const double w = hi - lo;
    return {lo + rel * w, hi - rel * w};
}

struct Basics {
    double k1 = 0.0;
    double kp = 0.0;
    double s_star = 0.0;
    double L = 0.0;
    bool ok = false;
};

// kappa, antiderivative self-test, psi >= 0 and s* in J.
Basics basic_checks(const BvpProblem& problem, HypothesisReport& r, const Interval& J,
                    const char* s_name) {
    Basics b;
    GridFunction inv;
    try {
        inv = inverse_weight(problem);
    } catch (const InvalidInput& e) {
        r.checks.push_back(make_check("kappa", false, e.what()));
        return b;
    }
    const double k1q = integrate(inv);
    b.kp = problem.p == 1.0 ? k1q : norm(inv, NormSpec(problem.p));
    // a diverging L^p norm shows up as growth under refinement
    const auto fine = share(problem.mesh->refined(4));
    BvpProblem refined = problem;
    refined.mesh = fine;
    const auto inv_f = inverse_weight(refined);
    const double kp_f = problem.p == 1.0 ? integrate(inv_f) : norm(inv_f, NormSpec(problem.p));
    HypothesisCheck kappa{"kappa", Verdict::pass, {}, {{"k_p", b.kp}, {"k_p_refined", kp_f}}};
    if (!std::isfinite(b.kp) || !(b.kp > 0.0)) {
        kappa.verdict = Verdict::fail;
        kappa.detail = "1/k has no finite L^p norm on the mesh";
    } else if (std::abs(kp_f - b.kp) > 1e-2 * b.kp) {
        kappa.verdict = Verdict::inconclusive;
        kappa.detail = "discrete k_p not converged under 4x refinement (" + fmt(b.kp) + " -> " +
                       fmt(kp_f) + ")";
    } else {
        kappa.detail = "k_p = " + fmt(b.kp);
    }
    r.checks.push_back(kappa);

    if (problem.weight.has_antiderivative()) {
        const bool singular = !problem.mesh->singular_nodes().empty();
        const double tol = singular ? 1e-3 : 1e-6;
        const double exact =
            problem.weight.antiderivative(problem.T) - problem.weight.antiderivative(0.0);
        HypothesisCheck anti{"antiderivative", check_antiderivative(problem, tol) ? Verdict::pass
                                                                                  : Verdict::fail,
                             "closed-form K(T) vs quadrature, rel tol " + fmt(tol),
                             {{"exact", exact}, {"quadrature", k1q}}};
        r.checks.push_back(anti);
        b.k1 = exact;
    } else {
        b.k1 = k1q;
    }

    const auto psi = GridFunction::sample(problem.mesh, problem.rhs.psi);
    const bool psi_ok = std::all_of(psi.values().begin(), psi.values().end(),
                                    [](double v) { return v >= 0.0; });
    r.checks.push_back(make_check("psi_nonnegative", psi_ok,
                                  psi_ok ? "" : "psi takes negative values at mesh nodes"));
    b.L = integrate(psi);

    b.s_star = (problem.nu2 - problem.nu1) / b.k1;
    const bool in = J.contains(b.s_star);
    r.checks.push_back(make_check(s_name, in,
                                  "s* = " + fmt(b.s_star) + " in (" + fmt(J.lo) + ", " +
                                      fmt(J.hi) + ")"));
    r.checks.back().values["s_star"] = b.s_star;
    r.constants["k1"] = b.k1;
    r.constants["k_p"] = b.kp;
    r.constants["s_star"] = b.s_star;
    r.constants["L"] = b.L;
    b.ok = in && kappa.verdict != Verdict::fail && psi_ok;
    return b;
}

bool bound_holds(const MonotoneBranch& br, double phi_s, double two_l) {
    return br.in_image(phi_s - two_l) && br.in_image(phi_s + two_l);
}

void record_scalars(HypothesisReport& r, const DerivedScalars& d) {
    r.constants["phi_s_star"] = d.phi_s_star;
    r.constants["A"] = d.A;
    r.constants["B"] = d.B;
    r.constants["N1"] = d.N1;
    r.constants["N2"] = d.N2;
}

// psi-domination over x in [x_lo, x_hi], k(t) y in [a, b].
std::vector<kernels::LatticeSlab> box_slabs(const BvpProblem& problem, std::size_t nt, double x_lo,
                                            double x_hi, double a, double b) {
    std::vector<kernels::LatticeSlab> slabs;
    for (double t : lattice_times(*problem.mesh, nt)) {
        const double k = problem.weight.k(t);
        if (!(k > 0.0)) continue;
        slabs.push_back({t, problem.rhs.psi(t), x_lo, x_hi, a / k, b / k});
    }
    return slabs;
}

} // namespace

HypothesisReport check_theorem1(const BvpProblem& problem, const LatticeOptions& lattice) {
    HypothesisReport r;
    r.theorem = TheoremTag::thm1;
    const MonotoneBranch& br = problem.branch;
    const Basics b = basic_checks(problem, r, br.interval(), "s_star_in_branch");
    if (!b.ok) {
        r.checks.push_back({"bound", Verdict::inconclusive, "not evaluated", {}});
        r.checks.push_back({"norm", Verdict::inconclusive, "admissible box undefined", {}});
        return r;
    }
    const double phi_s = br(b.s_star);
    HypothesisCheck bound = make_check(
        "bound", bound_holds(br, phi_s, 2.0 * b.L),
        "Phi(s*) -/+ 2L = [" + fmt(phi_s - 2 * b.L) + ", " + fmt(phi_s + 2 * b.L) +
            "] inside image (" + fmt(br.image().lo) + ", " + fmt(br.image().hi) + ")");
    bound.values = {{"lower", phi_s - 2 * b.L}, {"upper", phi_s + 2 * b.L}};
    r.checks.push_back(bound);
    if (bound.verdict != Verdict::pass) {
        r.checks.push_back({"norm", Verdict::inconclusive, "admissible box undefined", {}});
        return r;
    }
    const DerivedScalars d = derive_scalars(problem, ScalarSource::exact_when_available);
    record_scalars(r, d);
    r.checks.push_back(lattice_check(
        "norm", problem.rhs.f,
        box_slabs(problem, lattice.nt, d.x_lower, d.x_upper, d.slope_lower(), d.slope_upper()),
        lattice));
    return r;
}

HypothesisReport check_corollary_surjective(const BvpProblem& problem,
                                            const LatticeOptions& lattice) {
    const MonotoneBranch& br = problem.branch;
    if (!br.image().whole_line()) {
        throw WrongCorollary("branch image (" + fmt(br.image().lo) + ", " + fmt(br.image().hi) +
                             ") is bounded: the surjective corollary does not apply; use thm1 "
                             "(or cor2 for a bounded domain onto R)");
    }
    HypothesisReport r;
    r.theorem = TheoremTag::cor1;
    const Basics b = basic_checks(problem, r, br.interval(), "s_star_in_domain");
    r.checks.push_back({"bound", Verdict::pass, "trivial: image is R", {}});
    if (!b.ok) {
        r.checks.push_back({"norm", Verdict::inconclusive, "admissible box undefined", {}});
        return r;
    }
    const DerivedScalars d = derive_scalars(problem, ScalarSource::exact_when_available);
    record_scalars(r, d);
    r.checks.push_back(lattice_check(
        "norm", problem.rhs.f,
        box_slabs(problem, lattice.nt, d.x_lower, d.x_upper, d.slope_lower(), d.slope_upper()),
        lattice));
    return r;
}

HypothesisReport check_corollary_singular(const BvpProblem& problem,
                                          const LatticeOptions& lattice) {
    const MonotoneBranch& br = problem.branch;
    const Interval J = br.interval();
    if (!J.bounded()) {
        throw WrongCorollary("domain J = (" + fmt(J.lo) + ", " + fmt(J.hi) +
                             ") is unbounded: the singular corollary does not apply; use cor1");
    }
    if (!br.image().whole_line()) {
        throw WrongCorollary("image of J is bounded: the singular corollary needs Phi(J) = R; "
                             "use thm1");
    }
    HypothesisReport r;
    r.theorem = TheoremTag::cor2;
    const Basics b = basic_checks(problem, r, J, "s_star_in_domain");
    if (!b.ok) {
        r.checks.push_back({"norm", Verdict::inconclusive, "admissible box undefined", {}});
        return r;
    }
    const auto [xl, xh] = inset(problem.nu1 + b.k1 * J.lo, problem.nu1 + b.k1 * J.hi);
    const auto [ya, yb] = inset(J.lo, J.hi);
    r.constants["x_lower"] = xl;
    r.constants["x_upper"] = xh;
    r.checks.push_back(
        lattice_check("norm", problem.rhs.f, box_slabs(problem, lattice.nt, xl, xh, ya, yb), lattice));
    return r;
}

TheoremTag applicable_theorem(const MonotoneBranch& branch) noexcept {
    if (branch.image().whole_line()) {
        return branch.interval().bounded() ? TheoremTag::cor2 : TheoremTag::cor1;
    }
    return TheoremTag::thm1;
}

HypothesisReport check(const BvpProblem& problem, TheoremTag theorem, const LatticeOptions& lattice) {
    switch (theorem) {
    case TheoremTag::thm1: return check_theorem1(problem, lattice);
    case TheoremTag::cor1: return check_corollary_surjective(problem, lattice);
    case TheoremTag::cor2: return check_corollary_singular(problem, lattice);
    default: throw InvalidInput("half-line theorem requested for a finite interval problem");
    }
}

double odd_radius(const MonotoneBranch& branch, double s_star, double L) {
    const MonotoneBranch o = branch.oriented();
    return o.inverse(o(std::abs(s_star)) + 2.0 * L);
}

// ---------------------------------------------------------------- half-line

namespace {

struct HalflineBasics {
    double k_inf = 0.0;
    double ell = 0.0;
    bool ok = true;
};

HalflineBasics halfline_integrals(const HalflineProblem& hp, HypothesisReport& r) {
    HalflineBasics b;
    auto add = [&](const char* name, const TailIntegral& ti) {
        HypothesisCheck c{name, Verdict::pass, {}, {{"value", ti.value}, {"exact", ti.exact ? 1.0 : 0.0},
                                                    {"truncation", ti.truncation}, {"cutoff", ti.cutoff}}};
        const double rel = ti.value != 0.0 ? std::abs(ti.truncation / ti.value) : 0.0;
        if (!std::isfinite(ti.value)) {
            c.verdict = Verdict::fail;
            c.detail = "integral over [0, +inf) is not finite";
            b.ok = false;
        } else if (!ti.exact && rel > 1e-3) {
            c.verdict = Verdict::inconclusive;
            c.detail = "tail beyond cutoff " + fmt(ti.cutoff) + " estimated at " + fmt(ti.truncation);
        } else {
            c.detail = ti.exact ? "closed form" : "numeric, tail estimate " + fmt(ti.truncation);
        }
        r.checks.push_back(c);
    };
    const TailIntegral kt = k_infinity(hp);
    add("k_in_L1", kt);
    b.k_inf = kt.value;
    const TailIntegral pt = psi_l1_infinity(hp);
    add("psi_in_L1", pt);
    b.ell = pt.value;
    if (!(b.k_inf > 0.0)) b.ok = false;
    r.constants["k_inf"] = b.k_inf;
    r.constants["ell_inf"] = b.ell;
    return b;
}

std::vector<double> halfline_times(const HalflineProblem& hp, std::size_t nt) {
    const double tmax = hp.schedule.back();
    std::vector<double> ts;
    for (std::size_t i = 0; i < nt; ++i) {
        const double u = nt == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(nt - 1);
        const double t = tmax * u * u;
        if (hp.weight.singular_at(t)) continue;
        ts.push_back(t);
    }
    return ts;
}

std::vector<kernels::LatticeSlab> halfline_slabs(const HalflineProblem& hp, std::size_t nt,
                                                 double x_lo, double x_hi, double a, double b) {
    std::vector<kernels::LatticeSlab> slabs;
    for (double t : halfline_times(hp, nt)) {
        const double k = hp.weight.k(t);
        if (!(k > 0.0)) continue;
        slabs.push_back({t, hp.rhs.psi(t), x_lo, x_hi, a / k, b / k});
    }
    return slabs;
}

} // namespace

HypothesisReport check_halfline(const HalflineProblem& hp, const HalflineCheckOptions& opts) {
    hp.validate();
    HypothesisReport r;
    r.theorem = TheoremTag::thm_halfline;
    const MonotoneBranch& br = hp.branch;
    const HalflineBasics b = halfline_integrals(hp, r);
    if (!b.ok) return r;
    const double s_inf = (hp.nu2 - hp.nu1) / b.k_inf;
    r.constants["s_star_inf"] = s_inf;
    const bool mono = br.interval().contains(s_inf);
    r.checks.push_back(make_check("monot0", mono, "s*_inf = " + fmt(s_inf)));
    if (!mono) return r;

    // sampled Lipschitz bound near s*_inf
    {
        const double phi0 = br(s_inf);
        const double lo = std::max(s_inf - opts.delta, br.interval().lo);
        const double hi = std::min(s_inf + opts.delta, br.interval().hi);
        double worst = 0.0;
        std::size_t bad = 0;
        const std::size_t n = 1000;
        for (std::size_t i = 1; i < n; ++i) {
            const double s = lo + (hi - lo) * static_cast<double>(i) / n;
            const double ds = std::abs(s - s_inf);
            if (ds == 0.0) continue;
            const double q = std::abs(br(s) - phi0) / ds;
            worst = std::max(worst, q);
            if (q > opts.lipschitz * (1.0 + 1e-12)) ++bad;
        }
        HypothesisCheck c{"lip", bad == 0 ? Verdict::sampled_pass : Verdict::fail,
                          "max sampled |Phi(s) - Phi(s*)|/|s - s*| = " + fmt(worst) + " vs L = " +
                              fmt(opts.lipschitz),
                          {{"L", opts.lipschitz}, {"delta", opts.delta}, {"max_quotient", worst}}};
        r.checks.push_back(c);
    }

    const double phi_s = br(s_inf);
    const bool bound = bound_holds(br, phi_s, 2.0 * b.ell);
    r.checks.push_back(make_check("bound2", bound,
                                  "Phi(s*_inf) -/+ 2 ell_inf = [" + fmt(phi_s - 2 * b.ell) + ", " +
                                      fmt(phi_s + 2 * b.ell) + "]"));

    // M = lim psi k
    {
        HypothesisCheck c{"psiH", Verdict::fail, {}, {}};
        double M = 0.0;
        bool have = true;
        if (opts.M) {
            M = *opts.M;
            c.detail = "M supplied";
        } else {
            std::vector<double> v;
            for (double t : opts.tail_samples) v.push_back(hp.rhs.psi(t) * hp.weight.k(t));
            const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
            const double scale = std::max(std::abs(v.back()), 1e-300);
            const double spread = (*mx - *mn) == 0.0 ? 0.0 : (*mx - *mn) / scale;
            c.values["spread"] = spread;
            M = v.back();
            if (!std::isfinite(spread) || spread >= opts.tail_spread) {
                have = false;
                c.verdict = Verdict::inconclusive;
                c.detail = "psi k not settled on tail samples (spread " + fmt(spread) + ")";
            } else {
                c.detail = "M estimated from tail samples";
            }
        }
        const double threshold = opts.lipschitz * std::abs(hp.nu2 - hp.nu1) / (2.0 * b.k_inf * b.k_inf);
        c.values["M"] = M;
        c.values["threshold"] = threshold;
        r.constants["M"] = M;
        if (have) {
            const bool ok = M > threshold || (hp.nu1 == hp.nu2 && M >= 0.0);
            c.verdict = ok ? Verdict::pass : Verdict::fail;
            c.detail += "; M = " + fmt(M) + (ok ? " > " : " <= ") + fmt(threshold);
        }
        r.checks.push_back(c);
    }

    if (!bound) {
        r.checks.push_back({"norm2", Verdict::inconclusive, "admissible box undefined", {}});
        return r;
    }
    const MonotoneBranch o = br.oriented();
    const double sg = br.sign();
    const double A = o.inverse(sg * phi_s - 2.0 * b.ell);
    const double B = o.inverse(sg * phi_s + 2.0 * b.ell);
    r.constants["A_inf"] = A;
    r.constants["B_inf"] = B;
    r.constants["C"] = b.k_inf * (std::abs(A) + std::abs(B));
    const double xl = std::min(hp.nu1, hp.nu1 + b.k_inf * A);
    const double xh = std::max(hp.nu1, hp.nu1 + b.k_inf * B);
    r.checks.push_back(lattice_check("norm2", hp.rhs.f,
                                     halfline_slabs(hp, opts.lattice.nt, xl, xh, A, B), opts.lattice));
    return r;
}

HypothesisReport check_halfline_odd(const HalflineProblem& hp, const HalflineCheckOptions& opts) {
    hp.validate();
    const MonotoneBranch& br = hp.branch;
    if (!br.phi().odd() || !br.interval().symmetric()) {
        throw WrongCorollary("odd-operator half-line theorem needs an odd Phi on a symmetric branch");
    }
    HypothesisReport r;
    r.theorem = TheoremTag::thm_halfline_odd;
    const HalflineBasics b = halfline_integrals(hp, r);
    if (!b.ok) return r;
    const double s_inf = (hp.nu2 - hp.nu1) / b.k_inf;
    r.constants["s_star_inf"] = s_inf;
    r.checks.push_back(make_check("monot0", br.interval().contains(s_inf), "s*_inf = " + fmt(s_inf)));

    std::optional<double> witness;
    double s_T = 0.0;
    for (double T : opts.witness_grid) {
        const double kT = k_partial(hp, T);
        const double s = (hp.nu2 - hp.nu1) / kT;
        if (br.interval().contains(s) && bound_holds(br, br(s), 2.0 * b.ell)) {
            witness = T;
            s_T = s;
            break;
        }
    }
    if (!witness) {
        std::ostringstream os;
        os << "no T in {" << opts.witness_grid.front() << ", ..., " << opts.witness_grid.back()
           << "} with s_T* in J* and Phi(s_T*) -/+ 2 ell_inf in the image (ell_inf = " << b.ell
           << ", image (" << br.image().lo << ", " << br.image().hi << "))";
        r.checks.push_back({"witness_T", Verdict::fail, os.str(), {}});
        r.checks.push_back({"norm3", Verdict::inconclusive, "admissible box undefined", {}});
        return r;
    }
    r.checks.push_back({"witness_T", Verdict::pass, "T = " + fmt(*witness) + ", s_T* = " + fmt(s_T),
                        {{"T", *witness}, {"s_T", s_T}}});
    const double R = odd_radius(br, s_T, b.ell);
    r.constants["T_witness"] = *witness;
    r.constants["s_T"] = s_T;
    r.constants["R"] = R;
    r.constants["C"] = b.k_inf * R;
    const auto [xl, xh] = inset(-(std::abs(hp.nu1) + b.k_inf * R), std::abs(hp.nu1) + b.k_inf * R);
    const auto [ya, yb] = inset(-R, R);
    r.checks.push_back(lattice_check("norm3", hp.rhs.f,
                                     halfline_slabs(hp, opts.lattice.nt, xl, xh, ya, yb), opts.lattice));
    return r;
}

// ------------------------------------------------------------ p-Laplacian

double PlaplacianBound::ell(double z) const {
    return std::pow(z / N, (p - 1.0) / beta) - 2.0 * z;
}

double plaplacian_critical_point(double p, double beta, double N) {
    const double q = (p - 1.0) / beta;
    return std::pow(q / (2.0 * std::pow(N, q)), 1.0 / (1.0 - q));
}

PlaplacianBound plaplacian_bound(double p, double beta, double N) {
    if (!(p > 1.0) || !(beta >= 0.0) || !(N > 0.0)) {
        throw InvalidInput("p-Laplacian bound needs p > 1, beta >= 0, N > 0");
    }
    if (std::abs(beta - (p - 1.0)) <= 1e-14 * std::max(1.0, p)) {
        throw DegenerateExponent("beta = p - 1 is not covered");
    }
    PlaplacianBound b;
    b.p = p;
    b.beta = beta;
    b.N = N;
    if (beta == 0.0 || beta < p - 1.0) {
        b.bound = kInf;
        b.max_ell = kInf;
        b.z_max = kInf;
        return b;
    }
    const double zc = plaplacian_critical_point(p, beta, N);
    // golden section for max l on [0, 4 zc]
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, c = 4.0 * zc;
    double x1 = c - g * (c - a), x2 = a + g * (c - a);
    double f1 = b.ell(x1), f2 = b.ell(x2);
    while (c - a > 1e-6 * zc) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (c - a);
            f2 = b.ell(x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - g * (c - a);
            f1 = b.ell(x1);
        }
    }
    // polish on the sign of l'(z) = q z^(q-1) / N^q - 2, decreasing in z
    const double q = (p - 1.0) / beta;
    auto dl = [&](double z) { return q * std::pow(z, q - 1.0) / std::pow(N, q) - 2.0; };
    for (int it = 0; it < 200 && c - a > 0.0; ++it) {
        const double m = 0.5 * (a + c);
        if (m <= a || m >= c) break;
        if (dl(m) > 0.0) {
            a = m;
        } else {
            c = m;
        }
    }
    b.z_max = 0.5 * (a + c);
    b.max_ell = b.ell(b.z_max);
    b.bound = std::pow(b.max_ell, 1.0 / (p - 1.0));
    return b;
}

std::optional<double> PlaplacianBound::z_bar(double lambda) const {
    if (beta == 0.0) return N;
    const double tau = std::pow(std::abs(lambda), p - 1.0);
    auto bisect_root = [&](double lo, double hi) {
        // l(lo) < tau <= l(hi), l increasing on [lo, hi]
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (lo + hi);
            if (m <= lo || m >= hi) break;
            if (ell(m) < tau) {
                lo = m;
            } else {
                hi = m;
            }
        }
        return hi;
    };
    if (beta < p - 1.0) {
        // l decreases to its minimum, then grows without bound
        const double q = (p - 1.0) / beta;
        const double zmin = std::pow(2.0 * std::pow(N, q) / q, 1.0 / (q - 1.0));
        double hi = std::max(zmin, 1.0);
        while (ell(hi) <= tau) hi *= 2.0;
        return 2.0 * bisect_root(zmin, hi);
    }
    if (tau > max_ell) return std::nullopt;
    if (tau == max_ell) return z_max;
    const double z1 = tau <= 0.0 ? 0.0 : bisect_root(0.0, z_max);
    return 0.5 * (z1 + z_max);
}

// ---------------------------------------------------------------- examples

ExampleCondition perona_condition(double alpha, double M, double N) {
    ExampleCondition c{"perona", {{"alpha", alpha}, {"M", M}, {"N", N}}, 0.0, true};
    const double level = 0.5 - 2.0 * M * N / (alpha + 1.0);
    if (level > 0.0) {
        const MonotoneBranch br(catalog::perona_malik(), {-1.0, 1.0}, Direction::increasing);
        c.bound = br.inverse(level);
    }
    c.params["level"] = level;
    return c;
}

ExampleCondition sine_condition(double alpha, double M, double N) {
    ExampleCondition c{"sine", {{"alpha", alpha}, {"M", M}, {"N", N}}, 0.0, true};
    const double level = 1.0 - 2.0 * M * N / (alpha + 1.0);
    if (level > 0.0) c.bound = std::asin(std::min(level, 1.0));
    c.params["level"] = level;
    return c;
}

ExampleCondition plaplacian_condition(double p, double beta, double N) {
    const PlaplacianBound b = plaplacian_bound(p, beta, N);
    return {"plaplacian", {{"p", p}, {"beta", beta}, {"N", N}, {"max_ell", b.max_ell}}, b.bound,
            false};
}

ExampleCondition relativistic_condition() { return {"relativistic", {}, 1.0, true}; }

double halfline1_r0() { return std::pow(std::numbers::pi + 4.0, -1.5); }

ExampleCondition halfline1_condition(double r) {
    return {"halfline1", {{"r", r}}, r * std::numbers::pi * std::numbers::pi / 2.0, true};
}

ExampleCondition halfline2_condition(const MonotoneBranch& branch) {
    ExampleCondition c{"halfline2", {}, 0.0, true};
    const Interval J = branch.interval();
    const double half_pi = std::numbers::pi / 2.0;
    if (branch.image().whole_line()) {
        // s*_inf = 2 lambda / pi must lie in J*
        c.bound = half_pi * std::min(-J.lo, J.hi);
        return c;
    }
    // T = 1: 4 lambda / pi in J* and Phi(4 lambda / pi) + pi < b2 (odd, increasing)
    const MonotoneBranch o = branch.oriented();
    const double top = o.image().hi - std::numbers::pi;
    if (top > 0.0) c.bound = (std::numbers::pi / 4.0) * std::min(o.inverse(top), J.hi);
    return c;
}

} // namespace phibvp
