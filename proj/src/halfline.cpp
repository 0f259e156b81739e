#include "phibvp/halfline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phibvp/error.hpp"

namespace phibvp {

const char* to_string(HalflineStatus s) noexcept {
    switch (s) {
    case HalflineStatus::converged: return "converged";
    case HalflineStatus::schedule_exhausted: return "schedule-exhausted";
    case HalflineStatus::interval_failed: return "interval-failed";
    }
    return "?";
}

HalflineStatus halfline_status_from_string(const std::string& s) {
    for (auto v : {HalflineStatus::converged, HalflineStatus::schedule_exhausted,
                   HalflineStatus::interval_failed}) {
        if (s == to_string(v)) return v;
    }
    throw InvalidInput("unknown half-line status '" + s + "'");
}

std::optional<UniformBounds> halfline_bounds(const HalflineProblem& hp) {
    const double k_inf = k_infinity(hp).value;
    const double ell = psi_l1_infinity(hp).value;
    const MonotoneBranch o = hp.branch.oriented();
    const double s_inf = (hp.nu2 - hp.nu1) / k_inf;
    const double c = o(s_inf);
    if (o.interval().contains(s_inf) && o.in_image(c - 2 * ell) && o.in_image(c + 2 * ell)) {
        const double A = o.inverse(c - 2 * ell);
        const double B = o.inverse(c + 2 * ell);
        return UniformBounds{k_inf * (std::abs(A) + std::abs(B)), std::min(A, B), std::max(A, B)};
    }
    if (hp.branch.phi().odd() && hp.branch.interval().symmetric()) {
        const double s = (hp.nu2 - hp.nu1) / k_partial(hp, hp.schedule.front());
        const double y = o(std::abs(s)) + 2 * ell;
        if (o.interval().contains(s) && o.in_image(y)) {
            const double R = o.inverse(y);
            return UniformBounds{k_inf * R, -R, R};
        }
    }
    return std::nullopt;
}

std::vector<double> extend_by_nu2(const GridFunction& x, double nu2, std::span<const double> points) {
    std::vector<double> out;
    out.reserve(points.size());
    const double n = x.mesh().T();
    for (double t : points) {
        if (t < 0.0 || std::isnan(t)) {
            std::ostringstream os;
            os << "evaluation point " << t << " is negative";
            throw DomainError(os.str());
        }
        out.push_back(t > n ? nu2 : x.at(t));
    }
    return out;
}

namespace {

double gap(const GridFunction& fine, const GridFunction& coarse, double nu2) {
    double g = 0.0;
    const auto tf = fine.mesh().nodes();
    const auto ext = extend_by_nu2(coarse, nu2, tf);
    for (std::size_t i = 0; i < tf.size(); ++i) g = std::max(g, std::abs(fine[i] - ext[i]));
    for (double t : coarse.mesh().nodes()) g = std::max(g, std::abs(fine.at(t) - coarse.at(t)));
    return g;
}

} // namespace

HeteroclinicReport solve_halfline(const HalflineProblem& hp, const IterationConfig& config,
                                  const HalflineOptions& options) {
    hp.validate();
    HeteroclinicReport rep;
    rep.bounds = options.bounds ? options.bounds : halfline_bounds(hp);

    for (std::size_t j = 0; j < hp.schedule.size(); ++j) {
        const double n = hp.schedule[j];
        const BvpProblem problem = hp.on_interval(n);
        std::optional<InitialGuess> seed;
        if (options.seed_previous && !rep.intervals.empty()) {
            const SolveReport& prev = rep.intervals.back();
            const double np = prev.x.mesh().T();
            const Mesh& m = *problem.mesh;
            std::vector<double> xv = extend_by_nu2(prev.x, hp.nu2, m.nodes());
            std::vector<double> dv(m.size(), 0.0);
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (m[i] <= np) dv[i] = prev.dx.at(m[i]);
            }
            std::vector<double> dp;
            for (auto c : m.singular_cells()) {
                const double t = m.midpoint(c);
                dp.push_back(t <= np ? prev.dx.at(t) : 0.0);
            }
            seed = InitialGuess{GridFunction(problem.mesh, std::move(xv)),
                                GridFunction(problem.mesh, std::move(dv), std::move(dp))};
        }
        SolveReport sr = solve(problem, config, seed);
        rep.schedule.push_back(n);
        rep.k_n.push_back(k_partial(hp, n));
        rep.s_n.push_back((hp.nu2 - hp.nu1) / rep.k_n.back());
        if (sr.status != SolveStatus::converged) {
            rep.status = HalflineStatus::interval_failed;
            rep.message = "interval [0, " + std::to_string(n) + "]: " + to_string(sr.status) +
                          (sr.message.empty() ? "" : " (" + sr.message + ")");
            rep.intervals.push_back(std::move(sr));
            return rep;
        }
        const std::size_t last = sr.x.size() - 1;
        rep.boundary_defects.push_back(
            std::max(std::abs(sr.x[0] - hp.nu1), std::abs(sr.x[last] - hp.nu2)));
        if (rep.bounds) {
            const Mesh& m = *problem.mesh;
            const double tol = 1e-8;
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (std::abs(sr.x[i] - hp.nu1) > rep.bounds->C * (1 + tol) + tol) {
                    rep.uniform_envelope = false;
                }
                if (m.is_singular_node(i)) continue;
                const double kv = problem.weight.k(m[i]) * sr.dx[i];
                if (kv < rep.bounds->K_lo - tol * (1 + std::abs(rep.bounds->K_lo)) ||
                    kv > rep.bounds->K_hi + tol * (1 + std::abs(rep.bounds->K_hi))) {
                    rep.uniform_envelope = false;
                }
            }
        }
        if (j > 0) {
            rep.gaps.push_back(gap(sr.x, rep.intervals.back().x, hp.nu2));
            const std::size_t m = rep.k_n.size();
            if (!(rep.k_n[m - 1] > rep.k_n[m - 2]) ||
                std::abs(rep.s_n[m - 1]) > std::abs(rep.s_n[m - 2])) {
                rep.slopes_monotone = false;
            }
        }
        rep.intervals.push_back(std::move(sr));
        if (!rep.gaps.empty() && rep.gaps.back() <= hp.tol_h) {
            rep.status = HalflineStatus::converged;
            break;
        }
    }
    if (rep.status != HalflineStatus::converged) {
        rep.status = HalflineStatus::schedule_exhausted;
        std::ostringstream os;
        os << "last gap " << (rep.gaps.empty() ? kInf : rep.gaps.back()) << " > tol_h " << hp.tol_h;
        rep.message = os.str();
    }
    const SolveReport& fin = rep.intervals.back();
    rep.tail_value = fin.x[fin.x.size() - 1];
    rep.tail_defect = std::abs(rep.tail_value - hp.nu2);
    return rep;
}

} // namespace phibvp
