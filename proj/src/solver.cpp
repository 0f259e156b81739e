#include "phibvp/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "phibvp/error.hpp"
#include "phibvp/kernels.hpp"

namespace phibvp {

void IterationConfig::validate() const {
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidInput("damping must lie in (0, 1]");
    if (max_iters < 1) throw InvalidInput("max_iters must be >= 1");
    if (!(tol_fp > 0.0) || !(tol_beta > 0.0)) throw InvalidInput("tolerances must be positive");
    if (window < 1) throw InvalidInput("acceleration window must be >= 1");
    if (refine < 1) throw InvalidInput("refinement factor must be >= 1");
    if (!(min_damping > 0.0 && min_damping <= damping)) {
        throw InvalidInput("min_damping must lie in (0, damping]");
    }
}

const char* to_string(Acceleration a) noexcept {
    return a == Acceleration::secant ? "secant" : "none";
}

Acceleration acceleration_from_string(const std::string& s) {
    if (s == "none") return Acceleration::none;
    if (s == "secant" || s == "anderson") return Acceleration::secant;
    throw InvalidInput("unknown acceleration '" + s + "'");
}

const char* to_string(SolveStatus s) noexcept {
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max-iters";
    case SolveStatus::hypothesis_violation: return "hypothesis-violation";
    }
    return "?";
}

SolveStatus solve_status_from_string(const std::string& s) {
    for (auto v : {SolveStatus::converged, SolveStatus::max_iters, SolveStatus::hypothesis_violation}) {
        if (s == to_string(v)) return v;
    }
    throw InvalidInput("unknown solve status '" + s + "'");
}

namespace {

// Placeholder at singular nodes: nearest regular neighbour (as GridFunction::sample).
void fill_singular(const Mesh& m, std::vector<double>& v) {
    for (auto i : m.singular_nodes()) {
        if (i + 1 < m.size() && !m.is_singular_node(i + 1)) {
            v[i] = v[i + 1];
        } else if (i > 0 && !m.is_singular_node(i - 1)) {
            v[i] = v[i - 1];
        }
    }
}

bool moved(double a, double b) { return std::abs(a - b) > 1e-12 * (1.0 + std::abs(b)); }

} // namespace

FixedPointMap::FixedPointMap(const BvpProblem& problem, double tol_beta)
    : problem_(problem), oriented_(problem.branch.oriented()), sign_(problem.branch.sign()),
      tol_beta_(tol_beta) {
    problem_.validate();
    inv_ = phibvp::inverse_weight(problem_);
    psi_ = GridFunction::sample(problem_.mesh, problem_.rhs.psi);
    scalars_ = derive_scalars(problem_, ScalarSource::quadrature);
    env_ = phibvp::envelopes(problem_, scalars_);
}

GridFunction FixedPointMap::truncated_rhs(const GridFunction& x, const GridFunction& dx,
                                          std::size_t* clipped, std::size_t* psi_clipped) const {
    require_same_mesh(x, inv_);
    require_same_mesh(dx, inv_);
    const Mesh& m = *problem_.mesh;
    const std::size_t n = m.size();
    std::vector<double> xt(n), dxt(n), out(n);
    std::size_t nclip = 0;
    for (std::size_t i = 0; i < n; ++i) {
        xt[i] = truncate(x[i], scalars_.x_lower, scalars_.x_upper);
        dxt[i] = truncate(dx[i], env_.lower[i], env_.upper[i]);
        if (moved(xt[i], x[i]) || (!m.is_singular_node(i) && moved(dxt[i], dx[i]))) ++nclip;
    }
    const kernels::RhsFn& f = problem_.rhs.f;
    const std::size_t bad = kernels::rhs_map({&f, m.nodes(), xt, dxt, out});
    if (bad != kernels::npos) {
        std::ostringstream os;
        os << "f(" << m[bad] << ", " << xt[bad] << ", " << dxt[bad] << ") = " << out[bad];
        throw RhsEvaluationError(bad, os.str());
    }
    std::size_t npsi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(out[i]) > psi_[i]) {
            out[i] = std::copysign(psi_[i], out[i]);
            ++npsi;
        }
        out[i] *= sign_;
    }
    if (clipped) *clipped = nclip;
    if (psi_clipped) *psi_clipped = npsi;
    return GridFunction(problem_.mesh, std::move(out));
}

GridFunction FixedPointMap::derivative(double xi, const GridFunction& Fc) const {
    const Mesh& m = *problem_.mesh;
    std::vector<double> v(m.size());
    kernels::inverse_map({&oriented_, Fc.values(), inv_.values(), xi, v});
    fill_singular(m, v);
    std::vector<double> patch;
    const auto ip = inv_.patch();
    for (std::size_t k = 0; k < ip.size(); ++k) {
        const std::size_t c = m.singular_cells()[k];
        patch.push_back(ip[k] * oriented_.inverse(xi + 0.5 * (Fc[c] + Fc[c + 1])));
    }
    return GridFunction(problem_.mesh, std::move(v), std::move(patch));
}

double FixedPointMap::phi(double xi, const GridFunction& Fc) const {
    return integrate(derivative(xi, Fc));
}

std::pair<double, double> FixedPointMap::beta_bracket() const {
    const double c = oriented_(scalars_.s_star);
    const double L = scalars_.L;
    const double widen = 1e-12 * std::max(1.0, std::abs(c));
    double lo = c - L - widen;
    double hi = c + L + widen;
    const Interval im = oriented_.image();
    if (std::isfinite(im.lo)) lo = std::max(lo, im.lo + L);
    if (std::isfinite(im.hi)) hi = std::min(hi, im.hi - L);
    return {lo, hi};
}

double FixedPointMap::beta_solve(const GridFunction& Fc) const {
    const double target = problem_.nu2 - problem_.nu1;
    auto [lo, hi] = beta_bracket();
    double flo = phi(lo, Fc) - target;
    double fhi = phi(hi, Fc) - target;
    if (std::abs(flo) <= tol_beta_) return lo;
    if (std::abs(fhi) <= tol_beta_) return hi;
    if (flo > 0.0 || fhi < 0.0) {
        std::ostringstream os;
        os.precision(17);
        os << "beta bracket [" << lo << ", " << hi << "] gives phi - (nu2 - nu1) = [" << flo
           << ", " << fhi << "], no sign change";
        throw BracketError(os.str());
    }
    double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
    double best_f = std::min(std::abs(flo), std::abs(fhi));
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = phi(mid, Fc) - target;
        if (std::abs(fm) < best_f) {
            best = mid;
            best_f = std::abs(fm);
        }
        if (std::abs(fm) <= tol_beta_) break;
        if (fm < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return best;
}

FixedPointMap::Result FixedPointMap::operator()(const GridFunction& x, const GridFunction& dx) const {
    Result r;
    const GridFunction F = truncated_rhs(x, dx, &r.clipped, &r.psi_clipped);
    const GridFunction Fc = cumulative_integral(F);
    const double b = beta_solve(Fc);
    r.dx = derivative(b, Fc);
    const GridFunction K = cumulative_integral(r.dx);
    std::vector<double> xv(K.values().begin(), K.values().end());
    for (double& v : xv) v += problem_.nu1;
    r.x = GridFunction(problem_.mesh, std::move(xv));
    std::vector<double> uv(Fc.size());
    for (std::size_t i = 0; i < uv.size(); ++i) uv[i] = sign_ * (b + Fc[i]);
    r.u = GridFunction(problem_.mesh, std::move(uv));
    r.beta = sign_ * b;
    return r;
}

std::pair<GridFunction, GridFunction> FixedPointMap::initial_guess() const {
    const GridFunction K = cumulative_integral(inv_);
    const double k1 = scalars_.k1;
    std::vector<double> xv(K.size());
    for (std::size_t i = 0; i < xv.size(); ++i) {
        xv[i] = problem_.nu1 + (problem_.nu2 - problem_.nu1) * (K[i] / k1);
    }
    xv.back() = problem_.nu2;
    const double s = scalars_.s_star;
    std::vector<double> dv(inv_.values().begin(), inv_.values().end());
    for (double& v : dv) v *= s;
    std::vector<double> dp(inv_.patch().begin(), inv_.patch().end());
    for (double& v : dp) v *= s;
    return {GridFunction(problem_.mesh, std::move(xv)),
            GridFunction(problem_.mesh, std::move(dv), std::move(dp))};
}

double FixedPointMap::distance(const GridFunction& x0, const GridFunction& dx0,
                               const GridFunction& x1, const GridFunction& dx1) const {
    const NormSpec spec(problem_.p);
    return norm(lincomb(1.0, x1, -1.0, x0), spec) + norm(lincomb(1.0, dx1, -1.0, dx0), spec);
}

bool FixedPointMap::in_envelope(const GridFunction& x, const GridFunction& dx, double tol,
                                double* x_excess, double* dx_excess) const {
    const Mesh& m = *problem_.mesh;
    auto excess = [tol](double v, double lo, double hi) {
        const double a = lo - tol * (1.0 + std::abs(lo)) - v;
        const double b = v - hi - tol * (1.0 + std::abs(hi));
        return std::max({0.0, a, b});
    };
    double ex = 0.0, edx = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        ex = std::max(ex, excess(x[i], scalars_.x_lower, scalars_.x_upper));
        if (m.is_singular_node(i)) continue;
        edx = std::max(edx, excess(dx[i], env_.lower[i], env_.upper[i]));
    }
    const auto p = dx.patch();
    for (std::size_t k = 0; k < p.size() && k < env_.lower.patch().size(); ++k) {
        edx = std::max(edx, excess(p[k], env_.lower.patch()[k], env_.upper.patch()[k]));
    }
    if (x_excess) *x_excess = ex;
    if (dx_excess) *dx_excess = edx;
    return ex == 0.0 && edx == 0.0;
}

FixedPointMap::Result g_map(const BvpProblem& problem, const GridFunction& x,
                            const GridFunction& dx, double tol_beta) {
    return FixedPointMap(problem, tol_beta)(x, dx);
}

namespace {

// [x; dx; dx patch] stacked for the secant step.
Eigen::VectorXd stack(const GridFunction& x, const GridFunction& dx) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const auto np = static_cast<Eigen::Index>(dx.patch().size());
    Eigen::VectorXd v(2 * n + np);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = x[static_cast<std::size_t>(i)];
        v[n + i] = dx[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index k = 0; k < np; ++k) v[2 * n + k] = dx.patch()[static_cast<std::size_t>(k)];
    return v;
}

std::pair<GridFunction, GridFunction> unstack(const Eigen::VectorXd& v, const MeshPtr& mesh,
                                              std::size_t np) {
    const std::size_t n = mesh->size();
    std::vector<double> x(n), dx(n), p(np);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = v[static_cast<Eigen::Index>(i)];
        dx[i] = v[static_cast<Eigen::Index>(n + i)];
    }
    for (std::size_t k = 0; k < np; ++k) p[k] = v[static_cast<Eigen::Index>(2 * n + k)];
    return {GridFunction(mesh, std::move(x)), GridFunction(mesh, std::move(dx), std::move(p))};
}

} // namespace

SolveReport solve(const BvpProblem& problem, const IterationConfig& config,
                  const std::optional<InitialGuess>& initial) {
    config.validate();
    SolveReport rep;
    std::optional<FixedPointMap> G;
    try {
        G.emplace(problem, config.tol_beta);
    } catch (const CompatibilityError& e) {
        rep.status = SolveStatus::hypothesis_violation;
        rep.message = e.what();
        return rep;
    } catch (const DomainError& e) {
        rep.status = SolveStatus::hypothesis_violation;
        rep.message = e.what();
        return rep;
    }
    rep.scalars = G->scalars();

    GridFunction x, dx;
    if (initial) {
        require_same_mesh(initial->x, G->inverse_weight());
        x = initial->x;
        dx = initial->dx;
    } else {
        std::tie(x, dx) = G->initial_guess();
    }
    if (config.keep_iterates) {
        rep.iterates_x.push_back(x);
        rep.iterates_dx.push_back(dx);
    }

    double omega = config.damping;
    double best_r = kInf;
    int since_best = 0;
    std::optional<FixedPointMap::Result> best_y;
    std::optional<FixedPointMap::Result> final_y;
    std::deque<Eigen::VectorXd> hx, hr;
    const std::size_t np = problem.mesh->singular_cells().size();

    std::optional<FixedPointMap::Result> prev_y;
    int counted = 0;
    for (int m = 0; m < config.max_iters && !final_y; ++m) {
        FixedPointMap::Result y = (*G)(x, dx);
        ++counted;
        const double r = G->distance(x, dx, y.x, y.dx);
        if (r < best_r) {
            best_y = y;
        }
        // candidate: y itself (small residual) or the previous output (g outputs settled)
        const FixedPointMap::Result* cand = nullptr;
        double step = 0.0;
        int at = counted;
        if (r <= config.tol_fp) {
            cand = &y;
            step = r;
        } else if (prev_y) {
            step = G->distance(prev_y->x, prev_y->dx, y.x, y.dx);
            if (step <= config.tol_fp) {
                cand = &*prev_y;
                at = counted - 1;
            }
        }
        if (cand) {
            const FixedPointMap::Result z = (*G)(cand->x, cand->dx);
            const double gap = G->distance(cand->x, cand->dx, z.x, z.dx);
            if (gap <= 2.0 * config.tol_fp) {
                rep.trace.push_back(step);
                if (config.keep_iterates) {
                    rep.iterates_x.push_back(cand->x);
                    rep.iterates_dx.push_back(cand->dx);
                }
                rep.fixed_point_gap = gap;
                rep.iterations = at;
                final_y = *cand;
                break;
            }
        }
        prev_y = y;

        GridFunction xn = lincomb(1.0 - omega, x, omega, y.x);
        GridFunction dxn = lincomb(1.0 - omega, dx, omega, y.dx);
        if (config.acceleration == Acceleration::secant) {
            const Eigen::VectorXd X = stack(x, dx);
            const Eigen::VectorXd R = stack(y.x, y.dx) - X;
            hx.push_back(X);
            hr.push_back(R);
            while (hx.size() > static_cast<std::size_t>(config.window) + 1) {
                hx.pop_front();
                hr.pop_front();
            }
            if (hx.size() >= 2) {
                const auto cols = static_cast<Eigen::Index>(hx.size() - 1);
                Eigen::MatrixXd dX(X.size(), cols), dR(X.size(), cols);
                for (Eigen::Index j = 0; j < cols; ++j) {
                    dX.col(j) = hx[static_cast<std::size_t>(j + 1)] - hx[static_cast<std::size_t>(j)];
                    dR.col(j) = hr[static_cast<std::size_t>(j + 1)] - hr[static_cast<std::size_t>(j)];
                }
                const Eigen::VectorXd gamma = dR.colPivHouseholderQr().solve(R);
                const Eigen::VectorXd cand = X + omega * R - (dX + omega * dR) * gamma;
                if (cand.allFinite()) {
                    auto [cx, cdx] = unstack(cand, problem.mesh, np);
                    if (G->in_envelope(cx, cdx, 1e-10)) {
                        xn = std::move(cx);
                        dxn = std::move(cdx);
                    }
                }
            }
        }
        rep.trace.push_back(G->distance(x, dx, xn, dxn));
        x = std::move(xn);
        dx = std::move(dxn);
        if (config.keep_iterates) {
            rep.iterates_x.push_back(x);
            rep.iterates_dx.push_back(dx);
        }
        if (r < best_r * (1.0 - 1e-3)) {
            since_best = 0;
        } else if (++since_best >= config.stagnation) {
            omega = std::max(0.5 * omega, config.min_damping);
            since_best = 0;
            hx.clear();
            hr.clear();
        }
        best_r = std::min(best_r, r);
    }

    rep.final_damping = omega;
    if (final_y) {
        rep.status = SolveStatus::converged;
    } else {
        rep.status = SolveStatus::max_iters;
        rep.iterations = counted;
        rep.message = "no convergence in " + std::to_string(config.max_iters) +
                      " iterations; best iterate returned";
        final_y = *best_y;
        const FixedPointMap::Result z = (*G)(final_y->x, final_y->dx);
        rep.fixed_point_gap = G->distance(final_y->x, final_y->dx, z.x, z.dx);
    }
    rep.x = final_y->x;
    rep.dx = final_y->dx;
    rep.u = final_y->u;
    rep.beta = final_y->beta;
    rep.psi_clipped = final_y->psi_clipped;

    // a-posteriori checks on the solver mesh
    const Mesh& mesh = *problem.mesh;
    std::vector<double> fv(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        fv[i] = problem.rhs.f(mesh[i], rep.x[i], rep.dx[i]);
    }
    bool finite = std::all_of(fv.begin(), fv.end(), [](double v) { return std::isfinite(v); });
    rep.residual = finite ? forward_difference_residual(rep.u, GridFunction(problem.mesh, fv)) : kInf;
    std::size_t active = 0, psi_hits = 0;
    G->truncated_rhs(rep.x, rep.dx, &active, &psi_hits);
    rep.truncation_active = active;
    double ex = 0.0, edx = 0.0;
    G->in_envelope(rep.x, rep.dx, 1e-8, &ex, &edx);
    rep.x_in_envelope = ex == 0.0;
    rep.dx_in_envelope = edx == 0.0;
    if (rep.psi_clipped > 0) {
        rep.message += (rep.message.empty() ? "" : "; ") + std::to_string(rep.psi_clipped) +
                       " nodes with |f| > psi were clipped";
    }
    rep.verification = verify(rep, problem, config.refine);
    return rep;
}

Verification verify(const SolveReport& report, const BvpProblem& problem, std::size_t refine) {
    Verification v;
    v.refine = refine;
    if (report.x.size() == 0) return v;
    const Mesh& m = *problem.mesh;
    v.left_defect = std::abs(report.x[0] - problem.nu1);
    v.boundary_defect = std::abs(report.x[m.size() - 1] - problem.nu2);

    const auto fine = share(m.refined(refine));
    const GridFunction xf = interpolate(report.x, fine);
    const GridFunction dxf = interpolate(report.dx, fine);
    const Mesh& fm = *fine;
    std::vector<double> fv(fm.size());
    for (std::size_t i = 0; i < fm.size(); ++i) fv[i] = problem.rhs.f(fm[i], xf[i], dxf[i]);
    std::vector<double> fp;
    for (auto c : fm.singular_cells()) {
        const double tm = fm.midpoint(c);
        fp.push_back(problem.rhs.f(tm, xf.at(tm), dxf.at(tm)));
    }
    bool finite = std::all_of(fv.begin(), fv.end(), [](double z) { return std::isfinite(z); }) &&
                  std::all_of(fp.begin(), fp.end(), [](double z) { return std::isfinite(z); });
    if (finite) {
        const GridFunction Gf = cumulative_integral(GridFunction(fine, fv, fp));
        for (std::size_t j = 0; j < m.size(); ++j) {
            v.u_defect = std::max(v.u_defect, std::abs(report.u[j] - report.beta - Gf[j * refine]));
        }
    } else {
        v.u_defect = kInf;
    }

    const DerivedScalars& d = report.scalars;
    const auto inv = inverse_weight(problem);
    auto excess = [](double z, double lo, double hi) {
        const double tol = 1e-8;
        return std::max({0.0, lo - tol * (1.0 + std::abs(lo)) - z, z - hi - tol * (1.0 + std::abs(hi))});
    };
    for (std::size_t i = 0; i < m.size(); ++i) {
        v.x_excess = std::max(v.x_excess, excess(report.x[i], d.x_lower, d.x_upper));
        if (m.is_singular_node(i)) continue;
        v.dx_excess = std::max(v.dx_excess, excess(report.dx[i], d.slope_lower() * inv[i],
                                                   d.slope_upper() * inv[i]));
    }
    v.x_in_envelope = v.x_excess == 0.0;
    v.dx_in_envelope = v.dx_excess == 0.0;
    return v;
}

} // namespace phibvp
