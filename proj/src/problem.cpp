#include "phibvp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phibvp/error.hpp"

namespace phibvp {

bool Weight::singular_at(double t) const {
    return std::find(singular_points.begin(), singular_points.end(), t) != singular_points.end();
}

void BvpProblem::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("T must be positive and finite");
    if (!(p >= 1.0)) throw InvalidInput("exponent p must be >= 1");
    if (!mesh) throw InvalidInput("problem has no mesh");
    if (std::abs(mesh->T() - T) > 1e-12 * T) throw InvalidInput("mesh does not span [0, T]");
    if (!weight.k || !rhs.f || !rhs.psi) throw InvalidInput("problem needs k, f and psi");
    if (!std::isfinite(nu1) || !std::isfinite(nu2)) throw InvalidInput("boundary data must be finite");
}

BvpProblem make_problem(MonotoneBranch branch, Weight weight, Rhs rhs, double nu1, double nu2,
                        double T, std::size_t cells, double p, GradingSpec grading) {
    std::vector<double> sing;
    for (double c : weight.singular_points) {
        if (c >= 0.0 && c <= T) sing.push_back(c);
    }
    auto mesh = share(Mesh::make(T, cells, sing, grading));
    BvpProblem problem{std::move(branch), std::move(weight), std::move(rhs), nu1, nu2, T, p,
                       std::move(mesh)};
    problem.validate();
    return problem;
}

GridFunction inverse_weight(const BvpProblem& problem) {
    const auto& k = problem.weight.k;
    auto inv = GridFunction::sample(
        problem.mesh, [&](double t) { return 1.0 / k(t); }, true);
    const Mesh& m = *problem.mesh;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.is_singular_node(i)) continue;
        if (!(inv[i] > 0.0)) {
            std::ostringstream os;
            os << "weight k must be positive at t = " << m[i];
            throw InvalidInput(os.str());
        }
    }
    return inv;
}

DerivedScalars derive_scalars(const BvpProblem& problem, ScalarSource source) {
    problem.validate();
    DerivedScalars d;
    const auto inv = inverse_weight(problem);
    const bool exact =
        source == ScalarSource::exact_when_available && problem.weight.has_antiderivative();
    d.k1 = exact ? problem.weight.antiderivative(problem.T) - problem.weight.antiderivative(0.0)
                 : integrate(inv);
    d.kp = (problem.p == 1.0) ? d.k1 : norm(inv, NormSpec(problem.p));
    if (!(d.k1 > 0.0) || !std::isfinite(d.k1) || !std::isfinite(d.kp)) {
        throw InvalidInput("1/k is not integrable on the mesh");
    }
    d.s_star = (problem.nu2 - problem.nu1) / d.k1;

    const auto psi = GridFunction::sample(problem.mesh, problem.rhs.psi);
    for (double v : psi.values()) {
        if (v < 0.0) throw InvalidInput("dominating bound psi must be non-negative");
    }
    d.L = integrate(psi);

    const MonotoneBranch& br = problem.branch;
    if (!br.interval().contains(d.s_star)) {
        std::ostringstream os;
        os << "slope s* = " << d.s_star << " outside branch (" << br.interval().lo << ", "
           << br.interval().hi << ")";
        throw DomainError(os.str());
    }
    d.phi_s_star = br(d.s_star);
    const double lo = d.phi_s_star - 2.0 * d.L;
    const double hi = d.phi_s_star + 2.0 * d.L;
    if (!br.in_image(lo) || !br.in_image(hi)) {
        std::ostringstream os;
        os.precision(12);
        os << "Phi(s*) -/+ 2L = [" << lo << ", " << hi << "] not inside branch image ("
           << br.image().lo << ", " << br.image().hi << ")";
        throw CompatibilityError(os.str());
    }
    d.A = d.L == 0.0 ? d.s_star : br.inverse(lo);
    d.B = d.L == 0.0 ? d.s_star : br.inverse(hi);
    d.N1 = problem.nu1 + d.k1 * d.slope_lower();
    d.N2 = problem.nu1 + d.k1 * d.slope_upper();
    d.x_lower = std::min(problem.nu1, d.N1);
    d.x_upper = std::max(problem.nu1, d.N2);
    return d;
}

Envelopes envelopes(const BvpProblem& problem, const DerivedScalars& scalars) {
    const auto inv = inverse_weight(problem);
    const Mesh& m = *problem.mesh;
    std::vector<double> lo(m.size()), hi(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.is_singular_node(i)) {
            lo[i] = -kEnvelopeSentinel;
            hi[i] = kEnvelopeSentinel;
        } else {
            lo[i] = scalars.slope_lower() * inv[i];
            hi[i] = scalars.slope_upper() * inv[i];
        }
    }
    std::vector<double> plo, phi;
    for (double v : inv.patch()) {
        plo.push_back(scalars.slope_lower() * v);
        phi.push_back(scalars.slope_upper() * v);
    }
    return {GridFunction(problem.mesh, std::move(lo), std::move(plo)),
            GridFunction(problem.mesh, std::move(hi), std::move(phi))};
}

double truncate(double value, double lo, double hi) {
    if (lo > hi) {
        std::ostringstream os;
        os << "invalid envelope: lower " << lo << " > upper " << hi;
        throw InvalidEnvelope(os.str());
    }
    return std::max(lo, std::min(value, hi));
}

bool check_antiderivative(const BvpProblem& problem, double rel_tol) {
    if (!problem.weight.has_antiderivative()) return true;
    const double exact =
        problem.weight.antiderivative(problem.T) - problem.weight.antiderivative(0.0);
    const double numeric = integrate(inverse_weight(problem));
    return std::abs(numeric - exact) <= rel_tol * std::abs(exact);
}

void HalflineProblem::validate() const {
    if (schedule.empty()) throw InvalidInput("half-line schedule is empty");
    for (std::size_t j = 0; j < schedule.size(); ++j) {
        if (!(schedule[j] > 0.0) || !std::isfinite(schedule[j])) {
            throw InvalidInput("half-line schedule entries must be positive");
        }
        if (j > 0 && !(schedule[j] > schedule[j - 1])) {
            throw InvalidInput("half-line schedule must be strictly increasing");
        }
    }
    if (!(tol_h > 0.0)) throw InvalidInput("half-line tolerance must be positive");
    if (!(density > 0.0)) throw InvalidInput("mesh density must be positive");
    if (!weight.k || !rhs.f || !rhs.psi) throw InvalidInput("problem needs k, f and psi");
}

BvpProblem HalflineProblem::on_interval(double n) const {
    const auto cells = static_cast<std::size_t>(std::max(2.0, std::ceil(density * n)));
    return make_problem(branch, weight, rhs, nu1, nu2, n, cells, 1.0, grading);
}

TailIntegral integrate_to_infinity(const std::function<double(double)>& g,
                                   const std::vector<double>& singular_points, double cutoff) {
    // uniform on [0, 1], then cells growing by a fixed ratio
    std::vector<double> nodes;
    const std::size_t head = 2000;
    for (std::size_t i = 0; i <= head; ++i) nodes.push_back(static_cast<double>(i) / head);
    const double ratio = 1.0005;
    double h = 1.0 / head;
    while (nodes.back() < cutoff) {
        h *= ratio;
        nodes.push_back(std::min(cutoff, nodes.back() + h));
    }
    std::vector<double> sing;
    for (double c : singular_points) {
        if (c >= 0.0 && c <= cutoff) sing.push_back(c);
    }
    MeshPtr mesh;
    if (sing.empty()) {
        mesh = share(Mesh(std::move(nodes)));
    } else {
        // graded head near the singular points, same geometric body
        Mesh headmesh = Mesh::graded(1.0, head, sing);
        std::vector<double> all(headmesh.nodes().begin(), headmesh.nodes().end());
        all.insert(all.end(), nodes.begin() + static_cast<std::ptrdiff_t>(head) + 1, nodes.end());
        mesh = share(Mesh(std::move(all), headmesh.singular_nodes()));
    }
    const auto gf = GridFunction::sample(mesh, g, true);
    TailIntegral r;
    r.cutoff = cutoff;
    r.truncation = g(cutoff) * cutoff;
    r.value = integrate(gf) + r.truncation;
    return r;
}

TailIntegral k_infinity(const HalflineProblem& hp) {
    if (hp.weight.integral_to_infinity) return {*hp.weight.integral_to_infinity, true, 0.0, 0.0};
    const auto& k = hp.weight.k;
    return integrate_to_infinity([&](double t) { return 1.0 / k(t); }, hp.weight.singular_points);
}

TailIntegral psi_l1_infinity(const HalflineProblem& hp) {
    if (hp.rhs.psi_integral_to_infinity) {
        return {*hp.rhs.psi_integral_to_infinity, true, 0.0, 0.0};
    }
    return integrate_to_infinity(hp.rhs.psi);
}

double k_partial(const HalflineProblem& hp, double t) {
    if (hp.weight.has_antiderivative()) {
        return hp.weight.antiderivative(t) - hp.weight.antiderivative(0.0);
    }
    const auto problem = hp.on_interval(t);
    return integrate(inverse_weight(problem));
}

} // namespace phibvp
