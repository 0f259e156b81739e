#include "phibvp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "phibvp/error.hpp"

namespace phibvp {

Mesh::Mesh(std::vector<double> nodes, std::vector<std::size_t> singular_nodes, Grading grading,
           double ratio)
    : nodes_(std::move(nodes)), singular_nodes_(std::move(singular_nodes)), grading_(grading),
      ratio_(ratio) {
    if (nodes_.size() < 3) {
        throw InvalidInput("mesh needs at least 2 cells");
    }
    if (nodes_.front() != 0.0) {
        throw InvalidInput("mesh must start at t = 0");
    }
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i + 1]) || !(nodes_[i + 1] > nodes_[i])) {
            std::ostringstream os;
            os << "mesh nodes not strictly increasing at index " << i + 1;
            throw InvalidInput(os.str());
        }
    }
    if (grading_ == Grading::geometric && !(ratio_ > 0.0 && ratio_ < 1.0)) {
        throw InvalidInput("geometric grading ratio must lie in (0, 1)");
    }
    std::sort(singular_nodes_.begin(), singular_nodes_.end());
    singular_nodes_.erase(std::unique(singular_nodes_.begin(), singular_nodes_.end()),
                          singular_nodes_.end());
    for (auto i : singular_nodes_) {
        if (i >= nodes_.size()) {
            throw InvalidInput("singular node index out of range");
        }
        if (i > 0) singular_cells_.push_back(i - 1);
        if (i + 1 < nodes_.size()) singular_cells_.push_back(i);
    }
    std::sort(singular_cells_.begin(), singular_cells_.end());
    singular_cells_.erase(std::unique(singular_cells_.begin(), singular_cells_.end()),
                          singular_cells_.end());
    patch_of_cell_.assign(cells(), npos);
    for (std::size_t k = 0; k < singular_cells_.size(); ++k) {
        patch_of_cell_[singular_cells_[k]] = k;
    }
}

Mesh Mesh::uniform(double T, std::size_t cells) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw InvalidInput("interval length T must be positive and finite");
    }
    std::vector<double> nodes(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        nodes[i] = T * static_cast<double>(i) / static_cast<double>(cells);
    }
    nodes.back() = T;
    return Mesh(std::move(nodes));
}

Mesh Mesh::graded(double T, std::size_t cells, const std::vector<double>& singular_points,
                  GradingSpec spec) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw InvalidInput("interval length T must be positive and finite");
    }
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0) || spec.cells == 0) {
        throw InvalidInput("grading needs ratio in (0, 1) and at least one graded cell");
    }
    std::vector<double> points = singular_points;
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (double c : points) {
        if (!(c >= 0.0 && c <= T)) {
            throw InvalidInput("singular point outside [0, T]");
        }
    }
    if (points.empty()) return uniform(T, cells);

    // anchors: 0, singular points, T; each segment may carry a graded zone at
    // a singular end
    std::vector<double> anchors{0.0};
    for (double c : points) {
        if (c > 0.0 && c < T) anchors.push_back(c);
    }
    anchors.push_back(T);
    auto singular = [&](double a) {
        return std::binary_search(points.begin(), points.end(), a);
    };
    std::size_t zones = 0;
    for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
        zones += singular(anchors[s]) ? 1 : 0;
        zones += singular(anchors[s + 1]) ? 1 : 0;
    }
    const std::size_t segments = anchors.size() - 1;
    std::size_t graded_cells = spec.cells;
    while (graded_cells > 1 && zones * graded_cells + segments > cells) {
        graded_cells /= 2;
    }
    if (zones * graded_cells + segments > cells) {
        throw InvalidInput("too few cells for the requested singular grading");
    }
    const double r = spec.ratio;
    double zone_factor = 0.0; // sum_{k=1}^m r^k
    for (std::size_t k = 1; k <= graded_cells; ++k) zone_factor += std::pow(r, double(k));
    const std::size_t uniform_cells = cells - zones * graded_cells;
    const double h = T / (static_cast<double>(uniform_cells) + zones * zone_factor);

    std::vector<double> lengths(segments);
    for (std::size_t s = 0; s < segments; ++s) {
        double len = anchors[s + 1] - anchors[s];
        len -= (singular(anchors[s]) ? h * zone_factor : 0.0);
        len -= (singular(anchors[s + 1]) ? h * zone_factor : 0.0);
        if (len < -1e-12 * T) {
            throw InvalidInput("singular points too close for the requested grading");
        }
        lengths[s] = std::max(len, 0.0);
    }
    // largest-remainder allocation of the uniform cells, at least one each
    std::vector<std::size_t> counts(segments, 1);
    std::size_t left = uniform_cells - segments;
    std::vector<double> want(segments);
    for (std::size_t s = 0; s < segments; ++s) want[s] = std::max(lengths[s] / h - 1.0, 0.0);
    for (std::size_t s = 0; s < segments; ++s) {
        auto take = std::min<std::size_t>(left, static_cast<std::size_t>(std::floor(want[s])));
        counts[s] += take;
        want[s] -= static_cast<double>(take);
        left -= take;
    }
    while (left > 0) {
        auto it = std::max_element(want.begin(), want.end());
        counts[static_cast<std::size_t>(it - want.begin())] += 1;
        *it = -1.0;
        --left;
    }

    std::vector<double> nodes{0.0};
    std::vector<std::size_t> snodes;
    if (singular(0.0)) snodes.push_back(0);
    for (std::size_t s = 0; s < segments; ++s) {
        const double a = anchors[s];
        const double b = anchors[s + 1];
        double t = a;
        if (singular(a)) {
            for (std::size_t k = graded_cells; k >= 1; --k) {
                t += h * std::pow(r, double(k));
                nodes.push_back(t);
            }
        }
        const double b_uniform = singular(b) ? b - h * zone_factor : b;
        const double du = (b_uniform - t) / static_cast<double>(counts[s]);
        const double t0 = t;
        for (std::size_t k = 1; k <= counts[s]; ++k) {
            nodes.push_back(k == counts[s] && !singular(b) ? b : t0 + du * double(k));
        }
        if (singular(b)) {
            t = b_uniform;
            for (std::size_t k = 1; k <= graded_cells; ++k) {
                t += h * std::pow(r, double(k));
                nodes.push_back(k == graded_cells ? b : t);
            }
            snodes.push_back(nodes.size() - 1);
        }
    }
    nodes.back() = T;
    return Mesh(std::move(nodes), std::move(snodes), Grading::geometric, r);
}

Mesh Mesh::make(double T, std::size_t cells, const std::vector<double>& singular_points,
                GradingSpec spec) {
    return singular_points.empty() ? uniform(T, cells) : graded(T, cells, singular_points, spec);
}

bool Mesh::is_singular_node(std::size_t i) const noexcept {
    return std::binary_search(singular_nodes_.begin(), singular_nodes_.end(), i);
}

Mesh Mesh::refined(std::size_t factor) const {
    if (factor == 0) throw InvalidInput("refinement factor must be positive");
    if (factor == 1) return *this;
    std::vector<double> nodes;
    nodes.reserve(cells() * factor + 1);
    for (std::size_t c = 0; c < cells(); ++c) {
        for (std::size_t k = 0; k < factor; ++k) {
            nodes.push_back(nodes_[c] + width(c) * double(k) / double(factor));
        }
    }
    nodes.push_back(T());
    std::vector<std::size_t> snodes;
    for (auto i : singular_nodes_) snodes.push_back(i * factor);
    return Mesh(std::move(nodes), std::move(snodes), grading_, ratio_);
}

std::size_t Mesh::locate(double t) const noexcept {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    if (it == nodes_.begin()) return 0;
    auto c = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(c, cells() - 1);
}

GridFunction::GridFunction(MeshPtr mesh, std::vector<double> values, std::vector<double> patch)
    : mesh_(std::move(mesh)), values_(std::move(values)), patch_(std::move(patch)) {
    if (!mesh_) throw InvalidInput("grid function without mesh");
    if (values_.size() != mesh_->size()) {
        throw InvalidInput("grid function length does not match node count");
    }
    if (!patch_.empty() && patch_.size() != mesh_->singular_cells().size()) {
        throw InvalidInput("patch length does not match singular cell count");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            std::ostringstream os;
            os << "non-finite grid value at node " << i << " (t = " << (*mesh_)[i] << ")";
            throw InvalidInput(os.str());
        }
    }
    for (double v : patch_) {
        if (!std::isfinite(v)) throw InvalidInput("non-finite midpoint value on singular cell");
    }
}

GridFunction GridFunction::sample(MeshPtr mesh, const std::function<double(double)>& fn,
                                  bool singular) {
    const Mesh& m = *mesh;
    std::vector<double> values(m.size());
    const bool patched = singular && !m.singular_nodes().empty();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (patched && m.is_singular_node(i)) continue;
        values[i] = fn(m[i]);
    }
    std::vector<double> patch;
    if (patched) {
        for (auto c : m.singular_cells()) patch.push_back(fn(m.midpoint(c)));
        // placeholder at singular nodes: nearest regular neighbour
        for (auto i : m.singular_nodes()) {
            if (i + 1 < m.size() && !m.is_singular_node(i + 1)) {
                values[i] = values[i + 1];
            } else if (i > 0 && !m.is_singular_node(i - 1)) {
                values[i] = values[i - 1];
            } else {
                values[i] = patch.front();
            }
        }
    }
    return GridFunction(std::move(mesh), std::move(values), std::move(patch));
}

GridFunction GridFunction::constant(MeshPtr mesh, double value) {
    auto n = mesh->size();
    return GridFunction(std::move(mesh), std::vector<double>(n, value));
}

double GridFunction::at(double t) const {
    const Mesh& m = *mesh_;
    t = std::clamp(t, 0.0, m.T());
    const std::size_t c = m.locate(t);
    const double a = m[c];
    const double b = m[c + 1];
    if (patched()) {
        const std::size_t k = m.patch_index(c);
        if (k != Mesh::npos) {
            const double pm = patch_[k];
            const double mid = m.midpoint(c);
            const bool sa = m.is_singular_node(c);
            const bool sb = m.is_singular_node(c + 1);
            if (sa && sb) return pm;
            if (sa) {
                if (t <= mid) return pm;
                return pm + (values_[c + 1] - pm) * (t - mid) / (b - mid);
            }
            if (t >= mid) return pm;
            return values_[c] + (pm - values_[c]) * (t - a) / (mid - a);
        }
    }
    const double w = (t - a) / (b - a);
    return values_[c] + (values_[c + 1] - values_[c]) * w;
}

NormSpec::NormSpec(double exponent) : p(exponent) {
    if (!(exponent >= 1.0)) throw InvalidInput("norm exponent must be >= 1");
}

void require_same_mesh(const GridFunction& a, const GridFunction& b) {
    if (a.mesh_ptr() != b.mesh_ptr() && !(a.mesh() == b.mesh())) {
        throw MeshMismatch("grid functions live on different meshes");
    }
}

namespace {

template <class Sink>
void accumulate_cells(const GridFunction& g, Sink&& sink) {
    const Mesh& m = g.mesh();
    const auto v = g.values();
    const auto patch = g.patch();
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cells(); ++c) {
        const std::size_t k = g.patched() ? m.patch_index(c) : Mesh::npos;
        if (k != Mesh::npos) {
            sum += m.width(c) * patch[k];
        } else {
            sum += 0.5 * m.width(c) * (v[c] + v[c + 1]);
        }
        sink(c + 1, sum);
    }
}

} // namespace

double integrate(const GridFunction& g) {
    double total = 0.0;
    accumulate_cells(g, [&](std::size_t, double s) { total = s; });
    return total;
}

GridFunction cumulative_integral(const GridFunction& g) {
    std::vector<double> out(g.size(), 0.0);
    accumulate_cells(g, [&](std::size_t i, double s) { out[i] = s; });
    return GridFunction(g.mesh_ptr(), std::move(out));
}

double norm(const GridFunction& g, NormSpec spec) {
    const Mesh& m = g.mesh();
    if (spec.is_inf()) {
        double best = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.patched() && m.is_singular_node(i)) continue;
            best = std::max(best, std::abs(g[i]));
        }
        for (double v : g.patch()) best = std::max(best, std::abs(v));
        return best;
    }
    std::vector<double> powv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) powv[i] = std::pow(std::abs(g[i]), spec.p);
    std::vector<double> powp;
    for (double v : g.patch()) powp.push_back(std::pow(std::abs(v), spec.p));
    const double s = integrate(GridFunction(g.mesh_ptr(), std::move(powv), std::move(powp)));
    return spec.p == 1.0 ? s : std::pow(s, 1.0 / spec.p);
}

double forward_difference_residual(const GridFunction& u, const GridFunction& rhs) {
    require_same_mesh(u, rhs);
    const Mesh& m = u.mesh();
    double worst = 0.0;
    for (std::size_t c = 0; c < m.cells(); ++c) {
        const double slope = (u[c + 1] - u[c]) / m.width(c);
        const std::size_t k = rhs.patched() ? m.patch_index(c) : Mesh::npos;
        const double mid = k != Mesh::npos ? rhs.patch()[k] : 0.5 * (rhs[c] + rhs[c + 1]);
        worst = std::max(worst, std::abs(slope - mid));
    }
    return worst;
}

namespace {

std::vector<double> patch_or_average(const GridFunction& g) {
    if (g.patched()) return {g.patch().begin(), g.patch().end()};
    std::vector<double> p;
    const Mesh& m = g.mesh();
    for (auto c : m.singular_cells()) p.push_back(0.5 * (g[c] + g[c + 1]));
    return p;
}

} // namespace

GridFunction lincomb(double a, const GridFunction& g, double b, const GridFunction& h) {
    require_same_mesh(g, h);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = a * g[i] + b * h[i];
    std::vector<double> patch;
    if (g.patched() || h.patched()) {
        auto pg = patch_or_average(g);
        auto ph = patch_or_average(h);
        patch.resize(pg.size());
        for (std::size_t k = 0; k < pg.size(); ++k) patch[k] = a * pg[k] + b * ph[k];
    }
    return GridFunction(g.mesh_ptr(), std::move(out), std::move(patch));
}

GridFunction interpolate(const GridFunction& g, MeshPtr target) {
    const Mesh& m = *target;
    if (std::abs(m.T() - g.mesh().T()) > 1e-12 * m.T()) {
        throw MeshMismatch("interpolation target spans a different interval");
    }
    std::vector<double> values(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) values[i] = g.at(m[i]);
    std::vector<double> patch;
    if (g.patched()) {
        for (auto c : m.singular_cells()) patch.push_back(g.at(m.midpoint(c)));
    }
    return GridFunction(std::move(target), std::move(values), std::move(patch));
}

} // namespace phibvp
