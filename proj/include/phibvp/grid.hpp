#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace phibvp {

enum class Grading { uniform, geometric };

/// Geometric grading toward singular points: cell widths shrink by `ratio`
/// over `cells` cells on each side of a flagged point.
struct GradingSpec {
    double ratio = 0.85;
    std::size_t cells = 64;

    bool operator==(const GradingSpec&) const = default;
};

/**
 * Strictly increasing nodes 0 = t_0 < ... < t_n = T.
 *
 * Singular nodes are mesh nodes where an integrand may be unbounded (zeros of
 * the weight k). Cells adjacent to one of them are "singular cells"; grid
 * functions may carry one midpoint value per singular cell so that quadrature
 * never touches the singular node itself.
 */
class Mesh {
public:
    explicit Mesh(std::vector<double> nodes, std::vector<std::size_t> singular_nodes = {},
                  Grading grading = Grading::uniform, double ratio = 0.0);

    static Mesh uniform(double T, std::size_t cells);
    /// Uniform cells away from `singular_points`, geometric cells next to each
    /// of them. Every singular point becomes a mesh node.
    static Mesh graded(double T, std::size_t cells, const std::vector<double>& singular_points,
                       GradingSpec spec = {});
    /// `cells` uniform cells if no singular points are given, graded otherwise.
    static Mesh make(double T, std::size_t cells, const std::vector<double>& singular_points,
                     GradingSpec spec = {});

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t cells() const noexcept { return nodes_.size() - 1; }
    double T() const noexcept { return nodes_.back(); }
    double operator[](std::size_t i) const noexcept { return nodes_[i]; }
    double width(std::size_t cell) const noexcept { return nodes_[cell + 1] - nodes_[cell]; }
    double midpoint(std::size_t cell) const noexcept {
        return 0.5 * (nodes_[cell] + nodes_[cell + 1]);
    }
    std::span<const double> nodes() const noexcept { return nodes_; }

    Grading grading() const noexcept { return grading_; }
    double ratio() const noexcept { return ratio_; }

    const std::vector<std::size_t>& singular_nodes() const noexcept { return singular_nodes_; }
    const std::vector<std::size_t>& singular_cells() const noexcept { return singular_cells_; }
    bool is_singular_node(std::size_t i) const noexcept;
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    /// Index of `cell` within singular_cells(), or npos.
    std::size_t patch_index(std::size_t cell) const noexcept { return patch_of_cell_[cell]; }

    /// Each cell split into `factor` equal sub-cells; singular nodes kept.
    Mesh refined(std::size_t factor) const;
    /// Index of the cell containing t (clamped to [0, T]).
    std::size_t locate(double t) const noexcept;

    bool operator==(const Mesh& other) const noexcept { return nodes_ == other.nodes_; }

private:
    std::vector<double> nodes_;
    std::vector<std::size_t> singular_nodes_;
    std::vector<std::size_t> singular_cells_;
    std::vector<std::size_t> patch_of_cell_;
    Grading grading_;
    double ratio_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr share(Mesh mesh) { return std::make_shared<const Mesh>(std::move(mesh)); }

/**
 * Nodal values of a function on a mesh, optionally with midpoint values on
 * singular cells (the "patch"). A patched function is treated as unbounded
 * at singular nodes: the nodal value stored there is a finite placeholder
 * that quadrature and sup-norms ignore.
 */
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(MeshPtr mesh, std::vector<double> values, std::vector<double> patch = {});

    /// Samples fn at nodes; if the mesh has singular nodes and `singular` is
    /// set, samples midpoints of singular cells instead of the singular nodes.
    static GridFunction sample(MeshPtr mesh, const std::function<double(double)>& fn,
                               bool singular = false);
    static GridFunction constant(MeshPtr mesh, double value);

    const Mesh& mesh() const noexcept { return *mesh_; }
    const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> patch() const noexcept { return patch_; }
    bool patched() const noexcept { return !patch_.empty(); }

    std::vector<double>& mutable_values() noexcept { return values_; }
    std::vector<double>& mutable_patch() noexcept { return patch_; }

    /// Linear interpolation; t outside [0, T] is clamped.
    double at(double t) const;

private:
    MeshPtr mesh_;
    std::vector<double> values_;
    std::vector<double> patch_;
};

/// Exponent p >= 1 or infinity.
struct NormSpec {
    double p = 1.0;

    explicit NormSpec(double exponent);
    static NormSpec inf() { return NormSpec(std::numeric_limits<double>::infinity()); }
    bool is_inf() const noexcept { return p == std::numeric_limits<double>::infinity(); }
};

/// Composite trapezoid; singular cells use the patch (midpoint rule) when present.
double integrate(const GridFunction& g);
/// G(t_j) = integral over [0, t_j]; G(T) == integrate(g) bit-for-bit.
GridFunction cumulative_integral(const GridFunction& g);
double norm(const GridFunction& g, NormSpec spec);
/// max over cells of |(u_{j+1} - u_j)/h_j - rhs_{j+1/2}|.
double forward_difference_residual(const GridFunction& u, const GridFunction& rhs);

/// a*g + b*h on a shared mesh (patches combined when both present).
GridFunction lincomb(double a, const GridFunction& g, double b, const GridFunction& h);
/// Linear interpolation of g onto a finer mesh that contains all of g's nodes.
GridFunction interpolate(const GridFunction& g, MeshPtr target);

void require_same_mesh(const GridFunction& a, const GridFunction& b);

} // namespace phibvp
