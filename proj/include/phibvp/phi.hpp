#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace phibvp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
    double lo = -kInf;
    double hi = kInf;

    bool contains(double s) const noexcept { return s > lo && s < hi; }
    bool contains(const Interval& other) const noexcept {
        return other.lo >= lo && other.hi <= hi;
    }
    bool bounded() const noexcept { return lo > -kInf && hi < kInf; }
    bool whole_line() const noexcept { return lo == -kInf && hi == kInf; }
    bool symmetric() const noexcept { return lo == -hi; }
    bool operator==(const Interval&) const = default;
};

/// Closed-form inverse valid on branches contained in `on`.
struct InversePiece {
    Interval on;
    std::function<double(double)> inverse;
};

/**
 * Continuous operator Phi : J -> R, not necessarily monotone.
 *
 * Catalog operators carry closed-form inverses per monotone piece and the
 * limits of Phi at infinite or open domain endpoints; user operators fall
 * back to bisection and numerical limits.
 */
class PhiOperator {
public:
    using Fn = std::function<double(double)>;

    PhiOperator(std::string name, Fn eval, Interval domain, bool odd = false);

    const std::string& name() const noexcept { return name_; }
    const Interval& domain() const noexcept { return domain_; }
    bool odd() const noexcept { return odd_; }
    double operator()(double s) const { return eval_(s); }

    PhiOperator& add_inverse(Interval on, Fn inverse);
    /// Limit of Phi at a domain endpoint or +-infinity (NaN if it does not exist).
    PhiOperator& set_limit(std::function<double(double)> limit);

    const InversePiece* inverse_for(const Interval& branch) const noexcept;
    /// Limit of Phi as s -> endpoint from inside `branch`.
    double limit(double endpoint, const Interval& branch) const;

    /// -Phi, with inverses and limits transformed accordingly.
    PhiOperator negated() const;

private:
    std::string name_;
    Fn eval_;
    Interval domain_;
    bool odd_;
    std::vector<InversePiece> inverses_;
    std::function<double(double)> limit_;
};

using PhiPtr = std::shared_ptr<const PhiOperator>;

enum class Direction { increasing, decreasing };

struct BranchOptions {
    std::size_t samples = 2048;
    double window = 1e8;    // |s| clip for infinite endpoints
    double tol_s = 1e-13;   // bisection tolerance on s
    int max_iter = 200;
};

/// Phi restricted to an open interval J* where it is strictly monotone.
class MonotoneBranch {
public:
    MonotoneBranch(PhiPtr phi, Interval interval, Direction direction, BranchOptions options = {});

    const PhiOperator& phi() const noexcept { return *phi_; }
    const PhiPtr& phi_ptr() const noexcept { return phi_; }
    const Interval& interval() const noexcept { return interval_; }
    Direction direction() const noexcept { return direction_; }
    /// +1 for increasing, -1 for decreasing.
    double sign() const noexcept { return direction_ == Direction::increasing ? 1.0 : -1.0; }
    /// (b1, b2) with b1 < b2; endpoints may be infinite.
    const Interval& image() const noexcept { return image_; }
    const BranchOptions& options() const noexcept { return options_; }

    bool in_image(double y) const noexcept { return image_.contains(y); }
    double operator()(double s) const { return (*phi_)(s); }
    /// The unique s in J* with Phi(s) = y. Throws ImageDomainError outside (b1, b2).
    double inverse(double y) const;
    /// True when the closed-form inverse is used.
    bool has_analytic_inverse() const noexcept { return piece_ != nullptr; }

    /// The increasing branch of sign() * Phi on the same interval.
    MonotoneBranch oriented() const;

private:
    double bisect(double y) const;

    PhiPtr phi_;
    Interval interval_;
    Direction direction_;
    BranchOptions options_;
    Interval image_;
    const InversePiece* piece_ = nullptr;
    double bracket_lo_ = 0.0;
    double bracket_hi_ = 0.0;
};

MonotoneBranch find_branch(PhiPtr phi, double s_star, std::optional<Interval> hint = std::nullopt,
                           BranchOptions options = {});
double partial_inverse(const MonotoneBranch& branch, double y);
std::pair<double, double> image_of_branch(const MonotoneBranch& branch);

namespace catalog {

PhiPtr r_laplacian(double r);
PhiPtr identity();
PhiPtr mean_curvature();
PhiPtr relativistic();
PhiPtr p_relativistic(double p);
PhiPtr perona_malik();
PhiPtr sine();
PhiPtr difference(double alpha, double beta);

/// Names accepted by by_name.
std::vector<std::string> names();
/// Lookup by name with parameters (r, p, alpha, beta as applicable).
PhiPtr by_name(const std::string& name, const std::map<std::string, double>& params);

} // namespace catalog

} // namespace phibvp
