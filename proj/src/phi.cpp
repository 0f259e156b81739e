#include "phibvp/phi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phibvp/error.hpp"

namespace phibvp {

namespace {

double signum(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

bool contains_loose(const Interval& outer, const Interval& inner) {
    auto slack = [](double v) { return 1e-12 * std::max(1.0, std::abs(v)); };
    const bool lo_ok = outer.lo == -kInf ? true : inner.lo >= outer.lo - slack(outer.lo);
    const bool hi_ok = outer.hi == kInf ? true : inner.hi <= outer.hi + slack(outer.hi);
    return lo_ok && hi_ok;
}

// Limit of Phi toward an endpoint where Phi cannot be evaluated directly.
double numeric_limit(const PhiOperator& phi, double endpoint, const Interval& branch,
                     double window) {
    std::vector<double> probes;
    if (std::isinf(endpoint)) {
        for (double s = 1e2; s <= window * 1.0000001; s *= 1e2) {
            probes.push_back(endpoint > 0 ? s : -s);
        }
    } else {
        const double other = endpoint == branch.lo ? branch.hi : branch.lo;
        const double span = std::isinf(other) ? 1.0 : std::abs(other - endpoint);
        const double dir = endpoint == branch.lo ? 1.0 : -1.0;
        for (int k = 2; k <= 14; k += 2) {
            probes.push_back(endpoint + dir * span * std::pow(10.0, -k));
        }
    }
    double last = std::numeric_limits<double>::quiet_NaN();
    double prev = last;
    for (double s : probes) {
        const double v = phi(s);
        if (!std::isfinite(v)) return v;
        prev = last;
        last = v;
    }
    if (std::abs(last) > 1e10 && std::abs(last) > std::abs(prev)) {
        return last > 0 ? kInf : -kInf;
    }
    return last;
}

} // namespace

PhiOperator::PhiOperator(std::string name, Fn eval, Interval domain, bool odd)
    : name_(std::move(name)), eval_(std::move(eval)), domain_(domain), odd_(odd) {
    if (!(domain_.lo < domain_.hi)) throw InvalidInput("operator domain must be non-empty");
}

PhiOperator& PhiOperator::add_inverse(Interval on, Fn inverse) {
    inverses_.push_back({on, std::move(inverse)});
    return *this;
}

PhiOperator& PhiOperator::set_limit(std::function<double(double)> limit) {
    limit_ = std::move(limit);
    return *this;
}

const InversePiece* PhiOperator::inverse_for(const Interval& branch) const noexcept {
    for (const auto& piece : inverses_) {
        if (contains_loose(piece.on, branch)) return &piece;
    }
    return nullptr;
}

double PhiOperator::limit(double endpoint, const Interval& branch) const {
    const bool interior = std::isfinite(endpoint) && endpoint > domain_.lo && endpoint < domain_.hi;
    if (interior) {
        const double v = eval_(endpoint);
        if (std::isfinite(v)) return v;
    }
    if (limit_) {
        const double v = limit_(endpoint);
        if (!std::isnan(v)) return v;
    }
    return numeric_limit(*this, endpoint, branch, 1e8);
}

PhiOperator PhiOperator::negated() const {
    auto f = eval_;
    PhiOperator neg("-" + name_, [f](double s) { return -f(s); }, domain_, odd_);
    for (const auto& piece : inverses_) {
        auto inv = piece.inverse;
        neg.add_inverse(piece.on, [inv](double y) { return inv(-y); });
    }
    if (limit_) {
        auto lim = limit_;
        neg.set_limit([lim](double e) { return -lim(e); });
    }
    return neg;
}

MonotoneBranch::MonotoneBranch(PhiPtr phi, Interval interval, Direction direction,
                               BranchOptions options)
    : phi_(std::move(phi)), interval_(interval), direction_(direction), options_(options) {
    if (!(interval_.lo < interval_.hi)) throw InvalidInput("branch interval must be non-empty");
    if (!contains_loose(phi_->domain(), interval_)) {
        throw DomainError("branch interval not contained in the operator domain");
    }
    const double at_lo = phi_->limit(interval_.lo, interval_);
    const double at_hi = phi_->limit(interval_.hi, interval_);
    image_ = direction_ == Direction::increasing ? Interval{at_lo, at_hi} : Interval{at_hi, at_lo};
    if (!(image_.lo < image_.hi)) {
        std::ostringstream os;
        os << "branch image is empty or inconsistent with direction: (" << image_.lo << ", "
           << image_.hi << ")";
        throw BranchNotFound(os.str());
    }
    piece_ = phi_->inverse_for(interval_);

    auto finite_end = [&](double end, double toward) {
        if (std::isinf(end)) {
            return end < 0 ? std::max(-options_.window, phi_->domain().lo)
                           : std::min(options_.window, phi_->domain().hi);
        }
        double s = end;
        const double dir = toward > end ? 1.0 : -1.0;
        double step = 1e-15 * std::max(1.0, std::abs(end));
        const double reach =
            std::isinf(toward) ? std::max(1.0, std::abs(end)) : std::abs(toward - end);
        while (!std::isfinite((*phi_)(s)) || !(s > phi_->domain().lo && s < phi_->domain().hi)) {
            s = end + dir * step;
            step *= 2.0;
            if (step > reach) break;
        }
        return s;
    };
    bracket_lo_ = finite_end(interval_.lo, interval_.hi);
    bracket_hi_ = finite_end(interval_.hi, interval_.lo);
}

double MonotoneBranch::inverse(double y) const {
    if (!in_image(y)) throw ImageDomainError(y, image_.lo, image_.hi);
    if (piece_ != nullptr) return piece_->inverse(y);
    return bisect(y);
}

double MonotoneBranch::bisect(double y) const {
    double lo = bracket_lo_;
    double hi = bracket_hi_;
    const double s = sign();
    const double flo = s * ((*phi_)(lo) - y);
    const double fhi = s * ((*phi_)(hi) - y);
    if (flo > 0.0 || fhi < 0.0) {
        // working window does not bracket y
        throw ImageDomainError(y, std::min((*phi_)(lo), (*phi_)(hi)),
                               std::max((*phi_)(lo), (*phi_)(hi)));
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    for (int it = 0; it < options_.max_iter && hi - lo > options_.tol_s; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = s * ((*phi_)(mid) - y);
        if (fm == 0.0) return mid;
        if (fm < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

MonotoneBranch MonotoneBranch::oriented() const {
    if (direction_ == Direction::increasing) return *this;
    auto neg = std::make_shared<const PhiOperator>(phi_->negated());
    return MonotoneBranch(std::move(neg), interval_, Direction::increasing, options_);
}

namespace {

[[noreturn]] void no_branch(const std::string& why, const std::vector<double>& s,
                            const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(6);
    os << why << "; sampled values:";
    const std::size_t stride = std::max<std::size_t>(1, s.size() / 8);
    for (std::size_t i = 0; i < s.size(); i += stride) os << " Phi(" << s[i] << ")=" << v[i];
    throw BranchNotFound(os.str());
}

int step_sign(double a, double b) { return b > a ? 1 : (b < a ? -1 : 0); }

// Locate the turning point of phi in (a, c) where the sampled trend `dir`
// stops; golden-section on dir * phi.
double turning_point(const PhiOperator& phi, double a, double c, int dir) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = c - g * (c - a);
    double x2 = a + g * (c - a);
    double f1 = dir * phi(x1);
    double f2 = dir * phi(x2);
    for (int it = 0; it < 200 && c - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (c - a);
            f2 = dir * phi(x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - g * (c - a);
            f1 = dir * phi(x1);
        }
    }
    return 0.5 * (a + c);
}

} // namespace

MonotoneBranch find_branch(PhiPtr phi, double s_star, std::optional<Interval> hint,
                           BranchOptions options) {
    const PhiOperator& op = *phi;
    if (!op.domain().contains(s_star)) {
        std::ostringstream os;
        os << "slope " << s_star << " outside operator domain (" << op.domain().lo << ", "
           << op.domain().hi << ")";
        throw DomainError(os.str());
    }
    const std::size_t n = std::max<std::size_t>(options.samples, 16);
    auto clip = [&](double v) { return std::clamp(v, -options.window, options.window); };

    if (hint) {
        if (!contains_loose(op.domain(), *hint) || !hint->contains(s_star)) {
            throw DomainError("branch hint must lie in the domain and contain the slope");
        }
        const double a = clip(hint->lo);
        const double b = clip(hint->hi);
        std::vector<double> s(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = a + (b - a) * (double(i) + 0.5) / double(n);
            v[i] = op(s[i]);
        }
        const int dir = step_sign(v[0], v[1]);
        if (dir == 0) no_branch("operator is flat on the hint", s, v);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!std::isfinite(v[i + 1]) || step_sign(v[i], v[i + 1]) != dir) {
                no_branch("operator is not strictly monotone on the hint", s, v);
            }
        }
        return MonotoneBranch(phi, *hint, dir > 0 ? Direction::increasing : Direction::decreasing,
                              options);
    }

    const double lo_limit = std::max(op.domain().lo, -options.window);
    const double hi_limit = std::min(op.domain().hi, options.window);
    // each side grows until it meets a violation or the window; a side that
    // has its endpoint is frozen so later coarse sampling cannot skip the dip
    double ra = 1e-3 * std::max(1.0, std::abs(s_star));
    double rb = ra;
    std::optional<double> lo, hi;
    int dir = 0;
    for (;;) {
        double a = std::max(s_star - ra, lo_limit);
        double b = std::min(s_star + rb, hi_limit);
        const bool open_a = a == op.domain().lo;
        const bool open_b = b == op.domain().hi;
        // keep s_star at a sample so the local trend is measured there
        const std::size_t half = n / 2;
        std::vector<double> s, v;
        for (std::size_t i = 0; i <= half; ++i) {
            double t = a + (s_star - a) * double(i) / double(half);
            if (i == 0 && open_a) t = a + (s_star - a) * 0.5 / double(half);
            s.push_back(t);
        }
        for (std::size_t i = 1; i <= half; ++i) {
            double t = s_star + (b - s_star) * double(i) / double(half);
            if (i == half && open_b) t = s_star + (b - s_star) * (double(half) - 0.5) / double(half);
            s.push_back(t);
        }
        for (double t : s) v.push_back(op(t));
        const std::size_t mid = half;
        const int d = step_sign(v[mid], v[mid + 1]);
        const int d_left = step_sign(v[mid - 1], v[mid]);
        if (dir == 0) {
            if (d == 0 || d != d_left) {
                no_branch("no strictly monotone neighbourhood of the slope", s, v);
            }
            dir = d;
        }
        if (!lo) {
            std::size_t left = mid;
            while (left > 0 && std::isfinite(v[left - 1]) &&
                   step_sign(v[left - 1], v[left]) == dir) {
                --left;
            }
            if (left > 0) {
                lo = turning_point(op, s[left - 1], s[left + 1], -dir);
            } else if (a <= lo_limit) {
                if (a == -options.window && op.domain().lo == -kInf) {
                    lo = -kInf;
                } else {
                    lo = open_a ? op.domain().lo : a;
                }
            }
        }
        if (!hi) {
            std::size_t right = mid;
            while (right + 1 < s.size() && std::isfinite(v[right + 1]) &&
                   step_sign(v[right], v[right + 1]) == dir) {
                ++right;
            }
            if (right + 1 < s.size()) {
                hi = turning_point(op, s[right - 1], s[right + 1], dir);
            } else if (b >= hi_limit) {
                if (b == options.window && op.domain().hi == kInf) {
                    hi = kInf;
                } else {
                    hi = open_b ? op.domain().hi : b;
                }
            }
        }
        if (lo && hi) break;
        if (!lo) ra *= 2.0;
        if (!hi) rb *= 2.0;
    }
    if (!(*lo < s_star && s_star < *hi)) {
        throw BranchNotFound("monotone neighbourhood collapsed onto the slope");
    }
    return MonotoneBranch(phi, Interval{*lo, *hi},
                          dir > 0 ? Direction::increasing : Direction::decreasing, options);
}

double partial_inverse(const MonotoneBranch& branch, double y) { return branch.inverse(y); }

std::pair<double, double> image_of_branch(const MonotoneBranch& branch) {
    return {branch.image().lo, branch.image().hi};
}

namespace catalog {

PhiPtr r_laplacian(double r) {
    if (!(r > 1.0)) throw InvalidInput("r-Laplacian needs r > 1");
    const double e = r - 1.0;
    PhiOperator op(
        r == 2.0 ? "identity" : "r_laplacian",
        [e](double s) { return signum(s) * std::pow(std::abs(s), e); }, Interval{}, true);
    op.add_inverse(Interval{}, [e](double y) { return signum(y) * std::pow(std::abs(y), 1.0 / e); });
    op.set_limit([](double end) { return end; });
    return std::make_shared<const PhiOperator>(std::move(op));
}

PhiPtr identity() { return r_laplacian(2.0); }

PhiPtr mean_curvature() {
    PhiOperator op(
        "mean_curvature", [](double s) { return s / std::hypot(1.0, s); }, Interval{}, true);
    op.add_inverse(Interval{}, [](double y) { return y / std::sqrt((1.0 - y) * (1.0 + y)); });
    op.set_limit([](double end) { return end > 0 ? 1.0 : -1.0; });
    return std::make_shared<const PhiOperator>(std::move(op));
}

PhiPtr relativistic() {
    PhiOperator op(
        "relativistic", [](double s) { return s / std::sqrt((1.0 - s) * (1.0 + s)); },
        Interval{-1.0, 1.0}, true);
    op.add_inverse(Interval{-1.0, 1.0}, [](double y) { return y / std::hypot(1.0, y); });
    op.set_limit([](double end) { return end > 0 ? kInf : -kInf; });
    return std::make_shared<const PhiOperator>(std::move(op));
}

PhiPtr p_relativistic(double p) {
    if (!(p > 1.0)) throw InvalidInput("p-relativistic operator needs p > 1");
    PhiOperator op(
        "p_relativistic",
        [p](double s) {
            const double a = std::abs(s);
            return signum(s) * std::pow(a, p - 1.0) / std::pow(1.0 - std::pow(a, p), 1.0 - 1.0 / p);
        },
        Interval{-1.0, 1.0}, true);
    op.add_inverse(Interval{-1.0, 1.0}, [p](double y) {
        const double w = std::pow(std::abs(y), p / (p - 1.0));
        return signum(y) * std::pow(w / (1.0 + w), 1.0 / p);
    });
    op.set_limit([](double end) { return end > 0 ? kInf : -kInf; });
    return std::make_shared<const PhiOperator>(std::move(op));
}

PhiPtr perona_malik() {
    PhiOperator op(
        "perona_malik", [](double s) { return s / (1.0 + s * s); }, Interval{}, true);
    op.add_inverse(Interval{-1.0, 1.0}, [](double y) {
        return 2.0 * y / (1.0 + std::sqrt((1.0 - 2.0 * y) * (1.0 + 2.0 * y)));
    });
    auto outer = [](double y) {
        return (1.0 + std::sqrt((1.0 - 2.0 * y) * (1.0 + 2.0 * y))) / (2.0 * y);
    };
    op.add_inverse(Interval{1.0, kInf}, outer);
    op.add_inverse(Interval{-kInf, -1.0}, outer);
    op.set_limit([](double) { return 0.0; });
    return std::make_shared<const PhiOperator>(std::move(op));
}

PhiPtr sine() {
    PhiOperator op("sine", [](double s) { return std::sin(s); }, Interval{}, true);
    constexpr double pi = std::numbers::pi;
    for (int k = -16; k <= 16; ++k) {
        const double centre = k * pi;
        const double flip = (k % 2 == 0) ? 1.0 : -1.0;
        op.add_inverse(Interval{centre - pi / 2, centre + pi / 2},
                       [centre, flip](double y) { return centre + flip * std::asin(y); });
    }
    op.set_limit([](double) { return std::numeric_limits<double>::quiet_NaN(); });
    return std::make_shared<const PhiOperator>(std::move(op));
}

PhiPtr difference(double alpha, double beta) {
    if (alpha == beta) throw InvalidInput("difference operator needs alpha != beta");
    if (!(alpha >= 0.0 && beta >= 0.0)) throw InvalidInput("difference operator needs alpha, beta >= 0");
    PhiOperator op(
        "difference",
        [alpha, beta](double s) {
            const double a = std::abs(s);
            return (std::pow(a, alpha) - std::pow(a, beta)) * s;
        },
        Interval{}, true);
    const double lead = alpha > beta ? 1.0 : -1.0;
    op.set_limit([lead](double end) { return end > 0 ? lead * kInf : -lead * kInf; });
    return std::make_shared<const PhiOperator>(std::move(op));
}

std::vector<std::string> names() {
    return {"r_laplacian", "identity", "mean_curvature", "relativistic",
            "p_relativistic", "perona_malik", "sine", "difference"};
}

PhiPtr by_name(const std::string& name, const std::map<std::string, double>& params) {
    auto get = [&](const char* key) {
        auto it = params.find(key);
        if (it == params.end()) {
            throw InvalidInput("operator '" + name + "' needs parameter '" + key + "'");
        }
        return it->second;
    };
    if (name == "r_laplacian") return r_laplacian(get("r"));
    if (name == "identity") return identity();
    if (name == "mean_curvature") return mean_curvature();
    if (name == "relativistic") return relativistic();
    if (name == "p_relativistic") return p_relativistic(get("p"));
    if (name == "perona_malik") return perona_malik();
    if (name == "sine") return sine();
    if (name == "difference") return difference(get("alpha"), get("beta"));
    throw InvalidInput("unknown operator '" + name + "'");
}

} // namespace catalog

} // namespace phibvp
