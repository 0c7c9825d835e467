#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "domain.hpp"
#include "field.hpp"

namespace gradvar {

struct SamplePoint {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};

/// Scattered samples with distinct sites. Duplicate sites are merged by averaging on construction.
class SamplePoints {
public:
    SamplePoints() = default;

    explicit SamplePoints(const std::vector<SamplePoint>& raw) {
        std::map<std::pair<double, double>, std::size_t> slot;
        std::vector<std::size_t> counts;
        for (const auto& p : raw) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.value))
                throw InvalidArgument("sample point has a non-finite component");
            auto [it, inserted] = slot.try_emplace({p.x, p.y}, points_.size());
            if (inserted) {
                points_.push_back(p);
                counts.push_back(1);
            } else {
                points_[it->second].value += p.value;
                ++counts[it->second];
            }
        }
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (counts[i] > 1) {
                points_[i].value /= static_cast<double>(counts[i]);
                ++merged_;
            }
        }
    }

    /// Samples at the coordinates of the given vertices.
    static SamplePoints from_vertices(const Domain& domain, const SampleMap& samples) {
        if (!domain.has_coords()) throw InvalidArgument("domain has no coordinates");
        std::vector<SamplePoint> raw;
        for (const auto& [v, x] : samples) raw.push_back({domain.coord(v).x, domain.coord(v).y, x});
        return SamplePoints(raw);
    }

    const std::vector<SamplePoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    /// number of sites that absorbed duplicates
    std::size_t merged_sites() const noexcept { return merged_; }

    double min_value() const {
        double m = points_.at(0).value;
        for (const auto& p : points_) m = std::min(m, p.value);
        return m;
    }
    double max_value() const {
        double m = points_.at(0).value;
        for (const auto& p : points_) m = std::max(m, p.value);
        return m;
    }

private:
    std::vector<SamplePoint> points_;
    std::size_t merged_ = 0;
};

/// theta(s) = exp(-(s/scale)^2)
struct GaussianWeight {
    double scale = 1.0;
};

/// theta(s) = 1 / (s + epsilon)^power
struct InversePowerWeight {
    double power = 2.0;
    double epsilon = 0.0;
};

using WeightFunction = std::variant<GaussianWeight, InversePowerWeight>;

inline double evaluate_weight(const WeightFunction& w, double s) {
    if (const auto* g = std::get_if<GaussianWeight>(&w)) {
        const double r = s / g->scale;
        return std::exp(-r * r);
    }
    const auto& ip = std::get<InversePowerWeight>(w);
    return 1.0 / std::pow(s + ip.epsilon, ip.power);
}

struct MlsConfig {
    int degree = 1;
    WeightFunction weight = GaussianWeight{};

    void validate() const {
        if (degree < 0 || degree > 2) throw InvalidArgument("MLS degree must be 0, 1 or 2");
        if (const auto* g = std::get_if<GaussianWeight>(&weight)) {
            if (!(g->scale > 0.0)) throw InvalidArgument("Gaussian weight scale must be positive");
        } else {
            const auto& ip = std::get<InversePowerWeight>(weight);
            if (!(ip.power > 0.0)) throw InvalidArgument("inverse-power weight exponent must be positive");
            if (!(ip.epsilon >= 0.0)) throw InvalidArgument("inverse-power epsilon must be nonnegative");
        }
    }
};

struct MlsResult {
    double value = 0.0;
    int degree_used = 0;
    /// the requested degree was rank deficient at this query
    bool fallback = false;
    /// fitted as a 1-D polynomial along the line carrying all weighted samples
    bool along_line = false;
};

namespace detail {

// relative eigenvalue cutoff for declaring the equilibrated normal matrix singular
inline constexpr double kRankTolerance = 1e-10;

struct WeightedSite {
    double dx, dy, value, w;
};

// Solves the weighted normal equations for the given basis rows; returns the
// constant coefficient, or nothing when the equilibrated system is rank deficient.
inline std::optional<double> solve_constant_term(const std::vector<Eigen::VectorXd>& rows,
                                                 const std::vector<WeightedSite>& sites) {
    const Eigen::Index k = rows.front().size();
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        normal.noalias() += sites[i].w * rows[i] * rows[i].transpose();
        rhs.noalias() += sites[i].w * sites[i].value * rows[i];
    }
    Eigen::VectorXd scale(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        if (!(normal(j, j) > 0.0)) return std::nullopt;
        scale(j) = 1.0 / std::sqrt(normal(j, j));
    }
    const Eigen::MatrixXd eq = scale.asDiagonal() * normal * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(eq, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    if (ev(0) <= kRankTolerance * ev(k - 1)) return std::nullopt;
    const Eigen::VectorXd y = eq.ldlt().solve(scale.asDiagonal() * rhs);
    return scale(0) * y(0);
}

inline Eigen::VectorXd basis_2d(double u, double v, int degree) {
    Eigen::VectorXd b((degree + 1) * (degree + 2) / 2);
    Eigen::Index j = 0;
    for (int total = 0; total <= degree; ++total)
        for (int py = 0; py <= total; ++py) b(j++) = std::pow(u, total - py) * std::pow(v, py);
    return b;
}

inline Eigen::VectorXd basis_1d(double t, int degree) {
    Eigen::VectorXd b(degree + 1);
    for (int p = 0; p <= degree; ++p) b(p) = std::pow(t, p);
    return b;
}

} // namespace detail

/**
 * Moving least squares at one query: minimizes
 *   sum_i (p(x_i) - f_i)^2 theta(|query - x_i|)
 * over polynomials of the configured total degree and returns p(query).
 *
 * If the weighted normal system is rank deficient the fit degrades: when
 * all weighted sites are collinear it fits a polynomial of the same degree
 * along that line (evaluated at the query's projection), otherwise it
 * drops one degree and retries, down to the weighted mean.
 */
inline MlsResult mls_fit(Point2 query, const SamplePoints& samples, const MlsConfig& config) {
    config.validate();
    if (samples.empty()) throw InvalidArgument("MLS needs at least one sample");

    std::vector<detail::WeightedSite> sites;
    double total = 0.0;
    for (const auto& p : samples.points()) {
        const double dx = p.x - query.x, dy = p.y - query.y;
        const double s = std::hypot(dx, dy);
        if (s == 0.0 && std::holds_alternative<InversePowerWeight>(config.weight) &&
            std::get<InversePowerWeight>(config.weight).epsilon == 0.0)
            return {p.value, config.degree, false, false};
        const double w = evaluate_weight(config.weight, s);
        if (w > 0.0) {
            sites.push_back({dx, dy, p.value, w});
            total += w;
        }
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw InvalidArgument("MLS weights sum to zero at query");

    // length scale keeps monomials O(1)
    double msd = 0.0;
    for (const auto& s : sites) msd += s.w * (s.dx * s.dx + s.dy * s.dy);
    const double len = msd > 0.0 ? std::sqrt(msd / total) : 1.0;

    // weighted principal axis, used only when the 2-D system is singular
    double cx = 0, cy = 0;
    for (const auto& s : sites) {
        cx += s.w * s.dx / len;
        cy += s.w * s.dy / len;
    }
    cx /= total;
    cy /= total;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& s : sites) {
        const Eigen::Vector2d r(s.dx / len - cx, s.dy / len - cy);
        cov.noalias() += s.w * r * r.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> axes(cov / total);
    const bool collinear = axes.eigenvalues()(1) > 0.0 &&
                           axes.eigenvalues()(0) <= detail::kRankTolerance * axes.eigenvalues()(1);
    const Eigen::Vector2d dir = axes.eigenvectors().col(1);

    for (int degree = config.degree; degree >= 0; --degree) {
        std::vector<Eigen::VectorXd> rows;
        rows.reserve(sites.size());
        for (const auto& s : sites) rows.push_back(detail::basis_2d(s.dx / len, s.dy / len, degree));
        if (auto c = detail::solve_constant_term(rows, sites))
            return {*c, degree, degree != config.degree, false};

        if (degree >= 1 && collinear) {
            // t measured from the query's projection onto the line
            rows.clear();
            for (const auto& s : sites) rows.push_back(detail::basis_1d(dir.x() * s.dx / len + dir.y() * s.dy / len, degree));
            if (auto c = detail::solve_constant_term(rows, sites)) return {*c, degree, true, true};
        }
    }
    // degree 0 with positive total weight cannot be singular
    throw Error("MLS fit failed to produce a solution");
}

/// Inverse-distance weighting: sum w_i f_i / sum w_i, w_i = 1/d_i^power. Exact at sites.
inline double shepard(Point2 query, const SamplePoints& samples, double power) {
    if (samples.empty()) throw InvalidArgument("Shepard interpolation needs at least one sample");
    if (!(power > 0.0)) throw InvalidArgument("Shepard power must be positive");
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& p : samples.points()) {
        const double d = std::hypot(p.x - query.x, p.y - query.y);
        if (d == 0.0) return p.value;
        dmin = std::min(dmin, d);
    }
    // weights relative to the nearest site stay in (0, 1]
    double num = 0.0, den = 0.0;
    for (const auto& p : samples.points()) {
        const double w = std::pow(dmin / std::hypot(p.x - query.x, p.y - query.y), power);
        num += w * p.value;
        den += w;
    }
    return num / den;
}

struct ShepardConfig {
    double power = 2.0;
};

using PointwiseMethod = std::variant<MlsConfig, ShepardConfig>;

struct DomainEvaluation {
    ScalarField field;
    /// vertices where MLS fell back from the requested degree
    std::size_t fallback_count = 0;
    std::size_t along_line_count = 0;
};

inline DomainEvaluation evaluate_on_domain(const PointwiseMethod& method, const SamplePoints& samples,
                                           const Domain& domain) {
    if (!domain.has_coords()) throw InvalidArgument("pointwise methods need vertex coordinates");
    DomainEvaluation out;
    out.field.values.resize(domain.vertex_count());
    for (VertexId v = 0; v < domain.vertex_count(); ++v) {
        try {
            if (const auto* mls = std::get_if<MlsConfig>(&method)) {
                const MlsResult r = mls_fit(domain.coord(v), samples, *mls);
                out.field[v] = r.value;
                out.fallback_count += r.fallback;
                out.along_line_count += r.along_line;
            } else {
                out.field[v] = shepard(domain.coord(v), samples, std::get<ShepardConfig>(method).power);
            }
        } catch (const Error& e) {
            throw Error("vertex " + std::to_string(v) + ": " + e.what());
        }
    }
    return out;
}

} // namespace gradvar
