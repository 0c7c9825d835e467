#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "domain.hpp"
#include "field.hpp"
#include "gvf.hpp"

namespace gradvar {

struct RelaxOptions {
    std::size_t max_iter = 100;
    double tol = 1e-9;
};

struct RelaxReport {
    std::size_t iterations_run = 0;
    /// max |update| over free vertices in the last iteration
    double final_residual = 0.0;
};

/**
 * Jacobi relaxation toward a discrete harmonic field. Every free vertex is
 * replaced by the mean of its neighbors from the previous iterate; vertices
 * in `fixed` hold their given values throughout. Stops after max_iter
 * iterations or once the largest update drops below tol.
 */
inline std::pair<ScalarField, RelaxReport> harmonic_relax(const Domain& domain, ScalarField field,
                                                          const SampleMap& fixed, RelaxOptions opts = {}) {
    if (field.size() != domain.vertex_count()) throw InvalidArgument("field size does not match domain");
    if (fixed.empty()) throw InvalidArgument("harmonic_relax needs at least one fixed vertex");
    if (!(opts.tol >= 0.0)) throw InvalidArgument("tolerance must be nonnegative");

    std::vector<char> is_fixed(domain.vertex_count(), 0);
    for (const auto& [v, x] : fixed) {
        if (!domain.contains(v)) throw InvalidArgument("fixed vertex " + std::to_string(v) + " out of range");
        is_fixed[v] = 1;
        field[v] = x;
    }
    std::vector<VertexId> free;
    for (VertexId v = 0; v < domain.vertex_count(); ++v) {
        if (is_fixed[v]) continue;
        if (domain.degree(v) == 0)
            throw InvalidArgument("free vertex " + std::to_string(v) + " has no neighbors; its mean is undefined");
        free.push_back(v);
    }

    RelaxReport report;
    if (free.empty()) return {std::move(field), report};

    ScalarField next = field;
    while (report.iterations_run < opts.max_iter) {
        double residual = 0.0;
        for (VertexId v : free) {
            double sum = 0.0;
            const auto nbrs = domain.neighbors(v);
            for (VertexId q : nbrs) sum += field[q];
            next[v] = sum / static_cast<double>(nbrs.size());
            residual = std::max(residual, std::abs(next[v] - field[v]));
        }
        std::swap(field.values, next.values);
        ++report.iterations_run;
        report.final_residual = residual;
        if (residual < opts.tol) break;
    }
    return {std::move(field), report};
}

/// Per-vertex partial derivatives on a grid.
struct GradientField {
    std::vector<double> gx;
    std::vector<double> gy;
};

/// Central differences inside the grid, one-sided differences on its border.
inline GradientField discrete_gradient(const ScalarField& field, const GridSpec& grid) {
    grid.validate();
    if (field.size() != grid.vertex_count()) throw InvalidArgument("field size does not match grid");
    if (grid.width < 2) throw InvalidArgument("x derivative needs grid width >= 2");
    if (grid.height < 2) throw InvalidArgument("y derivative needs grid height >= 2");

    const double h = grid.spacing;
    GradientField g;
    g.gx.resize(grid.vertex_count());
    g.gy.resize(grid.vertex_count());
    for (std::size_t r = 0; r < grid.height; ++r) {
        for (std::size_t c = 0; c < grid.width; ++c) {
            const VertexId v = grid.vertex(c, r);
            if (c == 0)
                g.gx[v] = (field[grid.vertex(1, r)] - field[v]) / h;
            else if (c + 1 == grid.width)
                g.gx[v] = (field[v] - field[grid.vertex(c - 1, r)]) / h;
            else
                g.gx[v] = (field[grid.vertex(c + 1, r)] - field[grid.vertex(c - 1, r)]) / (2 * h);

            if (r == 0)
                g.gy[v] = (field[grid.vertex(c, 1)] - field[v]) / h;
            else if (r + 1 == grid.height)
                g.gy[v] = (field[v] - field[grid.vertex(c, r - 1)]) / h;
            else
                g.gy[v] = (field[grid.vertex(c, r + 1)] - field[grid.vertex(c, r - 1)]) / (2 * h);
        }
    }
    return g;
}

/// Sum over edges of |f(a) - f(b)|.
inline double total_variation(const Domain& domain, const std::vector<double>& values) {
    if (values.size() != domain.vertex_count()) throw InvalidArgument("field size does not match domain");
    double tv = 0.0;
    domain.for_each_edge([&](VertexId a, VertexId b) { tv += std::abs(values[a] - values[b]); });
    return tv;
}

inline double total_variation(const Domain& domain, const ScalarField& field) {
    return total_variation(domain, field.values);
}

/// Component-wise: TV(gx) + TV(gy).
inline double total_variation(const Domain& domain, const GradientField& g) {
    return total_variation(domain, g.gx) + total_variation(domain, g.gy);
}

struct SmoothOptions {
    int order = 0;            // m in {0, 1, 2}
    std::size_t sweeps = 100; // Taylor-blend sweeps per round
    ExtensionPolicy policy = ExtensionPolicy::midpoint;
    /// Relaxation of the fitted derivative fields; max_iter 0 means 10 * vertex_count.
    RelaxOptions derivative_relax{0, 1e-9};
};

namespace detail {

inline void clamp_to_samples(ScalarField& field, const SampleMap& samples) {
    for (const auto& [v, x] : samples) field[v] = x;
}

// One derivative component: gradually varied fit guided by its values at the
// sample vertices, then harmonic relaxation with those values held fixed.
inline ScalarField fit_component(const Domain& domain, const std::vector<double>& component,
                                 const SampleMap& samples, const SmoothOptions& opts) {
    SampleMap guided;
    for (const auto& [v, x] : samples) guided[v] = component[v];
    RelaxOptions relax = opts.derivative_relax;
    if (relax.max_iter == 0) relax.max_iter = 10 * domain.vertex_count();
    return harmonic_relax(domain, gvf_reconstruct(domain, guided, opts.policy), guided, relax).first;
}

} // namespace detail

/**
 * Digital-discrete reconstruction with optional derivative smoothing.
 *
 * order 0 is the plain gradually varied fit with sample vertices set to
 * their raw values. Each further order runs one round of:
 *   1. finite-difference gradient of the current field,
 *   2. gradually varied fit of gx and gy guided by their values at the samples,
 *      relaxed to a discrete harmonic field with those values fixed,
 *   3. `sweeps` Jacobi sweeps of
 *        u(p) <- mean_q [ u(q) + G(q) . (x(p) - x(q)) ]
 *      with sample vertices reset to their raw values after each sweep.
 * With G = 0 a sweep is a plain harmonic (neighbor mean) update.
 */
inline ScalarField smooth_reconstruct(const Domain& domain, const GridSpec& grid, const SampleMap& samples,
                                      SmoothOptions opts = {}) {
    if (opts.order < 0 || opts.order > 2) throw InvalidArgument("smoothing order must be 0, 1 or 2");
    if (samples.empty()) throw InvalidArgument("smooth_reconstruct needs at least one sample");

    ScalarField current = gvf_reconstruct(domain, samples, opts.policy);
    detail::clamp_to_samples(current, samples);
    if (opts.order == 0) return current;

    if (!matches_grid(domain, grid)) throw InvalidArgument("derivative smoothing requires a grid domain");
    if (!domain.has_coords()) throw InvalidArgument("derivative smoothing requires vertex coordinates");

    std::vector<char> is_sample(domain.vertex_count(), 0);
    for (const auto& [v, x] : samples) is_sample[v] = 1;

    ScalarField next = current;
    for (int round = 0; round < opts.order; ++round) {
        const GradientField grad = discrete_gradient(current, grid);
        const ScalarField gx = detail::fit_component(domain, grad.gx, samples, opts);
        const ScalarField gy = detail::fit_component(domain, grad.gy, samples, opts);

        for (std::size_t sweep = 0; sweep < opts.sweeps; ++sweep) {
            for (VertexId p = 0; p < domain.vertex_count(); ++p) {
                const auto nbrs = domain.neighbors(p);
                if (is_sample[p] || nbrs.empty()) {
                    next[p] = current[p];
                    continue;
                }
                const Point2 xp = domain.coord(p);
                double sum = 0.0;
                for (VertexId q : nbrs) {
                    const Point2 xq = domain.coord(q);
                    sum += current[q] + gx[q] * (xp.x - xq.x) + gy[q] * (xp.y - xq.y);
                }
                next[p] = sum / static_cast<double>(nbrs.size());
            }
            detail::clamp_to_samples(next, samples);
            std::swap(current.values, next.values);
        }
    }
    return current;
}

} // namespace gradvar
