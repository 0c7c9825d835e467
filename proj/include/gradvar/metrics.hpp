#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "domain.hpp"
#include "field.hpp"
#include "smoothing.hpp"

namespace gradvar {

struct Metrics {
    double rmse = 0.0;
    double max_abs_error = 0.0;
    /// TV of the field's finite-difference gradient; grid domains only
    std::optional<double> tv_gradient;
};

inline Metrics compute_metrics(const Domain& domain, const ScalarField& field, const ScalarField& truth,
                               const std::optional<GridSpec>& grid = std::nullopt) {
    if (field.size() != domain.vertex_count() || truth.size() != domain.vertex_count())
        throw InvalidArgument("field and truth must both cover the domain");
    Metrics m;
    double sq = 0.0;
    for (VertexId v = 0; v < field.size(); ++v) {
        const double e = std::abs(field[v] - truth[v]);
        sq += e * e;
        m.max_abs_error = std::max(m.max_abs_error, e);
    }
    m.rmse = field.size() ? std::sqrt(sq / static_cast<double>(field.size())) : 0.0;
    // rmse <= max holds mathematically; keep it exact under rounding
    m.rmse = std::min(m.rmse, m.max_abs_error);
    if (grid && grid->width >= 2 && grid->height >= 2 && matches_grid(domain, *grid))
        m.tv_gradient = total_variation(domain, discrete_gradient(field, *grid));
    return m;
}

} // namespace gradvar
