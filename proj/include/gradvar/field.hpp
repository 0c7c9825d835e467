#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "error.hpp"

namespace gradvar {

/// Real value per vertex of some domain.
struct ScalarField {
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(std::vector<double> v) : values(std::move(v)) {}
    ScalarField(std::size_t n, double fill) : values(n, fill) {}

    std::size_t size() const noexcept { return values.size(); }
    double& operator[](VertexId v) { return values[v]; }
    double operator[](VertexId v) const { return values[v]; }

    bool all_finite() const {
        return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
    }

    double min() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }
    double max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

    friend bool operator==(const ScalarField&, const ScalarField&) = default;
};

/// Sparse samples v(p) keyed by vertex.
using SampleMap = std::map<VertexId, double>;

} // namespace gradvar
