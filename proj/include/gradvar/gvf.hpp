#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "domain.hpp"
#include "error.hpp"
#include "field.hpp"

namespace gradvar {

/// Uniform chain of levels A_1 < ... < A_n, A_i = base + (i-1)*delta.
struct LevelTable {
    double base = 0.0;
    double delta = 1.0;
    int count = 1;

    double level(int i) const { return base + static_cast<double>(i - 1) * delta; }

    void validate() const {
        if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("level spacing must be positive");
        if (count < 1) throw InvalidArgument("level table needs at least one level");
    }

    friend bool operator==(const LevelTable&, const LevelTable&) = default;
};

/// Guiding points J with their level indices (1-based) and the raw sample values they came from.
struct GuidingSet {
    std::map<VertexId, int> entries;
    std::map<VertexId, double> raw_values;

    std::vector<VertexId> vertices() const {
        std::vector<VertexId> out;
        out.reserve(entries.size());
        for (const auto& [v, i] : entries) out.push_back(v);
        return out;
    }

    void validate(const Domain& domain, int level_count) const {
        if (entries.empty()) throw InvalidArgument("guiding set is empty");
        for (const auto& [v, i] : entries) {
            if (!domain.contains(v)) throw InvalidArgument("guiding vertex " + std::to_string(v) + " out of range");
            if (i < 1 || i > level_count)
                throw InvalidArgument("guiding index " + std::to_string(i) + " at vertex " + std::to_string(v) +
                                      " outside 1.." + std::to_string(level_count));
        }
    }
};

/// Level index per vertex; the output of a gradually varied extension.
struct LevelField {
    std::vector<int> idx;
    LevelTable table;

    friend bool operator==(const LevelField&, const LevelField&) = default;
};

struct EnvelopePair {
    std::vector<int> lower;
    std::vector<int> upper;

    bool consistent() const {
        for (std::size_t p = 0; p < lower.size(); ++p)
            if (lower[p] > upper[p]) return false;
        return true;
    }
};

enum class ExtensionPolicy { midpoint, lower, upper };

inline const char* to_string(ExtensionPolicy p) {
    switch (p) {
    case ExtensionPolicy::midpoint: return "midpoint";
    case ExtensionPolicy::lower: return "lower";
    case ExtensionPolicy::upper: return "upper";
    }
    return "?";
}

struct Feasibility {
    bool feasible = true;
    std::optional<Witness> witness;

    explicit operator bool() const noexcept { return feasible; }
};

/// Default floor for the level spacing when every sample has the same value.
inline double default_min_delta(const SampleMap& samples) {
    double scale = 1.0;
    for (const auto& [v, x] : samples) scale = std::max(scale, std::abs(x));
    return 1e-9 * scale;
}

/**
 * Smallest level spacing delta* such that |v(x) - v(y)| / delta <= d(x, y)
 * for every pair of samples; quantizing with any spacing >= delta* (and a
 * monotone rounding rule) yields a guiding set satisfying the existence
 * condition. Falls back to `min_delta` when the samples carry no variation.
 * Throws InfeasibleError when two samples are in different components.
 */
inline double lipschitz_delta(const Domain& domain, const SampleMap& samples,
                              std::optional<double> min_delta = std::nullopt) {
    if (samples.empty()) throw InvalidArgument("lipschitz_delta needs at least one sample");
    double best = 0.0;
    for (auto it = samples.begin(); it != samples.end(); ++it) {
        const auto [x, vx] = *it;
        if (!domain.contains(x)) throw InvalidArgument("sample vertex " + std::to_string(x) + " out of range");
        if (std::next(it) == samples.end()) break;
        const DistanceField d = bfs_distances(domain, x);
        for (auto jt = std::next(it); jt != samples.end(); ++jt) {
            const auto [y, vy] = *jt;
            if (!domain.contains(y)) throw InvalidArgument("sample vertex " + std::to_string(y) + " out of range");
            if (d.dist[y] == kUnreachable) throw InfeasibleError(Witness{x, y, kUnreachable, 0});
            best = std::max(best, std::abs(vx - vy) / static_cast<double>(d.dist[y]));
        }
    }
    const double floor = min_delta.value_or(default_min_delta(samples));
    return best > 0.0 ? best : floor;
}

namespace detail {

// nearest level, ties toward the lower index; monotone in value
inline int nearest_level_index(double value, double base, double delta) {
    const double steps = std::ceil((value - base) / delta - 0.5);
    return std::max(1, static_cast<int>(steps) + 1);
}

} // namespace detail

/// Uniform levels starting at the smallest sample; every sample snaps to its nearest level.
inline std::pair<LevelTable, GuidingSet> quantize(const SampleMap& samples, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("quantization spacing must be positive");
    if (samples.empty()) throw InvalidArgument("quantize needs at least one sample");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& [v, x] : samples) {
        if (!std::isfinite(x)) throw InvalidArgument("sample at vertex " + std::to_string(v) + " is not finite");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double span_steps = std::floor((hi - lo) / delta);
    if (span_steps > static_cast<double>(std::numeric_limits<int>::max() / 2))
        throw InvalidArgument("level spacing too small for the sample range");

    LevelTable table{lo, delta, static_cast<int>(span_steps) + 1};
    GuidingSet guiding;
    for (const auto& [v, x] : samples) {
        const int i = detail::nearest_level_index(x, lo, delta);
        guiding.entries[v] = i;
        guiding.raw_values[v] = x;
        // rounding the maximum up can land one level past floor(range/delta)+1
        table.count = std::max(table.count, i);
    }
    return {table, guiding};
}

inline std::pair<LevelTable, GuidingSet> quantize(const Domain& domain, const SampleMap& samples, double delta) {
    for (const auto& [v, x] : samples)
        if (!domain.contains(v)) throw InvalidArgument("sample vertex " + std::to_string(v) + " out of range");
    return quantize(samples, delta);
}

/**
 * Existence test for a gradually varied extension: every guiding pair must
 * satisfy d(x, y) >= |i - j|. On failure the witness is a pair in different
 * components if one exists, otherwise the pair with the largest |i - j| - d
 * (first in vertex order on ties).
 */
inline Feasibility check_feasibility(const Domain& domain, const GuidingSet& guiding) {
    Feasibility result;
    int worst = 0;
    for (auto it = guiding.entries.begin(); it != guiding.entries.end(); ++it) {
        const auto [x, ix] = *it;
        if (!domain.contains(x)) throw InvalidArgument("guiding vertex " + std::to_string(x) + " out of range");
        if (std::next(it) == guiding.entries.end()) break;
        const DistanceField d = bfs_distances(domain, x);
        for (auto jt = std::next(it); jt != guiding.entries.end(); ++jt) {
            const auto [y, iy] = *jt;
            if (!domain.contains(y)) throw InvalidArgument("guiding vertex " + std::to_string(y) + " out of range");
            const int gap = std::abs(ix - iy);
            if (d.dist[y] == kUnreachable) {
                result.feasible = false;
                result.witness = Witness{x, y, kUnreachable, gap};
                return result;
            }
            const long long violation = static_cast<long long>(gap) - static_cast<long long>(d.dist[y]);
            if (violation > worst) {
                worst = static_cast<int>(violation);
                result.feasible = false;
                result.witness = Witness{x, y, d.dist[y], gap};
            }
        }
    }
    return result;
}

namespace detail {

struct Seed {
    VertexId vertex;
    long long offset;
};

inline constexpr long long kNoSeed = std::numeric_limits<long long>::max();

// out[p] = min over seeds (offset + d(p, seed)); kNoSeed where no seed reaches p.
// Unit edge weights let this run as a BFS whose seeds enter at their offset level.
inline std::vector<long long> offset_sweep(const Domain& domain, std::vector<Seed> seeds) {
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
        return a.offset != b.offset ? a.offset < b.offset : a.vertex < b.vertex;
    });
    std::vector<long long> val(domain.vertex_count(), kNoSeed);
    std::vector<VertexId> cur, nxt;
    std::size_t si = 0;
    long long level = 0;
    while (si < seeds.size() || !cur.empty()) {
        if (cur.empty()) level = seeds[si].offset;
        for (; si < seeds.size() && seeds[si].offset == level; ++si) {
            const VertexId v = seeds[si].vertex;
            if (val[v] > level) {
                val[v] = level;
                cur.push_back(v);
            }
        }
        nxt.clear();
        for (VertexId u : cur)
            for (VertexId w : domain.neighbors(u))
                if (val[w] > level + 1) {
                    val[w] = level + 1;
                    nxt.push_back(w);
                }
        std::swap(cur, nxt);
        ++level;
    }
    return val;
}

} // namespace detail

/**
 * Tightest per-vertex bounds consistent with the guiding constraints:
 *   L(p) = max(1, max_j (i_j - d(p, x_j)))
 *   U(p) = min(n, min_j (i_j + d(p, x_j)))
 * Guiding points that cannot reach p impose nothing on it.
 *
 * Clamping to [1, n] cannot create an empty interval: guiding indices lie
 * in 1..n, so i_j - d <= n and i_j + d >= 1 for every term.
 */
inline EnvelopePair envelopes(const Domain& domain, const GuidingSet& guiding, int level_count) {
    guiding.validate(domain, level_count);
    std::vector<detail::Seed> up, down;
    for (const auto& [v, i] : guiding.entries) {
        up.push_back({v, i});
        down.push_back({v, -static_cast<long long>(i)});
    }
    const auto u = detail::offset_sweep(domain, std::move(up));
    const auto l = detail::offset_sweep(domain, std::move(down));

    EnvelopePair env;
    env.lower.resize(domain.vertex_count());
    env.upper.resize(domain.vertex_count());
    for (VertexId p = 0; p < domain.vertex_count(); ++p) {
        env.upper[p] = u[p] == detail::kNoSeed ? level_count
                                               : static_cast<int>(std::min<long long>(level_count, u[p]));
        env.lower[p] = l[p] == detail::kNoSeed ? 1 : static_cast<int>(std::max<long long>(1, -l[p]));
    }
    return env;
}

/**
 * Gradually varied extension of the guiding set over the whole domain.
 * Each vertex takes a value inside its envelope interval: the floor of the
 * midpoint, the lower bound or the upper bound. All three selectors are
 * 1-Lipschitz in L and U, so the result differs by at most one level
 * across every edge and agrees with the guiding indices on J.
 */
inline LevelField gvf_extend(const Domain& domain, const GuidingSet& guiding, const LevelTable& table,
                             ExtensionPolicy policy = ExtensionPolicy::midpoint) {
    table.validate();
    guiding.validate(domain, table.count);
    if (auto f = check_feasibility(domain, guiding); !f) throw InfeasibleError(*f.witness);

    const EnvelopePair env = envelopes(domain, guiding, table.count);
    LevelField out;
    out.table = table;
    out.idx.resize(domain.vertex_count());
    for (VertexId p = 0; p < domain.vertex_count(); ++p) {
        switch (policy) {
        case ExtensionPolicy::midpoint: out.idx[p] = (env.lower[p] + env.upper[p]) / 2; break;
        case ExtensionPolicy::lower: out.idx[p] = env.lower[p]; break;
        case ExtensionPolicy::upper: out.idx[p] = env.upper[p]; break;
        }
    }
    return out;
}

inline ScalarField to_scalar(const LevelField& field) {
    ScalarField out;
    out.values.reserve(field.idx.size());
    for (int i : field.idx) out.values.push_back(field.table.level(i));
    return out;
}

/// Largest |idx(a) - idx(b)| over the edges of the domain.
inline int max_edge_step(const Domain& domain, const std::vector<int>& idx) {
    int worst = 0;
    domain.for_each_edge([&](VertexId a, VertexId b) { worst = std::max(worst, std::abs(idx[a] - idx[b])); });
    return worst;
}

inline bool is_gradually_varied(const Domain& domain, const LevelField& field) {
    return field.idx.size() == domain.vertex_count() && max_edge_step(domain, field.idx) <= 1;
}

/// Quantized guiding data ready for extension.
struct LevelFit {
    LevelTable table;
    GuidingSet guiding;
    bool auto_delta = true;
};

/**
 * Quantizes samples. With no explicit spacing, uses lipschitz_delta and
 * nudges it upward by a few ulps if floating-point rounding in the
 * quantizer produced a violating pair. An explicit spacing is used as
 * given; callers check feasibility themselves.
 */
inline LevelFit fit_levels(const Domain& domain, const SampleMap& samples,
                           std::optional<double> delta = std::nullopt) {
    if (delta) {
        auto [table, guiding] = quantize(domain, samples, *delta);
        return {table, std::move(guiding), false};
    }
    double d = lipschitz_delta(domain, samples);
    for (int attempt = 0; attempt < 16; ++attempt) {
        auto [table, guiding] = quantize(domain, samples, d);
        if (check_feasibility(domain, guiding)) return {table, std::move(guiding), true};
        d = std::nextafter(d * (1.0 + 4 * std::numeric_limits<double>::epsilon()),
                           std::numeric_limits<double>::infinity());
    }
    throw Error("could not find a feasible level spacing near the Lipschitz bound");
}

/// Quantize, extend and map back to reals.
inline ScalarField gvf_reconstruct(const Domain& domain, const SampleMap& samples,
                                   ExtensionPolicy policy = ExtensionPolicy::midpoint,
                                   std::optional<double> delta = std::nullopt) {
    const LevelFit fit = fit_levels(domain, samples, delta);
    return to_scalar(gvf_extend(domain, fit.guiding, fit.table, policy));
}

} // namespace gradvar
