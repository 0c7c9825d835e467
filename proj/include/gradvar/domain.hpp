#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace gradvar {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/**
 * Finite undirected graph with dense vertex ids 0..vertex_count-1.
 *
 * Adjacency lists are sorted, symmetric, and free of self-loops and
 * duplicates. Optional per-vertex 2D coordinates are used by derivative
 * stencils, the pointwise baselines and rendering; graph distance never
 * looks at them.
 */
class Domain {
public:
    Domain() = default;

    std::size_t vertex_count() const noexcept { return adjacency_.size(); }

    std::size_t edge_count() const noexcept {
        std::size_t twice = 0;
        for (const auto& nbrs : adjacency_) twice += nbrs.size();
        return twice / 2;
    }

    std::span<const VertexId> neighbors(VertexId v) const { return adjacency_.at(v); }

    std::size_t degree(VertexId v) const { return adjacency_.at(v).size(); }

    std::size_t max_degree() const noexcept {
        std::size_t m = 0;
        for (const auto& nbrs : adjacency_) m = std::max(m, nbrs.size());
        return m;
    }

    bool has_coords() const noexcept { return !coords_.empty(); }
    const std::vector<Point2>& coords() const noexcept { return coords_; }
    const Point2& coord(VertexId v) const { return coords_.at(v); }

    bool contains(VertexId v) const noexcept { return v < adjacency_.size(); }

    bool adjacent(VertexId a, VertexId b) const {
        const auto& nbrs = adjacency_.at(a);
        return std::binary_search(nbrs.begin(), nbrs.end(), b);
    }

    /// Calls fn(a, b) once per undirected edge with a < b.
    template <class Fn>
    void for_each_edge(Fn&& fn) const {
        for (VertexId a = 0; a < adjacency_.size(); ++a)
            for (VertexId b : adjacency_[a])
                if (a < b) fn(a, b);
    }

    friend bool operator==(const Domain&, const Domain&) = default;

private:
    friend Domain build_graph(std::span<const std::pair<VertexId, VertexId>>, std::size_t,
                              std::optional<std::vector<Point2>>);

    std::vector<std::vector<VertexId>> adjacency_;
    std::vector<Point2> coords_;
};

enum class Connectivity { four, eight };

inline const char* to_string(Connectivity c) { return c == Connectivity::four ? "4" : "8"; }

struct GridSpec {
    std::size_t width = 1;
    std::size_t height = 1;
    Connectivity connectivity = Connectivity::four;
    double spacing = 1.0;

    std::size_t vertex_count() const noexcept { return width * height; }
    VertexId vertex(std::size_t col, std::size_t row) const noexcept {
        return static_cast<VertexId>(row * width + col);
    }
    std::size_t col(VertexId v) const noexcept { return v % width; }
    std::size_t row(VertexId v) const noexcept { return v / width; }

    void validate() const {
        if (width == 0 || height == 0) throw InvalidArgument("grid width and height must be positive");
        if (!(spacing > 0.0)) throw InvalidArgument("grid spacing must be positive");
    }
};

/// Builds an undirected graph. Reversed and repeated edges collapse; self-loops are rejected.
inline Domain build_graph(std::span<const std::pair<VertexId, VertexId>> edges, std::size_t vertex_count,
                          std::optional<std::vector<Point2>> coords = std::nullopt) {
    if (coords && coords->size() != vertex_count)
        throw InvalidArgument("coordinate count " + std::to_string(coords->size()) +
                              " does not match vertex count " + std::to_string(vertex_count));
    Domain d;
    d.adjacency_.resize(vertex_count);
    for (auto [a, b] : edges) {
        if (a >= vertex_count || b >= vertex_count)
            throw InvalidArgument("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") references a vertex id out of range");
        if (a == b) throw InvalidArgument("self-loop at vertex " + std::to_string(a));
        d.adjacency_[a].push_back(b);
        d.adjacency_[b].push_back(a);
    }
    for (auto& nbrs : d.adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    if (coords) d.coords_ = std::move(*coords);
    return d;
}

inline Domain build_graph(const std::vector<std::pair<VertexId, VertexId>>& edges, std::size_t vertex_count,
                          std::optional<std::vector<Point2>> coords = std::nullopt) {
    return build_graph(std::span<const std::pair<VertexId, VertexId>>(edges), vertex_count, std::move(coords));
}

/// Row-major grid; vertex (col, row) sits at (col*spacing, row*spacing).
inline Domain build_grid(const GridSpec& spec) {
    spec.validate();
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<Point2> coords(spec.vertex_count());
    for (std::size_t r = 0; r < spec.height; ++r) {
        for (std::size_t c = 0; c < spec.width; ++c) {
            const VertexId v = spec.vertex(c, r);
            coords[v] = {static_cast<double>(c) * spec.spacing, static_cast<double>(r) * spec.spacing};
            if (c + 1 < spec.width) edges.emplace_back(v, spec.vertex(c + 1, r));
            if (r + 1 < spec.height) edges.emplace_back(v, spec.vertex(c, r + 1));
            if (spec.connectivity == Connectivity::eight && r + 1 < spec.height) {
                if (c + 1 < spec.width) edges.emplace_back(v, spec.vertex(c + 1, r + 1));
                if (c > 0) edges.emplace_back(v, spec.vertex(c - 1, r + 1));
            }
        }
    }
    return build_graph(edges, spec.vertex_count(), std::move(coords));
}

/// Whether `domain` is exactly the graph build_grid(spec) produces, up to coordinates.
inline bool matches_grid(const Domain& domain, const GridSpec& spec) {
    if (domain.vertex_count() != spec.vertex_count()) return false;
    std::size_t expected = spec.height * (spec.width - 1) + spec.width * (spec.height - 1);
    if (spec.connectivity == Connectivity::eight) expected += 2 * (spec.width - 1) * (spec.height - 1);
    if (domain.edge_count() != expected) return false;
    for (VertexId v = 0; v < domain.vertex_count(); ++v) {
        const std::size_t c = spec.col(v), r = spec.row(v);
        if (c + 1 < spec.width && !domain.adjacent(v, spec.vertex(c + 1, r))) return false;
        if (r + 1 < spec.height && !domain.adjacent(v, spec.vertex(c, r + 1))) return false;
    }
    return true;
}

/// Hop counts from the nearest source; kUnreachable where no source reaches.
struct DistanceField {
    std::vector<VertexId> sources;
    std::vector<HopCount> dist;

    HopCount operator[](VertexId v) const { return dist.at(v); }
    bool reachable(VertexId v) const { return dist.at(v) != kUnreachable; }
};

inline DistanceField bfs_distances(const Domain& domain, std::span<const VertexId> sources) {
    if (sources.empty()) throw InvalidArgument("bfs_distances needs at least one source");
    DistanceField field;
    field.sources.assign(sources.begin(), sources.end());
    field.dist.assign(domain.vertex_count(), kUnreachable);

    std::vector<VertexId> frontier;
    frontier.reserve(domain.vertex_count());
    for (VertexId s : sources) {
        if (!domain.contains(s)) throw InvalidArgument("source vertex " + std::to_string(s) + " out of range");
        if (field.dist[s] != 0) {
            field.dist[s] = 0;
            frontier.push_back(s);
        }
    }
    // frontier doubles as the FIFO queue
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const VertexId u = frontier[head];
        const HopCount next = field.dist[u] + 1;
        for (VertexId v : domain.neighbors(u)) {
            if (field.dist[v] == kUnreachable) {
                field.dist[v] = next;
                frontier.push_back(v);
            }
        }
    }
    return field;
}

inline DistanceField bfs_distances(const Domain& domain, VertexId source) {
    return bfs_distances(domain, std::span<const VertexId>(&source, 1));
}

/// Induced subgraph. to_parent[new_id] = old id; to_child[old_id] = new id or kUnreachable.
struct Subdomain {
    Domain domain;
    std::vector<VertexId> to_parent;
    std::vector<VertexId> to_child;

    template <class T>
    std::vector<T> restrict_field(std::span<const T> parent_values) const {
        std::vector<T> out;
        out.reserve(to_parent.size());
        for (VertexId old_id : to_parent) out.push_back(parent_values[old_id]);
        return out;
    }

    /// Writes child values back into a parent-sized field.
    template <class T>
    void lift_field(std::span<const T> child_values, std::span<T> parent_values) const {
        for (VertexId i = 0; i < to_parent.size(); ++i) parent_values[to_parent[i]] = child_values[i];
    }
};

inline Subdomain subdomain(const Domain& domain, std::span<const VertexId> keep) {
    if (keep.empty()) throw InvalidArgument("subdomain needs a nonempty keep set");
    Subdomain sub;
    sub.to_child.assign(domain.vertex_count(), kUnreachable);
    std::vector<VertexId> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    for (VertexId v : kept) {
        if (!domain.contains(v)) throw InvalidArgument("keep vertex " + std::to_string(v) + " out of range");
        sub.to_child[v] = static_cast<VertexId>(sub.to_parent.size());
        sub.to_parent.push_back(v);
    }

    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId old_a : sub.to_parent)
        for (VertexId old_b : domain.neighbors(old_a))
            if (old_a < old_b && sub.to_child[old_b] != kUnreachable)
                edges.emplace_back(sub.to_child[old_a], sub.to_child[old_b]);

    std::optional<std::vector<Point2>> coords;
    if (domain.has_coords()) {
        coords.emplace();
        for (VertexId old_id : sub.to_parent) coords->push_back(domain.coord(old_id));
    }
    sub.domain = build_graph(edges, sub.to_parent.size(), std::move(coords));
    return sub;
}

/// Component label per vertex (labels are dense, in order of lowest member id).
inline std::vector<std::size_t> connected_components(const Domain& domain) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(domain.vertex_count(), unset);
    std::size_t next = 0;
    std::vector<VertexId> queue;
    for (VertexId s = 0; s < domain.vertex_count(); ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        queue.assign(1, s);
        for (std::size_t head = 0; head < queue.size(); ++head)
            for (VertexId v : domain.neighbors(queue[head]))
                if (label[v] == unset) {
                    label[v] = next;
                    queue.push_back(v);
                }
        ++next;
    }
    return label;
}

} // namespace gradvar
