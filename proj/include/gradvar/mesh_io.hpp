#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "domain.hpp"

namespace gradvar {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline std::string_view strip_comment(std::string_view line) {
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

template <class T>
bool parse_number(std::string_view token, T& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

} // namespace detail

/**
 * Reads the OBJ subset `v x y z` / `f i j k [l]` (1-based, `#` comments).
 * Face corners may carry `/vt/vn` suffixes, which are ignored, as are
 * vn/vt/o/g/s/usemtl/mtllib records. Coordinates keep (x, y).
 */
inline Domain read_mesh(std::istream& in, const std::string& source = "<mesh>") {
    std::vector<Point2> coords;
    std::vector<std::vector<std::size_t>> faces;
    std::vector<std::size_t> face_lines;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto tokens = detail::split_ws(detail::strip_comment(raw));
        if (tokens.empty()) continue;
        const std::string_view tag = tokens[0];
        if (tag == "v") {
            if (tokens.size() < 3 || tokens.size() > 5)
                throw ParseError(source, lineno, "vertex record needs 2-4 coordinates");
            double x = 0, y = 0, z = 0;
            if (!detail::parse_number(tokens[1], x) || !detail::parse_number(tokens[2], y) ||
                (tokens.size() > 3 && !detail::parse_number(tokens[3], z)))
                throw ParseError(source, lineno, "invalid vertex coordinate");
            coords.push_back({x, y});
        } else if (tag == "f") {
            if (tokens.size() != 4 && tokens.size() != 5)
                throw ParseError(source, lineno, "faces must be triangles or quads");
            std::vector<std::size_t> face;
            for (std::size_t k = 1; k < tokens.size(); ++k) {
                std::string_view t = tokens[k];
                t = t.substr(0, t.find('/'));
                std::size_t idx = 0;
                if (!detail::parse_number(t, idx) || idx == 0)
                    throw ParseError(source, lineno, "invalid face index '" + std::string(tokens[k]) + "'");
                face.push_back(idx - 1);
            }
            faces.push_back(std::move(face));
            face_lines.push_back(lineno);
        } else if (tag == "vn" || tag == "vt" || tag == "o" || tag == "g" || tag == "s" || tag == "usemtl" ||
                   tag == "mtllib") {
            continue;
        } else {
            throw ParseError(source, lineno, "unknown record '" + std::string(tag) + "'");
        }
    }

    std::vector<std::pair<VertexId, VertexId>> edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& face = faces[f];
        for (std::size_t k = 0; k < face.size(); ++k) {
            const std::size_t a = face[k], b = face[(k + 1) % face.size()];
            if (a >= coords.size() || b >= coords.size())
                throw ParseError(source, face_lines[f], "face references undefined vertex");
            if (a == b) throw ParseError(source, face_lines[f], "degenerate face repeats a vertex");
            edges.emplace_back(static_cast<VertexId>(a), static_cast<VertexId>(b));
        }
    }
    const std::size_t n = coords.size();
    return build_graph(edges, n, std::move(coords));
}

inline Domain load_mesh(const std::string& path) {
    auto in = detail::open_input(path);
    return read_mesh(in, path);
}

/// One `a b` pair per line, 0-based. vertex_count 0 means max id + 1.
inline Domain read_edge_list(std::istream& in, std::size_t vertex_count = 0,
                             const std::string& source = "<edges>") {
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::string raw;
    std::size_t lineno = 0;
    std::size_t max_id_plus_one = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto tokens = detail::split_ws(detail::strip_comment(raw));
        if (tokens.empty()) continue;
        VertexId a = 0, b = 0;
        if (tokens.size() != 2 || !detail::parse_number(tokens[0], a) || !detail::parse_number(tokens[1], b))
            throw ParseError(source, lineno, "expected two vertex ids");
        if (a == b) throw ParseError(source, lineno, "self-loop at vertex " + std::to_string(a));
        if (vertex_count != 0 && std::max(a, b) >= vertex_count)
            throw ParseError(source, lineno, "vertex id out of range");
        max_id_plus_one = std::max<std::size_t>(max_id_plus_one, std::max(a, b) + std::size_t{1});
        edges.emplace_back(a, b);
    }
    return build_graph(edges, vertex_count != 0 ? vertex_count : max_id_plus_one);
}

inline Domain load_edge_list(const std::string& path, std::size_t vertex_count = 0) {
    auto in = detail::open_input(path);
    return read_edge_list(in, vertex_count, path);
}

} // namespace gradvar
