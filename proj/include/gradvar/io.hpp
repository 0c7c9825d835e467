#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "baselines.hpp"
#include "domain.hpp"
#include "field.hpp"
#include "gvf.hpp"
#include "mesh_io.hpp"

namespace gradvar {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

/// Writes to a sibling temp file, then renames over `path`.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;
};

inline CsvTable read_csv(std::istream& in, const std::string& source) {
    CsvTable t;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        for (auto c : split_csv(line)) cells.emplace_back(c);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError(source, lineno,
                             "expected " + std::to_string(t.header.size()) + " columns, got " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
        t.lines.push_back(lineno);
    }
    if (t.header.empty()) throw ParseError(source, lineno, "missing CSV header");
    return t;
}

template <class T>
T cell(const CsvTable& t, std::size_t row, std::size_t col, const std::string& source) {
    T out{};
    if (!parse_number(t.rows[row][col], out))
        throw ParseError(source, t.lines[row], "invalid number '" + t.rows[row][col] + "' in column " + t.header[col]);
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(out)) throw ParseError(source, t.lines[row], "non-finite value in column " + t.header[col]);
    }
    return out;
}

} // namespace detail

/// Sample file contents: either planar sites (`x,y,value`) or vertex-keyed values (`vertex,value`).
struct SampleFile {
    bool by_vertex = false;
    std::vector<SamplePoint> sites;
    std::vector<std::pair<VertexId, double>> vertex_values;
};

inline SampleFile read_samples_csv(std::istream& in, const std::string& source = "<samples>") {
    const auto t = detail::read_csv(in, source);
    SampleFile out;
    if (t.header == std::vector<std::string>{"x", "y", "value"}) {
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            out.sites.push_back({detail::cell<double>(t, r, 0, source), detail::cell<double>(t, r, 1, source),
                                 detail::cell<double>(t, r, 2, source)});
    } else if (t.header == std::vector<std::string>{"vertex", "value"}) {
        out.by_vertex = true;
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            out.vertex_values.emplace_back(detail::cell<VertexId>(t, r, 0, source), detail::cell<double>(t, r, 1, source));
    } else {
        throw ParseError(source, 1, "sample header must be 'x,y,value' or 'vertex,value'");
    }
    if (out.sites.empty() && out.vertex_values.empty()) throw ParseError(source, 1, "sample file has no rows");
    return out;
}

inline SampleFile load_samples_csv(const std::string& path) {
    auto in = detail::open_input(path);
    return read_samples_csv(in, path);
}

struct SnappedSamples {
    SampleMap samples;
    /// vertices that received more than one input sample (values averaged)
    std::size_t collisions = 0;
};

/**
 * Lands samples on domain vertices. Planar sites snap to the nearest
 * vertex (O(1) on grids, linear scan otherwise); several samples on one
 * vertex are averaged.
 */
inline SnappedSamples snap_samples(const Domain& domain, const SampleFile& file,
                                   const std::optional<GridSpec>& grid = std::nullopt) {
    std::map<VertexId, std::pair<double, std::size_t>> acc;
    auto add = [&](VertexId v, double x) {
        auto& [sum, n] = acc[v];
        sum += x;
        ++n;
    };
    if (file.by_vertex) {
        for (auto [v, x] : file.vertex_values) {
            if (!domain.contains(v)) throw InvalidArgument("sample vertex " + std::to_string(v) + " out of range");
            add(v, x);
        }
    } else if (grid) {
        for (const auto& p : file.sites) {
            auto snap = [&](double coord, std::size_t extent) {
                const double k = std::round(coord / grid->spacing);
                return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(extent - 1)));
            };
            add(grid->vertex(snap(p.x, grid->width), snap(p.y, grid->height)), p.value);
        }
    } else {
        if (!domain.has_coords()) throw InvalidArgument("x,y samples need a domain with coordinates");
        for (const auto& p : file.sites) {
            VertexId best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (VertexId v = 0; v < domain.vertex_count(); ++v) {
                const double d = std::hypot(domain.coord(v).x - p.x, domain.coord(v).y - p.y);
                if (d < best_d) {
                    best_d = d;
                    best = v;
                }
            }
            add(best, p.value);
        }
    }
    SnappedSamples out;
    for (const auto& [v, sn] : acc) {
        out.samples[v] = sn.first / static_cast<double>(sn.second);
        out.collisions += sn.second > 1;
    }
    return out;
}

/// `vertex,index,value` when level indices are given, else `vertex,value`.
inline std::string format_field_csv(const ScalarField& field, const std::vector<int>* idx = nullptr) {
    if (idx && idx->size() != field.size()) throw InvalidArgument("index/value size mismatch");
    std::string out = idx ? "vertex,index,value\n" : "vertex,value\n";
    for (VertexId v = 0; v < field.size(); ++v) {
        out += std::to_string(v);
        out += ',';
        if (idx) {
            out += std::to_string((*idx)[v]);
            out += ',';
        }
        out += format_double(field[v]);
        out += '\n';
    }
    return out;
}

struct FieldFile {
    ScalarField field;
    std::optional<std::vector<int>> idx;
};

/// Every vertex 0..n-1 must appear exactly once.
inline FieldFile read_field_csv(std::istream& in, const std::string& source = "<field>") {
    const auto t = detail::read_csv(in, source);
    const bool indexed = t.header == std::vector<std::string>{"vertex", "index", "value"};
    if (!indexed && t.header != std::vector<std::string>{"vertex", "value"})
        throw ParseError(source, 1, "field header must be 'vertex,index,value' or 'vertex,value'");
    const std::size_t n = t.rows.size();
    FieldFile out;
    out.field.values.assign(n, 0.0);
    if (indexed) out.idx.emplace(n, 0);
    std::vector<char> seen(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto v = detail::cell<VertexId>(t, r, 0, source);
        if (v >= n || seen[v]) throw ParseError(source, t.lines[r], "vertex ids must be a permutation of 0..n-1");
        seen[v] = 1;
        if (indexed) (*out.idx)[v] = detail::cell<int>(t, r, 1, source);
        out.field[v] = detail::cell<double>(t, r, indexed ? 2 : 1, source);
    }
    return out;
}

inline FieldFile load_field_csv(const std::string& path) {
    auto in = detail::open_input(path);
    return read_field_csv(in, path);
}

} // namespace gradvar
