#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "domain.hpp"
#include "field.hpp"
#include "io.hpp"

namespace gradvar {

namespace detail {

inline void require_grid(const Domain& domain, const ScalarField& field, const GridSpec& grid) {
    grid.validate();
    if (!matches_grid(domain, grid)) throw InvalidArgument("rendering requires a grid domain");
    if (field.size() != grid.vertex_count()) throw InvalidArgument("field size does not match grid");
}

// position of x in [lo, hi] as a fraction; 0.5 for a flat field
inline double unit_position(double x, double lo, double hi) {
    if (!(hi > lo)) return 0.5;
    return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

} // namespace detail

/// Binary P6 image, one pixel per vertex, row 0 on top; blue at the minimum, red at the maximum.
inline std::string render_heatmap(const Domain& domain, const ScalarField& field, const GridSpec& grid) {
    detail::require_grid(domain, field, grid);
    const double lo = field.min(), hi = field.max();
    std::string out = "P6\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
    for (VertexId v = 0; v < field.size(); ++v) {
        if (!(hi > lo)) {
            out.append(3, static_cast<char>(128));
            continue;
        }
        const auto red = static_cast<unsigned char>(std::lround(255.0 * detail::unit_position(field[v], lo, hi)));
        out.push_back(static_cast<char>(red));
        out.push_back(0);
        out.push_back(static_cast<char>(255 - red));
    }
    return out;
}

/**
 * Binary 16-bit P5 image with a linear value map. The value range is kept
 * in a `# range lo hi` header comment so read_pgm16 can invert the map.
 */
inline std::string render_pgm16(const Domain& domain, const ScalarField& field, const GridSpec& grid) {
    detail::require_grid(domain, field, grid);
    const double lo = field.min(), hi = field.max();
    std::string out = "P5\n# range " + format_double(lo) + " " + format_double(hi) + "\n" +
                      std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n65535\n";
    for (VertexId v = 0; v < field.size(); ++v) {
        const auto level = static_cast<std::uint16_t>(std::lround(65535.0 * detail::unit_position(field[v], lo, hi)));
        out.push_back(static_cast<char>(level >> 8));
        out.push_back(static_cast<char>(level & 0xff));
    }
    return out;
}

struct Pgm16 {
    std::size_t width = 0;
    std::size_t height = 0;
    double lo = 0.0;
    double hi = 0.0;
    ScalarField field;
};

inline Pgm16 read_pgm16(std::string_view bytes) {
    std::size_t pos = 0;
    bool have_range = false;
    Pgm16 img;
    auto next_token = [&]() -> std::string {
        while (pos < bytes.size()) {
            const char c = bytes[pos];
            if (c == '#') {
                const auto eol = bytes.find('\n', pos);
                std::istringstream comment(std::string(bytes.substr(pos + 1, eol - pos - 1)));
                std::string tag;
                if (comment >> tag && tag == "range" && comment >> img.lo >> img.hi) have_range = true;
                pos = eol == std::string_view::npos ? bytes.size() : eol + 1;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        return std::string(bytes.substr(start, pos - start));
    };
    if (next_token() != "P5") throw IoError("not a binary PGM");
    std::size_t maxval = 0;
    try {
        img.width = std::stoul(next_token());
        img.height = std::stoul(next_token());
        maxval = std::stoul(next_token());
    } catch (const std::exception&) {
        throw IoError("malformed PGM header");
    }
    if (maxval != 65535) throw IoError("expected a 16-bit PGM");
    ++pos; // single whitespace before the raster
    const std::size_t n = img.width * img.height;
    if (bytes.size() < pos + 2 * n) throw IoError("truncated PGM raster");
    if (!have_range) img.hi = 1.0;
    img.field.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned hi8 = static_cast<unsigned char>(bytes[pos + 2 * i]);
        const unsigned lo8 = static_cast<unsigned char>(bytes[pos + 2 * i + 1]);
        const double t = static_cast<double>((hi8 << 8) | lo8) / 65535.0;
        img.field[static_cast<VertexId>(i)] = img.hi > img.lo ? img.lo + t * (img.hi - img.lo) : img.lo;
    }
    return img;
}

/// OBJ height mesh: vertex (x, y, value) per grid point, each grid cell split into two triangles.
inline std::string render_heightmesh(const Domain& domain, const ScalarField& field, const GridSpec& grid) {
    detail::require_grid(domain, field, grid);
    std::string out = "# gradvar height mesh " + std::to_string(grid.width) + "x" + std::to_string(grid.height) + "\n";
    for (VertexId v = 0; v < field.size(); ++v) {
        out += "v " + format_double(static_cast<double>(grid.col(v)) * grid.spacing) + " " +
               format_double(static_cast<double>(grid.row(v)) * grid.spacing) + " " + format_double(field[v]) + "\n";
    }
    for (std::size_t r = 0; r + 1 < grid.height; ++r) {
        for (std::size_t c = 0; c + 1 < grid.width; ++c) {
            const auto a = grid.vertex(c, r) + 1, b = grid.vertex(c + 1, r) + 1;
            const auto d = grid.vertex(c, r + 1) + 1, e = grid.vertex(c + 1, r + 1) + 1;
            out += "f " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(e) + "\n";
            out += "f " + std::to_string(a) + " " + std::to_string(e) + " " + std::to_string(d) + "\n";
        }
    }
    return out;
}

} // namespace gradvar
