#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace gradvar {

using VertexId = std::uint32_t;
using HopCount = std::uint32_t;

/// Marker for vertices not reachable from any source.
inline constexpr HopCount kUnreachable = std::numeric_limits<HopCount>::max();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/**
 * A pair of guiding vertices violating d(x, y) >= |i - j|.
 * distance == kUnreachable when x and y lie in different components.
 */
struct Witness {
    VertexId x = 0;
    VertexId y = 0;
    HopCount distance = 0;
    int index_gap = 0;

    bool unreachable() const noexcept { return distance == kUnreachable; }

    std::string describe() const {
        const std::string pair = "vertices " + std::to_string(x) + " and " + std::to_string(y);
        if (unreachable()) return pair + " lie in different components";
        return pair + " at distance " + std::to_string(distance) + " have level gap " +
               std::to_string(index_gap);
    }
};

class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const Witness& w)
        : Error("no gradually varied extension exists: " + w.describe()), witness_(w) {}

    const Witness& witness() const noexcept { return witness_; }

private:
    Witness witness_;
};

} // namespace gradvar
