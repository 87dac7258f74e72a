#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hsk {

using NodeId = std::uint32_t;
using Bytes = std::vector<std::uint8_t>;

// Unordered node pair, stored with first < second.
struct EdgeKey {
    NodeId a = 0;
    NodeId b = 0;

    EdgeKey() = default;
    EdgeKey(NodeId x, NodeId y) : a(x < y ? x : y), b(x < y ? y : x) {}

    friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

double distance(const Vec2& p, const Vec2& q);

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad ids, duplicate ids, events referencing unknown nodes.
struct LookupError : Error {
    using Error::Error;
};

// Parameter sets that violate a documented validity condition.
struct ConfigError : Error {
    using Error::Error;
};

// Pairwise exchange failure (malformed token, agreement mismatch).
struct LinkError : Error {
    using Error::Error;
};

// Session key distribution over an edge with no established link key.
struct DistributionError : Error {
    using Error::Error;
};

// Raised when an operation needs a connected graph; carries the partition.
struct DisconnectedError : Error {
    std::vector<std::vector<NodeId>> components;

    DisconnectedError(const std::string& msg, std::vector<std::vector<NodeId>> comps)
        : Error(msg), components(std::move(comps)) {}
};

}  // namespace hsk
