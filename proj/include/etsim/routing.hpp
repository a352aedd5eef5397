#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "etsim/matrix.hpp"
#include "etsim/platform.hpp"

namespace etsim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Algorithm { Ear, Sdr };

using WeightMatrix = SquareMatrix<double>;

struct AllPairsResult {
    SquareMatrix<double> dist;  ///< D
    SquareMatrix<int> succ;     ///< S; kNoNode where j is unreachable from i
    std::uint64_t relaxations = 0;

    bool operator==(const AllPairsResult& o) const { return dist == o.dist && succ == o.succ; }
};

/// RT_n(i): next hop from node n toward the chosen duplicate of module i.
/// Equal to n for local delivery, kNoNode when no candidate survived.
class RoutingTables {
public:
    RoutingTables() = default;
    RoutingTables(int node_count, int module_count)
        : nodes_(node_count), modules_(module_count),
          next_(static_cast<std::size_t>(node_count) * module_count, kNoNode) {}

    int node_count() const { return nodes_; }
    int module_count() const { return modules_; }
    int& at(int node, int module) { return next_[index(node, module)]; }
    int at(int node, int module) const { return next_[index(node, module)]; }
    bool empty() const { return next_.empty(); }

    bool operator==(const RoutingTables&) const = default;

private:
    std::size_t index(int node, int module) const {
        return static_cast<std::size_t>(node) * modules_ + (module - 1);
    }

    int nodes_ = 0;
    int modules_ = 0;
    std::vector<int> next_;
};

/// 0 on the diagonal, L_ij on edges, infinity elsewhere.
WeightMatrix weights_sdr(const Topology& topology);

/// 2^(q (levels - 1 - level)).
double weight_fn(int level, double q, int levels);

/// Edge (i, j) weighted f(level of j) * L_ij.
WeightMatrix weights_ear(const Topology& topology, std::span<const int> levels, double q, int battery_levels);

/// All-pairs shortest distances and successors. Rows are relaxed in parallel
/// for each pivot; the result is identical to all_pairs_serial.
AllPairsResult all_pairs(const WeightMatrix& w);

/// Reference: keeps D^(n-1) and D^(n) as separate matrices and applies the
/// successor rule verbatim. Used by the tests and the benchmark.
AllPairsResult all_pairs_serial(const WeightMatrix& w);

/// Picks, for every node n and module i, the nearest duplicate of i and
/// records the successor toward it. A deadlocked node skips candidates whose
/// successor equals its current entry in prev. Candidates are scanned in
/// ascending node id; the first minimum wins.
RoutingTables build_routing_tables(const AllPairsResult& ap, const Mapping& mapping,
                                   const std::vector<bool>& deadlocked, const RoutingTables& prev,
                                   std::uint64_t* examined = nullptr);

struct RoutingParams {
    Algorithm algorithm = Algorithm::Ear;
    double q = 1.0;
    int battery_levels = 8;
};

struct RoutingSnapshot {
    WeightMatrix weights;
    AllPairsResult paths;
    RoutingTables tables;
};

/// Outgoing ports per node that must not be used; empty means none.
using BlockedPorts = std::vector<std::vector<int>>;

/// Weights, all-pairs paths, then routing tables. Blocked ports get infinite
/// weight before the paths are computed.
RoutingSnapshot compute_routes(const Topology& topology, const Mapping& mapping, const RoutingParams& params,
                               std::span<const int> levels, const std::vector<bool>& deadlocked,
                               const RoutingTables& prev, const BlockedPorts& blocked = {});

}  // namespace etsim
