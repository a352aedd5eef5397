#include "etsim/routing.hpp"

#include <cmath>

#include <omp.h>

namespace etsim {

WeightMatrix weights_sdr(const Topology& topology) {
    const int k = topology.node_count();
    WeightMatrix w(k, kInfinity);
    for (int i = 0; i < k; ++i) w(i, i) = 0.0;
    for (const auto& e : topology.edges()) w(e.from, e.to) = e.length_cm;
    return w;
}

double weight_fn(int level, double q, int levels) {
    if (levels < 2) throw ConfigError("battery_levels", "need at least 2 levels");
    if (level < 0 || level >= levels) {
        throw ConfigError("level", "battery level " + std::to_string(level) + " outside [0, " +
                                       std::to_string(levels) + ")");
    }
    if (!(q > 0.0)) throw ConfigError("q", "must be positive");
    return std::exp2(q * (levels - 1 - level));
}

WeightMatrix weights_ear(const Topology& topology, std::span<const int> levels, double q, int battery_levels) {
    if (static_cast<int>(levels.size()) != topology.node_count()) {
        throw ConfigError("levels", "one level per node required");
    }
    const int k = topology.node_count();
    std::vector<double> penalty(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) penalty[static_cast<std::size_t>(j)] = weight_fn(levels[static_cast<std::size_t>(j)], q, battery_levels);
    WeightMatrix w(k, kInfinity);
    for (int i = 0; i < k; ++i) w(i, i) = 0.0;
    for (const auto& e : topology.edges()) w(e.from, e.to) = penalty[static_cast<std::size_t>(e.to)] * e.length_cm;
    return w;
}

namespace {

void seed(const WeightMatrix& w, AllPairsResult& r) {
    const int k = w.size();
    r.dist = w;
    r.succ = SquareMatrix<int>(k, kNoNode);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i == j) {
                r.succ(i, j) = i;
            } else if (w(i, j) < kInfinity) {
                r.succ(i, j) = j;
            }
        }
    }
}

}  // namespace

AllPairsResult all_pairs(const WeightMatrix& w) {
    AllPairsResult r;
    seed(w, r);
    const int k = w.size();
    // Row and column n do not change while n is the pivot (weights are
    // non-negative and D_nn = 0), so every row can be relaxed in place.
    for (int n = 0; n < k; ++n) {
        const double* dn = r.dist.row(n);
#pragma omp parallel for schedule(static) if (k >= 32)
        for (int i = 0; i < k; ++i) {
            double* di = r.dist.row(i);
            int* si = r.succ.row(i);
            const double din = di[n];
            if (din == kInfinity) continue;
            const int sin = si[n];
            for (int j = 0; j < k; ++j) {
                const double via = din + dn[j];
                if (di[j] > via) {
                    di[j] = via;
                    si[j] = sin;
                }
            }
        }
    }
    r.relaxations = static_cast<std::uint64_t>(k) * k * k;
    return r;
}

AllPairsResult all_pairs_serial(const WeightMatrix& w) {
    AllPairsResult prev;
    seed(w, prev);
    const int k = w.size();
    AllPairsResult next = prev;
    std::uint64_t steps = 0;
    for (int n = 0; n < k; ++n) {
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                ++steps;
                const double via = prev.dist(i, n) + prev.dist(n, j);
                if (prev.dist(i, j) <= via) {
                    next.dist(i, j) = prev.dist(i, j);
                    next.succ(i, j) = prev.succ(i, j);
                } else {
                    next.dist(i, j) = via;
                    next.succ(i, j) = prev.succ(i, n);
                }
            }
        }
        std::swap(prev, next);
    }
    prev.relaxations = steps;
    return prev;
}

RoutingTables build_routing_tables(const AllPairsResult& ap, const Mapping& mapping,
                                   const std::vector<bool>& deadlocked, const RoutingTables& prev,
                                   std::uint64_t* examined) {
    const int k = ap.dist.size();
    const int p = mapping.module_count();
    if (mapping.node_count() != k) throw ConfigError("mapping", "node count differs from routing matrices");
    if (!deadlocked.empty() && static_cast<int>(deadlocked.size()) != k) {
        throw ConfigError("deadlocked", "one flag per node required");
    }
    const bool have_prev = !prev.empty();
    if (have_prev && (prev.node_count() != k || prev.module_count() != p)) {
        throw ConfigError("prev", "routing table dimensions differ");
    }
    RoutingTables rt(k, p);
    std::uint64_t count = 0;
    for (int n = 0; n < k; ++n) {
        const bool locked = !deadlocked.empty() && deadlocked[static_cast<std::size_t>(n)];
        for (int i = 1; i <= p; ++i) {
            const int current = have_prev ? prev.at(n, i) : kNoNode;
            double dist = kInfinity;
            int suc = kNoNode;
            for (int j : mapping.duplicates(i)) {
                ++count;
                if (!locked || ap.succ(n, j) != current) {
                    if (dist > ap.dist(n, j)) {
                        suc = ap.succ(n, j);
                        dist = ap.dist(n, j);
                    }
                }
            }
            rt.at(n, i) = suc;
        }
    }
    if (examined) *examined = count;
    return rt;
}

RoutingSnapshot compute_routes(const Topology& topology, const Mapping& mapping, const RoutingParams& params,
                               std::span<const int> levels, const std::vector<bool>& deadlocked,
                               const RoutingTables& prev, const BlockedPorts& blocked) {
    RoutingSnapshot s;
    s.weights = params.algorithm == Algorithm::Ear
                    ? weights_ear(topology, levels, params.q, params.battery_levels)
                    : weights_sdr(topology);
    for (std::size_t n = 0; n < blocked.size(); ++n) {
        for (int to : blocked[n]) s.weights(static_cast<int>(n), to) = kInfinity;
    }
    s.paths = all_pairs(s.weights);
    s.tables = build_routing_tables(s.paths, mapping, deadlocked, prev);
    return s;
}

}  // namespace etsim
