#pragma once

#include <cstdint>

#include "etsim/platform.hpp"

namespace etsim {

enum class EnergyKind { Computation, Communication, Overhead };

/// Per-node state owned by the simulation engine.
struct NodeRuntime {
    int id = 0;
    int module = 0;  ///< i(j)
    Battery battery;
    std::int64_t ops = 0;         ///< x_j, completed computations
    double computation_pj = 0.0;  ///< energy drawn for computation (>= E * x_j)
    double communication_pj = 0.0;  ///< C_j
    double overhead_pj = 0.0;       ///< OH_j
    int occupancy = 0;              ///< packets held or reserved in the buffer
    std::int64_t death_cycle = -1;

    bool alive() const { return battery.alive(); }

    /// Draws from the battery and books whatever was drawn under kind.
    Draw spend(double amount_pj, EnergyKind kind) {
        const Draw d = battery.consume(amount_pj);
        switch (kind) {
            case EnergyKind::Computation: computation_pj += d.drawn_pj; break;
            case EnergyKind::Communication: communication_pj += d.drawn_pj; break;
            case EnergyKind::Overhead: overhead_pj += d.drawn_pj; break;
        }
        return d;
    }
};

}  // namespace etsim
