#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etsim/error.hpp"

namespace etsim {

/// One partition of the application. Ids are 1-based and contiguous.
struct ModuleSpec {
    int id = 0;
    std::string name;
    double energy_pj = 0.0;   ///< energy per act of computation
    int compute_cycles = 16;  ///< latency of one computation
};

/// A partitioned application: modules plus the strictly sequential job flow.
/// Each flow step is one operation (computation, then forwarding the packet
/// to the node running the next step).
struct AppSpec {
    std::vector<ModuleSpec> modules;
    std::vector<int> flow;
    int packet_bits = 128;

    int module_count() const { return static_cast<int>(modules.size()); }
    const ModuleSpec& module(int id) const { return modules.at(static_cast<std::size_t>(id - 1)); }
};

/// 128-bit AES (Nr = 10) split into SubBytes/ShiftRows, MixColumns and
/// KeyExpansion/AddRoundKey.
AppSpec aes_preset(int compute_cycles = 16);

/// Looks up an embedded preset by name ("aes128"). Throws ConfigError.
AppSpec app_preset(std::string_view name);

/// f_i: occurrences of each module in the flow, indexed 0..p-1.
std::vector<int> op_counts(const AppSpec& app);

/// eps_i = f_i * (E_i + c_i). Throws ConfigError on length mismatch or
/// negative communication energy.
std::vector<double> normalized_energy(const AppSpec& app, std::span<const double> comm_per_op);

/// Every invariant violation found; empty means valid.
std::vector<Violation> validate(const AppSpec& app);

/// Throws ConfigError listing every violation.
void require_valid(const AppSpec& app);

}  // namespace etsim
