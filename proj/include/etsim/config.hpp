#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "etsim/sim.hpp"

namespace etsim {

using nlohmann::json;

/// Communication energy per operation fed into the bound.
struct BoundComm {
    enum class Kind { Zero, MinHop, Custom } kind = Kind::MinHop;
    std::vector<double> custom;
};

/// Fully resolved experiment description; every field has a default.
struct ExperimentConfig {
    std::string app_name = "aes128";  ///< preset name, or "inline"
    AppSpec app = aes_preset();

    std::optional<MeshInfo> mesh = MeshInfo{4, 4};
    double link_length_cm = 1.0;
    int explicit_nodes = 0;  ///< used when mesh is empty
    std::vector<Edge> edges;
    std::vector<CalibrationPoint> link_points = LinkEnergyModel::textile().points();
    bool link_extrapolate = false;
    BatteryParams battery;
    double capacity_jitter = 0.0;
    int battery_levels = 8;
    std::string mapping_rule = "parity";  ///< "parity" or "explicit"
    std::vector<int> mapping;

    Algorithm algorithm = Algorithm::Ear;
    double q = 1.0;
    ControlConfig control;
    WorkloadConfig workload;
    int hop_cycles = 8;
    BoundComm bound_comm;

    std::vector<MeshInfo> sweep_sizes = {{4, 4}, {5, 5}, {6, 6}, {7, 7}, {8, 8}};
    std::vector<int> controller_counts = {1, 2, 3, 4, 5, 6, 7, 8};

    std::uint64_t seed = 1;
    std::int64_t max_cycles = 2'000'000'000;
};

/// "4x4" -> {4, 4}. Throws ConfigError naming field.
MeshInfo parse_mesh(std::string_view text, const std::string& field = "mesh");
std::string mesh_name(const MeshInfo& m);

/// Overlays the keys present in j onto config. Unknown keys are errors.
void apply_json(ExperimentConfig& config, const json& j);

json to_json(const ExperimentConfig& config);
json to_json(const AppSpec& app);
AppSpec app_from_json(const json& j);

/// Scenario for the configured platform, or for a mesh size override.
Scenario make_scenario(const ExperimentConfig& config, std::optional<MeshInfo> size = std::nullopt);

/// c_i per the bound_comm choice, for the scenario's platform.
std::vector<double> bound_comm_energy(const ExperimentConfig& config, const Scenario& scenario);

}  // namespace etsim
