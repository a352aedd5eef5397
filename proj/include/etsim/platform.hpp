#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "etsim/app_model.hpp"

namespace etsim {

inline constexpr int kNoNode = -1;

struct Edge {
    int from = 0;
    int to = 0;
    double length_cm = 1.0;
};

struct MeshInfo {
    int width = 0;
    int height = 0;
};

/// Directed graph of nodes and transmission lines. Node ids are 0..K-1; on a
/// mesh, node id = y * width + x.
class Topology {
public:
    Topology() = default;
    Topology(int node_count, std::vector<Edge> edges, std::optional<MeshInfo> mesh = std::nullopt);

    int node_count() const { return node_count_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::optional<MeshInfo>& mesh_info() const { return mesh_; }

    bool has_edge(int from, int to) const { return length(from, to) > 0.0; }
    /// 0 when there is no edge.
    double length(int from, int to) const {
        return lengths_[static_cast<std::size_t>(from) * node_count_ + to];
    }
    const std::vector<int>& out_neighbors(int node) const { return out_[static_cast<std::size_t>(node)]; }

    int x(int node) const { return node % mesh_->width; }
    int y(int node) const { return node / mesh_->width; }

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> lengths_;
    std::vector<std::vector<int>> out_;
    std::optional<MeshInfo> mesh_;
};

/// width x height grid, 4-neighbour links in both directions.
Topology mesh(int width, int height, double link_length_cm = 1.0);

/// Node -> module assignment (module ids 1..p).
class Mapping {
public:
    Mapping() = default;
    Mapping(std::vector<int> assignment, int module_count);

    int node_count() const { return static_cast<int>(assignment_.size()); }
    int module_count() const { return module_count_; }
    int module_of(int node) const { return assignment_[static_cast<std::size_t>(node)]; }
    const std::vector<int>& assignment() const { return assignment_; }
    /// S_i, ascending node id.
    const std::vector<int>& duplicates(int module) const { return sets_[static_cast<std::size_t>(module - 1)]; }
    /// n_i, indexed 0..p-1.
    std::vector<int> counts() const;

private:
    std::vector<int> assignment_;
    int module_count_ = 0;
    std::vector<std::vector<int>> sets_;
};

/// (x mod 2) + (y mod 2): 2 -> module 1, 0 -> module 2, 1 -> module 3.
Mapping parity_map(const Topology& topology, const AppSpec& app);

/// n*_i = K eps_i / sum(eps).
std::vector<double> optimal_counts(std::span<const double> eps, int node_budget);

struct CalibrationPoint {
    double length_cm = 0.0;
    double pj_per_bit = 0.0;
};

/// Per-bit line energy, piecewise linear in length between calibration points.
class LinkEnergyModel {
public:
    LinkEnergyModel(std::vector<CalibrationPoint> points, bool extrapolate = false);

    /// Textile transmission lines at 1, 10, 20 and 100 cm.
    static LinkEnergyModel textile();

    double pj_per_bit(double length_cm) const;
    const std::vector<CalibrationPoint>& points() const { return points_; }
    bool extrapolate() const { return extrapolate_; }

private:
    std::vector<CalibrationPoint> points_;
    bool extrapolate_ = false;
};

/// Every bit is assumed to switch.
double packet_energy(const LinkEnergyModel& model, double length_cm, int packet_bits);

enum class BatteryModel { Ideal, ThinFilm };

struct DischargePoint {
    double state_of_charge = 0.0;
    double volts = 0.0;
};

struct BatteryParams {
    BatteryModel model = BatteryModel::ThinFilm;
    double capacity_pj = 60000.0;
    double cutoff_volts = 3.0;
    std::vector<DischargePoint> discharge_table = default_discharge_table();
    /// Energy delivered per unit drawn; 1.0 means no rate losses.
    double efficiency = 1.0;

    static std::vector<DischargePoint> default_discharge_table();
};

std::vector<Violation> validate(const BatteryParams& params);

/// Result of one draw on a battery.
struct Draw {
    double drawn_pj = 0.0;  ///< energy actually removed from the battery
    bool delivered = false; ///< the full amount was supplied
};

/// Event-driven battery. Once dead it stays dead; the residual is wasted.
class Battery {
public:
    Battery() = default;
    explicit Battery(const BatteryParams& params);
    Battery(const BatteryParams& params, double capacity_pj);

    /// Removes amount/efficiency. Throws ConfigError for negative amounts.
    /// A dead battery delivers nothing; an amount beyond the remaining charge
    /// drains it completely and is not delivered.
    Draw consume(double amount_pj);

    bool alive() const { return alive_; }
    double initial_pj() const { return initial_; }
    double consumed_pj() const { return consumed_; }
    double residual_pj() const { return initial_ - consumed_; }
    double remaining_fraction() const { return alive_ ? residual_pj() / initial_ : 0.0; }
    double voltage() const;
    /// Requested energy at which the battery dies; 0 once dead.
    double headroom_pj() const;
    BatteryModel model() const { return params_->model; }

private:
    bool evaluate_alive() const;

    std::shared_ptr<const BatteryParams> params_;
    double initial_ = 0.0;
    double consumed_ = 0.0;
    bool alive_ = false;
};

/// floor(levels * remaining fraction), clamped to levels-1; dead -> 0.
int battery_level(const Battery& battery, int levels);

/// Volts at the given state of charge, linear between table rows.
double discharge_voltage(std::span<const DischargePoint> table, double state_of_charge);

}  // namespace etsim
