#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "etsim/node.hpp"
#include "etsim/routing.hpp"

namespace etsim {

struct ControllerPower {
    int nodes = 16;  ///< mesh size the measurement refers to
    double dynamic_mw = 6.94;
    double leakage_mw = 0.57;
};

struct ControlConfig {
    int slot_cycles = 8;
    int download_cycles = 2048;
    int medium_width_bits = 2;
    int report_bits = 8;
    double e_med_pj_per_bit = 4.4472;  ///< shared medium, 10 cm line
    int deadlock_threshold_frames = 4;

    /// false: one controller with unlimited energy.
    bool finite_controllers = false;
    int controller_count = 1;
    double clock_mhz = 100.0;
    /// Measured points; power for other sizes scales linearly in K from the
    /// nearest smaller-or-equal entry (or the first).
    std::vector<ControllerPower> power = {ControllerPower{}};
    /// Cycles of dynamic power per route recomputation.
    int compute_cycles = 256;
    /// Idle controllers keep leaking.
    bool idle_leakage = true;
    BatteryParams controller_battery{};
};

std::vector<Violation> validate(const ControlConfig& config);

/// K upload slots followed by one download phase.
struct TdmaFrame {
    int nodes = 1;
    int slot_cycles = 1;
    int download_cycles = 1;
    int medium_width_bits = 2;

    std::int64_t frame_length() const {
        return static_cast<std::int64_t>(nodes) * slot_cycles + download_cycles;
    }
    std::int64_t slot_offset(int node) const { return static_cast<std::int64_t>(node) * slot_cycles; }
    std::int64_t download_offset() const { return static_cast<std::int64_t>(nodes) * slot_cycles; }
};

TdmaFrame plan_frame(int node_count, const ControlConfig& config);

struct StatusReport {
    int node = 0;
    int battery_level = 0;
    bool deadlock = false;
    int locked_port = kNoNode;  ///< successor the stalled packet waits on

    bool operator==(const StatusReport&) const = default;
};

/// Live nodes only, ascending node id.
using ReportSet = std::vector<StatusReport>;

/// Upload slot of one node: a dead node stays silent; a live one pays
/// report_bits * e_med as overhead.
std::optional<StatusReport> upload_report(NodeRuntime& node, bool deadlock, const ControlConfig& config,
                                          int battery_levels, int locked_port = kNoNode);

/// All upload slots of one frame in node order.
ReportSet collect_reports(std::span<NodeRuntime> nodes, const std::vector<bool>& deadlock_flags,
                          const ControlConfig& config, int battery_levels);

/// A packet queued longer than threshold_frames frames.
bool detect_deadlock(std::int64_t stall_cycles, int threshold_frames, const TdmaFrame& frame);

/// Download payload: p successor entries of ceil(log2 K) bits per node,
/// rounded up to whole bytes.
std::int64_t download_bits(int node_count, int module_count);

/// (dynamic, leakage) in pJ per cycle for a controller serving node_count nodes.
std::pair<double, double> controller_pj_per_cycle(const ControlConfig& config, int node_count);

struct RoutingContext {
    const Topology* topology = nullptr;
    const Mapping* mapping = nullptr;
    RoutingParams params;
};

struct Controller {
    int id = 0;
    bool active = false;
    Battery battery;  ///< unused with unlimited controllers
    ReportSet last_reports;
    bool has_reports = false;
};

/// Active and idle controllers with failover.
class ControllerBank {
public:
    ControllerBank(const ControlConfig& config, int node_count, int module_count);

    struct Tick {
        std::optional<RoutingSnapshot> routes;  ///< set when routes were recomputed and downloaded
        bool failover = false;
        double energy_pj = 0.0;  ///< drawn from controller batteries this frame
        /// Cycle within the frame at which the last controller dying in this
        /// frame ran out, assuming a uniform draw over the frame; -1 if none died.
        std::int64_t death_offset = -1;
    };

    /// End-of-frame work: recompute if the reports changed, download, and
    /// pay for the frame. A deadlocked node has its reported port and its
    /// silent neighbours blocked; the set grows while the node stays in
    /// deadlock, so recovery does not bounce between two blocked ports.
    /// Under EAR every port into a silent node is blocked.
    Tick tick(const ReportSet& reports, const TdmaFrame& frame, const RoutingContext& ctx,
              const RoutingTables& prev);

    bool alive() const { return active_ >= 0; }
    int active_index() const { return active_; }
    const std::vector<Controller>& controllers() const { return controllers_; }
    std::int64_t recomputations() const { return recomputations_; }
    const BlockedPorts& locked_ports() const { return locked_; }

private:
    void fail_over();
    BlockedPorts blocked_ports(const ReportSet& reports, const RoutingContext& ctx) const;
    void update_locked(const ReportSet& reports, const RoutingContext& ctx);

    ControlConfig config_;
    int node_count_;
    int module_count_;
    std::vector<Controller> controllers_;
    int active_ = -1;
    std::int64_t recomputations_ = 0;
    BlockedPorts locked_;
};

/// Per-node levels and deadlock flags as the controller sees them; silent
/// nodes read as level 0, not deadlocked.
void controller_view(const ReportSet& reports, int node_count, std::vector<int>& levels,
                     std::vector<bool>& deadlocked);

}  // namespace etsim
