#include "etsim/control.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace etsim {

std::vector<Violation> validate(const ControlConfig& c) {
    std::vector<Violation> out;
    if (c.slot_cycles < 1) out.push_back({"control.slot_cycles", "must be at least 1"});
    if (c.download_cycles < 1) out.push_back({"control.download_cycles", "must be at least 1"});
    if (c.medium_width_bits < 1) out.push_back({"control.medium_width_bits", "must be at least 1"});
    if (c.report_bits < 1) out.push_back({"control.report_bits", "must be at least 1"});
    if (c.e_med_pj_per_bit < 0.0) out.push_back({"control.e_med_pj_per_bit", "must be non-negative"});
    if (c.deadlock_threshold_frames < 0) out.push_back({"control.deadlock_threshold_frames", "must be non-negative"});
    if (c.controller_count < 1) out.push_back({"control.controller_count", "must be at least 1"});
    if (!(c.clock_mhz > 0.0)) out.push_back({"control.clock_mhz", "must be positive"});
    if (c.compute_cycles < 0) out.push_back({"control.compute_cycles", "must be non-negative"});
    if (c.power.empty()) out.push_back({"control.controller_power", "need at least one entry"});
    for (const auto& p : c.power) {
        if (p.nodes < 1 || p.dynamic_mw < 0.0 || p.leakage_mw < 0.0) {
            out.push_back({"control.controller_power", "entries need nodes >= 1 and non-negative power"});
            break;
        }
    }
    if (c.finite_controllers) {
        for (auto& v : validate(c.controller_battery)) {
            out.push_back({"control.controller_" + v.field, v.message});
        }
    }
    return out;
}

TdmaFrame plan_frame(int node_count, const ControlConfig& config) {
    if (node_count < 1) throw ConfigError("K", "need at least one node");
    if (auto v = validate(config); !v.empty()) throw ConfigError(join_violations(v));
    return {node_count, config.slot_cycles, config.download_cycles, config.medium_width_bits};
}

std::optional<StatusReport> upload_report(NodeRuntime& node, bool deadlock, const ControlConfig& config,
                                          int battery_levels, int locked_port) {
    if (!node.alive()) return std::nullopt;
    // Level is sampled before the report is paid for.
    StatusReport r{node.id, battery_level(node.battery, battery_levels), deadlock, deadlock ? locked_port : kNoNode};
    node.spend(config.report_bits * config.e_med_pj_per_bit, EnergyKind::Overhead);
    return r;
}

ReportSet collect_reports(std::span<NodeRuntime> nodes, const std::vector<bool>& deadlock_flags,
                          const ControlConfig& config, int battery_levels) {
    ReportSet out;
    for (auto& n : nodes) {
        const bool flag = !deadlock_flags.empty() && deadlock_flags[static_cast<std::size_t>(n.id)];
        if (auto r = upload_report(n, flag, config, battery_levels)) out.push_back(*r);
    }
    return out;
}

bool detect_deadlock(std::int64_t stall_cycles, int threshold_frames, const TdmaFrame& frame) {
    return stall_cycles > threshold_frames * frame.frame_length();
}

std::int64_t download_bits(int node_count, int module_count) {
    const int entry_bits = std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(node_count - 1))));
    const std::int64_t per_node = static_cast<std::int64_t>(module_count) * entry_bits;
    return static_cast<std::int64_t>(node_count) * ((per_node + 7) / 8 * 8);
}

std::pair<double, double> controller_pj_per_cycle(const ControlConfig& config, int node_count) {
    const ControllerPower* ref = &config.power.front();
    for (const auto& p : config.power) {
        if (p.nodes <= node_count && (ref->nodes > node_count || p.nodes > ref->nodes)) ref = &p;
    }
    const double scale = static_cast<double>(node_count) / ref->nodes;
    // mW / MHz = nJ per cycle.
    const double k = 1000.0 / config.clock_mhz;
    return {ref->dynamic_mw * scale * k, ref->leakage_mw * scale * k};
}

void controller_view(const ReportSet& reports, int node_count, std::vector<int>& levels,
                     std::vector<bool>& deadlocked) {
    levels.assign(static_cast<std::size_t>(node_count), 0);
    deadlocked.assign(static_cast<std::size_t>(node_count), false);
    for (const auto& r : reports) {
        levels[static_cast<std::size_t>(r.node)] = r.battery_level;
        deadlocked[static_cast<std::size_t>(r.node)] = r.deadlock;
    }
}

ControllerBank::ControllerBank(const ControlConfig& config, int node_count, int module_count)
    : config_(config), node_count_(node_count), module_count_(module_count) {
    if (auto v = validate(config_); !v.empty()) throw ConfigError(join_violations(v));
    const int count = config_.finite_controllers ? config_.controller_count : 1;
    for (int c = 0; c < count; ++c) {
        Controller ctrl;
        ctrl.id = c;
        if (config_.finite_controllers) ctrl.battery = Battery(config_.controller_battery);
        controllers_.push_back(std::move(ctrl));
    }
    active_ = 0;
    controllers_.front().active = true;
}

void ControllerBank::update_locked(const ReportSet& reports, const RoutingContext& ctx) {
    locked_.resize(static_cast<std::size_t>(node_count_));
    std::vector<bool> heard(static_cast<std::size_t>(node_count_), false);
    std::vector<const StatusReport*> by_node(static_cast<std::size_t>(node_count_), nullptr);
    for (const auto& r : reports) {
        heard[static_cast<std::size_t>(r.node)] = true;
        by_node[static_cast<std::size_t>(r.node)] = &r;
    }
    for (int n = 0; n < node_count_; ++n) {
        auto& ports = locked_[static_cast<std::size_t>(n)];
        const auto* r = by_node[static_cast<std::size_t>(n)];
        if (!r || !r->deadlock) {
            ports.clear();
            continue;
        }
        const auto add = [&ports](int s) {
            if (std::find(ports.begin(), ports.end(), s) == ports.end()) ports.push_back(s);
        };
        const auto& out = ctx.topology->out_neighbors(n);
        if (r->locked_port != kNoNode) add(r->locked_port);
        for (int s : out) {
            if (!heard[static_cast<std::size_t>(s)]) add(s);
        }
        // Every port tried, or no route left: start over, keeping only the
        // silent ones.
        if (ports.size() >= out.size() || r->locked_port == kNoNode) {
            std::erase_if(ports, [&](int s) { return heard[static_cast<std::size_t>(s)]; });
        }
        std::sort(ports.begin(), ports.end());
    }
}

BlockedPorts ControllerBank::blocked_ports(const ReportSet& reports, const RoutingContext& ctx) const {
    BlockedPorts out = locked_;
    if (ctx.params.algorithm != Algorithm::Ear) return out;
    // No report means no battery left; EAR prices that at infinity.
    std::vector<bool> heard(static_cast<std::size_t>(node_count_), false);
    for (const auto& r : reports) heard[static_cast<std::size_t>(r.node)] = true;
    for (int n = 0; n < node_count_; ++n) {
        auto& ports = out[static_cast<std::size_t>(n)];
        for (int s : ctx.topology->out_neighbors(n)) {
            if (!heard[static_cast<std::size_t>(s)] && std::find(ports.begin(), ports.end(), s) == ports.end()) {
                ports.push_back(s);
            }
        }
    }
    return out;
}

void ControllerBank::fail_over() {
    controllers_[static_cast<std::size_t>(active_)].active = false;
    active_ = -1;
    for (auto& c : controllers_) {
        if (c.battery.alive()) {
            c.active = true;
            c.has_reports = false;
            active_ = c.id;
            return;
        }
    }
}

ControllerBank::Tick ControllerBank::tick(const ReportSet& reports, const TdmaFrame& frame,
                                          const RoutingContext& ctx, const RoutingTables& prev) {
    Tick out;
    if (!alive()) return out;
    auto& ctrl = controllers_[static_cast<std::size_t>(active_)];
    std::vector<int> levels;
    std::vector<bool> deadlocked;
    controller_view(reports, node_count_, levels, deadlocked);
    update_locked(reports, ctx);
    // A standing deadlock flag asks for a retry even when nothing else changed.
    const bool any_lock = std::find(deadlocked.begin(), deadlocked.end(), true) != deadlocked.end();
    const bool changed = !ctrl.has_reports || reports != ctrl.last_reports || any_lock;

    std::optional<RoutingSnapshot> routes;
    if (changed) {
        routes = compute_routes(*ctx.topology, *ctx.mapping, ctx.params, levels, deadlocked, prev,
                                blocked_ports(reports, ctx));
        ctrl.last_reports = reports;
        ctrl.has_reports = true;
        ++recomputations_;
    }

    if (!config_.finite_controllers) {
        out.routes = std::move(routes);
        return out;
    }

    const auto [dynamic, leakage] = controller_pj_per_cycle(config_, node_count_);
    const double leak_frame = leakage * static_cast<double>(frame.frame_length());
    double active_cost = leak_frame;
    if (changed) {
        active_cost += dynamic * config_.compute_cycles +
                       static_cast<double>(download_bits(node_count_, module_count_)) * config_.e_med_pj_per_bit;
    }
    const auto frame_len = frame.frame_length();
    const auto note_death = [&](const Battery& b, double cost) {
        const double headroom = b.headroom_pj();
        if (cost < headroom || cost <= 0.0) return;
        const auto at = static_cast<std::int64_t>(std::ceil(static_cast<double>(frame_len) * headroom / cost));
        out.death_offset = std::max(out.death_offset, std::min(at, frame_len));
    };
    note_death(ctrl.battery, active_cost);
    const Draw d = ctrl.battery.consume(active_cost);
    out.energy_pj += d.drawn_pj;
    if (config_.idle_leakage) {
        for (auto& c : controllers_) {
            if (c.active || !c.battery.alive()) continue;
            note_death(c.battery, leak_frame);
            out.energy_pj += c.battery.consume(leak_frame).drawn_pj;
        }
    }
    if (d.delivered) out.routes = std::move(routes);
    if (!ctrl.battery.alive()) {
        fail_over();
        out.failover = true;
    }
    return out;
}

}  // namespace etsim
