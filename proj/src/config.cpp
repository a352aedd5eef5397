#include "etsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace etsim {

MeshInfo parse_mesh(std::string_view text, const std::string& field) {
    const auto x = text.find('x');
    if (x == std::string_view::npos) throw ConfigError(field, "expected WxH, got '" + std::string(text) + "'");
    MeshInfo m;
    const auto parse = [&](std::string_view part, int& out) {
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc{} || ptr != part.data() + part.size()) {
            throw ConfigError(field, "expected WxH, got '" + std::string(text) + "'");
        }
    };
    parse(text.substr(0, x), m.width);
    parse(text.substr(x + 1), m.height);
    if (m.width < 1 || m.height < 1) {
        throw ConfigError(field, "mesh dimensions must be at least 1, got '" + std::string(text) + "'");
    }
    return m;
}

std::string mesh_name(const MeshInfo& m) { return std::to_string(m.width) + "x" + std::to_string(m.height); }

namespace {

template <typename T>
T get(const json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(field, "wrong type: " + j.dump());
    }
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!ok.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
}

const char* battery_model_name(BatteryModel m) { return m == BatteryModel::Ideal ? "ideal" : "thin-film"; }

BatteryModel parse_battery_model(const std::string& s, const std::string& field) {
    if (s == "ideal") return BatteryModel::Ideal;
    if (s == "thin-film") return BatteryModel::ThinFilm;
    throw ConfigError(field, "expected 'ideal' or 'thin-film', got '" + s + "'");
}

Algorithm parse_algorithm(const std::string& s, const std::string& field) {
    if (s == "ear") return Algorithm::Ear;
    if (s == "sdr") return Algorithm::Sdr;
    throw ConfigError(field, "expected 'ear' or 'sdr', got '" + s + "'");
}

void apply_battery(BatteryParams& b, const json& j, const std::string& where) {
    check_keys(j, where, {"model", "capacity_pj", "cutoff_volts", "discharge_table", "efficiency"});
    if (j.contains("model")) b.model = parse_battery_model(get<std::string>(j["model"], where + ".model"), where + ".model");
    if (j.contains("capacity_pj")) b.capacity_pj = get<double>(j["capacity_pj"], where + ".capacity_pj");
    if (j.contains("cutoff_volts")) b.cutoff_volts = get<double>(j["cutoff_volts"], where + ".cutoff_volts");
    if (j.contains("efficiency")) b.efficiency = get<double>(j["efficiency"], where + ".efficiency");
    if (j.contains("discharge_table")) {
        b.discharge_table.clear();
        for (const auto& row : j["discharge_table"]) {
            const auto pair = get<std::vector<double>>(row, where + ".discharge_table");
            if (pair.size() != 2) throw ConfigError(where + ".discharge_table", "rows are [state_of_charge, volts]");
            b.discharge_table.push_back({pair[0], pair[1]});
        }
    }
}

json battery_json(const BatteryParams& b) {
    json table = json::array();
    for (const auto& p : b.discharge_table) table.push_back({p.state_of_charge, p.volts});
    return {{"model", battery_model_name(b.model)},
            {"capacity_pj", b.capacity_pj},
            {"cutoff_volts", b.cutoff_volts},
            {"discharge_table", table},
            {"efficiency", b.efficiency}};
}

MeshInfo mesh_from_json(const json& j, const std::string& field) {
    if (j.is_string()) return parse_mesh(j.get<std::string>(), field);
    check_keys(j, field, {"width", "height"});
    MeshInfo m{get<int>(j.at("width"), field + ".width"), get<int>(j.at("height"), field + ".height")};
    if (m.width < 1) throw ConfigError(field + ".width", "must be at least 1");
    if (m.height < 1) throw ConfigError(field + ".height", "must be at least 1");
    return m;
}

void apply_platform(ExperimentConfig& c, const json& j) {
    check_keys(j, "platform", {"mesh", "link_length_cm", "nodes", "edges", "link_energy", "battery", "capacity_jitter",
                               "battery_levels", "mapping"});
    if (j.contains("mesh")) {
        if (j["mesh"].is_null()) {
            c.mesh.reset();
        } else {
            c.mesh = mesh_from_json(j["mesh"], "platform.mesh");
        }
    }
    if (j.contains("link_length_cm")) c.link_length_cm = get<double>(j["link_length_cm"], "platform.link_length_cm");
    if (j.contains("nodes")) c.explicit_nodes = get<int>(j["nodes"], "platform.nodes");
    if (j.contains("edges")) {
        c.edges.clear();
        for (const auto& e : j["edges"]) {
            const auto v = get<std::vector<double>>(e, "platform.edges");
            if (v.size() != 3) throw ConfigError("platform.edges", "edges are [from, to, length_cm]");
            c.edges.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), v[2]});
        }
        if (!j.contains("mesh")) c.mesh.reset();
    }
    if (j.contains("link_energy")) {
        const auto& le = j["link_energy"];
        check_keys(le, "platform.link_energy", {"points", "extrapolate"});
        if (le.contains("points")) {
            c.link_points.clear();
            for (const auto& p : le["points"]) {
                const auto v = get<std::vector<double>>(p, "platform.link_energy.points");
                if (v.size() != 2) throw ConfigError("platform.link_energy.points", "points are [length_cm, pj_per_bit]");
                c.link_points.push_back({v[0], v[1]});
            }
        }
        if (le.contains("extrapolate")) c.link_extrapolate = get<bool>(le["extrapolate"], "platform.link_energy.extrapolate");
    }
    if (j.contains("battery")) apply_battery(c.battery, j["battery"], "platform.battery");
    if (j.contains("capacity_jitter")) c.capacity_jitter = get<double>(j["capacity_jitter"], "platform.capacity_jitter");
    if (j.contains("battery_levels")) c.battery_levels = get<int>(j["battery_levels"], "platform.battery_levels");
    if (j.contains("mapping")) {
        if (j["mapping"].is_string()) {
            c.mapping_rule = j["mapping"].get<std::string>();
            if (c.mapping_rule != "parity") throw ConfigError("platform.mapping", "unknown rule '" + c.mapping_rule + "'");
            c.mapping.clear();
        } else {
            c.mapping_rule = "explicit";
            c.mapping = get<std::vector<int>>(j["mapping"], "platform.mapping");
        }
    }
}

void apply_control(ControlConfig& c, const json& j) {
    check_keys(j, "control", {"slot_cycles", "download_cycles", "medium_width_bits", "report_bits", "e_med_pj_per_bit",
                              "deadlock_threshold_frames", "finite_controllers", "controller_count", "clock_mhz",
                              "controller_power_mw", "compute_cycles", "idle_leakage", "controller_battery"});
    const auto set_int = [&](const char* key, int& out) {
        if (j.contains(key)) out = get<int>(j[key], std::string("control.") + key);
    };
    set_int("slot_cycles", c.slot_cycles);
    set_int("download_cycles", c.download_cycles);
    set_int("medium_width_bits", c.medium_width_bits);
    set_int("report_bits", c.report_bits);
    set_int("deadlock_threshold_frames", c.deadlock_threshold_frames);
    set_int("controller_count", c.controller_count);
    set_int("compute_cycles", c.compute_cycles);
    if (j.contains("e_med_pj_per_bit")) c.e_med_pj_per_bit = get<double>(j["e_med_pj_per_bit"], "control.e_med_pj_per_bit");
    if (j.contains("finite_controllers")) c.finite_controllers = get<bool>(j["finite_controllers"], "control.finite_controllers");
    if (j.contains("clock_mhz")) c.clock_mhz = get<double>(j["clock_mhz"], "control.clock_mhz");
    if (j.contains("idle_leakage")) c.idle_leakage = get<bool>(j["idle_leakage"], "control.idle_leakage");
    if (j.contains("controller_power_mw")) {
        c.power.clear();
        for (const auto& p : j["controller_power_mw"]) {
            check_keys(p, "control.controller_power_mw", {"nodes", "dynamic", "leakage"});
            c.power.push_back({get<int>(p.at("nodes"), "control.controller_power_mw.nodes"),
                               get<double>(p.at("dynamic"), "control.controller_power_mw.dynamic"),
                               get<double>(p.at("leakage"), "control.controller_power_mw.leakage")});
        }
    }
    if (j.contains("controller_battery")) apply_battery(c.controller_battery, j["controller_battery"], "control.controller_battery");
}

}  // namespace

AppSpec app_from_json(const json& j) {
    check_keys(j, "app", {"modules", "flow", "packet_bits"});
    AppSpec app;
    app.modules.clear();
    if (!j.contains("modules") || !j.contains("flow")) throw ConfigError("app", "needs modules and flow");
    for (const auto& m : j["modules"]) {
        check_keys(m, "app.modules", {"id", "name", "energy_pj", "compute_cycles"});
        ModuleSpec spec;
        spec.id = get<int>(m.at("id"), "app.modules.id");
        spec.name = m.contains("name") ? get<std::string>(m["name"], "app.modules.name") : "";
        spec.energy_pj = get<double>(m.at("energy_pj"), "app.modules.energy_pj");
        if (m.contains("compute_cycles")) spec.compute_cycles = get<int>(m["compute_cycles"], "app.modules.compute_cycles");
        app.modules.push_back(spec);
    }
    app.flow = get<std::vector<int>>(j["flow"], "app.flow");
    if (j.contains("packet_bits")) app.packet_bits = get<int>(j["packet_bits"], "app.packet_bits");
    if (auto v = validate(app); !v.empty()) throw ConfigError("app." + v.front().field, v.front().message);
    return app;
}

json to_json(const AppSpec& app) {
    json modules = json::array();
    for (const auto& m : app.modules) {
        modules.push_back({{"id", m.id}, {"name", m.name}, {"energy_pj", m.energy_pj}, {"compute_cycles", m.compute_cycles}});
    }
    return {{"modules", modules}, {"flow", app.flow}, {"packet_bits", app.packet_bits}};
}

void apply_json(ExperimentConfig& c, const json& j) {
    check_keys(j, "", {"app", "platform", "routing", "control", "workload", "bound", "sweep", "seed", "max_cycles"});
    if (j.contains("app")) {
        if (j["app"].is_string()) {
            c.app_name = j["app"].get<std::string>();
            c.app = app_preset(c.app_name);
        } else {
            c.app_name = "inline";
            c.app = app_from_json(j["app"]);
        }
    }
    if (j.contains("platform")) apply_platform(c, j["platform"]);
    if (j.contains("routing")) {
        const auto& r = j["routing"];
        check_keys(r, "routing", {"algorithm", "q"});
        if (r.contains("algorithm")) c.algorithm = parse_algorithm(get<std::string>(r["algorithm"], "routing.algorithm"), "routing.algorithm");
        if (r.contains("q")) c.q = get<double>(r["q"], "routing.q");
    }
    if (j.contains("control")) apply_control(c.control, j["control"]);
    if (j.contains("workload")) {
        const auto& w = j["workload"];
        check_keys(w, "workload", {"concurrent_jobs", "buffer_capacity", "origin_node", "hop_cycles"});
        if (w.contains("concurrent_jobs")) c.workload.concurrent_jobs = get<int>(w["concurrent_jobs"], "workload.concurrent_jobs");
        if (w.contains("buffer_capacity")) c.workload.buffer_capacity = get<int>(w["buffer_capacity"], "workload.buffer_capacity");
        if (w.contains("origin_node")) c.workload.origin_node = get<int>(w["origin_node"], "workload.origin_node");
        if (w.contains("hop_cycles")) c.hop_cycles = get<int>(w["hop_cycles"], "workload.hop_cycles");
    }
    if (j.contains("bound")) {
        const auto& b = j["bound"];
        check_keys(b, "bound", {"comm"});
        if (b.contains("comm")) {
            if (b["comm"].is_string()) {
                const auto s = b["comm"].get<std::string>();
                if (s == "zero") {
                    c.bound_comm = {BoundComm::Kind::Zero, {}};
                } else if (s == "min-hop") {
                    c.bound_comm = {BoundComm::Kind::MinHop, {}};
                } else {
                    throw ConfigError("bound.comm", "expected 'zero', 'min-hop' or a vector, got '" + s + "'");
                }
            } else {
                c.bound_comm = {BoundComm::Kind::Custom, get<std::vector<double>>(b["comm"], "bound.comm")};
            }
        }
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        check_keys(s, "sweep", {"sizes", "controller_counts"});
        if (s.contains("sizes")) {
            c.sweep_sizes.clear();
            for (const auto& m : s["sizes"]) c.sweep_sizes.push_back(mesh_from_json(m, "sweep.sizes"));
            if (c.sweep_sizes.empty()) throw ConfigError("sweep.sizes", "need at least one size");
        }
        if (s.contains("controller_counts")) {
            c.controller_counts = get<std::vector<int>>(s["controller_counts"], "sweep.controller_counts");
            if (c.controller_counts.empty()) throw ConfigError("sweep.controller_counts", "need at least one count");
            for (int n : c.controller_counts) {
                if (n < 1) throw ConfigError("sweep.controller_counts", "counts must be at least 1");
            }
        }
    }
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j["seed"], "seed");
    if (j.contains("max_cycles")) c.max_cycles = get<std::int64_t>(j["max_cycles"], "max_cycles");
}

json to_json(const ExperimentConfig& c) {
    json platform;
    if (c.mesh) {
        platform["mesh"] = mesh_name(*c.mesh);
    } else {
        platform["mesh"] = nullptr;
        platform["nodes"] = c.explicit_nodes;
        json edges = json::array();
        for (const auto& e : c.edges) edges.push_back({e.from, e.to, e.length_cm});
        platform["edges"] = edges;
    }
    platform["link_length_cm"] = c.link_length_cm;
    json points = json::array();
    for (const auto& p : c.link_points) points.push_back({p.length_cm, p.pj_per_bit});
    platform["link_energy"] = {{"points", points}, {"extrapolate", c.link_extrapolate}};
    platform["battery"] = battery_json(c.battery);
    platform["capacity_jitter"] = c.capacity_jitter;
    platform["battery_levels"] = c.battery_levels;
    if (c.mapping_rule == "parity") {
        platform["mapping"] = "parity";
    } else {
        platform["mapping"] = c.mapping;
    }

    json power = json::array();
    for (const auto& p : c.control.power) power.push_back({{"nodes", p.nodes}, {"dynamic", p.dynamic_mw}, {"leakage", p.leakage_mw}});
    json control = {{"slot_cycles", c.control.slot_cycles},
                    {"download_cycles", c.control.download_cycles},
                    {"medium_width_bits", c.control.medium_width_bits},
                    {"report_bits", c.control.report_bits},
                    {"e_med_pj_per_bit", c.control.e_med_pj_per_bit},
                    {"deadlock_threshold_frames", c.control.deadlock_threshold_frames},
                    {"finite_controllers", c.control.finite_controllers},
                    {"controller_count", c.control.controller_count},
                    {"clock_mhz", c.control.clock_mhz},
                    {"controller_power_mw", power},
                    {"compute_cycles", c.control.compute_cycles},
                    {"idle_leakage", c.control.idle_leakage},
                    {"controller_battery", battery_json(c.control.controller_battery)}};

    json comm;
    switch (c.bound_comm.kind) {
        case BoundComm::Kind::Zero: comm = "zero"; break;
        case BoundComm::Kind::MinHop: comm = "min-hop"; break;
        case BoundComm::Kind::Custom: comm = c.bound_comm.custom; break;
    }
    json sizes = json::array();
    for (const auto& m : c.sweep_sizes) sizes.push_back(mesh_name(m));

    return {{"app", c.app_name == "inline" ? to_json(c.app) : json(c.app_name)},
            {"platform", platform},
            {"routing", {{"algorithm", to_string(c.algorithm)}, {"q", c.q}}},
            {"control", control},
            {"workload",
             {{"concurrent_jobs", c.workload.concurrent_jobs},
              {"buffer_capacity", c.workload.buffer_capacity},
              {"origin_node", c.workload.origin_node},
              {"hop_cycles", c.hop_cycles}}},
            {"bound", {{"comm", comm}}},
            {"sweep", {{"sizes", sizes}, {"controller_counts", c.controller_counts}}},
            {"seed", c.seed},
            {"max_cycles", c.max_cycles}};
}

Scenario make_scenario(const ExperimentConfig& c, std::optional<MeshInfo> size) {
    Scenario s;
    s.app = c.app;
    require_valid(s.app);
    const auto m = size ? size : c.mesh;
    if (m) {
        s.topology = mesh(m->width, m->height, c.link_length_cm);
    } else {
        if (c.explicit_nodes < 1) throw ConfigError("platform.nodes", "explicit topology needs a node count");
        s.topology = Topology(c.explicit_nodes, c.edges);
    }
    if (c.mapping_rule == "parity") {
        s.mapping = parity_map(s.topology, s.app);
    } else {
        if (static_cast<int>(c.mapping.size()) != s.topology.node_count()) {
            throw ConfigError("platform.mapping", "explicit mapping needs one entry per node");
        }
        s.mapping = Mapping(c.mapping, s.app.module_count());
    }
    s.link = LinkEnergyModel(c.link_points, c.link_extrapolate);
    s.battery = c.battery;
    s.battery_levels = c.battery_levels;
    s.q = c.q;
    s.algorithm = c.algorithm;
    s.control = c.control;
    s.workload = c.workload;
    s.hop_cycles = c.hop_cycles;
    s.capacity_jitter = c.capacity_jitter;
    s.seed = c.seed;
    s.max_cycles = c.max_cycles;
    if (auto v = validate(s); !v.empty()) throw ConfigError(v.front().field, v.front().message);
    return s;
}

std::vector<double> bound_comm_energy(const ExperimentConfig& c, const Scenario& s) {
    const auto p = static_cast<std::size_t>(s.app.module_count());
    switch (c.bound_comm.kind) {
        case BoundComm::Kind::Zero: return std::vector<double>(p, 0.0);
        case BoundComm::Kind::Custom:
            if (c.bound_comm.custom.size() != p) throw ConfigError("bound.comm", "custom vector needs one entry per module");
            return c.bound_comm.custom;
        case BoundComm::Kind::MinHop: break;
    }
    if (s.topology.edges().empty()) return std::vector<double>(p, 0.0);
    double best = kInfinity;
    for (const auto& e : s.topology.edges()) best = std::min(best, packet_energy(s.link, e.length_cm, s.app.packet_bits));
    return std::vector<double>(p, best);
}

}  // namespace etsim
