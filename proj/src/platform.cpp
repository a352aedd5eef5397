#include "etsim/platform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace etsim {

Topology::Topology(int node_count, std::vector<Edge> edges, std::optional<MeshInfo> mesh)
    : node_count_(node_count), edges_(std::move(edges)), mesh_(mesh) {
    if (node_count_ < 1) throw ConfigError("topology.node_count", "must be at least 1");
    if (mesh_ && mesh_->width * mesh_->height != node_count_) {
        throw ConfigError("topology.mesh", "width * height must equal node count");
    }
    lengths_.assign(static_cast<std::size_t>(node_count_) * node_count_, 0.0);
    out_.resize(static_cast<std::size_t>(node_count_));
    for (const auto& e : edges_) {
        if (e.from < 0 || e.from >= node_count_ || e.to < 0 || e.to >= node_count_) {
            throw ConfigError("topology.edges", "edge endpoint out of range");
        }
        if (e.from == e.to) throw ConfigError("topology.edges", "self edge at node " + std::to_string(e.from));
        if (!(e.length_cm > 0.0)) throw ConfigError("topology.edges", "edge length must be positive");
        auto& slot = lengths_[static_cast<std::size_t>(e.from) * node_count_ + e.to];
        if (slot > 0.0) {
            throw ConfigError("topology.edges",
                              "duplicate edge " + std::to_string(e.from) + "->" + std::to_string(e.to));
        }
        slot = e.length_cm;
        out_[static_cast<std::size_t>(e.from)].push_back(e.to);
    }
    for (auto& n : out_) std::sort(n.begin(), n.end());
}

Topology mesh(int width, int height, double link_length_cm) {
    if (width < 1) throw ConfigError("mesh.width", "must be at least 1");
    if (height < 1) throw ConfigError("mesh.height", "must be at least 1");
    if (!(link_length_cm > 0.0)) throw ConfigError("mesh.link_length_cm", "must be positive");
    std::vector<Edge> edges;
    const auto id = [width](int x, int y) { return y * width + x; };
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (x + 1 < width) {
                edges.push_back({id(x, y), id(x + 1, y), link_length_cm});
                edges.push_back({id(x + 1, y), id(x, y), link_length_cm});
            }
            if (y + 1 < height) {
                edges.push_back({id(x, y), id(x, y + 1), link_length_cm});
                edges.push_back({id(x, y + 1), id(x, y), link_length_cm});
            }
        }
    }
    return Topology(width * height, std::move(edges), MeshInfo{width, height});
}

Mapping::Mapping(std::vector<int> assignment, int module_count)
    : assignment_(std::move(assignment)), module_count_(module_count) {
    if (module_count_ < 1) throw ConfigError("mapping", "module count must be positive");
    sets_.resize(static_cast<std::size_t>(module_count_));
    for (std::size_t node = 0; node < assignment_.size(); ++node) {
        const int m = assignment_[node];
        if (m < 1 || m > module_count_) {
            throw ConfigError("mapping", "node " + std::to_string(node) + " maps to unknown module " +
                                             std::to_string(m));
        }
        sets_[static_cast<std::size_t>(m - 1)].push_back(static_cast<int>(node));
    }
    for (int m = 1; m <= module_count_; ++m) {
        if (sets_[static_cast<std::size_t>(m - 1)].empty()) {
            throw ConfigError("mapping", "module " + std::to_string(m) + " has no node");
        }
    }
}

std::vector<int> Mapping::counts() const {
    std::vector<int> n;
    n.reserve(sets_.size());
    for (const auto& s : sets_) n.push_back(static_cast<int>(s.size()));
    return n;
}

Mapping parity_map(const Topology& topology, const AppSpec& app) {
    if (app.module_count() != 3) throw ConfigError("mapping", "parity map is AES-specific (needs p = 3)");
    if (!topology.mesh_info()) throw ConfigError("mapping", "parity map needs mesh coordinates");
    std::vector<int> assignment(static_cast<std::size_t>(topology.node_count()));
    for (int node = 0; node < topology.node_count(); ++node) {
        switch (topology.x(node) % 2 + topology.y(node) % 2) {
            case 2: assignment[static_cast<std::size_t>(node)] = 1; break;
            case 0: assignment[static_cast<std::size_t>(node)] = 2; break;
            default: assignment[static_cast<std::size_t>(node)] = 3; break;
        }
    }
    return Mapping(std::move(assignment), 3);
}

std::vector<double> optimal_counts(std::span<const double> eps, int node_budget) {
    if (node_budget < 1) throw ConfigError("K", "node budget must be positive");
    if (eps.empty()) throw ConfigError("eps", "empty");
    for (double e : eps) {
        if (!(e > 0.0)) throw ConfigError("eps", "normalized energies must be positive");
    }
    const double total = std::accumulate(eps.begin(), eps.end(), 0.0);
    std::vector<double> n(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) n[i] = node_budget * eps[i] / total;
    return n;
}

LinkEnergyModel::LinkEnergyModel(std::vector<CalibrationPoint> points, bool extrapolate)
    : points_(std::move(points)), extrapolate_(extrapolate) {
    if (points_.empty()) throw ConfigError("link_energy.points", "need at least one calibration point");
    std::sort(points_.begin(), points_.end(),
              [](const auto& a, const auto& b) { return a.length_cm < b.length_cm; });
    for (std::size_t k = 0; k < points_.size(); ++k) {
        if (!(points_[k].length_cm > 0.0) || !(points_[k].pj_per_bit > 0.0)) {
            throw ConfigError("link_energy.points", "lengths and energies must be positive");
        }
        if (k > 0 && !(points_[k].pj_per_bit > points_[k - 1].pj_per_bit &&
                       points_[k].length_cm > points_[k - 1].length_cm)) {
            throw ConfigError("link_energy.points", "energy must strictly increase with length");
        }
    }
}

LinkEnergyModel LinkEnergyModel::textile() {
    return LinkEnergyModel({{1.0, 0.4472}, {10.0, 4.4472}, {20.0, 11.867}, {100.0, 53.082}});
}

double LinkEnergyModel::pj_per_bit(double length_cm) const {
    if (!(length_cm > 0.0)) throw ConfigError("length_cm", "must be positive");
    if (points_.size() == 1) {
        if (length_cm != points_.front().length_cm && !extrapolate_) {
            throw ConfigError("length_cm", "outside calibrated range; enable extrapolation");
        }
        return points_.front().pj_per_bit * length_cm / points_.front().length_cm;
    }
    if ((length_cm < points_.front().length_cm || length_cm > points_.back().length_cm) && !extrapolate_) {
        throw ConfigError("length_cm", "outside calibrated range; enable extrapolation");
    }
    std::size_t hi = 1;
    while (hi + 1 < points_.size() && points_[hi].length_cm < length_cm) ++hi;
    const auto& a = points_[hi - 1];
    const auto& b = points_[hi];
    const double t = (length_cm - a.length_cm) / (b.length_cm - a.length_cm);
    const double e = a.pj_per_bit + t * (b.pj_per_bit - a.pj_per_bit);
    if (!(e > 0.0)) throw ConfigError("length_cm", "extrapolated energy is not positive");
    return e;
}

double packet_energy(const LinkEnergyModel& model, double length_cm, int packet_bits) {
    if (packet_bits <= 0) throw ConfigError("packet_bits", "must be positive");
    return model.pj_per_bit(length_cm) * packet_bits;
}

std::vector<DischargePoint> BatteryParams::default_discharge_table() {
    return {{1.0, 3.6}, {0.8, 3.55}, {0.5, 3.5}, {0.2, 3.4}, {0.05, 3.1}, {0.0, 2.5}};
}

std::vector<Violation> validate(const BatteryParams& params) {
    std::vector<Violation> out;
    if (!(params.capacity_pj > 0.0)) out.push_back({"battery.capacity_pj", "must be positive"});
    if (!(params.efficiency > 0.0) || params.efficiency > 1.0) {
        out.push_back({"battery.efficiency", "must be in (0, 1]"});
    }
    if (params.model == BatteryModel::ThinFilm) {
        const auto& t = params.discharge_table;
        if (t.size() < 2) {
            out.push_back({"battery.discharge_table", "need at least two rows"});
        } else {
            if (t.front().state_of_charge != 1.0 || t.back().state_of_charge != 0.0) {
                out.push_back({"battery.discharge_table", "state of charge must run from 1.0 to 0.0"});
            }
            for (std::size_t k = 1; k < t.size(); ++k) {
                if (!(t[k].state_of_charge < t[k - 1].state_of_charge)) {
                    out.push_back({"battery.discharge_table", "state of charge must strictly decrease"});
                    break;
                }
                if (t[k].volts > t[k - 1].volts) {
                    out.push_back({"battery.discharge_table", "volts must not increase as charge drops"});
                    break;
                }
            }
        }
    }
    return out;
}

double discharge_voltage(std::span<const DischargePoint> table, double soc) {
    if (soc >= table.front().state_of_charge) return table.front().volts;
    for (std::size_t k = 1; k < table.size(); ++k) {
        const auto& hi = table[k - 1];
        const auto& lo = table[k];
        if (soc >= lo.state_of_charge) {
            const double t = (soc - lo.state_of_charge) / (hi.state_of_charge - lo.state_of_charge);
            return lo.volts + t * (hi.volts - lo.volts);
        }
    }
    return table.back().volts;
}

Battery::Battery(const BatteryParams& params) : Battery(params, params.capacity_pj) {}

Battery::Battery(const BatteryParams& params, double capacity_pj)
    : params_(std::make_shared<const BatteryParams>(params)), initial_(capacity_pj) {
    if (auto v = validate(params); !v.empty()) throw ConfigError(join_violations(v));
    if (!(capacity_pj > 0.0)) throw ConfigError("battery.capacity_pj", "must be positive");
    alive_ = evaluate_alive();
}

double Battery::voltage() const {
    if (params_->model == BatteryModel::Ideal) return params_->discharge_table.front().volts;
    return discharge_voltage(params_->discharge_table, residual_pj() / initial_);
}

double Battery::headroom_pj() const {
    if (!alive_) return 0.0;
    double floor_soc = 0.0;
    if (params_->model == BatteryModel::ThinFilm) {
        const auto& table = params_->discharge_table;
        for (std::size_t k = 1; k < table.size(); ++k) {
            const auto& hi = table[k - 1];
            const auto& lo = table[k];
            if (lo.volts < params_->cutoff_volts && hi.volts >= params_->cutoff_volts) {
                const double t = (params_->cutoff_volts - lo.volts) / (hi.volts - lo.volts);
                floor_soc = lo.state_of_charge + t * (hi.state_of_charge - lo.state_of_charge);
                break;
            }
        }
    }
    return std::max(0.0, residual_pj() - floor_soc * initial_) * params_->efficiency;
}

bool Battery::evaluate_alive() const {
    if (consumed_ >= initial_) return false;
    if (params_->model == BatteryModel::Ideal) return true;
    return voltage() >= params_->cutoff_volts;
}

Draw Battery::consume(double amount_pj) {
    if (amount_pj < 0.0 || std::isnan(amount_pj)) throw ConfigError("amount", "negative energy draw");
    if (!alive_) return {};
    const double needed = amount_pj / params_->efficiency;
    const double remaining = initial_ - consumed_;
    Draw d;
    if (needed <= remaining) {
        consumed_ += needed;
        d = {needed, true};
    } else {
        consumed_ = initial_;
        d = {remaining, false};
    }
    alive_ = evaluate_alive();
    return d;
}

int battery_level(const Battery& battery, int levels) {
    if (levels < 2) throw ConfigError("battery.levels", "need at least 2 levels");
    if (!battery.alive()) return 0;
    const int level = static_cast<int>(std::floor(levels * battery.remaining_fraction()));
    return std::clamp(level, 0, levels - 1);
}

}  // namespace etsim
