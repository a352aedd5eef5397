#include "etsim/app_model.hpp"

#include <algorithm>
#include <set>

namespace etsim {

std::string join_violations(const std::vector<Violation>& violations) {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.field + ": " + v.message;
    }
    return out;
}

AppSpec aes_preset(int compute_cycles) {
    AppSpec app;
    app.modules = {
        {1, "SubBytes/ShiftRows", 120.1, compute_cycles},
        {2, "MixColumns", 73.34, compute_cycles},
        {3, "KeyExpansion/AddRoundKey", 176.55, compute_cycles},
    };
    constexpr int rounds = 10;
    app.flow.push_back(3);
    for (int round = 1; round < rounds; ++round) {
        app.flow.insert(app.flow.end(), {1, 2, 3});
    }
    app.flow.insert(app.flow.end(), {1, 3});
    app.packet_bits = 128;
    return app;
}

AppSpec app_preset(std::string_view name) {
    if (name == "aes128") return aes_preset();
    throw ConfigError("app", "unknown preset '" + std::string(name) + "'");
}

std::vector<int> op_counts(const AppSpec& app) {
    std::vector<int> counts(app.modules.size(), 0);
    for (int id : app.flow) {
        if (id >= 1 && id <= app.module_count()) ++counts[static_cast<std::size_t>(id - 1)];
    }
    return counts;
}

std::vector<double> normalized_energy(const AppSpec& app, std::span<const double> comm_per_op) {
    if (comm_per_op.size() != app.modules.size()) {
        throw ConfigError("comm_per_op", "length " + std::to_string(comm_per_op.size()) +
                                             " does not match module count " +
                                             std::to_string(app.modules.size()));
    }
    const auto f = op_counts(app);
    std::vector<double> eps(app.modules.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (comm_per_op[i] < 0.0) throw ConfigError("comm_per_op", "negative communication energy");
        eps[i] = f[i] * (app.modules[i].energy_pj + comm_per_op[i]);
    }
    return eps;
}

std::vector<Violation> validate(const AppSpec& app) {
    std::vector<Violation> out;
    if (app.modules.empty()) out.push_back({"modules", "no modules"});
    std::set<int> ids;
    for (std::size_t k = 0; k < app.modules.size(); ++k) {
        const auto& m = app.modules[k];
        const std::string field = "modules[" + std::to_string(k) + "]";
        if (!(m.energy_pj > 0.0)) out.push_back({field, "non-positive energy"});
        if (m.compute_cycles < 0) out.push_back({field, "negative compute latency"});
        if (!ids.insert(m.id).second) out.push_back({field, "duplicate module id " + std::to_string(m.id)});
        if (m.id != static_cast<int>(k) + 1) out.push_back({field, "module ids must be contiguous 1..p in order"});
    }
    if (app.flow.empty()) out.push_back({"flow", "empty flow"});
    for (std::size_t k = 0; k < app.flow.size(); ++k) {
        const int id = app.flow[k];
        if (id < 1 || id > app.module_count()) {
            out.push_back({"flow[" + std::to_string(k) + "]", "unknown module id " + std::to_string(id)});
        }
    }
    const auto f = op_counts(app);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) out.push_back({"flow", "module " + std::to_string(i + 1) + " never runs"});
    }
    if (app.packet_bits <= 0) out.push_back({"packet_bits", "must be positive"});
    return out;
}

void require_valid(const AppSpec& app) {
    if (auto v = validate(app); !v.empty()) throw ConfigError(join_violations(v));
}

}  // namespace etsim
