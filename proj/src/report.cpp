#include "etsim/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace etsim {

std::string fmt(double v, int precision) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

json to_json(const SimMetrics& m, bool with_nodes) {
    json j = {{"algorithm", to_string(m.algorithm)},
              {"jobs_completed", m.jobs_completed},
              {"jobs_fractional", m.jobs_fractional},
              {"jobs_injected", m.jobs_injected},
              {"jobs_lost", m.jobs_lost},
              {"elapsed_cycles", m.elapsed_cycles},
              {"frames", m.frames},
              {"recomputations", m.recomputations},
              {"deadlock_reports", m.deadlock_reports},
              {"death_cause", to_string(m.death_cause)},
              {"total_initial_pj", m.total_initial_pj},
              {"total_consumed_pj", m.total_consumed_pj},
              {"overhead_fraction", m.overhead_fraction},
              {"controller_energy_pj", m.controller_energy_pj},
              {"budget_violations", m.budget_violations},
              {"liveness_checks", m.liveness_checks},
              {"liveness_violations", m.liveness_violations}};
    if (with_nodes) {
        json nodes = json::array();
        for (const auto& n : m.nodes) {
            nodes.push_back({{"node", n.node},
                             {"module", n.module},
                             {"ops", n.ops},
                             {"initial_pj", n.initial_pj},
                             {"computation_pj", n.computation_pj},
                             {"communication_pj", n.communication_pj},
                             {"overhead_pj", n.overhead_pj},
                             {"residual_pj", n.residual_pj},
                             {"alive", n.alive},
                             {"death_cycle", n.death_cycle}});
        }
        j["nodes"] = nodes;
    }
    return j;
}

std::string metrics_text(const SimMetrics& m) {
    std::ostringstream os;
    const auto row = [&os](const char* key, const std::string& value) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-22s %s\n", key, value.c_str());
        os << buf;
    };
    row("algorithm", to_string(m.algorithm));
    row("jobs_completed", std::to_string(m.jobs_completed));
    row("jobs_fractional", fmt(m.jobs_fractional, 3));
    row("jobs_lost", std::to_string(m.jobs_lost));
    row("elapsed_cycles", std::to_string(m.elapsed_cycles));
    row("frames", std::to_string(m.frames));
    row("recomputations", std::to_string(m.recomputations));
    row("deadlock_reports", std::to_string(m.deadlock_reports));
    row("death_cause", to_string(m.death_cause));
    row("overhead_fraction", fmt(100.0 * m.overhead_fraction, 2) + " %");
    row("consumed_pj", fmt(m.total_consumed_pj, 3));
    row("budget_violations", std::to_string(m.budget_violations));
    return os.str();
}

std::string ledger_csv(const SimMetrics& m) {
    std::ostringstream os;
    os << "node,module,ops,initial_pj,computation_pj,communication_pj,overhead_pj,residual_pj,alive,death_cycle\n";
    for (const auto& n : m.nodes) {
        os << n.node << ',' << n.module << ',' << n.ops << ',' << fmt(n.initial_pj) << ',' << fmt(n.computation_pj)
           << ',' << fmt(n.communication_pj) << ',' << fmt(n.overhead_pj) << ',' << fmt(n.residual_pj) << ','
           << (n.alive ? 1 : 0) << ',' << n.death_cycle << '\n';
    }
    return os.str();
}

namespace {

std::string header(const json& config) { return "# config: " + config.dump() + "\n"; }

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows, const json& config) {
    std::ostringstream os;
    os << header(config) << "size,J_EAR,J_SDR,ratio,overhead_pct_EAR,overhead_pct_SDR\n";
    for (const auto& r : rows) {
        os << mesh_name(r.size) << ',' << fmt(r.ear.jobs_fractional, 3) << ',' << fmt(r.sdr.jobs_fractional, 3) << ','
           << fmt(r.ratio, 4) << ',' << fmt(100.0 * r.ear.overhead_fraction, 3) << ','
           << fmt(100.0 * r.sdr.overhead_fraction, 3) << '\n';
    }
    return os.str();
}

std::string bound_compare_csv(const std::vector<BoundRow>& rows, const json& config) {
    std::ostringstream os;
    os << header(config) << "size,J_EAR_ideal,J_star,ratio,J_star_per_node,mapping_bound\n";
    for (const auto& r : rows) {
        const int k = r.size.width * r.size.height;
        os << mesh_name(r.size) << ',' << fmt(r.ear.jobs_fractional, 3) << ',' << fmt(r.j_star, 4) << ','
           << fmt(r.ratio, 4) << ',' << fmt(r.j_star / k, 6) << ',' << r.mapping_bound << '\n';
    }
    return os.str();
}

std::string controller_csv(const std::vector<ControllerRow>& rows, const json& config) {
    std::ostringstream os;
    os << header(config) << "size,controllers,lifetime_cycles,jobs,death_cause\n";
    for (const auto& r : rows) {
        os << mesh_name(r.size) << ',' << r.controllers << ',' << r.metrics.elapsed_cycles << ','
           << fmt(r.metrics.jobs_fractional, 3) << ',' << to_string(r.metrics.death_cause) << '\n';
    }
    return os.str();
}

json to_json(const std::vector<SweepRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"size", mesh_name(r.size)},
                       {"ratio", r.ratio},
                       {"ear", to_json(r.ear, false)},
                       {"sdr", to_json(r.sdr, false)}});
    }
    return out;
}

json to_json(const std::vector<BoundRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"size", mesh_name(r.size)},
                       {"eps", r.eps},
                       {"j_star", r.j_star},
                       {"ratio", r.ratio},
                       {"mapping_bound", r.mapping_bound},
                       {"ear", to_json(r.ear, false)}});
    }
    return out;
}

json to_json(const std::vector<ControllerRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"size", mesh_name(r.size)},
                       {"controllers", r.controllers},
                       {"lifetime_cycles", r.metrics.elapsed_cycles},
                       {"jobs_fractional", r.metrics.jobs_fractional},
                       {"death_cause", to_string(r.metrics.death_cause)}});
    }
    return out;
}

json to_json(const BoundSummary& b) {
    return {{"op_counts", b.op_counts},
            {"comm_per_op_pj", b.comm},
            {"eps_pj", b.eps},
            {"K", b.input.node_budget},
            {"B_pj", b.input.battery_pj},
            {"j_star", b.j_star},
            {"optimal_counts", b.optimal_counts},
            {"mapping_counts", b.mapping_counts},
            {"mapping_bound", b.mapping_bound}};
}

std::string matrix_csv(const SquareMatrix<double>& m) {
    std::ostringstream os;
    for (int i = 0; i < m.size(); ++i) {
        for (int j = 0; j < m.size(); ++j) {
            if (j) os << ',';
            os << (std::isinf(m(i, j)) ? std::string("inf") : fmt(m(i, j)));
        }
        os << '\n';
    }
    return os.str();
}

std::string matrix_csv(const SquareMatrix<int>& m) {
    std::ostringstream os;
    for (int i = 0; i < m.size(); ++i) {
        for (int j = 0; j < m.size(); ++j) {
            if (j) os << ',';
            if (m(i, j) == kNoNode) {
                os << '-';
            } else {
                os << m(i, j);
            }
        }
        os << '\n';
    }
    return os.str();
}

std::string tables_csv(const RoutingTables& rt) {
    std::ostringstream os;
    os << "node";
    for (int i = 1; i <= rt.module_count(); ++i) os << ",module_" << i;
    os << '\n';
    for (int n = 0; n < rt.node_count(); ++n) {
        os << n;
        for (int i = 1; i <= rt.module_count(); ++i) {
            os << ',';
            if (rt.at(n, i) == kNoNode) {
                os << '-';
            } else {
                os << rt.at(n, i);
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace etsim
