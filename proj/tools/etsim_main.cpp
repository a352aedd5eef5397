// etsim: command-line front end for the e-textile routing simulator.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "etsim/report.hpp"

namespace {

using etsim::json;

enum class Format { Json, Text, Csv };

struct Options {
    std::string config_path;
    std::string app;
    std::string mesh;
    std::string algo;
    std::string battery;
    int jobs = 0;
    long long seed = -1;
    std::string format;
    std::string output;
    std::vector<std::string> sizes;
    std::vector<int> counts;
    std::string ledger;
};

std::string read_file(const std::string& path, const std::string& field) {
    std::ifstream in(path);
    if (!in) throw etsim::ConfigError(field, "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Config file (flag, else ETSIM_CONFIG), then flag overrides.
etsim::ExperimentConfig resolve(const Options& o) {
    etsim::ExperimentConfig c;
    std::string path = o.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("ETSIM_CONFIG")) path = env;
    }
    if (!path.empty()) {
        json j;
        try {
            j = json::parse(read_file(path, "config"));
        } catch (const json::parse_error& e) {
            throw etsim::ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        etsim::apply_json(c, j);
    }
    json overlay = json::object();
    if (!o.app.empty()) overlay["app"] = o.app;
    if (!o.mesh.empty()) overlay["platform"]["mesh"] = o.mesh;
    if (!o.battery.empty()) overlay["platform"]["battery"]["model"] = o.battery;
    if (!o.algo.empty()) overlay["routing"]["algorithm"] = o.algo;
    if (o.jobs != 0) overlay["workload"]["concurrent_jobs"] = o.jobs;
    if (o.seed >= 0) overlay["seed"] = o.seed;
    if (!o.sizes.empty()) overlay["sweep"]["sizes"] = o.sizes;
    if (!o.counts.empty()) overlay["sweep"]["controller_counts"] = o.counts;
    etsim::apply_json(c, overlay);
    return c;
}

Format format_of(const Options& o, Format fallback) {
    if (o.format.empty()) return fallback;
    if (o.format == "json") return Format::Json;
    if (o.format == "text") return Format::Text;
    if (o.format == "csv") return Format::Csv;
    throw etsim::ConfigError("format", "expected json, text or csv, got '" + o.format + "'");
}

// Writes through a temporary file so a failed run leaves nothing behind.
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    const std::filesystem::path target(path);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, target);
}

// Columns aligned for reading; drops the config comment line.
std::string align_csv(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        if (width.size() < r.size()) width.resize(r.size(), 0);
        for (std::size_t k = 0; k < r.size(); ++k) width[k] = std::max(width[k], r[k].size());
    }
    std::ostringstream os;
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k) os << "  ";
            os << std::string(width[k] - r[k].size(), ' ') << r[k];
        }
        os << '\n';
    }
    return os.str();
}

std::string metrics_csv(const etsim::SimMetrics& m, const json& config) {
    const json flat = etsim::to_json(m, false);
    std::ostringstream head;
    std::ostringstream row;
    bool first = true;
    for (const auto& [key, value] : flat.items()) {
        head << (first ? "" : ",") << key;
        row << (first ? "" : ",") << (value.is_string() ? value.get<std::string>() : value.dump());
        first = false;
    }
    return "# config: " + config.dump() + "\n" + head.str() + "\n" + row.str() + "\n";
}

void cmd_simulate(const Options& o) {
    const auto config = resolve(o);
    const auto fmt = format_of(o, Format::Json);
    const auto m = etsim::run(etsim::make_scenario(config));
    const json cfg = etsim::to_json(config);
    std::string out;
    switch (fmt) {
        case Format::Json: out = json{{"config", cfg}, {"metrics", etsim::to_json(m)}}.dump(2) + "\n"; break;
        case Format::Text: out = etsim::metrics_text(m); break;
        case Format::Csv: out = metrics_csv(m, cfg); break;
    }
    if (!o.ledger.empty()) emit(o.ledger, "# config: " + cfg.dump() + "\n" + etsim::ledger_csv(m));
    emit(o.output, out);
}

template <typename Rows>
void emit_table(const Options& o, const Rows& rows, const json& cfg, std::string (*csv)(const Rows&, const json&)) {
    const auto fmt = format_of(o, Format::Csv);
    std::string out;
    switch (fmt) {
        case Format::Json: out = json{{"config", cfg}, {"rows", etsim::to_json(rows)}}.dump(2) + "\n"; break;
        case Format::Text: out = align_csv(csv(rows, cfg)); break;
        case Format::Csv: out = csv(rows, cfg); break;
    }
    emit(o.output, out);
}

void cmd_sweep(const Options& o) {
    const auto config = resolve(o);
    emit_table(o, etsim::sweep_meshes(config), etsim::to_json(config), &etsim::sweep_csv);
}

void cmd_bound_compare(const Options& o) {
    const auto config = resolve(o);
    emit_table(o, etsim::bound_compare(config), etsim::to_json(config), &etsim::bound_compare_csv);
}

void cmd_controller_sweep(const Options& o) {
    const auto config = resolve(o);
    emit_table(o, etsim::controller_sweep(config), etsim::to_json(config), &etsim::controller_csv);
}

void cmd_bound(const Options& o) {
    const auto config = resolve(o);
    const auto fmt = format_of(o, Format::Json);
    const auto b = etsim::bound_summary(config);
    const json cfg = etsim::to_json(config);
    std::string out;
    if (fmt == Format::Json) {
        out = json{{"config", cfg}, {"bound", etsim::to_json(b)}}.dump(2) + "\n";
    } else {
        std::ostringstream os;
        if (fmt == Format::Csv) os << "# config: " << cfg.dump() << "\n";
        os << "module,f,comm_pj,eps_pj,n_star,n_mapped\n";
        for (std::size_t i = 0; i < b.eps.size(); ++i) {
            os << i + 1 << ',' << b.op_counts[i] << ',' << etsim::fmt(b.comm[i]) << ',' << etsim::fmt(b.eps[i]) << ','
               << etsim::fmt(b.optimal_counts[i], 4) << ',' << b.mapping_counts[i] << '\n';
        }
        if (fmt == Format::Csv) {
            os << "# j_star," << etsim::fmt(b.j_star, 4) << "\n# mapping_bound," << b.mapping_bound << '\n';
            out = os.str();
        } else {
            out = align_csv(os.str()) + "J*             " + etsim::fmt(b.j_star, 4) +
                  "\nmapping bound  " + std::to_string(b.mapping_bound) + "\n";
        }
    }
    emit(o.output, out);
}

void cmd_dump_routing(const Options& o) {
    const auto config = resolve(o);
    const auto s = etsim::make_scenario(config);
    const int k = s.topology.node_count();
    std::vector<int> levels(static_cast<std::size_t>(k), s.battery_levels - 1);
    const etsim::RoutingParams params{s.algorithm, s.q, s.battery_levels};
    const auto r = etsim::compute_routes(s.topology, s.mapping, params, levels, {}, etsim::RoutingTables{});
    const json cfg = etsim::to_json(config);
    const auto fmt = format_of(o, Format::Csv);
    std::string out;
    if (fmt == Format::Json) {
        const auto to_rows = [k](const auto& m) {
            json rows = json::array();
            for (int i = 0; i < k; ++i) {
                json row = json::array();
                for (int j = 0; j < k; ++j) {
                    const auto v = m(i, j);
                    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
                        row.push_back(std::isinf(v) ? json(nullptr) : json(v));
                    } else {
                        row.push_back(v == etsim::kNoNode ? json(nullptr) : json(v));
                    }
                }
                rows.push_back(row);
            }
            return rows;
        };
        json tables = json::array();
        for (int n = 0; n < k; ++n) {
            json row = json::array();
            for (int i = 1; i <= r.tables.module_count(); ++i) {
                const int v = r.tables.at(n, i);
                row.push_back(v == etsim::kNoNode ? json(nullptr) : json(v));
            }
            tables.push_back(row);
        }
        out = json{{"config", cfg},
                   {"W", to_rows(r.weights)},
                   {"D", to_rows(r.paths.dist)},
                   {"S", to_rows(r.paths.succ)},
                   {"RT", tables}}
                  .dump(2) +
              "\n";
    } else {
        std::ostringstream os;
        os << "# config: " << cfg.dump() << '\n';
        os << "# W\n" << etsim::matrix_csv(r.weights);
        os << "# D\n" << etsim::matrix_csv(r.paths.dist);
        os << "# S\n" << etsim::matrix_csv(r.paths.succ);
        os << "# RT\n" << etsim::tables_csv(r.tables);
        out = os.str();
    }
    emit(o.output, out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-aware routing simulator for e-textile meshes"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config_path, "JSON config file (default: $ETSIM_CONFIG)");
    app.add_option("--app", o.app, "application preset");
    app.add_option("--mesh", o.mesh, "mesh size WxH");
    app.add_option("--algo", o.algo, "ear or sdr");
    app.add_option("--battery", o.battery, "ideal or thin-film");
    app.add_option("--jobs", o.jobs, "concurrent jobs");
    app.add_option("--seed", o.seed, "seed for capacity jitter");
    app.add_option("--format", o.format, "json, text or csv");
    app.add_option("--output,-o", o.output, "output file (default stdout)");
    app.add_option("--sizes", o.sizes, "mesh sizes for sweeps")->delimiter(',');
    app.add_option("--counts", o.counts, "controller counts")->delimiter(',');
    app.fallthrough();

    auto* simulate = app.add_subcommand("simulate", "run one simulation");
    simulate->add_option("--ledger", o.ledger, "per-node energy ledger CSV");
    app.add_subcommand("sweep", "EAR vs SDR over mesh sizes");
    app.add_subcommand("bound", "upper bound on completed jobs for the configured platform");
    app.add_subcommand("bound-compare", "EAR with ideal batteries against J*");
    app.add_subcommand("controller-sweep", "lifetime against controller count");
    app.add_subcommand("dump-routing", "W, D, S and RT at full charge");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (cmd == "simulate") cmd_simulate(o);
        else if (cmd == "sweep") cmd_sweep(o);
        else if (cmd == "bound") cmd_bound(o);
        else if (cmd == "bound-compare") cmd_bound_compare(o);
        else if (cmd == "controller-sweep") cmd_controller_sweep(o);
        else if (cmd == "dump-routing") cmd_dump_routing(o);
    } catch (const etsim::ConfigError& e) {
        std::cerr << "etsim: config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "etsim: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
