#include "etsim/sim.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

namespace etsim {

const char* to_string(DeathCause cause) {
    switch (cause) {
        case DeathCause::None: return "none";
        case DeathCause::ModuleExtinction: return "module-extinction";
        case DeathCause::ControllerExtinction: return "controller-extinction";
        case DeathCause::Unroutable: return "unroutable";
    }
    return "?";
}

const char* to_string(Algorithm algorithm) { return algorithm == Algorithm::Ear ? "ear" : "sdr"; }

std::vector<Violation> validate(const Scenario& s) {
    auto out = validate(s.app);
    const int k = s.topology.node_count();
    if (k < 1) out.push_back({"platform.topology", "no nodes"});
    if (s.mapping.node_count() != k) out.push_back({"platform.mapping", "mapping does not cover every node"});
    if (s.mapping.module_count() != s.app.module_count()) {
        out.push_back({"platform.mapping", "mapping module count differs from the application"});
    }
    for (auto& v : validate(s.battery)) out.push_back(v);
    for (auto& v : validate(s.control)) out.push_back(v);
    if (s.battery_levels < 2) out.push_back({"routing.battery_levels", "must be at least 2"});
    if (!(s.q > 0.0)) out.push_back({"routing.q", "must be positive"});
    if (s.workload.concurrent_jobs < 1) out.push_back({"workload.concurrent_jobs", "must be at least 1"});
    if (s.workload.buffer_capacity < 1) out.push_back({"workload.buffer_capacity", "must be at least 1"});
    if (s.workload.origin_node < 0 || s.workload.origin_node >= std::max(k, 1)) {
        out.push_back({"workload.origin_node", "not a node"});
    }
    if (s.hop_cycles < 0) out.push_back({"hop_cycles", "must be non-negative"});
    if (s.capacity_jitter < 0.0 || s.capacity_jitter >= 1.0) {
        out.push_back({"battery.capacity_jitter", "must be in [0, 1)"});
    }
    if (s.max_cycles < 1) out.push_back({"max_cycles", "must be positive"});
    return out;
}

bool flow_routable(const Topology& topology, const Mapping& mapping, const std::vector<int>& flow,
                   const std::vector<bool>& alive) {
    const int k = topology.node_count();
    std::vector<char> frontier(static_cast<std::size_t>(k), 0);
    for (int j : mapping.duplicates(flow.front())) {
        if (alive[static_cast<std::size_t>(j)]) frontier[static_cast<std::size_t>(j)] = 1;
    }
    std::vector<char> reach(static_cast<std::size_t>(k));
    std::deque<int> queue;
    for (std::size_t step = 1; step < flow.size(); ++step) {
        std::fill(reach.begin(), reach.end(), 0);
        queue.clear();
        for (int j = 0; j < k; ++j) {
            if (frontier[static_cast<std::size_t>(j)]) {
                reach[static_cast<std::size_t>(j)] = 1;
                queue.push_back(j);
            }
        }
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : topology.out_neighbors(u)) {
                if (alive[static_cast<std::size_t>(v)] && !reach[static_cast<std::size_t>(v)]) {
                    reach[static_cast<std::size_t>(v)] = 1;
                    queue.push_back(v);
                }
            }
        }
        bool any = false;
        for (int j = 0; j < k; ++j) {
            const bool hit = reach[static_cast<std::size_t>(j)] && mapping.module_of(j) == flow[step];
            frontier[static_cast<std::size_t>(j)] = hit;
            any = any || hit;
        }
        if (!any) return false;
    }
    return std::any_of(frontier.begin(), frontier.end(), [](char c) { return c != 0; });
}

namespace {

enum class Phase { Computing, Transit, Queued };

struct Job {
    std::int64_t id = 0;
    int pos = 0;  ///< completed flow steps
    int node = 0;
    Phase phase = Phase::Computing;
    std::int64_t ready_at = 0;
    std::int64_t queued_since = -1;
    int blocked_on = kNoNode;
};

struct LivenessWatch {
    std::int64_t job = 0;
    int node = 0;
    std::int64_t queued_since = 0;
    int port = kNoNode;  ///< successor named in the flag
    std::int64_t deadline = 0;
};

class Engine {
public:
    explicit Engine(const Scenario& s)
        : s_(s),
          k_(s.topology.node_count()),
          frame_(plan_frame(k_, s.control)),
          bank_(s.control, k_, s.app.module_count()) {
        ctx_.topology = &s_.topology;
        ctx_.mapping = &s_.mapping;
        ctx_.params = {s_.algorithm, s_.q, s_.battery_levels};

        std::mt19937_64 rng(s_.seed);
        nodes_.resize(static_cast<std::size_t>(k_));
        for (int j = 0; j < k_; ++j) {
            auto& n = nodes_[static_cast<std::size_t>(j)];
            n.id = j;
            n.module = s_.mapping.module_of(j);
            double capacity = s_.battery.capacity_pj;
            if (s_.capacity_jitter > 0.0) {
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                capacity *= 1.0 + s_.capacity_jitter * (2.0 * u - 1.0);
            }
            n.battery = Battery(s_.battery, capacity);
        }
        hop_energy_.assign(static_cast<std::size_t>(k_) * k_, 0.0);
        for (const auto& e : s_.topology.edges()) {
            hop_energy_[static_cast<std::size_t>(e.from) * k_ + e.to] =
                packet_energy(s_.link, e.length_cm, s_.app.packet_bits);
        }
    }

    SimMetrics run() {
        // Routes in force at power-up, computed from the initial state.
        std::vector<int> levels(static_cast<std::size_t>(k_));
        for (int j = 0; j < k_; ++j) levels[static_cast<std::size_t>(j)] = battery_level(node(j).battery, s_.battery_levels);
        routes_ = compute_routes(s_.topology, s_.mapping, ctx_.params, levels, {}, RoutingTables{});

        pending_injections_ = s_.workload.concurrent_jobs;
        if (!check_system(0)) return finish(0);
        inject_pending(0);

        std::int64_t frame_start = 0;
        int next_slot = 0;
        while (true) {
            const std::int64_t control_at =
                next_slot < k_ ? frame_start + frame_.slot_offset(next_slot) : frame_start + frame_.frame_length();
            std::int64_t t = control_at;
            for (const auto& j : jobs_) {
                if (j.phase != Phase::Queued) t = std::min(t, j.ready_at);
            }
            if (t > s_.max_cycles) throw std::runtime_error("simulation exceeded max_cycles without system death");

            if (t == control_at) {
                if (next_slot < k_) {
                    upload(next_slot, t);
                    ++next_slot;
                } else {
                    end_frame(t);
                    frame_start = t;
                    next_slot = 0;
                }
            }
            for (std::size_t idx = 0; idx < jobs_.size(); ++idx) {
                if (jobs_[idx].phase != Phase::Queued && jobs_[idx].ready_at == t) step_job(idx, t);
            }
            settle(t);
            if (died_) {
                died_ = false;
                if (!check_system(t)) return finish(t);
            }
            check_watches(t);
        }
    }

private:
    NodeRuntime& node(int j) { return nodes_[static_cast<std::size_t>(j)]; }
    bool has_room(int j) { return node(j).occupancy < s_.workload.buffer_capacity; }

    void after_spend(NodeRuntime& n, std::int64_t t) {
        const double used = s_.app.module(n.module).energy_pj * static_cast<double>(n.ops) + n.communication_pj +
                            n.overhead_pj;
        if (used > n.battery.initial_pj() * (1.0 + 1e-9)) ++budget_violations_;
        if (!n.alive() && n.death_cycle < 0) {
            n.death_cycle = t;
            died_ = true;
        }
    }

    void upload(int j, std::int64_t t) {
        auto& n = node(j);
        bool flag = false;
        int port = kNoNode;
        std::int64_t oldest = 0;
        std::vector<const Job*> stalled;
        for (const auto& job : jobs_) {
            if (job.phase == Phase::Queued && job.node == j &&
                detect_deadlock(t - job.queued_since, s_.control.deadlock_threshold_frames, frame_)) {
                if (!flag || job.queued_since < oldest) {
                    oldest = job.queued_since;
                    port = job.blocked_on;
                }
                flag = true;
                stalled.push_back(&job);
            }
        }
        const auto report = upload_report(n, flag, s_.control, s_.battery_levels, port);
        if (!report) return;
        after_spend(n, t);
        reports_.push_back(*report);
        if (flag) {
            ++deadlock_reports_;
            for (const Job* job : stalled) {
                watches_.push_back({job->id, j, job->queued_since, job->blocked_on, t + 2 * frame_.frame_length()});
            }
        }
    }

    void end_frame(std::int64_t t) {
        ++frames_;
        if (bank_.alive()) {
            auto tick = bank_.tick(reports_, frame_, ctx_, routes_.tables);
            controller_energy_ += tick.energy_pj;
            if (tick.routes) routes_ = std::move(*tick.routes);
            if (!bank_.alive()) {
                died_ = true;
                controller_death_ = t - frame_.frame_length() + tick.death_offset;
            }
        }
        reports_.clear();
    }

    void lose(std::size_t idx) {
        auto& j = jobs_[idx];
        --node(j.node).occupancy;
        ++jobs_lost_;
        ++pending_injections_;
        jobs_.erase(jobs_.begin() + static_cast<std::ptrdiff_t>(idx));
    }

    void start_compute(Job& job, int at, std::int64_t t) {
        job.node = at;
        job.phase = Phase::Computing;
        job.ready_at = t + s_.app.module(s_.app.flow[static_cast<std::size_t>(job.pos)]).compute_cycles;
        job.queued_since = -1;
        job.blocked_on = kNoNode;
    }

    // Returns false if the job is gone.
    bool step_job(std::size_t& idx, std::int64_t t) {
        auto& job = jobs_[idx];
        auto& n = node(job.node);
        if (job.phase == Phase::Transit) {
            if (!n.alive()) {
                lose(idx--);
                return false;
            }
            return forward_or_drop(idx, t);
        }
        // Computation finished.
        if (!n.alive()) {
            lose(idx--);
            return false;
        }
        const auto& m = s_.app.module(n.module);
        const Draw d = n.spend(m.energy_pj, EnergyKind::Computation);
        if (d.delivered) ++n.ops;
        after_spend(n, t);
        if (!d.delivered) {
            lose(idx--);
            return false;
        }
        ++job.pos;
        if (job.pos == static_cast<int>(s_.app.flow.size())) {
            ++jobs_completed_;
            const int at = job.node;
            --n.occupancy;
            jobs_.erase(jobs_.begin() + static_cast<std::ptrdiff_t>(idx--));
            ++pending_injections_;
            if (n.alive() && n.module == s_.app.flow.front()) inject_at(at, t);
            return false;
        }
        if (!n.alive()) {
            lose(idx--);
            return false;
        }
        return forward_or_drop(idx, t);
    }

    bool forward_or_drop(std::size_t& idx, std::int64_t t) {
        if (forward(idx, t)) return true;
        --idx;
        return false;
    }

    // Moves the job one hop toward its next module, or queues it.
    bool forward(std::size_t idx, std::int64_t t) {
        auto& job = jobs_[idx];
        const int here = job.node;
        auto& n = node(here);
        const int target = s_.app.flow[static_cast<std::size_t>(job.pos)];
        if (n.module == target) {
            start_compute(job, here, t);
            return true;
        }
        const int next = routes_.tables.at(here, target);
        if (next == kNoNode || next == here || !node(next).alive() || !has_room(next)) {
            if (job.phase != Phase::Queued) {
                job.phase = Phase::Queued;
                job.queued_since = t;
            }
            job.blocked_on = next;
            return true;
        }
        const Draw d = n.spend(hop_energy_[static_cast<std::size_t>(here) * k_ + next], EnergyKind::Communication);
        after_spend(n, t);
        if (!d.delivered) {
            lose(idx);
            return false;
        }
        --n.occupancy;
        ++node(next).occupancy;
        job.node = next;
        job.phase = Phase::Transit;
        job.ready_at = t + s_.hop_cycles;
        job.queued_since = -1;
        job.blocked_on = kNoNode;
        if (s_.hop_cycles == 0) return forward_now(idx, t);
        return true;
    }

    bool forward_now(std::size_t idx, std::int64_t t) {
        if (!node(jobs_[idx].node).alive()) {
            lose(idx);
            return false;
        }
        return forward(idx, t);
    }

    // Retries queued packets and injections until nothing moves.
    void settle(std::int64_t t) {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t idx = 0; idx < jobs_.size(); ++idx) {
                auto& job = jobs_[idx];
                if (job.phase != Phase::Queued) continue;
                if (!node(job.node).alive()) {
                    lose(idx--);
                    progress = true;
                    continue;
                }
                const std::int64_t id = job.id;
                const bool kept = forward(idx, t);
                if (!kept || jobs_[idx].id != id || jobs_[idx].phase != Phase::Queued) {
                    progress = true;
                    if (!kept) --idx;
                }
            }
            const auto before = pending_injections_;
            inject_pending(t);
            progress = progress || pending_injections_ != before;
        }
    }

    void inject_at(int at, std::int64_t t) {
        --pending_injections_;
        ++node(at).occupancy;
        Job job;
        job.id = next_job_id_++;
        start_compute(job, at, t);
        jobs_.push_back(job);
        ++jobs_injected_;
    }

    void inject_pending(std::int64_t t) {
        while (pending_injections_ > 0) {
            const int origin = s_.workload.origin_node;
            int best = kNoNode;
            double best_d = kInfinity;
            for (int j : s_.mapping.duplicates(s_.app.flow.front())) {
                if (!node(j).alive() || !has_room(j)) continue;
                const double d = routes_.paths.dist(origin, j);
                if (best == kNoNode || d < best_d) {
                    best = j;
                    best_d = d;
                }
            }
            if (best == kNoNode) return;
            inject_at(best, t);
        }
    }

    std::vector<bool> alive_mask() {
        std::vector<bool> alive(static_cast<std::size_t>(k_));
        for (int j = 0; j < k_; ++j) alive[static_cast<std::size_t>(j)] = node(j).alive();
        return alive;
    }

    bool reachable_module(int from, int module, const std::vector<bool>& alive, int skip = kNoNode) {
        std::vector<char> seen(static_cast<std::size_t>(k_), 0);
        std::deque<int> queue{from};
        seen[static_cast<std::size_t>(from)] = 1;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            if (s_.mapping.module_of(u) == module) return true;
            for (int v : s_.topology.out_neighbors(u)) {
                if (v != skip && alive[static_cast<std::size_t>(v)] && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    queue.push_back(v);
                }
            }
        }
        return false;
    }

    // Returns false on system death.
    bool check_system(std::int64_t t) {
        const auto alive = alive_mask();
        for (int i = 1; i <= s_.app.module_count(); ++i) {
            const auto& dup = s_.mapping.duplicates(i);
            if (std::none_of(dup.begin(), dup.end(), [&](int j) { return alive[static_cast<std::size_t>(j)]; })) {
                cause_ = DeathCause::ModuleExtinction;
                return false;
            }
        }
        if (!bank_.alive()) {
            cause_ = DeathCause::ControllerExtinction;
            return false;
        }
        if (!flow_routable(s_.topology, s_.mapping, s_.app.flow, alive)) {
            cause_ = DeathCause::Unroutable;
            return false;
        }
        // Packets cut off from every live copy of their next module are lost.
        for (std::size_t idx = 0; idx < jobs_.size(); ++idx) {
            const auto& job = jobs_[idx];
            if (job.phase != Phase::Queued || !alive[static_cast<std::size_t>(job.node)]) continue;
            const int target = s_.app.flow[static_cast<std::size_t>(job.pos)];
            if (!reachable_module(job.node, target, alive)) lose(idx--);
        }
        settle(t);
        return true;
    }

    void check_watches(std::int64_t t) {
        for (std::size_t w = 0; w < watches_.size(); ++w) {
            const auto& watch = watches_[w];
            const auto it = std::find_if(jobs_.begin(), jobs_.end(), [&](const Job& j) { return j.id == watch.job; });
            const bool stuck = it != jobs_.end() && it->phase == Phase::Queued && it->node == watch.node &&
                               it->queued_since == watch.queued_since;
            if (!stuck) {
                watches_.erase(watches_.begin() + static_cast<std::ptrdiff_t>(w--));
                continue;
            }
            if (t < watch.deadline) continue;
            ++liveness_checks_;
            if (!rerouted(*it, watch.port) && alternative_exists(*it, watch.port)) ++liveness_violations_;
            watches_.erase(watches_.begin() + static_cast<std::ptrdiff_t>(w--));
        }
    }

    // The node's table now sends the packet somewhere other than the port
    // it was stuck on.
    bool rerouted(const Job& job, int port) {
        const int next = routes_.tables.at(job.node, s_.app.flow[static_cast<std::size_t>(job.pos)]);
        return next != kNoNode && next != port;
    }

    // A live neighbour with buffer space, other than the locked one, that
    // still leads to a live copy of the packet's next module without coming
    // back.
    bool alternative_exists(const Job& job, int port) {
        const auto alive = alive_mask();
        const int target = s_.app.flow[static_cast<std::size_t>(job.pos)];
        for (int s : s_.topology.out_neighbors(job.node)) {
            if (s == port || !alive[static_cast<std::size_t>(s)] || !has_room(s)) continue;
            if (reachable_module(s, target, alive, job.node)) return true;
        }
        return false;
    }

    SimMetrics finish(std::int64_t t) {
        SimMetrics m;
        m.algorithm = s_.algorithm;
        m.jobs_completed = jobs_completed_;
        double partial = 0.0;
        for (const auto& j : jobs_) partial += static_cast<double>(j.pos) / static_cast<double>(s_.app.flow.size());
        m.jobs_fractional = static_cast<double>(jobs_completed_) + partial;
        m.jobs_injected = jobs_injected_;
        m.jobs_lost = jobs_lost_;
        m.elapsed_cycles = cause_ == DeathCause::ControllerExtinction && controller_death_ >= 0 ? controller_death_ : t;
        m.frames = frames_;
        m.recomputations = bank_.recomputations();
        m.deadlock_reports = deadlock_reports_;
        m.death_cause = cause_;
        m.controller_energy_pj = controller_energy_;
        m.budget_violations = budget_violations_;
        m.liveness_checks = liveness_checks_;
        m.liveness_violations = liveness_violations_;
        double overhead = 0.0;
        for (const auto& n : nodes_) {
            NodeLedger l;
            l.node = n.id;
            l.module = n.module;
            l.ops = n.ops;
            l.initial_pj = n.battery.initial_pj();
            l.computation_pj = n.computation_pj;
            l.communication_pj = n.communication_pj;
            l.overhead_pj = n.overhead_pj;
            l.residual_pj = n.battery.residual_pj();
            l.alive = n.alive();
            l.death_cycle = n.death_cycle;
            m.total_initial_pj += l.initial_pj;
            m.total_consumed_pj += l.computation_pj + l.communication_pj + l.overhead_pj;
            overhead += l.overhead_pj;
            m.nodes.push_back(l);
        }
        m.overhead_fraction = m.total_consumed_pj > 0.0 ? overhead / m.total_consumed_pj : 0.0;
        return m;
    }

    const Scenario& s_;
    int k_;
    TdmaFrame frame_;
    ControllerBank bank_;
    RoutingContext ctx_;
    RoutingSnapshot routes_;
    std::vector<NodeRuntime> nodes_;
    std::vector<double> hop_energy_;
    std::vector<Job> jobs_;
    ReportSet reports_;
    std::vector<LivenessWatch> watches_;

    std::int64_t next_job_id_ = 0;
    int pending_injections_ = 0;
    bool died_ = false;
    DeathCause cause_ = DeathCause::None;
    std::int64_t jobs_completed_ = 0;
    std::int64_t jobs_injected_ = 0;
    std::int64_t jobs_lost_ = 0;
    std::int64_t frames_ = 0;
    std::int64_t deadlock_reports_ = 0;
    std::int64_t budget_violations_ = 0;
    std::int64_t liveness_checks_ = 0;
    std::int64_t liveness_violations_ = 0;
    double controller_energy_ = 0.0;
    std::int64_t controller_death_ = -1;
};

}  // namespace

SimMetrics run(const Scenario& scenario) {
    if (auto v = validate(scenario); !v.empty()) throw ConfigError(join_violations(v));
    Engine engine(scenario);
    return engine.run();
}

}  // namespace etsim
