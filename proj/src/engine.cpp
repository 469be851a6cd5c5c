#include "rdv/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rdv/error.hpp"
#include "rdv/random.hpp"

namespace rdv {

simulation::simulation(std::shared_ptr<const port_graph> g, const std::array<agent_spec, 2>& agents,
                       std::array<std::unique_ptr<agent_program>, 2> programs, bool dormant_meeting)
    : graph_(std::move(g)), dormant_meeting_(dormant_meeting) {
    if (!graph_) {
        fail(error_code::invalid_parameter, "simulation needs a graph");
    }
    for (std::size_t a = 0; a < 2; ++a) {
        if (agents[a].start >= graph_->node_count()) {
            fail(error_code::invalid_parameter, "start node out of range");
        }
        if (!programs[a]) {
            fail(error_code::invalid_parameter, "missing agent program");
        }
        agents_[a].spec = agents[a];
        agents_[a].program = std::move(programs[a]);
        agents_[a].position = agents[a].start;
    }
}

simulation::simulation(const simulation& o)
    : graph_(o.graph_),
      dormant_meeting_(o.dormant_meeting_),
      round_(o.round_),
      met_(o.met_),
      meeting_round_(o.meeting_round_),
      prepared_(o.prepared_),
      view_(o.view_) {
    for (std::size_t a = 0; a < 2; ++a) {
        const auto& src = o.agents_[a];
        auto& dst = agents_[a];
        dst.spec = src.spec;
        dst.program = src.program->clone();
        dst.position = src.position;
        dst.entry = src.entry;
        dst.awake = src.awake;
        dst.fault_flag = src.fault_flag;
        dst.last_move = src.last_move;
        dst.fault_run = src.fault_run;
        dst.traversals = src.traversals;
        dst.faults = src.faults;
    }
}

void simulation::check_meeting() {
    if (met_ || agents_[0].position != agents_[1].position) {
        return;
    }
    if (dormant_meeting_ || (agents_[0].awake && agents_[1].awake)) {
        met_ = true;
        meeting_round_ = round_;
    }
}

void simulation::wake_due() {
    bool woke = false;
    for (auto& ag : agents_) {
        if (!ag.awake && ag.spec.wake <= round_) {
            ag.awake = true;
            woke = true;
        }
    }
    if (woke) {
        check_meeting();
    }
}

const round_view& simulation::prepare(bool swap_order) {
    if (prepared_) {
        throw std::logic_error("prepare called twice in one round");
    }
    wake_due();
    view_ = round_view{};
    view_.round = round_;
    if (met_) {
        return view_;  // met at a wake-up: nothing left to decide
    }
    for (std::size_t k = 0; k < 2; ++k) {
        const std::size_t a = swap_order ? 1 - k : k;
        auto& ag = agents_[a];
        auto& v = view_.agents[a];
        v.position = ag.position;
        v.fault_run = ag.fault_run;
        if (!ag.awake || met_) {
            continue;
        }
        const port_t degree = graph_->degree(ag.position);
        const observation obs{degree, ag.entry, ag.fault_flag, false};
        const action act = ag.program->decide(obs);
        if (act.is_move() && act.port >= degree) {
            throw std::logic_error(ag.program->name() + " chose port " + std::to_string(act.port) +
                                   " at a node of degree " + std::to_string(degree));
        }
        v.active = true;
        v.decision = act;
    }
    prepared_ = true;
    return view_;
}

simulation::outcome simulation::commit(const fault_pair& faults) {
    if (!prepared_) {
        throw std::logic_error("commit without prepare");
    }
    prepared_ = false;
    outcome out;
    std::array<node_id, 2> from{agents_[0].position, agents_[1].position};
    for (std::size_t a = 0; a < 2; ++a) {
        auto& ag = agents_[a];
        const auto& v = view_.agents[a];
        if (!v.active) {
            continue;
        }
        ag.last_move = v.decision.is_move();
        if (!v.decision.is_move()) {
            ag.fault_flag = false;
            ag.fault_run = 0;
            continue;
        }
        if (faults[a]) {
            out.faulted[a] = true;
            ag.fault_flag = true;
            ++ag.fault_run;
            ++ag.faults;
            continue;
        }
        const auto& e = graph_->step(ag.position, v.decision.port);
        ag.position = e.node;
        ag.entry = e.port;
        ag.fault_flag = false;
        ag.fault_run = 0;
        ++ag.traversals;
        out.moved[a] = true;
    }
    if (out.moved[0] && out.moved[1] && agents_[0].position == from[1] && agents_[1].position == from[0]) {
        out.crossing = true;
        out.cross_u = from[0];
        out.cross_v = from[1];
    }
    ++round_;
    check_meeting();
    return out;
}

std::uint64_t simulation::idle_rounds() const {
    if (met_ || prepared_) {
        return 0;
    }
    std::uint64_t k = forever;
    for (const auto& ag : agents_) {
        if (!ag.awake) {
            if (ag.spec.wake <= round_) {
                return 0;
            }
            k = std::min(k, ag.spec.wake - round_);
            continue;
        }
        if (ag.last_move) {
            return 0;
        }
        k = std::min(k, ag.program->idle_horizon());
    }
    return k;
}

void simulation::skip(std::uint64_t rounds) {
    for (auto& ag : agents_) {
        if (ag.awake) {
            if (ag.program->idle_horizon() != forever) {
                ag.program->skip(rounds);
            }
            ag.fault_flag = false;
            ag.fault_run = 0;
        }
    }
    round_ += rounds;
}

bool simulation::stationary() const {
    for (const auto& ag : agents_) {
        if (!ag.awake || ag.last_move || !ag.program->finished()) {
            return false;
        }
    }
    return true;
}

void simulation::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(met_);
    for (const auto& ag : agents_) {
        out.push_back(ag.position);
        out.push_back(ag.entry ? *ag.entry + 1 : 0);
        out.push_back(ag.awake | (ag.fault_flag << 1) | (ag.last_move << 2));
        out.push_back(ag.fault_run);
        out.push_back(ag.awake ? 0 : ag.spec.wake - std::min(ag.spec.wake, round_));
        const auto mark = out.size();
        out.push_back(0);
        ag.program->state_key(out);
        out[mark] = out.size() - mark;  // length prefix keeps the two keys apart
    }
}

simulation make_simulation(const run_config& config) {
    if (!config.graph) {
        fail(error_code::invalid_parameter, "run needs a graph");
    }
    if (!config.make_program) {
        fail(error_code::invalid_parameter, "run needs a program factory");
    }
    const auto& a = config.agents;
    if (a[0].start == a[1].start) {
        fail(error_code::invalid_parameter, "agents must start at different nodes");
    }
    if (config.distinct_labels && a[0].label == a[1].label) {
        fail(error_code::invalid_parameter, "agents must have different labels");
    }
    std::array<std::unique_ptr<agent_program>, 2> programs{config.make_program(0, a[0]), config.make_program(1, a[1])};
    return simulation(config.graph, a, std::move(programs), config.dormant_meeting);
}

run_result run(const run_config& config) {
    auto sim = make_simulation(config);
    auto adv = config.make_adversary ? config.make_adversary(config.seed) : make_no_faults();
    if (!adv) {
        fail(error_code::invalid_parameter, "adversary factory returned nothing");
    }
    const auto limit = adv->model().max_run();
    run_result result;
    const bool tracing = config.trace == trace_level::full;

    while (!sim.met() && sim.round() < config.horizon) {
        if (config.fast_forward && !tracing) {
            const auto k = std::min(sim.idle_rounds(), config.horizon - sim.round());
            if (k > 0) {
                sim.skip(k);
                adv->skip_idle_rounds(k);
                continue;
            }
        }
        const auto& view = sim.prepare(config.swap_evaluation);
        if (sim.met()) {
            break;
        }
        auto faults = adv->decide(view);
        for (std::size_t a = 0; a < 2; ++a) {
            const auto& v = view.agents[a];
            faults[a] = faults[a] && v.active && v.decision.is_move();
            if (config.enforce_model && faults[a] && v.fault_run + 1 > limit) {
                fail(error_code::constraint_violation,
                     "round " + std::to_string(view.round) + ": agent " + std::to_string(a) + " faulted " +
                         std::to_string(v.fault_run + 1) + " rounds in a row under " + to_string(adv->model()));
            }
        }
        const round_view snapshot = view;
        const auto out = sim.commit(faults);
        if (tracing) {
            for (std::uint32_t a = 0; a < 2; ++a) {
                const auto& v = snapshot.agents[a];
                if (v.active) {
                    result.trace.push_back(
                        {snapshot.round, a, v.position, v.decision, out.faulted[a], out.moved[a], sim.position(a)});
                }
            }
        }
        if (config.detect_crossings && out.crossing) {
            result.crossings.push_back({snapshot.round, out.cross_u, out.cross_v});
        }
    }
    result.met = sim.met();
    result.truncated = !result.met;
    result.meeting_round = sim.met() ? sim.meeting_round() : 0;
    result.meeting_node = sim.met() ? sim.position(0) : 0;
    result.rounds = sim.round();
    for (std::size_t a = 0; a < 2; ++a) {
        result.traversals[a] = sim.traversals(a);
        result.faults[a] = sim.faults(a);
    }
    result.cost = result.traversals[0] + result.traversals[1];
    return result;
}

std::string trace_jsonl(const run_result& r) {
    std::ostringstream out;
    for (const auto& row : r.trace) {
        out << "{\"round\":" << row.round << ",\"agent\":" << row.agent << ",\"pos\":" << row.position
            << ",\"action\":\"" << (row.decision.is_move() ? "move" : "idle") << "\",\"port\":";
        if (row.decision.is_move()) {
            out << row.decision.port;
        } else {
            out << "null";
        }
        out << ",\"fault\":" << (row.fault ? "true" : "false") << ",\"moved\":" << (row.moved ? "true" : "false")
            << ",\"to\":" << row.to << "}\n";
    }
    return out.str();
}

std::uint64_t nearest_rank(std::vector<std::uint64_t> values, double q) {
    if (values.empty()) {
        return 0;
    }
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(q * static_cast<double>(values.size()) + 0.999999999);
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

mc_summary monte_carlo(const run_config& base, const mc_options& options) {
    if (options.trials == 0) {
        fail(error_code::invalid_parameter, "monte carlo needs at least one trial");
    }
    mc_summary s;
    s.trials = options.trials;
    s.costs.assign(options.trials, 0);
    s.rounds.assign(options.trials, 0);
    s.outcomes.assign(options.trials, 0);
    std::vector<std::uint64_t> meet_rounds(options.trials, 0);

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const auto t = next.fetch_add(1);
            if (t >= options.trials) {
                return;
            }
            try {
                run_config cfg = base;
                cfg.trace = trace_level::none;
                cfg.seed = derive_seed(options.seed, t);
                if (options.random_starts) {
                    std::mt19937_64 rng(derive_seed(cfg.seed, 0x57a27));
                    const auto n = cfg.graph->node_count();
                    const auto u = static_cast<node_id>(uniform_below(rng, n));
                    auto v = static_cast<node_id>(uniform_below(rng, n - 1));
                    if (v >= u) {
                        ++v;
                    }
                    cfg.agents[0].start = u;
                    cfg.agents[1].start = v;
                }
                const auto r = run(cfg);
                s.costs[t] = r.cost;
                s.rounds[t] = r.met ? r.meeting_round : r.rounds;
                s.outcomes[t] = r.met;
                meet_rounds[t] = r.meeting_round;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = options.trials;
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(options.trials)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    double meet_sum = 0;
    for (std::uint64_t t = 0; t < options.trials; ++t) {
        if (s.outcomes[t]) {
            ++s.met;
            meet_sum += static_cast<double>(meet_rounds[t]);
        }
    }
    s.met_rate = static_cast<double>(s.met) / static_cast<double>(s.trials);
    s.mean_rounds_to_meeting = s.met ? meet_sum / static_cast<double>(s.met) : 0.0;
    s.cost_min = *std::min_element(s.costs.begin(), s.costs.end());
    s.cost_max = *std::max_element(s.costs.begin(), s.costs.end());
    s.cost_med = nearest_rank(s.costs, 0.5);
    s.cost_p95 = nearest_rank(s.costs, 0.95);
    s.rounds_med = nearest_rank(s.rounds, 0.5);
    return s;
}

std::string summary_csv_header(const std::vector<std::string>& param_names) {
    std::string out;
    for (const auto& p : param_names) {
        out += p + ',';
    }
    return out + "trials,met_rate,cost_min,cost_med,cost_p95,cost_max,rounds_med";
}

std::string summary_csv_row(const std::vector<std::string>& param_values, const mc_summary& s) {
    std::ostringstream out;
    for (const auto& p : param_values) {
        out << p << ',';
    }
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.6f", s.met_rate);
    out << s.trials << ',' << rate << ',' << s.cost_min << ',' << s.cost_med << ',' << s.cost_p95 << ','
        << s.cost_max << ',' << s.rounds_med;
    return out.str();
}

}  // namespace rdv
