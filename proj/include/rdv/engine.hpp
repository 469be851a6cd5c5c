#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdv/adversary.hpp"
#include "rdv/graph.hpp"
#include "rdv/program.hpp"

namespace rdv {

struct agent_spec {
    std::uint64_t label = 1;
    node_id start = 0;
    std::uint64_t wake = 0;
};

using program_factory = std::function<std::unique_ptr<agent_program>(std::size_t agent, const agent_spec& spec)>;
using adversary_factory = std::function<std::unique_ptr<adversary>(std::uint64_t seed)>;

enum class trace_level { none, full };

struct run_config {
    std::shared_ptr<const port_graph> graph;
    std::array<agent_spec, 2> agents{};
    program_factory make_program;
    adversary_factory make_adversary;  // defaults to no faults
    std::uint64_t horizon = 1'000'000;
    std::uint64_t seed = 1;
    trace_level trace = trace_level::none;
    bool dormant_meeting = true;    // meeting an agent that has not woken up yet counts
    bool detect_crossings = true;
    bool swap_evaluation = false;   // ask agent 1 for its decision before agent 0
    bool fast_forward = true;       // skip rounds in which both agents surely idle
    bool enforce_model = true;      // online check of the adversary's fault model
    bool distinct_labels = true;
};

struct trace_row {
    std::uint64_t round;
    std::uint32_t agent;
    node_id position;     // before the round
    action decision;
    bool fault;
    bool moved;
    node_id to;
};

struct crossing_event {
    std::uint64_t round;
    node_id u;  // agent 0 went u -> v, agent 1 v -> u
    node_id v;
};

struct run_result {
    bool met = false;
    bool truncated = false;
    std::uint64_t meeting_round = 0;
    node_id meeting_node = 0;
    std::uint64_t cost = 0;
    std::array<std::uint64_t, 2> traversals{};
    std::array<std::uint64_t, 2> faults{};
    std::uint64_t rounds = 0;  // rounds simulated
    std::vector<crossing_event> crossings;
    std::vector<trace_row> trace;
};

/// JSON lines, one object per (round, agent).
std::string trace_jsonl(const run_result& r);

/// Joint state of one run: graph, both agents and their programs. Copyable (programs
/// are cloned), which the worst-case search relies on.
class simulation {
public:
    simulation(std::shared_ptr<const port_graph> g, const std::array<agent_spec, 2>& agents,
               std::array<std::unique_ptr<agent_program>, 2> programs, bool dormant_meeting = true);
    simulation(const simulation& other);
    simulation(simulation&&) noexcept = default;
    simulation& operator=(const simulation& other) {
        simulation copy(other);
        return *this = std::move(copy);
    }
    simulation& operator=(simulation&&) noexcept = default;

    struct outcome {
        std::array<bool, 2> moved{};
        std::array<bool, 2> faulted{};
        bool crossing = false;
        node_id cross_u = 0, cross_v = 0;
    };

    /// Wakes agents due this round, then collects decisions; returns the adversary's view.
    const round_view& prepare(bool swap_order = false);
    /// Applies the adversary's decisions and ends the round.
    outcome commit(const fault_pair& faults);

    /// Rounds that can be skipped because both agents surely idle (0 when none).
    std::uint64_t idle_rounds() const;
    void skip(std::uint64_t rounds);

    bool met() const noexcept { return met_; }
    std::uint64_t round() const noexcept { return round_; }
    std::uint64_t meeting_round() const noexcept { return meeting_round_; }
    node_id position(std::size_t a) const noexcept { return agents_[a].position; }
    bool awake(std::size_t a) const noexcept { return agents_[a].awake; }
    std::uint64_t traversals(std::size_t a) const noexcept { return agents_[a].traversals; }
    std::uint64_t fault_run(std::size_t a) const noexcept { return agents_[a].fault_run; }
    std::uint64_t faults(std::size_t a) const noexcept { return agents_[a].faults; }
    const agent_program& program(std::size_t a) const { return *agents_[a].program; }
    /// Every program is finished and nobody is asleep: nothing will ever change.
    bool stationary() const;
    const port_graph& graph() const noexcept { return *graph_; }

    /// Everything that determines the future, except the absolute round.
    void state_key(std::vector<std::uint64_t>& out) const;

private:
    struct agent_state {
        agent_spec spec;
        std::unique_ptr<agent_program> program;
        node_id position = 0;
        std::optional<port_t> entry;
        bool awake = false;
        bool fault_flag = false;
        bool last_move = false;
        std::uint64_t fault_run = 0;
        std::uint64_t traversals = 0;
        std::uint64_t faults = 0;
    };

    void wake_due();
    void check_meeting();

    std::shared_ptr<const port_graph> graph_;
    std::array<agent_state, 2> agents_;
    bool dormant_meeting_;
    std::uint64_t round_ = 0;
    bool met_ = false;
    std::uint64_t meeting_round_ = 0;
    bool prepared_ = false;
    round_view view_;
};

/// Validates the configuration and builds the initial simulation.
simulation make_simulation(const run_config& config);

run_result run(const run_config& config);

struct mc_summary {
    std::uint64_t trials = 0;
    std::uint64_t met = 0;
    double met_rate = 0.0;
    std::uint64_t cost_min = 0, cost_med = 0, cost_p95 = 0, cost_max = 0;
    std::uint64_t rounds_med = 0;
    double mean_rounds_to_meeting = 0.0;
    std::vector<std::uint64_t> costs;   // per trial, in trial order
    std::vector<std::uint64_t> rounds;  // meeting round or horizon
    std::vector<std::uint8_t> outcomes;  // 1 when the trial met
};

struct mc_options {
    std::uint64_t trials = 100;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    bool random_starts = false;  // fresh distinct start nodes per trial
};

/// Trial t runs with seed derive_seed(seed, t).
mc_summary monte_carlo(const run_config& base, const mc_options& options);

/// Nearest-rank quantile of an unsorted sample.
std::uint64_t nearest_rank(std::vector<std::uint64_t> values, double q);

std::string summary_csv_header(const std::vector<std::string>& param_names);
std::string summary_csv_row(const std::vector<std::string>& param_values, const mc_summary& s);

}  // namespace rdv
