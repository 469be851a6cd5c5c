#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rdv/graph.hpp"
#include "rdv/program.hpp"

namespace rdv {

struct fault_model {
    enum class kind : std::uint8_t { none, random, bounded, unbounded };

    kind what = kind::none;
    double p = 0.0;         // random
    std::uint64_t c = 0;    // bounded

    static fault_model none() { return {}; }
    static fault_model random(double p);
    static fault_model bounded(std::uint64_t c);
    static fault_model unbounded() { return {kind::unbounded, 0.0, 0}; }

    /// Faults allowed in a row for one agent (`forever` when unconstrained).
    std::uint64_t max_run() const noexcept;
};

std::string to_string(const fault_model& m);
/// Parses `none`, `random:<p>`, `bounded:<c>` or `unbounded`.
fault_model parse_fault_model(const std::string& text);

/// What the adversary sees of one agent this round.
struct agent_view {
    bool active = false;       // awake and not yet met
    action decision{};
    node_id position = 0;
    std::uint64_t fault_run = 0;  // consecutive faults so far
};

struct round_view {
    std::uint64_t round = 0;
    std::array<agent_view, 2> agents{};
};

using fault_pair = std::array<bool, 2>;

/// Fault-injection strategy. Only Move decisions can be faulted; the engine ignores
/// fault marks on idle agents.
class adversary {
public:
    virtual ~adversary() = default;

    virtual fault_pair decide(const round_view& view) = 0;

    /// `rounds` rounds in which every agent idled or slept.
    virtual void skip_idle_rounds(std::uint64_t /*rounds*/) {}

    virtual std::unique_ptr<adversary> clone() const = 0;
    virtual fault_model model() const = 0;
    virtual std::string name() const = 0;
};

std::unique_ptr<adversary> make_no_faults();

/// Independent faults with probability p per agent per Move; per-agent streams.
std::unique_ptr<adversary> make_random_adversary(double p, std::uint64_t seed);

/// Faults every Move until the agent has been blocked c rounds in a row.
std::unique_ptr<adversary> make_max_delay_adversary(std::uint64_t c);

/// Random faults with probability p, never more than c in a row.
std::unique_ptr<adversary> make_random_bounded_adversary(double p, std::uint64_t c, std::uint64_t seed);

/// Finite unbounded delays: each Move is faulted with probability p, runs capped at
/// a per-run random length below `max_run`.
std::unique_ptr<adversary> make_random_finite_adversary(double p, std::uint64_t max_run, std::uint64_t seed);

/// Blocks every move of an agent that is not attacking. An agent attacks once it has
/// tried to move in `patience` consecutive rounds; attacking agents are released
/// together, waiting for any agent still building up its streak.
class tough_adversary final : public adversary {
public:
    explicit tough_adversary(std::uint64_t patience = 64);

    fault_pair decide(const round_view& view) override;
    void skip_idle_rounds(std::uint64_t rounds) override;
    std::unique_ptr<adversary> clone() const override { return std::make_unique<tough_adversary>(*this); }
    fault_model model() const override { return fault_model::unbounded(); }
    std::string name() const override { return "tough"; }

    struct release {
        std::uint64_t round;
        std::array<bool, 2> agents;
        std::array<bool, 2> attacking;
    };
    const std::vector<release>& releases() const noexcept { return releases_; }

private:
    std::uint64_t patience_;
    std::array<std::uint64_t, 2> streak_{};
    std::vector<release> releases_;
};

// Scripted schedules.

struct schedule_entry {
    std::uint64_t round;
    std::uint32_t agent;
    bool fault;

    friend bool operator==(const schedule_entry&, const schedule_entry&) = default;
};

using schedule = std::vector<schedule_entry>;

/// Text form: one `round agent allow|fault` line per entry, '#' comments.
std::string schedule_to_text(const schedule& s);
schedule parse_schedule(std::istream& in);
schedule parse_schedule_text(const std::string& text);
schedule load_schedule(const std::string& path);

/// Throws schedule-rejected naming the first offending round.
void validate_schedule(const schedule& s, const fault_model& model);

/// Replays a validated schedule; rounds not listed allow everything.
std::unique_ptr<adversary> make_scripted_adversary(const schedule& s, const fault_model& model);

}  // namespace rdv
