#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdv/graph.hpp"
#include "rdv/program.hpp"
#include "rdv/uxs.hpp"

namespace rdv {

/// Infinite walk consumed step by step by procedure Asynch.
///
/// next_port receives the degree of the current node and the port by which the
/// previous step of this walk entered it (nullopt before the first step).
class asynch_walk {
public:
    virtual ~asynch_walk() = default;

    virtual port_t next_port(port_t degree, std::optional<port_t> entry) = 0;
    virtual std::uint64_t label() const = 0;
    virtual std::unique_ptr<asynch_walk> clone() const = 0;
    virtual void state_key(std::vector<std::uint64_t>& out) const = 0;
};

inline constexpr std::uint64_t default_step_ceiling = std::uint64_t{1} << 40;

/// What a phase does when (P(m)+1)^label trajectories pass the step ceiling.
enum class overflow_policy {
    unending,  // the phase repeats its trajectory forever
    fail,      // resource-limit error on entering the phase
};

/// Iterative deepening over the size bound: for m = 1, 2, ... the trajectory R(m, v)
/// is repeated (P(m)+1)^label times. Bounds past the provider's largest reuse the
/// largest sequence.
class default_asynch_walk final : public asynch_walk {
public:
    default_asynch_walk(std::uint64_t label, std::shared_ptr<const uxs_provider> provider,
                        std::uint64_t step_ceiling = default_step_ceiling,
                        overflow_policy policy = overflow_policy::unending);

    port_t next_port(port_t degree, std::optional<port_t> entry) override;
    std::uint64_t label() const override { return label_; }
    std::unique_ptr<asynch_walk> clone() const override { return std::make_unique<default_asynch_walk>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;

    std::size_t phase() const noexcept { return phase_; }
    std::uint64_t repetitions(std::size_t m) const;
    /// True right before the first step of a trajectory.
    bool at_trajectory_boundary() const noexcept { return forward_ == 0 && !pending_entry_; }

private:
    void enter_phase(std::size_t m);

    std::uint64_t label_;
    std::shared_ptr<const uxs_provider> provider_;
    std::uint64_t ceiling_;
    overflow_policy policy_;
    std::size_t phase_ = 0;
    std::uint64_t reps_ = 0;  // `forever` when the phase never ends
    std::uint64_t rep_ = 0;
    std::size_t forward_ = 0;
    std::size_t backward_ = 0;
    bool pending_entry_ = false;
    std::vector<port_t> entries_;
};

/// Cycles through a fixed list of ports (taken mod degree).
class cyclic_walk final : public asynch_walk {
public:
    cyclic_walk(std::vector<port_t> ports, std::uint64_t label = 0);

    port_t next_port(port_t degree, std::optional<port_t> entry) override;
    std::uint64_t label() const override { return label_; }
    std::unique_ptr<asynch_walk> clone() const override { return std::make_unique<cyclic_walk>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;

private:
    std::vector<port_t> ports_;
    std::uint64_t label_;
    std::size_t next_ = 0;
};

/// Steps of the walks needed to finish every phase m <= n (saturating).
std::uint64_t asynch_steps_through(std::size_t n, std::uint64_t label, const uxs_provider& provider,
                                   std::uint64_t ceiling = default_step_ceiling);

/// 4 * (steps of both walks through phase n), capped at `ceiling`.
std::uint64_t asynch_default_horizon(std::size_t n, std::uint64_t label_a, std::uint64_t label_b,
                                     const uxs_provider& provider, std::uint64_t ceiling = 1u << 20);

// Model-M checker.

enum class meeting_kind {
    edge_crossing,  // opposite directions on one edge in the same round
    never_moved,    // arrival at the node of an agent that has not moved yet
    same_origin,    // both arrived from the same node in different rounds
    exchange,       // arrived from each other's next node, leave towards each other's origin
    other_node,     // any remaining node meeting
};

const char* to_string(meeting_kind kind) noexcept;

struct meeting_witness {
    meeting_kind kind;
    std::uint64_t step_a;  // steps completed by each walk when the meeting happens
    std::uint64_t step_b;
    node_id node;          // meeting node (edge crossings: the node agent a left)
    node_id other_node;    // edge crossings: the node agent a was heading to
    std::uint64_t worst_total_steps;  // longest the adversary can postpone the meeting
};

enum class advance { a, b, both };

struct asynch_check_options {
    std::size_t state_ceiling = 1u << 24;
    std::array<advance, 3> order{advance::a, advance::b, advance::both};
};

struct asynch_check_result {
    bool always_meets = false;
    std::optional<meeting_witness> witness;  // when always_meets
    std::vector<advance> avoiding_schedule;  // when a schedule avoids every meeting
    std::size_t states_explored = 0;
};

/// Exhaustive search over adversarial interleavings of two walks: each round the
/// adversary advances a non-empty subset of the agents by one step. Meetings count at
/// nodes and inside edges.
asynch_check_result verify_asynch_meeting(const port_graph& g, const asynch_walk& walk_a,
                                          const asynch_walk& walk_b, node_id start_a, node_id start_b,
                                          std::uint64_t horizon, const asynch_check_options& options = {});

}  // namespace rdv
