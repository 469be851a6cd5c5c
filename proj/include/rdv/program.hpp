#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdv/graph.hpp"

namespace rdv {

struct action {
    enum class kind : std::uint8_t { idle, move };

    kind what = kind::idle;
    port_t port = 0;

    static constexpr action idle() noexcept { return {}; }
    static constexpr action move(port_t p) noexcept { return {kind::move, p}; }
    bool is_move() const noexcept { return what == kind::move; }

    friend bool operator==(const action&, const action&) = default;
};

/// What an agent perceives at the start of a round.
struct observation {
    port_t degree = 0;
    std::optional<port_t> entry;  // port of the last entry into the current node
    bool fault = false;           // the previous round's move was blocked
    bool met = false;
};

inline constexpr std::uint64_t forever = std::numeric_limits<std::uint64_t>::max();

/// Deterministic per-round decision machine of one agent.
///
/// Programs see only their observations; they never learn node ids, the round number
/// of the other agent, or anything about crossings.
class agent_program {
public:
    virtual ~agent_program() = default;

    virtual action decide(const observation& obs) = 0;

    /// The program idles forever from now on.
    virtual bool finished() const { return false; }

    /// Rounds (from the next decide) that will be idle whatever is observed. Only
    /// meaningful right after an idle decision; `forever` when finished.
    virtual std::uint64_t idle_horizon() const { return finished() ? forever : 0; }

    /// Consumes `rounds` idle rounds; requires rounds <= idle_horizon().
    virtual void skip(std::uint64_t /*rounds*/) {}

    virtual std::unique_ptr<agent_program> clone() const = 0;

    /// Appends everything the future behaviour depends on; equal keys imply equal futures.
    virtual void state_key(std::vector<std::uint64_t>& out) const = 0;

    virtual std::string name() const = 0;
};

/// Idles forever.
std::unique_ptr<agent_program> make_idle_program();

/// Attempts Move(port mod degree) in every round.
std::unique_ptr<agent_program> make_constant_port_program(port_t port);

}  // namespace rdv
