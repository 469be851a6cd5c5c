#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rdv/asynch.hpp"
#include "rdv/program.hpp"
#include "rdv/uxs.hpp"

namespace rdv {

/// Label bits transformed so that no two labels are prefixes of each other:
/// 0 -> 0011, 1 -> 1100 over the binary representation, then 10 appended.
std::vector<std::uint8_t> modified_label(std::uint64_t label);

/// One Dance round relative to the edge {x, y}; the agent starts at y.
enum class dance_step : std::uint8_t { idle, cross };

/// 10 idles, then per bit 0 -> idle idle, 1 -> cross cross, then 12 crossings.
std::vector<dance_step> dance_script(const std::vector<std::uint8_t>& modified);
inline std::vector<dance_step> dance_script(std::uint64_t label) { return dance_script(modified_label(label)); }

inline constexpr std::size_t dance_prelude = 10;
inline constexpr std::size_t dance_coda = 12;
inline constexpr std::size_t correction_idles = 20;
inline constexpr std::size_t correction_crossings = 20;

// RV-RF.

class rv_rf_program final : public agent_program {
public:
    enum class mode : std::uint8_t { progress, dance, correction };

    rv_rf_program(std::uint64_t label, std::unique_ptr<asynch_walk> walk);
    rv_rf_program(const rv_rf_program& other);

    action decide(const observation& obs) override;
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<rv_rf_program>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;
    std::string name() const override { return "rv_rf"; }

    mode current_mode() const noexcept { return mode_; }
    std::uint64_t stages_completed() const noexcept { return stages_; }
    std::uint64_t corrections_started() const noexcept { return corrections_; }
    /// Dance round to run next (resume point while correcting).
    std::size_t dance_round() const noexcept { return dance_t_; }
    /// Round within the current Correction.
    std::size_t correction_round() const noexcept { return corr_t_; }

private:
    enum class last_kind : std::uint8_t { none, progress_move, dance, correction };

    void start_correction(bool from_dance);

    std::uint64_t label_;
    std::shared_ptr<const std::vector<dance_step>> script_;
    std::unique_ptr<asynch_walk> walk_;
    mode mode_ = mode::progress;
    last_kind last_ = last_kind::none;
    bool last_moved_ = false;
    std::optional<port_t> walk_entry_;
    std::optional<port_t> stage_port_;
    port_t edge_port_ = 0;  // port of the stage edge at the current endpoint
    bool at_y_ = true;      // at the endpoint reached by the Progress traversal
    std::size_t dance_t_ = 0;
    std::size_t corr_t_ = 0;
    bool w_is_y_ = true;    // side of the last Dance fault
    std::uint64_t stages_ = 0;
    std::uint64_t corrections_ = 0;
};

std::unique_ptr<agent_program> make_rv_rf(std::uint64_t label, std::shared_ptr<const uxs_provider> provider);

// Tree-RV-UF.

class tree_rv_uf_program final : public agent_program {
public:
    explicit tree_rv_uf_program(std::uint64_t label);

    action decide(const observation& obs) override;
    bool finished() const override { return done_; }
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<tree_rv_uf_program>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;
    std::string name() const override { return "tree_rv_uf"; }

    std::uint64_t walks_completed() const noexcept { return walks_; }

private:
    std::uint64_t label_;
    bool started_ = false;
    bool done_ = false;
    bool pending_ = false;
    port_t root_degree_ = 0;
    port_t out_ = 0;
    std::vector<port_t> parents_;  // entry port at each node below the root, root first
    std::uint64_t walks_ = 0;
};

// Oriented ring of known size.

class oriented_ring_program final : public agent_program {
public:
    oriented_ring_program(std::uint64_t label, std::size_t ring_size);

    action decide(const observation& obs) override;
    bool finished() const override { return done_ >= target_; }
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<oriented_ring_program>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;
    std::string name() const override { return "oriented_ring"; }

private:
    std::uint64_t target_;
    std::uint64_t done_ = 0;
    bool pending_ = false;
};

// A(c): every base round becomes a segment of 2c+1 rounds.

class ac_wrapper final : public agent_program {
public:
    ac_wrapper(std::unique_ptr<agent_program> base, std::uint64_t c);
    ac_wrapper(const ac_wrapper& other);

    action decide(const observation& obs) override;
    bool finished() const override;
    std::uint64_t idle_horizon() const override;
    void skip(std::uint64_t rounds) override;
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<ac_wrapper>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;
    std::string name() const override { return "ac(" + base_->name() + ")"; }

    const agent_program& base() const noexcept { return *base_; }
    std::uint64_t segment_length() const noexcept { return 2 * c_ + 1; }

private:
    std::unique_ptr<agent_program> base_;
    std::uint64_t c_;
    std::uint64_t offset_ = 0;
    action segment_{};
    bool moved_ = false;
    bool pending_ = false;
    bool stalled_ = false;  // a segment ended without its traversal
};

std::unique_ptr<agent_program> wrap_with_ac(std::unique_ptr<agent_program> base, std::uint64_t c);

// Graph-RV-BF.

/// One call of the exploration sub-procedure: u steps of c rounds each, padded to u*c.
class exploration_call {
public:
    exploration_call() = default;
    exploration_call(std::uint64_t u, std::uint64_t c, std::vector<std::uint32_t> terms);

    /// Action for the next round, after consuming the feedback of the previous one;
    /// nullopt once u*c rounds have elapsed (success() is then final).
    std::optional<action> next(const observation& obs);
    bool success() const noexcept { return !failed_; }
    std::uint64_t elapsed() const noexcept { return elapsed_; }
    /// Rounds that will certainly be idle from now on.
    std::uint64_t idle_run() const noexcept;
    void skip(std::uint64_t rounds) { elapsed_ += rounds; }
    void state_key(std::vector<std::uint64_t>& out) const;

private:
    std::uint64_t u_ = 0;
    std::uint64_t c_ = 0;
    std::vector<std::uint32_t> terms_;
    std::uint64_t elapsed_ = 0;
    bool moved_ = false;
    bool failed_ = false;
    bool pending_ = false;
};

struct bf_phase_record {
    std::uint64_t phase;
    std::uint64_t u;
    std::uint64_t c;
    bool success;
    bool cycled;  // the UXS prefix wrapped around the longest cached sequence
};

/// Phase arithmetic of Graph-RV-BF.
struct bf_schedule {
    static std::uint64_t stage_length(std::uint64_t i) { return std::uint64_t{1} << (i + 4); }
    static std::uint64_t busy_length(std::uint64_t i) { return 3 * (std::uint64_t{1} << i); }
    static std::uint64_t wait_length(std::uint64_t i) { return 13 * (std::uint64_t{1} << i); }
    static std::uint64_t phase_length(std::uint64_t i) { return std::uint64_t{1} << (2 * i + 4); }
    static std::uint64_t stages(std::uint64_t i) { return std::uint64_t{1} << i; }
    /// ceil(log2(label + 1)): first phase with an active stage.
    static std::uint64_t first_active_phase(std::uint64_t label);
};

class graph_rv_bf_program final : public agent_program {
public:
    graph_rv_bf_program(std::uint64_t label, std::shared_ptr<const uxs_provider> provider);

    action decide(const observation& obs) override;
    std::uint64_t idle_horizon() const override;
    void skip(std::uint64_t rounds) override;
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<graph_rv_bf_program>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;
    std::string name() const override { return "graph_rv_bf"; }

    std::uint64_t phase() const noexcept { return phase_; }
    std::uint64_t stage() const noexcept { return stage_; }
    std::uint64_t u() const noexcept { return u_; }
    std::uint64_t c() const noexcept { return c_; }
    const std::vector<bf_phase_record>& phase_log() const noexcept { return log_; }

private:
    void begin_stage();
    void start_exploration();
    void finish_busy();

    std::uint64_t label_;
    std::shared_ptr<const uxs_provider> provider_;
    std::uint64_t q_;
    std::uint64_t phase_ = 0;
    std::uint64_t stage_ = 0;
    bool busy_ = false;
    std::uint64_t wait_left_ = 0;
    std::uint64_t u_ = 0;
    std::uint64_t c_ = 0;
    std::uint64_t explorations_ = 0;
    bool all_ok_ = true;
    bool cycled_ = false;
    bool last_move_ = false;
    exploration_call call_;
    std::vector<bf_phase_record> log_;
};

/// Checks the Graph-RV-BF update rule over a success/failure string starting at phase
/// q; throws std::logic_error if u*c = 2^i ever breaks.
void check_bf_update_rule(std::uint64_t q, const std::vector<bool>& outcomes);

// Known size bound: (P(m)+1)^label repetitions of R(m, v), then idle.

class known_bound_program final : public agent_program {
public:
    known_bound_program(std::uint64_t label, std::size_t m, std::shared_ptr<const uxs_provider> provider,
                        std::uint64_t step_ceiling = default_step_ceiling);

    action decide(const observation& obs) override;
    bool finished() const override { return done_; }
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<known_bound_program>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;
    std::string name() const override { return "known_bound"; }

    std::uint64_t repetitions() const noexcept { return reps_; }
    std::size_t trajectory_length() const noexcept { return 2 * terms_.size(); }

private:
    std::vector<std::uint32_t> terms_;
    std::uint64_t reps_;
    std::uint64_t rep_ = 0;
    std::size_t forward_ = 0;
    std::size_t backward_ = 0;
    std::vector<port_t> entries_;
    std::optional<port_t> port_;  // move in progress (retried on faults)
    bool pending_ = false;
    bool done_ = false;
};

// Random-fault alternative: unbiased bits harvested from faults.

/// Result of one URBP call given the success of its two attempts: 1, 0 or nothing.
std::optional<int> urbp_outcome(bool first_succeeded, bool second_succeeded);

/// Two-round URBP driver. First attempt by `port`; the second goes along the same
/// edge, back through the entry port when the first attempt succeeded.
class urbp_call {
public:
    explicit urbp_call(port_t port) : port_(port) {}

    /// Action for the next round, or nullopt once both attempts are resolved.
    std::optional<action> next(const observation& obs);
    std::optional<int> result() const { return urbp_outcome(first_, second_); }
    bool done() const noexcept { return round_ == 2 && !pending_; }
    void state_key(std::vector<std::uint64_t>& out) const;

private:
    port_t port_;
    port_t back_ = 0;
    int round_ = 0;
    bool pending_ = false;
    bool first_ = false;
    bool second_ = false;
};

using round_budget = std::function<std::uint64_t(std::uint64_t)>;

/// a * n^b, the default shape for the harvest program's execution length.
round_budget polynomial_budget(std::uint64_t a, std::uint64_t b);

class harvest_program final : public agent_program {
public:
    harvest_program(std::uint64_t label, round_budget q);

    action decide(const observation& obs) override;
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<harvest_program>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override;
    std::string name() const override { return "harvest"; }

    std::uint64_t epoch() const noexcept { return epoch_; }
    std::uint64_t bits_harvested() const noexcept { return harvested_; }
    std::uint64_t preparation_calls(std::uint64_t epoch) const;

private:
    void begin_epoch(std::uint64_t e);

    std::uint64_t label_;
    round_budget q_;
    std::uint64_t epoch_ = 0;
    bool preparing_ = true;
    std::uint64_t calls_left_ = 0;
    std::uint64_t exec_left_ = 0;
    urbp_call call_{0};
    bool in_call_ = false;
    std::vector<std::uint8_t> bits_;
    std::size_t used_ = 0;
    std::uint64_t harvested_ = 0;
};

/// ceil(log2 x) for x >= 1.
std::uint64_t ceil_log2(std::uint64_t x);

}  // namespace rdv
