#pragma once

#include <cstdint>

#include "rdv/adversary.hpp"
#include "rdv/engine.hpp"

namespace rdv {

enum class wc_objective { max_cost, prevent_meeting };

const char* to_string(wc_objective o) noexcept;
wc_objective parse_objective(const std::string& text);

struct wc_options {
    wc_objective objective = wc_objective::max_cost;
    std::uint64_t horizon = 10'000;
    std::size_t memo_ceiling = 4'000'000;
    std::size_t beam_width = 512;
};

struct wc_result {
    schedule faults;               // the chosen schedule (fault entries only)
    std::uint64_t value = 0;       // cost, or rounds until the meeting (`forever` if avoidable)
    std::uint64_t max_cost = 0;    // largest cost over all explored schedules
    std::uint64_t max_rounds = 0;  // latest meeting time over all explored schedules
    bool avoidable = false;        // some schedule avoids the meeting within the horizon
    bool met = false;              // the chosen schedule ends in a meeting
    bool horizon_cut = false;      // some branch was stopped by the horizon
    bool exhaustive = true;        // false when the memo ceiling forced a beam search
    std::size_t states = 0;
};

/// Exhaustive search over fault/allow decisions for every Move of either agent,
/// within the consecutive-fault budget of `model` (which must be bounded or none).
/// Programs and starts come from `config`; its adversary factory is ignored.
wc_result worst_case_search(const run_config& config, const fault_model& model, const wc_options& options = {});

}  // namespace rdv
