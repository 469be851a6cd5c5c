#include <stdexcept>
#include <string>

#include "rdv/algorithms.hpp"
#include "rdv/error.hpp"

namespace rdv {

exploration_call::exploration_call(std::uint64_t u, std::uint64_t c, std::vector<std::uint32_t> terms)
    : u_(u), c_(c), terms_(std::move(terms)) {
    if (u_ == 0 || c_ == 0 || terms_.size() < u_) {
        fail(error_code::invalid_parameter, "exploration needs u, c >= 1 and u terms");
    }
}

std::optional<action> exploration_call::next(const observation& obs) {
    if (pending_) {
        pending_ = false;
        if (!obs.fault) {
            moved_ = true;
        }
    }
    if (elapsed_ > 0 && elapsed_ % c_ == 0 && !failed_) {
        // End of a step: its move must have gone through.
        if (!moved_) {
            failed_ = true;
        }
        moved_ = false;
    }
    if (elapsed_ == u_ * c_) {
        return std::nullopt;
    }
    const auto k = elapsed_ / c_;
    ++elapsed_;
    if (failed_ || moved_) {
        return action::idle();
    }
    const port_t from = obs.entry.value_or(0);
    pending_ = true;
    return action::move(static_cast<port_t>((std::uint64_t{from} + terms_[k]) % obs.degree));
}

std::uint64_t exploration_call::idle_run() const noexcept {
    if (pending_) {
        return 0;
    }
    if (failed_) {
        return u_ * c_ - elapsed_;
    }
    if (moved_ && elapsed_ % c_ != 0) {
        return c_ - elapsed_ % c_;
    }
    return 0;
}

void exploration_call::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(u_);
    out.push_back(c_);
    out.push_back(elapsed_);
    out.push_back(moved_ | (failed_ << 1) | (pending_ << 2));
}

std::uint64_t bf_schedule::first_active_phase(std::uint64_t label) { return ceil_log2(label + 1); }

graph_rv_bf_program::graph_rv_bf_program(std::uint64_t label, std::shared_ptr<const uxs_provider> provider)
    : label_(label), provider_(std::move(provider)), q_(0) {
    if (label_ == 0) {
        fail(error_code::invalid_parameter, "labels must be positive");
    }
    if (!provider_) {
        fail(error_code::invalid_parameter, "Graph-RV-BF needs a sequence provider");
    }
    if (label_ >= (std::uint64_t{1} << 28)) {
        fail(error_code::invalid_parameter, "label too large for the phase schedule");
    }
    q_ = bf_schedule::first_active_phase(label_);
    begin_stage();
}

void graph_rv_bf_program::begin_stage() {
    const auto i = phase_;
    if (bf_schedule::stage_length(i) != bf_schedule::busy_length(i) + bf_schedule::wait_length(i) ||
        bf_schedule::phase_length(i) != bf_schedule::stages(i) * bf_schedule::stage_length(i)) {
        throw std::logic_error("phase arithmetic broken at phase " + std::to_string(i));
    }
    if (stage_ != label_) {
        busy_ = false;
        wait_left_ = bf_schedule::stage_length(i);
        return;
    }
    if (u_ == 0) {
        u_ = 1;
        c_ = std::uint64_t{1} << q_;
    }
    if (u_ * c_ != (std::uint64_t{1} << i)) {
        throw std::logic_error("u*c != 2^i at phase " + std::to_string(i));
    }
    busy_ = true;
    explorations_ = 0;
    all_ok_ = true;
    cycled_ = false;
    start_exploration();
}

void graph_rv_bf_program::start_exploration() {
    bool cycled = false;
    auto terms = provider_->prefix(u_, &cycled);
    cycled_ = cycled_ || cycled;
    call_ = exploration_call(u_, c_, std::move(terms));
}

void graph_rv_bf_program::finish_busy() {
    log_.push_back({phase_, u_, c_, all_ok_, cycled_});
    if (all_ok_) {
        u_ *= 2;
    } else {
        c_ *= 2;
    }
    busy_ = false;
    wait_left_ = bf_schedule::wait_length(phase_);
}

action graph_rv_bf_program::decide(const observation& obs) {
    while (true) {
        if (busy_) {
            if (auto a = call_.next(obs)) {
                last_move_ = a->is_move();
                return *a;
            }
            all_ok_ = all_ok_ && call_.success();
            if (++explorations_ < 3) {
                start_exploration();
            } else {
                finish_busy();
            }
            continue;
        }
        if (wait_left_ > 0) {
            --wait_left_;
            last_move_ = false;
            return action::idle();
        }
        if (++stage_ == bf_schedule::stages(phase_)) {
            ++phase_;
            stage_ = 0;
        }
        begin_stage();
    }
}

std::uint64_t graph_rv_bf_program::idle_horizon() const {
    if (last_move_) {
        return 0;
    }
    return busy_ ? call_.idle_run() : wait_left_;
}

void graph_rv_bf_program::skip(std::uint64_t rounds) {
    if (busy_) {
        call_.skip(rounds);
    } else {
        wait_left_ -= rounds;
    }
}

void graph_rv_bf_program::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(phase_);
    out.push_back(stage_);
    out.push_back(busy_ | (all_ok_ << 1) | (last_move_ << 2) | (cycled_ << 3));
    out.push_back(wait_left_);
    out.push_back(u_);
    out.push_back(c_);
    out.push_back(explorations_);
    if (busy_) {
        call_.state_key(out);
    }
}

void check_bf_update_rule(std::uint64_t q, const std::vector<bool>& outcomes) {
    std::uint64_t u = 1;
    std::uint64_t c = std::uint64_t{1} << q;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        if (u * c != (std::uint64_t{1} << (q + k))) {
            throw std::logic_error("u*c != 2^i after " + std::to_string(k) + " phases");
        }
        if (outcomes[k]) {
            u *= 2;
        } else {
            c *= 2;
        }
    }
    if (u * c != (std::uint64_t{1} << (q + outcomes.size()))) {
        throw std::logic_error("u*c != 2^i at the end");
    }
}

}  // namespace rdv
