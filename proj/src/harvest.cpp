#include "rdv/algorithms.hpp"
#include "rdv/error.hpp"

namespace rdv {

std::optional<int> urbp_outcome(bool first_succeeded, bool second_succeeded) {
    if (first_succeeded == second_succeeded) {
        return std::nullopt;
    }
    return first_succeeded ? 1 : 0;
}

std::optional<action> urbp_call::next(const observation& obs) {
    if (pending_) {
        pending_ = false;
        const bool ok = !obs.fault;
        if (round_ == 1) {
            first_ = ok;
            if (ok) {
                back_ = obs.entry.value_or(0);
            }
        } else {
            second_ = ok;
        }
    }
    if (round_ == 2) {
        return std::nullopt;
    }
    const port_t p = round_ == 1 && first_ ? back_ : port_;
    ++round_;
    pending_ = true;
    return action::move(p);
}

void urbp_call::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(port_);
    out.push_back(back_);
    out.push_back(static_cast<std::uint64_t>(round_) | (pending_ << 2) | (first_ << 3) | (second_ << 4));
}

round_budget polynomial_budget(std::uint64_t a, std::uint64_t b) {
    return [a, b](std::uint64_t n) {
        std::uint64_t r = a;
        for (std::uint64_t i = 0; i < b; ++i) {
            r *= n;
        }
        return r;
    };
}

harvest_program::harvest_program(std::uint64_t label, round_budget q) : label_(label), q_(std::move(q)) {
    if (!q_) {
        fail(error_code::invalid_parameter, "harvest program needs a round budget");
    }
    begin_epoch(1);
}

std::uint64_t harvest_program::preparation_calls(std::uint64_t e) const { return e * ceil_log2(e) * q_(e); }

void harvest_program::begin_epoch(std::uint64_t e) {
    epoch_ = e;
    preparing_ = true;
    calls_left_ = preparation_calls(e);
    exec_left_ = q_(e);
    in_call_ = false;
    bits_.clear();
    used_ = 0;
}

action harvest_program::decide(const observation& obs) {
    while (true) {
        if (preparing_) {
            if (in_call_) {
                if (auto a = call_.next(obs)) {
                    return *a;
                }
                in_call_ = false;
                if (auto bit = call_.result()) {
                    bits_.push_back(static_cast<std::uint8_t>(*bit));
                    ++harvested_;
                }
            }
            if (calls_left_ > 0) {
                --calls_left_;
                call_ = urbp_call(0);
                in_call_ = true;
                continue;
            }
            preparing_ = false;
            continue;
        }
        if (exec_left_ == 0) {
            begin_epoch(epoch_ + 1);
            continue;
        }
        --exec_left_;
        const auto r = ceil_log2(obs.degree);
        if (bits_.size() - used_ < r) {
            used_ = bits_.size();
            return action::idle();
        }
        std::uint64_t i = 0;
        for (std::uint64_t k = 0; k < r; ++k) {
            i = (i << 1) | bits_[used_++];
        }
        return i < obs.degree ? action::move(static_cast<port_t>(i)) : action::idle();
    }
}

void harvest_program::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(epoch_);
    out.push_back(preparing_ | (in_call_ << 1));
    out.push_back(calls_left_);
    out.push_back(exec_left_);
    call_.state_key(out);
    out.push_back(bits_.size() - used_);
    out.insert(out.end(), bits_.begin() + static_cast<std::ptrdiff_t>(used_), bits_.end());
}

}  // namespace rdv
