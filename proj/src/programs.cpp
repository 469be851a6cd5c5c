#include "rdv/algorithms.hpp"
#include "rdv/error.hpp"

namespace rdv {
namespace {

class idle_program final : public agent_program {
public:
    action decide(const observation&) override { return action::idle(); }
    bool finished() const override { return true; }
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<idle_program>(*this); }
    void state_key(std::vector<std::uint64_t>&) const override {}
    std::string name() const override { return "idle"; }
};

class constant_port_program final : public agent_program {
public:
    explicit constant_port_program(port_t port) : port_(port) {}
    action decide(const observation& obs) override { return action::move(port_ % obs.degree); }
    std::unique_ptr<agent_program> clone() const override { return std::make_unique<constant_port_program>(*this); }
    void state_key(std::vector<std::uint64_t>& out) const override { out.push_back(port_); }
    std::string name() const override { return "constant_port"; }

private:
    port_t port_;
};

}  // namespace

std::unique_ptr<agent_program> make_idle_program() { return std::make_unique<idle_program>(); }

std::unique_ptr<agent_program> make_constant_port_program(port_t port) {
    return std::make_unique<constant_port_program>(port);
}

std::uint64_t ceil_log2(std::uint64_t x) {
    if (x == 0) {
        fail(error_code::invalid_parameter, "ceil_log2 of zero");
    }
    std::uint64_t r = 0;
    while ((std::uint64_t{1} << r) < x) {
        ++r;
    }
    return r;
}

// Tree-RV-UF.

tree_rv_uf_program::tree_rv_uf_program(std::uint64_t label) : label_(label) {
    if (label == 0) {
        fail(error_code::invalid_parameter, "labels must be positive");
    }
}

action tree_rv_uf_program::decide(const observation& obs) {
    if (done_) {
        return action::idle();
    }
    if (!started_) {
        started_ = true;
        root_degree_ = obs.degree;
        if (root_degree_ == 0) {
            done_ = true;
            return action::idle();
        }
        out_ = 0;
        pending_ = true;
        return action::move(out_);
    }
    if (pending_ && !obs.fault) {
        const port_t e = obs.entry.value_or(0);
        if (!parents_.empty() && out_ == parents_.back()) {
            parents_.pop_back();
        } else {
            parents_.push_back(e);
        }
        if (parents_.empty() && e + 1 == root_degree_) {
            if (++walks_ == 2 * label_) {
                done_ = true;
                pending_ = false;
                return action::idle();
            }
        }
        out_ = (e + 1) % obs.degree;
    }
    pending_ = true;
    return action::move(out_);
}

void tree_rv_uf_program::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(started_ | (done_ << 1) | (pending_ << 2));
    out.push_back(out_);
    out.push_back(walks_);
    out.push_back(parents_.size());
    out.insert(out.end(), parents_.begin(), parents_.end());
}

// Oriented ring.

oriented_ring_program::oriented_ring_program(std::uint64_t label, std::size_t ring_size)
    : target_(2 * ring_size * label) {
    if (label == 0 || ring_size < 3) {
        fail(error_code::invalid_parameter, "oriented ring program needs a positive label and n >= 3");
    }
}

action oriented_ring_program::decide(const observation& obs) {
    if (pending_ && !obs.fault) {
        ++done_;
    }
    pending_ = false;
    if (finished()) {
        return action::idle();
    }
    pending_ = true;
    return action::move(0);
}

void oriented_ring_program::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(done_);
    out.push_back(pending_);
}

// A(c).

ac_wrapper::ac_wrapper(std::unique_ptr<agent_program> base, std::uint64_t c) : base_(std::move(base)), c_(c) {
    if (!base_) {
        fail(error_code::invalid_parameter, "A(c) needs a base program");
    }
    if (c_ == 0) {
        fail(error_code::invalid_parameter, "A(c) needs c >= 1");
    }
}

ac_wrapper::ac_wrapper(const ac_wrapper& o)
    : agent_program(o),
      base_(o.base_->clone()),
      c_(o.c_),
      offset_(o.offset_),
      segment_(o.segment_),
      moved_(o.moved_),
      pending_(o.pending_),
      stalled_(o.stalled_) {}

action ac_wrapper::decide(const observation& obs) {
    if (pending_) {
        pending_ = false;
        if (!obs.fault) {
            moved_ = true;
        }
    }
    if (offset_ == 0) {
        stalled_ = segment_.is_move() && !moved_;
        if (!stalled_) {
            observation inner{obs.degree, obs.entry, false, obs.met};
            segment_ = base_->decide(inner);
            moved_ = false;
        }
    }
    offset_ = (offset_ + 1) % segment_length();
    if (segment_.is_move() && !moved_) {
        pending_ = true;
        return segment_;
    }
    return action::idle();
}

bool ac_wrapper::finished() const { return base_->finished() && !pending_ && (!segment_.is_move() || moved_); }

std::uint64_t ac_wrapper::idle_horizon() const {
    if (pending_ || (segment_.is_move() && !moved_)) {
        return 0;
    }
    if (base_->finished()) {
        return forever;
    }
    return offset_ == 0 ? 0 : segment_length() - offset_;
}

void ac_wrapper::skip(std::uint64_t rounds) {
    if (base_->finished()) {
        return;
    }
    offset_ = (offset_ + rounds) % segment_length();
}

void ac_wrapper::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(offset_);
    out.push_back(segment_.is_move() ? segment_.port + 1 : 0);
    out.push_back(moved_ | (pending_ << 1));
    base_->state_key(out);
}

std::unique_ptr<agent_program> wrap_with_ac(std::unique_ptr<agent_program> base, std::uint64_t c) {
    return std::make_unique<ac_wrapper>(std::move(base), c);
}

// Known size bound.

known_bound_program::known_bound_program(std::uint64_t label, std::size_t m,
                                         std::shared_ptr<const uxs_provider> provider, std::uint64_t step_ceiling) {
    if (label == 0 || m == 0) {
        fail(error_code::invalid_parameter, "known-bound program needs positive label and size bound");
    }
    if (!provider) {
        fail(error_code::invalid_parameter, "known-bound program needs a sequence provider");
    }
    const auto& seq = provider->for_size(m);
    terms_ = seq.terms;
    const std::uint64_t p = terms_.size();
    std::uint64_t reps = 1;
    for (std::uint64_t i = 0; i < label; ++i) {
        if (reps > step_ceiling / (p + 1)) {
            fail(error_code::resource_limit, "repetition count (P(m)+1)^label exceeds the step ceiling");
        }
        reps *= p + 1;
    }
    if (p > 0 && reps > step_ceiling / (2 * p)) {
        fail(error_code::resource_limit, "repeated trajectory exceeds the step ceiling");
    }
    reps_ = reps;
    done_ = p == 0;
}

action known_bound_program::decide(const observation& obs) {
    const std::size_t p = terms_.size();
    if (pending_) {
        pending_ = false;
        if (!obs.fault) {
            port_.reset();
            if (forward_ < p) {
                entries_.push_back(obs.entry.value_or(0));
                ++forward_;
            } else if (++backward_ == p) {
                entries_.clear();
                forward_ = 0;
                backward_ = 0;
                if (++rep_ == reps_) {
                    done_ = true;
                }
            }
        }
    }
    if (done_) {
        return action::idle();
    }
    if (!port_) {
        if (forward_ < p) {
            const port_t from = forward_ == 0 ? 0 : entries_.back();
            port_ = static_cast<port_t>((std::uint64_t{from} + terms_[forward_]) % obs.degree);
        } else {
            port_ = entries_[p - 1 - backward_];
        }
    }
    pending_ = true;
    return action::move(*port_);
}

void known_bound_program::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(rep_);
    out.push_back(forward_);
    out.push_back(backward_);
    out.push_back(port_ ? *port_ + 1 : 0);
    out.push_back(pending_ | (done_ << 1));
    out.insert(out.end(), entries_.begin(), entries_.end());
}

}  // namespace rdv
