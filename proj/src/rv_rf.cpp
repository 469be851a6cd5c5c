#include <stdexcept>

#include "rdv/algorithms.hpp"
#include "rdv/error.hpp"

namespace rdv {

std::vector<std::uint8_t> modified_label(std::uint64_t label) {
    if (label == 0) {
        fail(error_code::invalid_parameter, "labels must be positive");
    }
    int top = 63;
    while (((label >> top) & 1u) == 0) {
        --top;
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(4 * (top + 1) + 2);
    for (int b = top; b >= 0; --b) {
        if ((label >> b) & 1u) {
            bits.insert(bits.end(), {1, 1, 0, 0});
        } else {
            bits.insert(bits.end(), {0, 0, 1, 1});
        }
    }
    bits.push_back(1);
    bits.push_back(0);
    return bits;
}

std::vector<dance_step> dance_script(const std::vector<std::uint8_t>& modified) {
    std::vector<dance_step> out(dance_prelude, dance_step::idle);
    for (auto bit : modified) {
        const auto s = bit ? dance_step::cross : dance_step::idle;
        out.push_back(s);
        out.push_back(s);
    }
    out.insert(out.end(), dance_coda, dance_step::cross);
    return out;
}

rv_rf_program::rv_rf_program(std::uint64_t label, std::unique_ptr<asynch_walk> walk)
    : label_(label),
      script_(std::make_shared<const std::vector<dance_step>>(dance_script(label))),
      walk_(std::move(walk)) {
    if (!walk_) {
        fail(error_code::invalid_parameter, "RV-RF needs a walk");
    }
}

rv_rf_program::rv_rf_program(const rv_rf_program& o)
    : agent_program(o),
      label_(o.label_),
      script_(o.script_),
      walk_(o.walk_->clone()),
      mode_(o.mode_),
      last_(o.last_),
      last_moved_(o.last_moved_),
      walk_entry_(o.walk_entry_),
      stage_port_(o.stage_port_),
      edge_port_(o.edge_port_),
      at_y_(o.at_y_),
      dance_t_(o.dance_t_),
      corr_t_(o.corr_t_),
      w_is_y_(o.w_is_y_),
      stages_(o.stages_),
      corrections_(o.corrections_) {}

void rv_rf_program::start_correction(bool from_dance) {
    mode_ = mode::correction;
    corr_t_ = 0;
    if (from_dance) {
        w_is_y_ = at_y_;
    }
    ++corrections_;
}

action rv_rf_program::decide(const observation& obs) {
    if (last_moved_) {
        if (obs.fault) {
            if (last_ == last_kind::dance || last_ == last_kind::correction) {
                start_correction(last_ == last_kind::dance);
            }
            // A blocked Progress traversal is simply attempted again.
        } else if (last_ == last_kind::progress_move) {
            walk_entry_ = obs.entry;
            edge_port_ = obs.entry.value_or(0);
            at_y_ = true;
            stage_port_.reset();
            mode_ = mode::dance;
            dance_t_ = 0;
        } else {
            at_y_ = !at_y_;
            edge_port_ = obs.entry.value_or(0);
            if (last_ == last_kind::dance) {
                ++dance_t_;
            } else {
                ++corr_t_;
            }
        }
    } else if (last_ == last_kind::dance) {
        ++dance_t_;
    } else if (last_ == last_kind::correction) {
        ++corr_t_;
    }

    const auto& script = *script_;
    while (true) {
        switch (mode_) {
            case mode::progress:
                if (!stage_port_) {
                    stage_port_ = walk_->next_port(obs.degree, walk_entry_);
                }
                last_ = last_kind::progress_move;
                last_moved_ = true;
                return action::move(*stage_port_);
            case mode::dance:
                if (dance_t_ == script.size()) {
                    ++stages_;
                    mode_ = mode::progress;
                    continue;
                }
                last_ = last_kind::dance;
                last_moved_ = script[dance_t_] == dance_step::cross;
                return last_moved_ ? action::move(edge_port_) : action::idle();
            case mode::correction:
                last_ = last_kind::correction;
                if (corr_t_ < correction_idles) {
                    last_moved_ = false;
                    return action::idle();
                }
                if (corr_t_ < correction_idles + correction_crossings || at_y_ != w_is_y_) {
                    last_moved_ = true;
                    return action::move(edge_port_);
                }
                // Clean Correction: rerun the Dance round that was blocked.
                mode_ = mode::dance;
                continue;
        }
        throw std::logic_error("unreachable RV-RF mode");
    }
}

void rv_rf_program::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(label_);
    out.push_back(static_cast<std::uint64_t>(mode_));
    out.push_back(static_cast<std::uint64_t>(last_));
    out.push_back(last_moved_);
    out.push_back(walk_entry_ ? *walk_entry_ + 1 : 0);
    out.push_back(stage_port_ ? *stage_port_ + 1 : 0);
    out.push_back(edge_port_);
    out.push_back(at_y_);
    out.push_back(dance_t_);
    out.push_back(corr_t_);
    out.push_back(w_is_y_);
    walk_->state_key(out);
}

std::unique_ptr<agent_program> make_rv_rf(std::uint64_t label, std::shared_ptr<const uxs_provider> provider) {
    return std::make_unique<rv_rf_program>(label, std::make_unique<default_asynch_walk>(label, std::move(provider)));
}

}  // namespace rdv
