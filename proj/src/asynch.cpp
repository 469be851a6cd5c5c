#include "rdv/asynch.hpp"

#include <algorithm>
#include <unordered_map>

#include "rdv/error.hpp"

namespace rdv {
namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
    if (a == 0 || b == 0) {
        return 0;
    }
    if (a > cap / b) {
        return forever;
    }
    const auto r = a * b;
    return r > cap ? forever : r;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) { return a > forever - b ? forever : a + b; }

// (base)^exp, or `forever` once the product passes cap.
std::uint64_t capped_power(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        r = saturating_mul(r, base, cap);
        if (r == forever) {
            return forever;
        }
    }
    return r;
}

}  // namespace

default_asynch_walk::default_asynch_walk(std::uint64_t label, std::shared_ptr<const uxs_provider> provider,
                                         std::uint64_t step_ceiling, overflow_policy policy)
    : label_(label), provider_(std::move(provider)), ceiling_(step_ceiling), policy_(policy) {
    if (label_ == 0) {
        fail(error_code::invalid_parameter, "walk label must be positive");
    }
    if (!provider_) {
        fail(error_code::invalid_parameter, "walk needs a sequence provider");
    }
    enter_phase(1);
}

std::uint64_t default_asynch_walk::repetitions(std::size_t m) const {
    const std::uint64_t p = provider_->length(m);
    const auto reps = capped_power(p + 1, label_, ceiling_);
    if (reps == forever || saturating_mul(reps, 2 * std::max<std::uint64_t>(p, 1), ceiling_) == forever) {
        if (policy_ == overflow_policy::fail) {
            fail(error_code::resource_limit, "repetitions (P(" + std::to_string(m) + ")+1)^" + std::to_string(label_) +
                                                 " exceed the step ceiling");
        }
        return forever;
    }
    return reps;
}

void default_asynch_walk::enter_phase(std::size_t m) {
    phase_ = m;
    reps_ = repetitions(m);
    rep_ = 0;
    forward_ = 0;
    backward_ = 0;
    pending_entry_ = false;
    entries_.clear();
}

port_t default_asynch_walk::next_port(port_t degree, std::optional<port_t> entry) {
    if (degree == 0) {
        fail(error_code::invalid_parameter, "walk stuck on an isolated node");
    }
    if (pending_entry_) {
        entries_.push_back(entry.value_or(0));
        pending_entry_ = false;
    }
    for (std::size_t empty_phases = 0;; ) {
        const auto& seq = provider_->for_size(phase_);
        const std::size_t p = std::min(seq.length(), provider_->length(phase_));
        if (p == 0) {
            if (phase_ >= provider_->max_size() || ++empty_phases > provider_->max_size()) {
                fail(error_code::invalid_parameter, "sequence provider holds no non-empty sequence");
            }
            enter_phase(phase_ + 1);
            continue;
        }
        if (forward_ < p) {
            const port_t from = forward_ == 0 ? 0 : entries_.back();
            const auto q = static_cast<port_t>((std::uint64_t{from} + seq.terms[forward_]) % degree);
            ++forward_;
            pending_entry_ = true;
            return q;
        }
        if (backward_ < p) {
            return entries_[p - 1 - backward_++];
        }
        // Trajectory complete: back at the start node.
        entries_.clear();
        forward_ = 0;
        backward_ = 0;
        if (reps_ != forever && ++rep_ >= reps_) {
            enter_phase(phase_ + 1);
        }
    }
}

void default_asynch_walk::state_key(std::vector<std::uint64_t>& out) const {
    out.push_back(label_);
    out.push_back(phase_);
    out.push_back(rep_);
    out.push_back(forward_);
    out.push_back(backward_);
    out.push_back(pending_entry_);
    out.push_back(entries_.size());
    out.insert(out.end(), entries_.begin(), entries_.end());
}

cyclic_walk::cyclic_walk(std::vector<port_t> ports, std::uint64_t label) : ports_(std::move(ports)), label_(label) {
    if (ports_.empty()) {
        fail(error_code::invalid_parameter, "cyclic walk needs at least one port");
    }
}

port_t cyclic_walk::next_port(port_t degree, std::optional<port_t>) {
    if (degree == 0) {
        fail(error_code::invalid_parameter, "walk stuck on an isolated node");
    }
    const auto p = ports_[next_] % degree;
    next_ = (next_ + 1) % ports_.size();
    return p;
}

void cyclic_walk::state_key(std::vector<std::uint64_t>& out) const { out.push_back(next_); }

std::uint64_t asynch_steps_through(std::size_t n, std::uint64_t label, const uxs_provider& provider,
                                   std::uint64_t ceiling) {
    std::uint64_t total = 0;
    for (std::size_t m = 1; m <= n; ++m) {
        const std::uint64_t p = provider.length(m);
        if (p == 0) {
            continue;
        }
        const auto reps = capped_power(p + 1, label, ceiling);
        total = saturating_add(total, saturating_mul(reps, 2 * p, ceiling));
        if (total == forever) {
            return forever;
        }
    }
    return total;
}

std::uint64_t asynch_default_horizon(std::size_t n, std::uint64_t label_a, std::uint64_t label_b,
                                     const uxs_provider& provider, std::uint64_t ceiling) {
    const auto a = asynch_steps_through(n, label_a, provider, default_step_ceiling);
    const auto b = asynch_steps_through(n, label_b, provider, default_step_ceiling);
    const auto both = saturating_add(a, b);
    if (both == forever || both > ceiling / 4) {
        return ceiling;
    }
    return 4 * both;
}

const char* to_string(meeting_kind kind) noexcept {
    switch (kind) {
        case meeting_kind::edge_crossing: return "edge-crossing";
        case meeting_kind::never_moved: return "never-moved";
        case meeting_kind::same_origin: return "same-origin";
        case meeting_kind::exchange: return "exchange";
        case meeting_kind::other_node: return "other-node";
    }
    return "?";
}

namespace {

// Node sequence of a walk for up to `steps` steps.
std::vector<node_id> unroll(const port_graph& g, const asynch_walk& walk, node_id start, std::uint64_t steps) {
    auto w = walk.clone();
    std::vector<node_id> nodes{start};
    nodes.reserve(steps + 1);
    std::optional<port_t> entry;
    node_id at = start;
    for (std::uint64_t s = 0; s < steps; ++s) {
        const auto p = w->next_port(g.degree(at), entry);
        const auto e = g.traverse(at, p);
        at = e.node;
        entry = e.port;
        nodes.push_back(at);
    }
    return nodes;
}

struct transition {
    bool meets = false;
    meeting_kind kind = meeting_kind::other_node;
    node_id node = 0;
    node_id other = 0;
};

class meeting_search {
public:
    meeting_search(std::vector<node_id> a, std::vector<node_id> b, std::uint64_t horizon,
                   const asynch_check_options& options)
        : a_(std::move(a)), b_(std::move(b)), horizon_(horizon), options_(options) {}

    asynch_check_result run() {
        asynch_check_result result;
        if (horizon_ == 0) {
            return result;
        }
        if (a_[0] == b_[0]) {
            fail(error_code::invalid_parameter, "start nodes must differ");
        }
        const auto root = solve();
        result.states_explored = memo_.size();
        if (root.avoids) {
            result.avoiding_schedule = reconstruct_avoiding();
        } else {
            result.always_meets = true;
            result.witness = reconstruct_witness(root.worst);
        }
        return result;
    }

private:
    struct value {
        bool avoids = false;
        std::uint64_t worst = 0;  // steps until the forced meeting, when !avoids
        std::uint8_t best = 0;    // index into options_.order
    };

    std::uint64_t key(std::uint64_t i, std::uint64_t j) const { return i * (horizon_ + 1) + j; }

    bool in_range(std::uint64_t i, std::uint64_t j) const { return i < a_.size() && j < b_.size(); }

    transition evaluate(std::uint64_t i, std::uint64_t j, advance adv) const {
        transition t;
        const std::uint64_t ni = i + (adv != advance::b);
        const std::uint64_t nj = j + (adv != advance::a);
        if (adv == advance::both && a_[i] == b_[nj] && a_[ni] == b_[j]) {
            t.meets = true;
            t.kind = meeting_kind::edge_crossing;
            t.node = a_[i];
            t.other = a_[ni];
            return t;
        }
        if (a_[ni] != b_[nj]) {
            return t;
        }
        t.meets = true;
        t.node = a_[ni];
        t.other = t.node;
        // Classify from the mover's point of view.
        const bool a_moved = adv != advance::b;
        const auto& mover = a_moved ? a_ : b_;
        const auto& still = a_moved ? b_ : a_;
        const std::uint64_t mi = a_moved ? ni : nj;  // mover arrived at index mi
        const std::uint64_t si = a_moved ? nj : ni;
        const bool both = adv == advance::both;
        if (!both && si == 0) {
            t.kind = meeting_kind::never_moved;
        } else if (si > 0 && mover[mi - 1] == still[si - 1]) {
            t.kind = meeting_kind::same_origin;
        } else if (si > 0 && mi + 1 < mover.size() && si + 1 < still.size() && mover[mi + 1] == still[si - 1] &&
                   still[si + 1] == mover[mi - 1]) {
            t.kind = meeting_kind::exchange;
        } else {
            t.kind = meeting_kind::other_node;
        }
        return t;
    }

    // Iterative DFS over (i, j); every state is solved once.
    value solve() {
        struct frame {
            std::uint64_t i, j;
            std::uint8_t next = 0;
            value acc{};
        };
        std::vector<frame> stack{{0, 0}};
        value last{};
        bool returning = false;
        while (!stack.empty()) {
            auto& f = stack.back();
            if (returning) {
                // Fold the child just solved (option f.next - 1).
                const auto adv = options_.order[f.next - 1];
                const std::uint64_t steps = adv == advance::both ? 2 : 1;
                fold(f.acc, last, steps, static_cast<std::uint8_t>(f.next - 1));
                returning = false;
                if (f.acc.avoids) {
                    f.next = 3;
                }
            }
            bool pushed = false;
            while (f.next < 3 && !f.acc.avoids) {
                const auto idx = f.next++;
                const auto adv = options_.order[idx];
                const std::uint64_t ni = f.i + (adv != advance::b);
                const std::uint64_t nj = f.j + (adv != advance::a);
                const std::uint64_t steps = adv == advance::both ? 2 : 1;
                if (ni + nj > horizon_ || !in_range(ni, nj)) {
                    continue;
                }
                const auto t = evaluate(f.i, f.j, adv);
                if (t.meets) {
                    fold(f.acc, value{false, 0, 0}, steps, idx);
                    continue;
                }
                if (ni + nj == horizon_) {
                    f.acc = value{true, 0, idx};
                    break;
                }
                const auto it = memo_.find(key(ni, nj));
                if (it != memo_.end()) {
                    fold(f.acc, it->second, steps, idx);
                    continue;
                }
                if (memo_.size() + stack.size() >= options_.state_ceiling) {
                    fail(error_code::resource_limit, "model-M state ceiling exceeded");
                }
                stack.push_back({ni, nj});
                pushed = true;
                break;
            }
            if (pushed) {
                continue;
            }
            // No options at all can only mean both walks were cut short by the horizon.
            last = stack.back().acc;
            memo_[key(stack.back().i, stack.back().j)] = last;
            stack.pop_back();
            returning = !stack.empty();
        }
        return last;
    }

    static void fold(value& acc, const value& child, std::uint64_t steps, std::uint8_t idx) {
        if (child.avoids) {
            acc = value{true, 0, idx};
            return;
        }
        const auto total = child.worst + steps;
        if (total > acc.worst || acc.worst == 0) {
            acc.worst = total;
            acc.best = idx;
        }
    }

    std::vector<advance> reconstruct_avoiding() const {
        std::vector<advance> out;
        std::uint64_t i = 0, j = 0;
        while (i + j < horizon_) {
            const auto& v = memo_.at(key(i, j));
            const auto adv = options_.order[v.best];
            out.push_back(adv);
            i += adv != advance::b;
            j += adv != advance::a;
        }
        return out;
    }

    meeting_witness reconstruct_witness(std::uint64_t worst) const {
        std::uint64_t i = 0, j = 0;
        while (true) {
            const auto& v = memo_.at(key(i, j));
            const auto adv = options_.order[v.best];
            const auto t = evaluate(i, j, adv);
            const std::uint64_t ni = i + (adv != advance::b);
            const std::uint64_t nj = j + (adv != advance::a);
            if (t.meets) {
                return meeting_witness{t.kind, ni, nj, t.node, t.other, worst};
            }
            i = ni;
            j = nj;
        }
    }

    std::vector<node_id> a_, b_;
    std::uint64_t horizon_;
    asynch_check_options options_;
    std::unordered_map<std::uint64_t, value> memo_;
};

}  // namespace

asynch_check_result verify_asynch_meeting(const port_graph& g, const asynch_walk& walk_a,
                                          const asynch_walk& walk_b, node_id start_a, node_id start_b,
                                          std::uint64_t horizon, const asynch_check_options& options) {
    if (start_a >= g.node_count() || start_b >= g.node_count()) {
        fail(error_code::invalid_parameter, "start node out of range");
    }
    if (horizon == 0) {
        return {};
    }
    // One extra step each lets the classifier look one move ahead.
    auto a = unroll(g, walk_a, start_a, horizon + 1);
    auto b = unroll(g, walk_b, start_b, horizon + 1);
    meeting_search search(std::move(a), std::move(b), horizon, options);
    return search.run();
}

}  // namespace rdv
