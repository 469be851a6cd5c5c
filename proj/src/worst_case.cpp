#include "rdv/worst_case.hpp"

#include <algorithm>
#include <unordered_map>

#include "rdv/error.hpp"

namespace rdv {

const char* to_string(wc_objective o) noexcept {
    return o == wc_objective::max_cost ? "max-cost" : "prevent-meeting";
}

wc_objective parse_objective(const std::string& text) {
    if (text == "max-cost" || text == "max_cost") {
        return wc_objective::max_cost;
    }
    if (text == "prevent-meeting" || text == "prevent_meeting") {
        return wc_objective::prevent_meeting;
    }
    fail(error_code::invalid_parameter, "unknown objective '" + text + "'");
}

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > forever - b ? forever : a + b; }

struct key_hash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= x;
            h *= 1099511628211ull;
            h ^= h >> 29;
        }
        return static_cast<std::size_t>(h);
    }
};

struct value {
    std::uint64_t cost = 0;
    std::uint64_t rounds = 0;
    bool avoid = false;
    bool cut = false;
    std::uint8_t best = 0;
};

struct ceiling_hit {};

using combo = std::array<bool, 2>;

std::vector<combo> choices(const round_view& view, std::uint64_t limit) {
    std::array<std::vector<bool>, 2> per;
    for (std::size_t a = 0; a < 2; ++a) {
        const auto& v = view.agents[a];
        per[a].push_back(false);
        if (v.active && v.decision.is_move() && v.fault_run < limit) {
            per[a].push_back(true);
        }
    }
    std::vector<combo> out;
    for (bool f0 : per[0]) {
        for (bool f1 : per[1]) {
            out.push_back({f0, f1});
        }
    }
    return out;
}

class searcher {
public:
    searcher(const wc_options& options, std::uint64_t limit) : options_(options), limit_(limit) {}

    // Skips forced idle rounds; returns the number skipped and whether the horizon clipped it.
    std::pair<std::uint64_t, bool> fast_forward(simulation& sim) const {
        const auto left = options_.horizon - sim.round();
        const auto idle = sim.idle_rounds();
        if (idle == 0 || sim.stationary()) {
            return {0, false};
        }
        const auto k = std::min(idle, left);
        sim.skip(k);
        return {k, idle > left};
    }

    value solve(simulation& sim) {
        if (sim.round() >= options_.horizon) {
            return value{0, 0, true, true};
        }
        if (sim.stationary()) {
            return value{0, forever, true, false};
        }
        const auto [skipped, clipped] = fast_forward(sim);
        if (skipped > 0) {
            auto v = clipped ? value{0, 0, true, true} : solve(sim);
            v.rounds = sat_add(v.rounds, skipped);
            return v;
        }
        std::vector<std::uint64_t> key;
        sim.state_key(key);
        if (auto it = exact_.find(key); it != exact_.end()) {
            return it->second;
        }
        key.push_back(sim.round());
        if (auto it = timed_.find(key); it != timed_.end()) {
            return it->second;
        }
        key.pop_back();
        if (exact_.size() + timed_.size() >= options_.memo_ceiling) {
            throw ceiling_hit{};
        }

        const auto& view = sim.prepare();
        if (sim.met()) {
            return value{};
        }
        const auto opts = choices(view, limit_);
        value acc;
        bool first = true;
        for (std::size_t i = 0; i < opts.size(); ++i) {
            simulation child(sim);
            const auto out = child.commit(opts[i]);
            const std::uint64_t reward = out.moved[0] + out.moved[1];
            value v;
            if (child.met()) {
                v = value{reward, 1, false, false};
            } else {
                v = solve(child);
                v.cost = sat_add(v.cost, reward);
                v.rounds = sat_add(v.rounds, 1);
            }
            const bool better = first || (options_.objective == wc_objective::max_cost
                                              ? v.cost > acc.cost
                                              : v.rounds > acc.rounds);
            const auto cost = std::max(acc.cost, v.cost);
            const auto rounds = std::max(acc.rounds, v.rounds);
            const bool avoid = acc.avoid || v.avoid;
            const bool cut = acc.cut || v.cut;
            if (better) {
                acc.best = static_cast<std::uint8_t>(i);
            }
            acc.cost = cost;
            acc.rounds = rounds;
            acc.avoid = avoid;
            acc.cut = cut;
            first = false;
        }
        if (acc.cut) {
            key.push_back(sim.round());
            timed_.emplace(std::move(key), acc);
        } else {
            exact_.emplace(std::move(key), acc);
        }
        return acc;
    }

    // Follows the best choices recorded in the memo.
    schedule reconstruct(simulation sim, bool& met) const {
        schedule out;
        met = false;
        while (!sim.met() && sim.round() < options_.horizon && !sim.stationary()) {
            if (fast_forward(sim).first > 0) {
                continue;
            }
            std::vector<std::uint64_t> key;
            sim.state_key(key);
            const value* v = nullptr;
            if (auto it = exact_.find(key); it != exact_.end()) {
                v = &it->second;
            } else {
                key.push_back(sim.round());
                v = &timed_.at(key);
            }
            const auto& view = sim.prepare();
            if (sim.met()) {
                break;
            }
            const auto opts = choices(view, limit_);
            const auto pick = opts.at(v->best);
            for (std::uint32_t a = 0; a < 2; ++a) {
                if (pick[a]) {
                    out.push_back({view.round, a, true});
                }
            }
            sim.commit(pick);
        }
        met = sim.met();
        return out;
    }

    std::size_t states() const noexcept { return exact_.size() + timed_.size(); }

private:
    const wc_options& options_;
    std::uint64_t limit_;
    std::unordered_map<std::vector<std::uint64_t>, value, key_hash> exact_;
    std::unordered_map<std::vector<std::uint64_t>, value, key_hash> timed_;
};

struct beam_node {
    simulation sim;
    std::uint64_t cost = 0;
    schedule faults;
};

wc_result beam_search(const simulation& root, const wc_options& options, std::uint64_t limit) {
    wc_result best;
    best.exhaustive = false;
    bool have = false;
    auto consider = [&](const beam_node& n, bool met) {
        const std::uint64_t rounds = met ? n.sim.meeting_round() : forever;
        best.max_cost = std::max(best.max_cost, n.cost);
        if (met) {
            best.max_rounds = std::max(best.max_rounds, rounds);
        } else {
            best.avoidable = true;
        }
        const std::uint64_t score = options.objective == wc_objective::max_cost ? n.cost : rounds;
        if (!have || score > best.value) {
            have = true;
            best.value = score;
            best.faults = n.faults;
            best.met = met;
        }
    };
    std::vector<beam_node> frontier;
    frontier.push_back({simulation(root), 0, {}});
    while (!frontier.empty()) {
        std::vector<beam_node> next;
        for (auto& node : frontier) {
            auto& sim = node.sim;
            if (sim.round() >= options.horizon || sim.stationary()) {
                best.horizon_cut = best.horizon_cut || sim.round() >= options.horizon;
                consider(node, false);
                continue;
            }
            const auto idle = sim.idle_rounds();
            if (idle > 0) {
                sim.skip(std::min(idle, options.horizon - sim.round()));
                next.push_back(std::move(node));
                continue;
            }
            const auto& view = sim.prepare();
            if (sim.met()) {
                consider(node, true);
                continue;
            }
            for (const auto& pick : choices(view, limit)) {
                beam_node child{simulation(sim), node.cost, node.faults};
                const auto out = child.sim.commit(pick);
                child.cost += out.moved[0] + out.moved[1];
                for (std::uint32_t a = 0; a < 2; ++a) {
                    if (pick[a]) {
                        child.faults.push_back({view.round, a, true});
                    }
                }
                if (child.sim.met()) {
                    consider(child, true);
                } else {
                    next.push_back(std::move(child));
                }
            }
        }
        if (next.size() > options.beam_width) {
            // Keep the most promising partial schedules; stable for determinism.
            std::stable_sort(next.begin(), next.end(), [&](const beam_node& a, const beam_node& b) {
                if (options.objective == wc_objective::max_cost) {
                    return a.cost > b.cost;
                }
                return a.sim.round() > b.sim.round();
            });
            next.erase(next.begin() + static_cast<std::ptrdiff_t>(options.beam_width), next.end());
        }
        frontier = std::move(next);
    }
    return best;
}

}  // namespace

wc_result worst_case_search(const run_config& config, const fault_model& model, const wc_options& options) {
    if (model.what == fault_model::kind::random || model.what == fault_model::kind::unbounded) {
        fail(error_code::invalid_parameter, "worst-case search needs a bounded fault model");
    }
    const auto limit = model.max_run();
    const auto root = make_simulation(config);
    wc_result result;
    if (options.horizon == 0) {
        return result;
    }
    searcher s(options, limit);
    try {
        simulation start(root);
        const auto v = s.solve(start);
        result.max_cost = v.cost;
        result.max_rounds = v.avoid ? forever : v.rounds;
        result.avoidable = v.avoid;
        result.horizon_cut = v.cut;
        result.states = s.states();
        result.faults = s.reconstruct(simulation(root), result.met);
        if (options.objective == wc_objective::max_cost) {
            result.value = v.cost;
        } else {
            result.value = result.met ? v.rounds : forever;
        }
    } catch (const ceiling_hit&) {
        auto b = beam_search(root, options, limit);
        b.states = s.states();
        return b;
    }
    return result;
}

}  // namespace rdv
