#include "rdv/adversary.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rdv/error.hpp"
#include "rdv/random.hpp"

namespace rdv {

fault_model fault_model::random(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        fail(error_code::invalid_parameter, "fault probability must lie strictly between 0 and 1");
    }
    return {kind::random, p, 0};
}

fault_model fault_model::bounded(std::uint64_t c) {
    if (c == 0) {
        fail(error_code::invalid_parameter, "fault bound must be at least 1");
    }
    return {kind::bounded, 0.0, c};
}

std::uint64_t fault_model::max_run() const noexcept {
    switch (what) {
        case kind::none: return 0;
        case kind::bounded: return c;
        default: return forever;
    }
}

std::string to_string(const fault_model& m) {
    std::ostringstream out;
    switch (m.what) {
        case fault_model::kind::none: out << "none"; break;
        case fault_model::kind::random: out << "random:" << m.p; break;
        case fault_model::kind::bounded: out << "bounded:" << m.c; break;
        case fault_model::kind::unbounded: out << "unbounded"; break;
    }
    return out.str();
}

fault_model parse_fault_model(const std::string& text) {
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    const auto arg = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
    try {
        if (head == "none" && arg.empty()) {
            return fault_model::none();
        }
        if (head == "unbounded" && arg.empty()) {
            return fault_model::unbounded();
        }
        std::size_t used = 0;
        if (head == "random" && !arg.empty()) {
            const double p = std::stod(arg, &used);
            if (used == arg.size()) {
                return fault_model::random(p);
            }
        }
        if (head == "bounded" && !arg.empty() && arg[0] != '-') {
            const auto c = std::stoull(arg, &used);
            if (used == arg.size()) {
                return fault_model::bounded(c);
            }
        }
    } catch (const std::logic_error&) {
    }
    fail(error_code::invalid_parameter, "bad fault model '" + text + "'");
}

namespace {

class no_faults final : public adversary {
public:
    fault_pair decide(const round_view&) override { return {false, false}; }
    std::unique_ptr<adversary> clone() const override { return std::make_unique<no_faults>(*this); }
    fault_model model() const override { return fault_model::none(); }
    std::string name() const override { return "none"; }
};

class random_adversary final : public adversary {
public:
    random_adversary(double p, std::uint64_t c, std::uint64_t seed, bool random_caps)
        : p_(p), cap_(c), random_caps_(random_caps) {
        for (std::size_t a = 0; a < 2; ++a) {
            rng_[a].seed(derive_seed(seed, a));
            run_cap_[a] = draw_cap(a);
        }
    }

    fault_pair decide(const round_view& view) override {
        fault_pair out{false, false};
        for (std::size_t a = 0; a < 2; ++a) {
            const auto& ag = view.agents[a];
            if (!ag.active || !ag.decision.is_move()) {
                continue;
            }
            const bool draw = unit_interval(rng_[a]) < p_;
            if (draw && ag.fault_run < run_cap_[a]) {
                out[a] = true;
            } else {
                run_cap_[a] = draw_cap(a);
            }
        }
        return out;
    }

    std::unique_ptr<adversary> clone() const override { return std::make_unique<random_adversary>(*this); }

    fault_model model() const override {
        if (cap_ == forever) {
            return fault_model::random(p_);
        }
        return random_caps_ ? fault_model::unbounded() : fault_model::bounded(cap_);
    }

    std::string name() const override {
        if (cap_ == forever) {
            return "random";
        }
        return random_caps_ ? "random_finite" : "random_bounded";
    }

private:
    std::uint64_t draw_cap(std::size_t a) {
        if (!random_caps_) {
            return cap_;
        }
        return uniform_below(rng_[a], cap_);
    }

    double p_;
    std::uint64_t cap_;
    bool random_caps_;
    std::array<std::mt19937_64, 2> rng_;
    std::array<std::uint64_t, 2> run_cap_{};
};

class max_delay final : public adversary {
public:
    explicit max_delay(std::uint64_t c) : c_(c) {
        if (c_ == 0) {
            fail(error_code::invalid_parameter, "max-delay adversary needs c >= 1");
        }
    }

    fault_pair decide(const round_view& view) override {
        fault_pair out{false, false};
        for (std::size_t a = 0; a < 2; ++a) {
            const auto& ag = view.agents[a];
            out[a] = ag.active && ag.decision.is_move() && ag.fault_run < c_;
        }
        return out;
    }

    std::unique_ptr<adversary> clone() const override { return std::make_unique<max_delay>(*this); }
    fault_model model() const override { return fault_model::bounded(c_); }
    std::string name() const override { return "max_delay"; }

private:
    std::uint64_t c_;
};

class scripted final : public adversary {
public:
    scripted(const schedule& s, fault_model m) : model_(m) {
        validate_schedule(s, m);
        for (const auto& e : s) {
            by_round_[e.round][e.agent] = e.fault ? 2 : 1;
        }
    }

    fault_pair decide(const round_view& view) override {
        const auto it = by_round_.find(view.round);
        if (it == by_round_.end()) {
            return {false, false};
        }
        return {it->second[0] == 2, it->second[1] == 2};
    }

    std::unique_ptr<adversary> clone() const override { return std::make_unique<scripted>(*this); }
    fault_model model() const override { return model_; }
    std::string name() const override { return "scripted"; }

private:
    fault_model model_;
    std::map<std::uint64_t, std::array<std::uint8_t, 2>> by_round_;  // 0 unset, 1 allow, 2 fault
};

}  // namespace

std::unique_ptr<adversary> make_no_faults() { return std::make_unique<no_faults>(); }

std::unique_ptr<adversary> make_random_adversary(double p, std::uint64_t seed) {
    fault_model::random(p);
    return std::make_unique<random_adversary>(p, forever, seed, false);
}

std::unique_ptr<adversary> make_max_delay_adversary(std::uint64_t c) { return std::make_unique<max_delay>(c); }

std::unique_ptr<adversary> make_random_bounded_adversary(double p, std::uint64_t c, std::uint64_t seed) {
    fault_model::random(p);
    fault_model::bounded(c);
    return std::make_unique<random_adversary>(p, c, seed, false);
}

std::unique_ptr<adversary> make_random_finite_adversary(double p, std::uint64_t max_run, std::uint64_t seed) {
    fault_model::random(p);
    if (max_run == 0) {
        fail(error_code::invalid_parameter, "max_run must be positive");
    }
    return std::make_unique<random_adversary>(p, max_run, seed, true);
}

tough_adversary::tough_adversary(std::uint64_t patience) : patience_(patience) {
    if (patience_ == 0) {
        fail(error_code::invalid_parameter, "patience must be at least 1");
    }
}

fault_pair tough_adversary::decide(const round_view& view) {
    std::array<bool, 2> trying{};
    std::array<bool, 2> attacking{};
    for (std::size_t a = 0; a < 2; ++a) {
        const auto& ag = view.agents[a];
        trying[a] = ag.active && ag.decision.is_move();
        streak_[a] = trying[a] ? streak_[a] + 1 : 0;
        attacking[a] = trying[a] && streak_[a] >= patience_;
    }
    bool release_now = attacking[0] || attacking[1];
    for (std::size_t a = 0; a < 2 && release_now; ++a) {
        // An agent part-way to an attack is waited for, so both start moving together.
        if (!attacking[a] && trying[a]) {
            release_now = false;
        }
    }
    fault_pair out{trying[0], trying[1]};
    if (release_now) {
        release r{view.round, {false, false}, attacking};
        for (std::size_t a = 0; a < 2; ++a) {
            if (attacking[a]) {
                out[a] = false;
                r.agents[a] = true;
                streak_[a] = 0;
            }
        }
        releases_.push_back(r);
    }
    return out;
}

void tough_adversary::skip_idle_rounds(std::uint64_t rounds) {
    if (rounds > 0) {
        streak_ = {0, 0};
    }
}

std::string schedule_to_text(const schedule& s) {
    std::ostringstream out;
    for (const auto& e : s) {
        out << e.round << ' ' << e.agent << ' ' << (e.fault ? "fault" : "allow") << '\n';
    }
    return out.str();
}

schedule parse_schedule(std::istream& in) {
    schedule s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::string round_text, agent_text, decision;
        if (!(fields >> round_text)) {
            continue;
        }
        std::string extra;
        if (!(fields >> agent_text >> decision) || (fields >> extra)) {
            fail(error_code::parse_error, "schedule line " + std::to_string(line_no) + ": expected `round agent allow|fault`");
        }
        schedule_entry e{};
        try {
            std::size_t used = 0;
            if (round_text[0] == '-' || agent_text[0] == '-') {
                throw std::invalid_argument("negative");
            }
            e.round = std::stoull(round_text, &used);
            if (used != round_text.size()) {
                throw std::invalid_argument("round");
            }
            const auto agent = std::stoul(agent_text, &used);
            if (used != agent_text.size() || agent > 1) {
                throw std::invalid_argument("agent");
            }
            e.agent = static_cast<std::uint32_t>(agent);
        } catch (const std::logic_error&) {
            fail(error_code::parse_error, "schedule line " + std::to_string(line_no) + ": bad round or agent");
        }
        if (decision == "fault") {
            e.fault = true;
        } else if (decision != "allow") {
            fail(error_code::parse_error, "schedule line " + std::to_string(line_no) + ": decision must be allow or fault");
        }
        s.push_back(e);
    }
    return s;
}

schedule parse_schedule_text(const std::string& text) {
    std::istringstream in(text);
    return parse_schedule(in);
}

schedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(error_code::invalid_parameter, "cannot open schedule file " + path);
    }
    return parse_schedule(in);
}

void validate_schedule(const schedule& s, const fault_model& model) {
    std::map<std::pair<std::uint64_t, std::uint32_t>, bool> seen;
    for (const auto& e : s) {
        if (e.agent > 1) {
            fail(error_code::schedule_rejected, "round " + std::to_string(e.round) + ": agent must be 0 or 1");
        }
        const auto [it, fresh] = seen.emplace(std::make_pair(e.round, e.agent), e.fault);
        if (!fresh) {
            fail(error_code::schedule_rejected,
                 "round " + std::to_string(e.round) + ": agent " + std::to_string(e.agent) + " listed twice");
        }
    }
    if (model.what == fault_model::kind::random) {
        fail(error_code::schedule_rejected, "scripted schedules cannot claim the random fault model");
    }
    const auto limit = model.max_run();
    if (limit == forever) {
        return;
    }
    for (std::uint32_t agent = 0; agent < 2; ++agent) {
        std::uint64_t run = 0;
        std::uint64_t prev = 0;
        for (const auto& [key, fault] : seen) {
            if (key.second != agent) {
                continue;
            }
            if (!fault) {
                run = 0;
                continue;
            }
            run = run > 0 && key.first == prev + 1 ? run + 1 : 1;
            prev = key.first;
            if (run > limit) {
                fail(error_code::schedule_rejected, "round " + std::to_string(key.first) + ": agent " +
                                                        std::to_string(agent) + " faulted " + std::to_string(run) +
                                                        " rounds in a row under " + to_string(model));
            }
        }
    }
}

std::unique_ptr<adversary> make_scripted_adversary(const schedule& s, const fault_model& model) {
    return std::make_unique<scripted>(s, model);
}

}  // namespace rdv
