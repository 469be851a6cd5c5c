#include "doctest.h"
#include "rdv/adversary.hpp"
#include "rdv/algorithms.hpp"
#include "rdv/engine.hpp"
#include "support.hpp"

using namespace rdv;

namespace {

round_view moving(std::uint64_t round, std::array<bool, 2> move, std::array<std::uint64_t, 2> runs = {}) {
    round_view v;
    v.round = round;
    for (std::size_t a = 0; a < 2; ++a) {
        v.agents[a].active = true;
        v.agents[a].decision = move[a] ? action::move(0) : action::idle();
        v.agents[a].fault_run = runs[a];
    }
    return v;
}

}  // namespace

TEST_CASE("fault model parsing") {
    CHECK(parse_fault_model("none").what == fault_model::kind::none);
    CHECK(parse_fault_model("random:0.25").p == doctest::Approx(0.25));
    CHECK(parse_fault_model("bounded:3").c == 3);
    CHECK(parse_fault_model("unbounded").max_run() == forever);
    for (const char* bad : {"random:0", "random:1", "bounded:0", "bounded:-2", "bounded", "sometimes", "none:1"}) {
        CHECK(raised([&] { parse_fault_model(bad); }) == error_code::invalid_parameter);
    }
    CHECK(to_string(fault_model::bounded(4)) == "bounded:4");
}

TEST_CASE("random adversary") {
    CHECK(raised([] { make_random_adversary(0.0, 1); }) == error_code::invalid_parameter);
    CHECK(raised([] { make_random_adversary(1.0, 1); }) == error_code::invalid_parameter);
    auto a = make_random_adversary(0.5, 42);
    auto b = make_random_adversary(0.5, 42);
    for (std::uint64_t r = 0; r < 1000; ++r) {
        const auto v = moving(r, {true, true});
        CHECK(a->decide(v) == b->decide(v));
    }
    auto c = make_random_adversary(0.3, 7);
    std::uint64_t faults = 0;
    const std::uint64_t n = 100000;
    for (std::uint64_t r = 0; r < n; ++r) {
        faults += c->decide(moving(r, {true, false}))[0];
    }
    CHECK(std::abs(static_cast<double>(faults) / n - 0.3) <= 0.01);
    auto d = make_random_adversary(0.9, 7);
    for (std::uint64_t r = 0; r < 1000; ++r) {
        const auto f = d->decide(moving(r, {false, false}));
        CHECK_FALSE(f[0]);
        CHECK_FALSE(f[1]);
    }
}

TEST_CASE("idle rounds carry no fault marks in traces") {
    auto cfg = make_run(build_path(4), 1, 0, 2, 3, [](std::size_t, const agent_spec& s) {
        return make_rv_rf(s.label, default_uxs_provider());
    }, [](std::uint64_t seed) { return make_random_adversary(0.1, seed); });
    cfg.trace = trace_level::full;
    const auto r = run(cfg);
    REQUIRE(r.met);
    for (const auto& row : r.trace) {
        if (!row.decision.is_move()) {
            CHECK_FALSE(row.fault);
        }
    }
}

TEST_CASE("max-delay adversary") {
    auto adv = make_max_delay_adversary(2);
    std::uint64_t run = 0;
    std::vector<bool> pattern;
    for (std::uint64_t r = 0; r < 9; ++r) {
        const bool f = adv->decide(moving(r, {true, false}, {run, 0}))[0];
        pattern.push_back(f);
        run = f ? run + 1 : 0;
    }
    CHECK(pattern == std::vector<bool>{true, true, false, true, true, false, true, true, false});
    CHECK(raised([] { make_max_delay_adversary(0); }) == error_code::invalid_parameter);

    // Against an exploration with too small an estimate, the move never goes through.
    const auto g = build_path(2);
    exploration_call call(1, 2, {1});
    auto md = make_max_delay_adversary(3);
    std::optional<port_t> entry;
    bool fault = false;
    std::uint64_t fr = 0;
    std::uint64_t r = 0;
    while (auto a = call.next({g.degree(0), entry, fault, false})) {
        round_view v;
        v.round = r++;
        v.agents[0] = {true, *a, 0, fr};
        fault = md->decide(v)[0] && a->is_move();
        fr = fault ? fr + 1 : 0;
        CHECK((fault || !a->is_move()));
    }
    CHECK_FALSE(call.success());
}

TEST_CASE("max-delay against A(1) still moves every segment") {
    auto cfg = make_run(build_path(3), 1, 0, 2, 2, [](std::size_t a, const agent_spec&) {
        return a == 0 ? wrap_with_ac(make_constant_port_program(0), 1) : make_idle_program();
    }, [](std::uint64_t) { return make_max_delay_adversary(1); }, 30);
    cfg.trace = trace_level::full;
    const auto r = run(cfg);
    // Agent 0 alternates between nodes 0 and 1: one traversal per 3-round segment.
    CHECK_FALSE(r.met);
    CHECK(r.traversals[0] == 10);
}

TEST_CASE("tough adversary") {
    CHECK(raised([] { tough_adversary t(0); }) == error_code::invalid_parameter);
    tough_adversary t(4);
    // Alternating move and idle is never allowed.
    for (std::uint64_t r = 0; r < 200; ++r) {
        const bool move = r % 2 == 0;
        const auto f = t.decide(moving(r, {move, false}));
        if (move) {
            CHECK(f[0]);
        }
    }
    CHECK(t.releases().empty());
    tough_adversary u(4);
    std::vector<std::uint64_t> released;
    for (std::uint64_t r = 0; r < 20; ++r) {
        if (!u.decide(moving(r, {true, false}))[0]) {
            released.push_back(r);
        }
    }
    CHECK(released == std::vector<std::uint64_t>{3, 7, 11, 15, 19});
    // Both attacking: always released together.
    tough_adversary w(5);
    for (std::uint64_t r = 0; r < 100; ++r) {
        const auto f = w.decide(moving(r, {true, r >= 2}));
        if (r >= 2) {
            CHECK(f[0] == f[1]);
        }
    }
    for (const auto& rel : w.releases()) {
        for (std::size_t a = 0; a < 2; ++a) {
            CHECK(rel.agents[a] == rel.attacking[a]);
            CHECK(rel.agents[a]);
        }
    }
}

TEST_CASE("schedules") {
    const auto s = parse_schedule_text("# header\n3 0 fault\n4 0 fault  # two in a row\n5 1 allow\n");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == schedule_entry{3, 0, true});
    CHECK(s[2] == schedule_entry{5, 1, false});
    CHECK(parse_schedule_text(schedule_to_text(s)) == s);
    CHECK_NOTHROW(validate_schedule(s, fault_model::bounded(2)));
    CHECK(raised([&] { validate_schedule(s, fault_model::bounded(1)); }) == error_code::schedule_rejected);
    const auto three = parse_schedule_text("1 0 fault\n2 0 fault\n3 0 fault\n");
    try {
        validate_schedule(three, fault_model::bounded(2));
        FAIL("accepted");
    } catch (const error& e) {
        CHECK(e.code() == error_code::schedule_rejected);
        CHECK(std::string(e.what()).find("round 3") != std::string::npos);
    }
    CHECK(raised([] { parse_schedule_text("1 0 maybe\n"); }) == error_code::parse_error);
    CHECK(raised([] { parse_schedule_text("1 2 fault\n"); }) == error_code::parse_error);
    CHECK(raised([] { parse_schedule_text("x 0 fault\n"); }) == error_code::parse_error);
    CHECK(raised([] { validate_schedule(parse_schedule_text("1 0 fault\n1 0 allow\n"), fault_model::unbounded()); }) ==
          error_code::schedule_rejected);
    CHECK(raised([] { validate_schedule({}, fault_model::random(0.5)); }) == error_code::schedule_rejected);
    CHECK(raised([] { make_scripted_adversary(parse_schedule_text("1 0 fault\n"), fault_model::none()); }) ==
          error_code::schedule_rejected);
}

TEST_CASE("empty script is fault-free") {
    auto make = [](std::size_t, const agent_spec& s) { return std::make_unique<tree_rv_uf_program>(s.label); };
    const auto free_run = run(make_run(build_path(5), 1, 0, 3, 4, make));
    const auto scripted =
        run(make_run(build_path(5), 1, 0, 3, 4, make, [](std::uint64_t) {
            return make_scripted_adversary({}, fault_model::unbounded());
        }));
    CHECK(free_run.met == scripted.met);
    CHECK(free_run.cost == scripted.cost);
    CHECK(free_run.meeting_round == scripted.meeting_round);
}

namespace {

class cheater final : public adversary {
public:
    fault_pair decide(const round_view&) override { return {true, true}; }
    std::unique_ptr<adversary> clone() const override { return std::make_unique<cheater>(*this); }
    fault_model model() const override { return fault_model::bounded(2); }
    std::string name() const override { return "cheater"; }
};

}  // namespace

TEST_CASE("engine enforces the declared fault model online") {
    auto cfg = make_run(build_path(3), 1, 0, 2, 2, [](std::size_t, const agent_spec&) {
        return make_constant_port_program(0);
    }, [](std::uint64_t) { return std::make_unique<cheater>(); });
    CHECK(raised([&] { run(cfg); }) == error_code::constraint_violation);
}

TEST_CASE("bounded runs never exceed the bound") {
    for (std::uint64_t c : {1u, 2u, 3u}) {
        auto cfg = make_run(build_ring(5), 1, 0, 2, 2, [](std::size_t, const agent_spec& s) {
            return make_rv_rf(s.label, default_uxs_provider());
        }, [c](std::uint64_t seed) { return make_random_bounded_adversary(0.7, c, seed); }, 5000);
        cfg.trace = trace_level::full;
        const auto r = run(cfg);
        std::array<std::uint64_t, 2> streak{};
        for (const auto& row : r.trace) {
            if (!row.decision.is_move()) {
                streak[row.agent] = 0;
                continue;
            }
            streak[row.agent] = row.fault ? streak[row.agent] + 1 : 0;
            CHECK(streak[row.agent] <= c);
        }
    }
}
