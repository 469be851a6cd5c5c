#include <random>
#include <stdexcept>

#include "doctest.h"
#include "rdv/algorithms.hpp"
#include "solo.hpp"
#include "support.hpp"

using namespace rdv;

namespace {

bool is_prefix(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

std::shared_ptr<const uxs_provider> provider() { return default_uxs_provider(); }

}  // namespace

TEST_CASE("modified label") {
    CHECK(modified_label(1) == std::vector<std::uint8_t>{1, 1, 0, 0, 1, 0});
    CHECK(modified_label(2) == std::vector<std::uint8_t>{1, 1, 0, 0, 0, 0, 1, 1, 1, 0});
    for (std::uint64_t l = 1; l <= 300; ++l) {
        std::size_t k = 0;
        for (auto x = l; x; x >>= 1) {
            ++k;
        }
        CHECK(modified_label(l).size() == 4 * k + 2);
    }
    CHECK(raised([] { modified_label(0); }) == error_code::invalid_parameter);
    for (std::uint64_t a = 1; a <= 64; ++a) {
        for (std::uint64_t b = 1; b <= 64; ++b) {
            if (a != b) {
                CHECK_FALSE(is_prefix(modified_label(a), modified_label(b)));
            }
        }
    }
}

TEST_CASE("dance script") {
    const auto d1 = dance_script(1);
    CHECK(d1.size() == 34);
    CHECK(std::count(d1.begin(), d1.end(), dance_step::cross) == 18);
    CHECK(dance_script(2).size() == 42);
    for (std::uint64_t l = 1; l <= 64; ++l) {
        const auto bits = modified_label(l);
        const auto d = dance_script(bits);
        CHECK(d.size() == 10 + 2 * bits.size() + 12);
        const auto ones = std::count(bits.begin(), bits.end(), 1);
        CHECK(std::count(d.begin(), d.end(), dance_step::cross) == 2 * ones + 12);
        // Even number of crossings: the Dance ends where it started.
        CHECK(std::count(d.begin(), d.end(), dance_step::cross) % 2 == 0);
    }
}

TEST_CASE("RV-RF fault-free stages end at the Dance node") {
    const auto g = build_star(3);
    auto prog = make_rv_rf(3, provider());
    auto* rv = dynamic_cast<rv_rf_program*>(prog.get());
    solo s(g, 1, *prog);
    std::optional<node_id> dance_node;
    std::uint64_t checked = 0;
    for (int r = 0; r < 3000; ++r) {
        const node_id before = s.at();
        const auto out = s.step();
        if (rv->current_mode() == rv_rf_program::mode::progress && out.moved) {
            // This round was the Progress traversal of a new stage.
            if (dance_node) {
                CHECK(before == *dance_node);
                ++checked;
            }
            dance_node = out.at;
        }
    }
    CHECK(checked > 10);
    CHECK(rv->stages_completed() >= checked);
    CHECK(rv->corrections_started() == 0);
}

TEST_CASE("RV-RF single fault in Dance: clean Correction then the same round again") {
    const auto g = build_path(2);
    auto prog = make_rv_rf(1, provider());
    auto* rv = dynamic_cast<rv_rf_program*>(prog.get());
    solo s(g, 0, *prog);
    s.step();  // Progress traversal 0 -> 1
    const auto script = dance_script(1);
    // Run the prelude; the first bit of label 1 is a crossing at Dance round 10.
    auto pre = s.run(10);
    REQUIRE(rv->current_mode() == rv_rf_program::mode::dance);
    for (const auto& r : pre) {
        CHECK_FALSE(r.decision.is_move());
    }
    REQUIRE(script[10] == dance_step::cross);
    const auto blocked = s.step(true);
    CHECK(blocked.fault);
    const node_id w = s.at();
    // 20 idles and 20 crossings, back at w.
    const auto corr = s.run(40);
    CHECK(rv->corrections_started() == 1);
    for (int i = 0; i < 20; ++i) {
        CHECK_FALSE(corr[i].decision.is_move());
    }
    for (int i = 20; i < 40; ++i) {
        CHECK(corr[i].moved);
    }
    CHECK(corr.back().at == w);
    // Round 41 after the fault: Dance round 10 is attempted again.
    const auto again = s.step();
    CHECK(again.decision.is_move());
    CHECK(again.moved);
    CHECK(rv->current_mode() == rv_rf_program::mode::dance);
    CHECK(rv->dance_round() == 10);
    s.step();
    CHECK(rv->dance_round() == 11);
}

TEST_CASE("RV-RF fault during Correction restarts it where the fault struck") {
    const auto g = build_path(2);
    auto prog = make_rv_rf(1, provider());
    auto* rv = dynamic_cast<rv_rf_program*>(prog.get());
    solo s(g, 0, *prog);
    s.step();
    s.run(10);
    s.step(true);  // Correction 1 from node 1
    s.run(20);     // idles
    s.run(3);      // three crossings: now at node 0
    const node_id before = s.at();
    CHECK(before == 0);
    const auto blocked = s.step(true);  // fault on the 4th crossing
    CHECK(blocked.fault);
    CHECK(rv->correction_round() == 23);
    const auto first = s.step();
    CHECK(rv->corrections_started() == 2);
    CHECK(rv->correction_round() == 0);
    const auto corr = s.run(39);
    CHECK_FALSE(first.decision.is_move());
    for (int i = 0; i < 19; ++i) {
        CHECK_FALSE(corr[i].decision.is_move());
    }
    CHECK(corr.back().at == before);
    // The restarted Correction idled away from the Dance fault node; one crossing goes back.
    const auto ret = s.step();
    CHECK(ret.moved);
    CHECK(rv->current_mode() == rv_rf_program::mode::correction);
    CHECK(s.at() == 1);
    const auto resumed = s.step();
    CHECK(resumed.moved);
    CHECK(rv->current_mode() == rv_rf_program::mode::dance);
    CHECK(rv->dance_round() == 10);
}

TEST_CASE("Tree-RV-UF traversal counts") {
    {
        const auto g = build_path(2);
        tree_rv_uf_program p(1);
        solo s(g, 0, p);
        s.run(100);
        CHECK(s.traversals() == 4);
        CHECK(p.finished());
        CHECK(p.walks_completed() == 2);
    }
    {
        const auto g = build_path(3);
        tree_rv_uf_program p(2);
        solo s(g, 0, p);
        s.run(100);
        CHECK(s.traversals() == 16);
        CHECK(s.at() == 0);
    }
}

TEST_CASE("Tree-RV-UF retries keep the port sequence") {
    std::mt19937_64 rng(5);
    for (const auto& t : enumerate_trees(6)) {
        tree_rv_uf_program clean(2);
        solo a(t, 2, clean);
        std::vector<port_t> ref;
        for (const auto& r : a.run(200)) {
            if (r.moved) {
                ref.push_back(r.decision.port);
            }
        }
        tree_rv_uf_program faulty(2);
        solo b(t, 2, faulty);
        std::vector<port_t> got;
        for (const auto& r : b.run(2000, [&](std::size_t) { return rng() % 3 == 0; })) {
            if (r.moved) {
                got.push_back(r.decision.port);
            }
        }
        CHECK(got == ref);
        CHECK(ref.size() == 2 * 2 * 2 * 5);
        CHECK(basic_walk(t, 2).size() * 4 == ref.size());
    }
}

TEST_CASE("oriented ring program") {
    const auto g4 = build_oriented_ring(4);
    oriented_ring_program p(1, 4);
    solo s(g4, 0, p);
    s.run(50);
    CHECK(s.traversals() == 8);
    CHECK(s.at() == 0);
    CHECK(p.finished());

    const auto g3 = build_oriented_ring(3);
    oriented_ring_program q(1, 3);
    solo t(g3, 0, q);
    std::size_t streak = 0;
    for (int r = 0; r < 200; ++r) {
        const bool block = streak < 5;
        const auto out = t.step(block);
        if (out.decision.is_move()) {
            streak = out.moved ? 0 : streak + 1;
        }
    }
    CHECK(t.traversals() == 6);
}

TEST_CASE("A(c) wrapper segments") {
    const auto g = build_path(2);
    {
        auto w = wrap_with_ac(make_constant_port_program(0), 1);
        solo s(g, 0, *w);
        std::mt19937_64 rng(3);
        bool prev = false;
        for (int seg = 0; seg < 200; ++seg) {
            std::uint64_t moves = 0;
            for (int r = 0; r < 3; ++r) {
                const bool block = !prev && rng() % 2;
                const auto out = s.step(block);
                prev = out.fault;
                moves += out.moved;
            }
            CHECK(moves == 1);
        }
    }
    {
        auto w = wrap_with_ac(make_idle_program(), 2);
        solo s(g, 0, *w);
        for (const auto& r : s.run(5)) {
            CHECK_FALSE(r.decision.is_move());
        }
    }
    CHECK(raised([] { wrap_with_ac(make_idle_program(), 0); }) == error_code::invalid_parameter);
}

TEST_CASE("A(c) round mapping and traversal equality") {
    for (const auto& t : enumerate_trees(5)) {
        for (std::uint64_t c : {1u, 2u, 3u}) {
            tree_rv_uf_program base(2);
            solo b(t, 0, base);
            const auto base_rounds = b.run(100);
            auto w = wrap_with_ac(std::make_unique<tree_rv_uf_program>(2), c);
            solo s(t, 0, *w);
            const auto wrapped = s.run(100 * (2 * c + 1));
            for (std::size_t r = 0; r < wrapped.size(); ++r) {
                const auto& br = base_rounds[r / (2 * c + 1)];
                const bool first = r % (2 * c + 1) == 0;
                CHECK(wrapped[r].moved == (first && br.moved));
                if (wrapped[r].moved) {
                    CHECK(wrapped[r].decision.port == br.decision.port);
                }
            }
            CHECK(s.traversals() == b.traversals());
        }
    }
}

TEST_CASE("exploration call") {
    const auto g = build_path(3);
    auto drive = [&](exploration_call& call, node_id start, const std::vector<bool>& blocks) {
        node_id at = start;
        std::optional<port_t> entry;
        bool fault = false;
        std::size_t r = 0;
        while (true) {
            const auto a = call.next({g.degree(at), entry, fault, false});
            if (!a) {
                break;
            }
            fault = false;
            if (a->is_move()) {
                if (r < blocks.size() && blocks[r]) {
                    fault = true;
                } else {
                    const auto e = g.traverse(at, a->port);
                    at = e.node;
                    entry = e.port;
                }
            }
            ++r;
        }
        return r;
    };
    exploration_call ok(1, 2, {1});
    CHECK(drive(ok, 0, {}) == 2);
    CHECK(ok.success());
    exploration_call blocked(1, 2, {1});
    CHECK(drive(blocked, 0, {true, true}) == 2);
    CHECK_FALSE(blocked.success());
    exploration_call longer(2, 4, {1, 1});
    CHECK(drive(longer, 0, {true, true, true, false, true, true, true, false}) == 8);
    CHECK(longer.success());
    exploration_call early(2, 4, {1, 1});
    CHECK(drive(early, 0, {true, true, true, true}) == 8);
    CHECK_FALSE(early.success());
}

TEST_CASE("Graph-RV-BF schedule") {
    CHECK(bf_schedule::first_active_phase(1) == 1);
    CHECK(bf_schedule::first_active_phase(2) == 2);
    CHECK(bf_schedule::first_active_phase(3) == 2);
    CHECK(bf_schedule::first_active_phase(4) == 3);
    CHECK(bf_schedule::phase_length(3) == 1024);
    CHECK(bf_schedule::stages(3) * bf_schedule::stage_length(3) == 1024);
    CHECK(bf_schedule::stage_length(3) == 128);
    for (std::uint64_t i = 0; i < 20; ++i) {
        CHECK(bf_schedule::stage_length(i) == bf_schedule::busy_length(i) + bf_schedule::wait_length(i));
        CHECK(bf_schedule::phase_length(i) == (std::uint64_t{1} << i) * bf_schedule::stage_length(i));
    }
    const auto g = build_path(2);
    graph_rv_bf_program p(1, provider());
    solo s(g, 0, p);
    s.run(48);  // phase 0 and stage 0 of phase 1 are idle
    CHECK(s.traversals() == 0);
    const auto r = s.step();
    CHECK(r.moved);
    CHECK(p.phase() == 1);
    CHECK(p.stage() == 1);
    CHECK(p.u() == 1);
    CHECK(p.c() == 2);
}

TEST_CASE("Graph-RV-BF update rule over all outcome strings") {
    for (std::size_t len = 0; len <= 20; ++len) {
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
            std::vector<bool> o(len);
            std::uint64_t u = 1, c = 2;
            for (std::size_t k = 0; k < len; ++k) {
                o[k] = bits >> k & 1;
                (o[k] ? u : c) *= 2;
            }
            CHECK_NOTHROW(check_bf_update_rule(1, o));
            if (u * c != (std::uint64_t{1} << (len + 1))) {
                FAIL("oracle arithmetic");
            }
        }
    }
}

TEST_CASE("Graph-RV-BF phase log under faults") {
    const auto g = build_ring(5);
    graph_rv_bf_program p(3, provider());
    solo s(g, 0, p);
    std::mt19937_64 rng(11);
    s.run(200000, [&](std::size_t) { return rng() % 4 == 0; });
    REQUIRE(p.phase_log().size() >= 3);
    std::uint64_t u = 1, c = 4;
    for (const auto& rec : p.phase_log()) {
        CHECK(rec.u == u);
        CHECK(rec.c == c);
        CHECK(rec.u * rec.c == (std::uint64_t{1} << rec.phase));
        (rec.success ? u : c) *= 2;
    }
}

TEST_CASE("known-bound program") {
    const auto g = build_path(2);
    known_bound_program p1(1, 2, provider());
    CHECK(p1.repetitions() == 2);
    solo s1(g, 0, p1);
    s1.run(50);
    CHECK(s1.traversals() == 4);
    CHECK(p1.finished());
    known_bound_program p3(3, 2, provider());
    CHECK(p3.repetitions() == 8);
    solo s3(g, 0, p3);
    s3.run(50);
    CHECK(s3.traversals() == 16);
    CHECK(s3.at() == 0);
    CHECK(raised([] { known_bound_program big(30, 4, default_uxs_provider(), 1000); }) ==
          error_code::resource_limit);
}

TEST_CASE("URBP outcomes") {
    CHECK(urbp_outcome(true, false) == 1);
    CHECK(urbp_outcome(false, true) == 0);
    CHECK_FALSE(urbp_outcome(true, true));
    CHECK_FALSE(urbp_outcome(false, false));
    const auto g = build_path(2);
    auto play = [&](bool f1, bool f2) {
        urbp_call call(0);
        node_id at = 0;
        std::optional<port_t> entry;
        bool fault = false;
        const bool blocks[2] = {!f1, !f2};
        int r = 0;
        while (auto a = call.next({g.degree(at), entry, fault, false})) {
            fault = blocks[r++];
            if (!fault) {
                const auto e = g.traverse(at, a->port);
                at = e.node;
                entry = e.port;
            }
        }
        CHECK(call.done());
        return std::make_pair(call.result(), at);
    };
    CHECK(play(true, false) == std::make_pair(std::optional<int>(1), node_id{1}));
    CHECK(play(false, true) == std::make_pair(std::optional<int>(0), node_id{1}));
    CHECK(play(true, true) == std::make_pair(std::optional<int>(), node_id{0}));
    CHECK(play(false, false) == std::make_pair(std::optional<int>(), node_id{0}));
}

TEST_CASE("harvest program") {
    harvest_program h(1, polynomial_budget(1, 2));
    CHECK(h.preparation_calls(2) == 8);
    CHECK(h.preparation_calls(1) == 0);
    CHECK(ceil_log2(1) == 0);
    CHECK(ceil_log2(3) == 2);
    CHECK(ceil_log2(4) == 2);
    CHECK(ceil_log2(5) == 3);

    // Epoch 1: no preparation, Q(1) = 1 execution round; at a degree-1 node zero bits
    // encode port 0.
    const auto g = build_path(2);
    harvest_program p(1, polynomial_budget(1, 2));
    solo s(g, 0, p);
    const auto r = s.step();
    CHECK(r.decision == action::move(0));
    CHECK(p.epoch() == 1);
    // Epoch 2: 8 URBP calls of two rounds each.
    const auto prep = s.run(16);
    for (const auto& x : prep) {
        CHECK(x.decision.is_move());
    }
    CHECK(p.epoch() == 2);
    CHECK(p.bits_harvested() == 0);  // no faults, no bits
}

TEST_CASE("harvest execution at degree 3") {
    // Star centre has degree 3; with bits "11" the value 3 is not a port and the agent idles.
    const auto star = build_star(3);
    harvest_program p(1, polynomial_budget(1, 2));
    solo s(star, 0, p);
    // Epoch 1 execution round at degree 3 with no bits: idle.
    REQUIRE(star.degree(0) == 3);
    const auto r = s.step();
    CHECK_FALSE(r.decision.is_move());
    // Epoch 2: make every call yield bit 1 (first attempt succeeds, second blocked).
    for (int k = 0; k < 8; ++k) {
        s.step(false);
        s.step(true);
    }
    // Eight single moves bring the agent back to the centre; bits 11 encode 3, not a port.
    CHECK(s.at() == 0);
    const auto e1 = s.step();
    CHECK(p.bits_harvested() == 8);
    CHECK_FALSE(e1.decision.is_move());
}
