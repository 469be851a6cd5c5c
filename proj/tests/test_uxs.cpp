#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "rdv/uxs.hpp"
#include "support.hpp"

using namespace rdv;

TEST_CASE("uxs step arithmetic") {
    CHECK(apply_uxs_step(1, 3, 2) == 0);
    CHECK(apply_uxs_step(0, 1, 7) == 0);
    CHECK(apply_uxs_step(2, 4, 0) == 2);
    CHECK(apply_uxs_step(std::nullopt, 5, 3) == 3);
    CHECK(raised([] { apply_uxs_step(0, 0, 1); }) == error_code::invalid_parameter);
}

TEST_CASE("find_uxs small bounds") {
    const auto m1 = find_uxs(1, 10);
    CHECK(m1.terms.empty());
    CHECK(m1.verified == verification::exhaustive);
    const auto m2 = find_uxs(2, 10);
    CHECK(m2.terms.size() == 1);
    CHECK(verify_uxs(std::vector<std::uint32_t>{1}, 2, verify_mode::exhaustive).passed);
    const auto m3 = find_uxs(3, 1000);
    CHECK(m3.verified == verification::exhaustive);
    // Oracle: the independent walk covers every edge of every labeled graph up to 3.
    for (std::size_t n = 1; n <= 3; ++n) {
        for (const auto& g : enumerate_connected_graphs(n, labeling_mode::all)) {
            for (node_id v = 0; v < n; ++v) {
                CHECK(oracle::uxs_cover(g, v, m3.terms).size() == g.edge_count());
            }
        }
    }
    CHECK(raised([] { find_uxs(0, 10); }) == error_code::invalid_parameter);
    CHECK(raised([] { find_uxs(2, 0); }) == error_code::invalid_parameter);
    CHECK(raised([] { find_uxs(4, 2); }) == error_code::search_failure);
}

TEST_CASE("verify_uxs examples") {
    CHECK_FALSE(verify_uxs(std::vector<std::uint32_t>{}, 2, verify_mode::exhaustive).passed);
    const auto r = verify_uxs(std::vector<std::uint32_t>{}, 2, verify_mode::exhaustive);
    CHECK(r.failures() == 2);  // both starts of the single edge
    CHECK(verify_uxs(std::vector<std::uint32_t>{}, 1, verify_mode::exhaustive).passed);
    CHECK(verify_uxs(std::vector<std::uint32_t>{3, 1, 4}, 1, verify_mode::exhaustive).passed);
    CHECK(raised([] { verify_uxs(std::vector<std::uint32_t>{}, 5, verify_mode::exhaustive); }) ==
          error_code::resource_limit);
}

TEST_CASE("trajectory examples") {
    const auto two = build_path(2);
    CHECK(reingold_trajectory(two, 0, std::vector<std::uint32_t>{1}) == std::vector<port_t>{0, 0});
    CHECK(reingold_trajectory(two, 1, std::vector<std::uint32_t>{}).empty());
    const auto provider = default_uxs_provider();
    const auto ring = build_oriented_ring(3);
    const auto t = reingold_trajectory(ring, 0, provider->for_size(3));
    CHECK(follow_ports(ring, 0, t).back() == 0);
    std::set<std::pair<node_id, node_id>> edges;
    for (auto [a, b] : oracle::directed_edges(ring, 0, t)) {
        edges.insert({std::min(a, b), std::max(a, b)});
    }
    CHECK(edges.size() == 3);
}

TEST_CASE("trajectories close on every small graph") {
    const auto provider = default_uxs_provider();
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& g : enumerate_connected_graphs(n, labeling_mode::all)) {
            for (node_id v = 0; v < n; ++v) {
                const auto t = reingold_trajectory(g, v, provider->for_size(4));
                CHECK(t.size() == (n == 1 ? 0 : 2 * provider->length(4)));
                CHECK(follow_ports(g, v, t).back() == v);
            }
        }
    }
}

TEST_CASE("shipped sequences") {
    const auto provider = uxs_provider::load(default_uxs_dir());
    REQUIRE(provider.max_size() >= 7);
    for (std::size_t m = 2; m <= provider.max_size(); ++m) {
        CHECK(provider.length(m) >= provider.length(m - 1));
        const auto& shorter = provider.for_size(m - 1).terms;
        const auto& longer = provider.for_size(m).terms;
        CHECK(std::equal(shorter.begin(), shorter.end(), longer.begin()));
    }
    for (std::size_t m = 1; m <= 4; ++m) {
        CHECK(provider.for_size(m).verified == verification::exhaustive);
        CHECK(verify_uxs(provider.for_size(m), m, verify_mode::exhaustive).passed);
    }
    verify_options opts;
    opts.samples = 10000;
    opts.seed = 20261018;
    for (std::size_t m = 5; m <= 7; ++m) {
        CHECK(provider.for_size(m).verified == verification::sampled);
        const auto r = verify_uxs(provider.for_size(m), m, verify_mode::sampled, opts);
        CHECK(r.graphs == 10000);
        CHECK(r.passed);
    }
}

TEST_CASE("provider prefixes cycle past the longest sequence") {
    const auto provider = default_uxs_provider();
    const auto len = provider->length(provider->max_size());
    bool cycled = true;
    const auto p = provider->prefix(3, &cycled);
    CHECK_FALSE(cycled);
    CHECK(p.size() == 3);
    const auto q = provider->prefix(len + 2, &cycled);
    CHECK(cycled);
    CHECK(q[len] == q[0]);
    CHECK(q[len + 1] == q[1]);
}

TEST_CASE("cache files round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "rdv_uxs_roundtrip";
    std::filesystem::remove_all(dir);
    auto seq = find_uxs(3, 1000);
    save_uxs(seq, dir.string());
    const auto back = load_uxs(3, dir.string());
    REQUIRE(back);
    CHECK(back->terms == seq.terms);
    CHECK(back->verified == verification::exhaustive);
    CHECK_FALSE(load_uxs(4, dir.string()));
    std::filesystem::remove_all(dir);
}

TEST_CASE("sampled search above the exhaustive cap") {
    search_options opts;
    opts.corpus_samples = 500;
    opts.holdout_samples = 500;
    opts.prefix = default_uxs_provider()->for_size(4).terms;
    const auto s = find_uxs(5, 20000, opts);
    CHECK(s.terms.size() >= opts.prefix.size());
    CHECK(std::equal(opts.prefix.begin(), opts.prefix.end(), s.terms.begin()));
    CHECK(s.verified != verification::exhaustive);
}
