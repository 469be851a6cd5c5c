#include "doctest.h"
#include "rdv/experiment.hpp"
#include "support.hpp"

using namespace rdv;

namespace {

const char* base_config = R"(# two agents on a ring
[graph]
kind = ring
n = 5

[agent.0]
label = 1
start = 0

[agent.1]
label = 3
start = 2

[algorithm]
name = rv_rf

[adversary]
kind = random
p = 0.1

[run]
horizon = 100000
seed = 4
trials = 30
)";

std::string config_error_text(const std::string& text) {
    try {
        build_experiment(config_file::parse_text(text));
    } catch (const error& e) {
        CHECK(e.code() == error_code::config_error);
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("config parsing and building") {
    const auto cfg = config_file::parse_text(base_config);
    CHECK(cfg.entries().at("graph.kind").value == "ring");
    CHECK(cfg.entries().at("graph.kind").line == 3);
    const auto ex = build_experiment(cfg);
    CHECK(ex.run.graph->node_count() == 5);
    CHECK(ex.run.agents[1].label == 3);
    CHECK(ex.run.agents[1].start == 2);
    CHECK(ex.model.what == fault_model::kind::random);
    CHECK(ex.trials == 30);
    CHECK(ex.run.horizon == 100000);
    const auto r = run(ex.run);
    CHECK(r.met);
}

TEST_CASE("config errors name the key and line") {
    const std::string text = base_config;
    CHECK(config_error_text(text + "bogus = 1\n").find("key 'bogus'") != std::string::npos);
    auto bad_p = text;
    bad_p.replace(bad_p.find("p = 0.1"), 7, "p = 1.5");
    const auto msg = config_error_text(bad_p);
    CHECK(msg.find("adversary.kind") != std::string::npos);
    auto bad_n = text;
    bad_n.replace(bad_n.find("n = 5"), 5, "n = five");
    const auto msg_n = config_error_text(bad_n);
    CHECK(msg_n.find("line 4") != std::string::npos);
    CHECK(msg_n.find("graph.n") != std::string::npos);
    CHECK(config_error_text("[nowhere]\nx = 1\n").find("unknown section") != std::string::npos);
    CHECK(config_error_text("[graph]\nkind\n").find("line 2") != std::string::npos);
    CHECK(config_error_text("kind = ring\n").find("outside any section") != std::string::npos);
    auto same_label = text;
    same_label.replace(same_label.find("label = 3"), 9, "label = 1");
    CHECK(config_error_text(same_label).find("agent.1.label") != std::string::npos);
    auto unknown_algo = text;
    unknown_algo.replace(unknown_algo.find("rv_rf"), 5, "magic");
    CHECK(config_error_text(unknown_algo).find("unknown algorithm") != std::string::npos);
    CHECK(config_error_text(text + "[graph]\nkind = path\n").find("duplicate") != std::string::npos);
}

TEST_CASE("every graph kind, algorithm and adversary builds") {
    const std::vector<std::string> graphs{"kind = oriented_ring\nn = 4", "kind = homogeneous_ring\nn = 4",
                                          "kind = ring\nn = 4", "kind = path\nn = 4", "kind = star\nn = 4",
                                          "kind = tree\nn = 4\nindex = 1"};
    for (const auto& g : graphs) {
        const auto ex = build_experiment(config_file::parse_text(
            "[graph]\n" + g + "\n[agent.0]\nlabel = 1\n[agent.1]\nlabel = 2\n[algorithm]\nname = idle\n"));
        CHECK(ex.run.graph->node_count() == 4);
    }
    const std::vector<std::string> algos{"rv_rf", "tree_rv_uf", "oriented_ring", "graph_rv_bf", "known_bound",
                                         "harvest", "idle", "constant_port"};
    for (const auto& a : algos) {
        const auto ex = build_experiment(config_file::parse_text(
            "[graph]\nkind = path\nn = 3\n[agent.0]\nlabel = 1\n[agent.1]\nlabel = 2\n[algorithm]\nname = " + a +
            "\nwrap = 1\n[run]\nhorizon = 200\n"));
        run(ex.run);
    }
    const std::vector<std::string> advs{"kind = none", "kind = random\np = 0.2", "kind = max_delay\nc = 2",
                                        "kind = random_bounded\np = 0.5\nc = 2",
                                        "kind = random_finite\np = 0.5\nmax_run = 5", "kind = tough\npatience = 8"};
    for (const auto& a : advs) {
        const auto ex = build_experiment(config_file::parse_text(
            "[graph]\nkind = path\nn = 3\n[agent.0]\nlabel = 1\n[agent.1]\nlabel = 2\n[algorithm]\nname = "
            "tree_rv_uf\n[adversary]\n" + a + "\n[run]\nhorizon = 500\n"));
        run(ex.run);
    }
}

TEST_CASE("overrides") {
    auto cfg = config_file::parse_text(base_config);
    cfg.set("graph.n", "7");
    CHECK(build_experiment(cfg).run.graph->node_count() == 7);
    CHECK(raised([&] { cfg.set("graph.colour", "red"); }) == error_code::config_error);
}

TEST_CASE("sweep cells and CSV") {
    auto text = std::string(base_config) + "[sweep]\nadversary.p = 0.1, 0.5\ngraph.n = 4, 6\n";
    const auto cfg = config_file::parse_text(text);
    const auto cells = sweep_cells(cfg);
    REQUIRE(cells.size() == 4);
    CHECK(cells[0] == std::vector<std::pair<std::string, std::string>>{{"adversary.p", "0.1"}, {"graph.n", "4"}});
    CHECK(cells[3] == std::vector<std::pair<std::string, std::string>>{{"adversary.p", "0.5"}, {"graph.n", "6"}});
    const auto csv = run_sweep(cfg, 10, 3, 2);
    CHECK(csv.rfind("adversary.p,graph.n,trials,met_rate", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv == run_sweep(cfg, 10, 3, 1));

    // A single cell is the plain Monte Carlo summary.
    auto one = config_file::parse_text(std::string(base_config) + "[sweep]\ngraph.n = 5\n");
    const auto ex = build_experiment(one);
    const auto s = monte_carlo(ex.run, {10, 3, 1, false});
    CHECK(run_sweep(one, 10, 3, 1) == summary_csv_header({"graph.n"}) + "\n" + summary_csv_row({"5"}, s) + "\n");

    // A failing cell is reported and the sweep carries on.
    auto failing = config_file::parse_text(std::string(base_config) + "[sweep]\ngraph.n = 5, 1\n");
    std::vector<std::string> errors;
    const auto out = run_sweep(failing, 5, 1, 1, &errors);
    CHECK(errors.size() == 1);
    CHECK(std::count(out.begin(), out.end(), '\n') == 3);
    CHECK(raised([] { config_file::parse_text("[sweep]\nnope.x = 1, 2\n"); }) == error_code::config_error);
}
