#include "rdv/experiment.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rdv/algorithms.hpp"
#include "rdv/error.hpp"
#include "rdv/uxs.hpp"

namespace rdv {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"graph", {"kind", "n", "index", "leaves", "file"}},
        {"agent.0", {"label", "start", "wake"}},
        {"agent.1", {"label", "start", "wake"}},
        {"algorithm", {"name", "wrap", "m", "ring_n", "q_coeff", "q_exp", "port", "uxs_dir"}},
        {"adversary", {"kind", "p", "c", "patience", "max_run", "schedule", "model"}},
        {"run", {"horizon", "seed", "trials", "jobs", "dormant_meeting", "crossings", "random_starts", "trace",
                 "objective", "distinct_labels"}},
    };
    return keys;
}

[[noreturn]] void config_fail(const std::string& key, const config_file::entry* e, const std::string& why) {
    std::string where = e && e->line ? "line " + std::to_string(e->line) + ": " : "";
    fail(error_code::config_error, where + "key '" + key + "': " + why);
}

class reader {
public:
    explicit reader(const config_file& cfg) : cfg_(cfg) {}

    const config_file::entry* find(const std::string& key) const {
        const auto it = cfg_.entries().find(key);
        return it == cfg_.entries().end() ? nullptr : &it->second;
    }

    bool has(const std::string& key) const { return find(key) != nullptr; }

    std::string text(const std::string& key, const std::optional<std::string>& fallback = std::nullopt) const {
        const auto* e = find(key);
        if (!e) {
            if (!fallback) {
                config_fail(key, nullptr, "missing");
            }
            return *fallback;
        }
        return e->value;
    }

    std::uint64_t integer(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) const {
        const auto* e = find(key);
        if (!e) {
            if (!fallback) {
                config_fail(key, nullptr, "missing");
            }
            return *fallback;
        }
        try {
            std::size_t used = 0;
            if (!e->value.empty() && e->value[0] != '-') {
                const auto v = std::stoull(e->value, &used);
                if (used == e->value.size()) {
                    return v;
                }
            }
        } catch (const std::logic_error&) {
        }
        config_fail(key, e, "expected a non-negative integer, got '" + e->value + "'");
    }

    double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        const auto* e = find(key);
        if (!e) {
            if (!fallback) {
                config_fail(key, nullptr, "missing");
            }
            return *fallback;
        }
        try {
            std::size_t used = 0;
            const auto v = std::stod(e->value, &used);
            if (used == e->value.size()) {
                return v;
            }
        } catch (const std::logic_error&) {
        }
        config_fail(key, e, "expected a number, got '" + e->value + "'");
    }

    bool boolean(const std::string& key, bool fallback) const {
        const auto* e = find(key);
        if (!e) {
            return fallback;
        }
        if (e->value == "true" || e->value == "yes" || e->value == "1") {
            return true;
        }
        if (e->value == "false" || e->value == "no" || e->value == "0") {
            return false;
        }
        config_fail(key, e, "expected true or false, got '" + e->value + "'");
    }

    // Runs `build`, turning parameter errors into config errors on `key`.
    template <class F>
    auto guarded(const std::string& key, F&& build) const {
        try {
            return build();
        } catch (const error& err) {
            if (err.code() == error_code::config_error) {
                throw;
            }
            config_fail(key, find(key), err.what());
        }
    }

private:
    const config_file& cfg_;
};

std::shared_ptr<const port_graph> build_graph(const reader& r) {
    const auto kind = r.text("graph.kind");
    return r.guarded("graph.kind", [&]() -> std::shared_ptr<const port_graph> {
        if (kind == "file") {
            return std::make_shared<const port_graph>(load_graph(r.text("graph.file")));
        }
        if (kind == "star") {
            const auto leaves = r.has("graph.leaves") ? r.integer("graph.leaves") : r.integer("graph.n") - 1;
            return std::make_shared<const port_graph>(build_star(leaves));
        }
        const auto n = r.integer("graph.n");
        if (kind == "oriented_ring") {
            return std::make_shared<const port_graph>(build_oriented_ring(n));
        }
        if (kind == "homogeneous_ring") {
            return std::make_shared<const port_graph>(build_homogeneous_ring(n));
        }
        if (kind == "ring") {
            return std::make_shared<const port_graph>(build_ring(n));
        }
        if (kind == "path") {
            return std::make_shared<const port_graph>(build_path(n));
        }
        if (kind == "tree") {
            const auto trees = enumerate_trees(n);
            const auto index = r.integer("graph.index", 0);
            if (index >= trees.size()) {
                config_fail("graph.index", r.find("graph.index"),
                            "only " + std::to_string(trees.size()) + " trees of size " + std::to_string(n));
            }
            return std::make_shared<const port_graph>(trees[index]);
        }
        config_fail("graph.kind", r.find("graph.kind"), "unknown graph kind '" + kind + "'");
    });
}

program_factory build_programs(const reader& r, const port_graph& g) {
    const auto name = r.text("algorithm.name");
    std::shared_ptr<const uxs_provider> provider;
    auto uxs = [&]() {
        if (!provider) {
            provider = r.has("algorithm.uxs_dir")
                           ? std::make_shared<const uxs_provider>(uxs_provider::load(r.text("algorithm.uxs_dir")))
                           : default_uxs_provider();
        }
        return provider;
    };
    program_factory base;
    if (name == "rv_rf") {
        base = [p = uxs()](std::size_t, const agent_spec& s) { return make_rv_rf(s.label, p); };
    } else if (name == "tree_rv_uf") {
        if (!g.is_tree()) {
            config_fail("algorithm.name", r.find("algorithm.name"), "tree_rv_uf needs a tree");
        }
        base = [](std::size_t, const agent_spec& s) { return std::make_unique<tree_rv_uf_program>(s.label); };
    } else if (name == "oriented_ring") {
        const auto n = r.integer("algorithm.ring_n", g.node_count());
        base = [n](std::size_t, const agent_spec& s) { return std::make_unique<oriented_ring_program>(s.label, n); };
    } else if (name == "graph_rv_bf") {
        base = [p = uxs()](std::size_t, const agent_spec& s) {
            return std::make_unique<graph_rv_bf_program>(s.label, p);
        };
    } else if (name == "known_bound") {
        const auto m = r.integer("algorithm.m", g.node_count());
        base = [m, p = uxs()](std::size_t, const agent_spec& s) {
            return std::make_unique<known_bound_program>(s.label, m, p);
        };
    } else if (name == "harvest") {
        const auto q = polynomial_budget(r.integer("algorithm.q_coeff", 1), r.integer("algorithm.q_exp", 2));
        base = [q](std::size_t, const agent_spec& s) { return std::make_unique<harvest_program>(s.label, q); };
    } else if (name == "idle") {
        base = [](std::size_t, const agent_spec&) { return make_idle_program(); };
    } else if (name == "constant_port") {
        const auto port = static_cast<port_t>(r.integer("algorithm.port", 0));
        base = [port](std::size_t, const agent_spec&) { return make_constant_port_program(port); };
    } else {
        config_fail("algorithm.name", r.find("algorithm.name"), "unknown algorithm '" + name + "'");
    }
    const auto wrap = r.integer("algorithm.wrap", 0);
    if (wrap == 0) {
        return base;
    }
    return [base, wrap](std::size_t a, const agent_spec& s) { return wrap_with_ac(base(a, s), wrap); };
}

void build_adversary(const reader& r, experiment& ex) {
    const auto kind = r.text("adversary.kind", "none");
    r.guarded("adversary.kind", [&] {
        if (kind == "none") {
            ex.model = fault_model::none();
            ex.run.make_adversary = [](std::uint64_t) { return make_no_faults(); };
        } else if (kind == "random") {
            const auto p = r.real("adversary.p");
            ex.model = fault_model::random(p);
            ex.run.make_adversary = [p](std::uint64_t seed) { return make_random_adversary(p, seed); };
        } else if (kind == "max_delay") {
            const auto c = r.integer("adversary.c");
            ex.model = fault_model::bounded(c);
            ex.run.make_adversary = [c](std::uint64_t) { return make_max_delay_adversary(c); };
        } else if (kind == "random_bounded") {
            const auto p = r.real("adversary.p");
            const auto c = r.integer("adversary.c");
            ex.model = fault_model::bounded(c);
            fault_model::random(p);
            ex.run.make_adversary = [p, c](std::uint64_t seed) { return make_random_bounded_adversary(p, c, seed); };
        } else if (kind == "random_finite") {
            const auto p = r.real("adversary.p");
            const auto max_run = r.integer("adversary.max_run", 16);
            ex.model = fault_model::unbounded();
            fault_model::random(p);
            ex.run.make_adversary = [p, max_run](std::uint64_t seed) {
                return make_random_finite_adversary(p, max_run, seed);
            };
        } else if (kind == "tough") {
            const auto w = r.integer("adversary.patience", 64);
            ex.model = fault_model::unbounded();
            ex.run.make_adversary = [w](std::uint64_t) { return std::make_unique<tough_adversary>(w); };
        } else if (kind == "scripted") {
            const auto sched = load_schedule(r.text("adversary.schedule"));
            const auto model = parse_fault_model(r.text("adversary.model", "unbounded"));
            make_scripted_adversary(sched, model);  // validates now
            ex.model = model;
            ex.run.make_adversary = [sched, model](std::uint64_t) { return make_scripted_adversary(sched, model); };
        } else {
            config_fail("adversary.kind", r.find("adversary.kind"), "unknown adversary '" + kind + "'");
        }
        return 0;
    });
    if (kind == "max_delay" || kind == "random_bounded" || kind == "scripted") {
        return;
    }
    // The worst-case search can still use a declared bound.
    if (r.has("adversary.c") && kind == "none") {
        ex.model = r.guarded("adversary.c", [&] { return fault_model::bounded(r.integer("adversary.c")); });
    }
}

}  // namespace

config_file config_file::parse(std::istream& in) {
    config_file cfg;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto at = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(error_code::config_error, at + "unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "sweep" && !known_keys().count(section)) {
                fail(error_code::config_error, at + "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(error_code::config_error, at + "expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (section.empty()) {
            fail(error_code::config_error, at + "key '" + key + "' outside any section");
        }
        if (key.empty() || value.empty()) {
            fail(error_code::config_error, at + "key '" + key + "' needs a value");
        }
        if (section == "sweep") {
            const auto dot = key.rfind('.');
            const auto sec = dot == std::string::npos ? "" : key.substr(0, dot);
            const auto it = known_keys().find(sec);
            if (it == known_keys().end() || !it->second.count(key.substr(dot + 1))) {
                fail(error_code::config_error, at + "key '" + key + "': sweep axis must name a known section.key");
            }
            for (const auto& axis : cfg.sweep_) {
                if (axis.first == key) {
                    fail(error_code::config_error, at + "key '" + key + "': duplicate sweep axis");
                }
            }
            cfg.sweep_.emplace_back(key, split_list(value));
            continue;
        }
        if (!known_keys().at(section).count(key)) {
            fail(error_code::config_error, at + "key '" + key + "': unknown in [" + section + "]");
        }
        const auto dotted = section + "." + key;
        if (cfg.entries_.count(dotted)) {
            fail(error_code::config_error, at + "key '" + key + "': duplicate in [" + section + "]");
        }
        cfg.entries_[dotted] = {value, line_no};
    }
    return cfg;
}

config_file config_file::parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

config_file config_file::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(error_code::config_error, "cannot open config file " + path);
    }
    return parse(in);
}

void config_file::set(const std::string& dotted_key, const std::string& value) {
    const auto dot = dotted_key.rfind('.');
    const auto sec = dot == std::string::npos ? "" : dotted_key.substr(0, dot);
    const auto it = known_keys().find(sec);
    if (it == known_keys().end() || !it->second.count(dotted_key.substr(dot + 1))) {
        fail(error_code::config_error, "key '" + dotted_key + "': unknown");
    }
    entries_[dotted_key] = {value, 0};
}

experiment build_experiment(const config_file& cfg) {
    const reader r(cfg);
    experiment ex;
    ex.run.graph = build_graph(r);
    const auto n = ex.run.graph->node_count();
    for (std::size_t a = 0; a < 2; ++a) {
        const auto sec = "agent." + std::to_string(a) + ".";
        auto& spec = ex.run.agents[a];
        spec.label = r.integer(sec + "label");
        if (spec.label == 0) {
            config_fail(sec + "label", r.find(sec + "label"), "labels must be positive");
        }
        spec.start = static_cast<node_id>(r.integer(sec + "start", a == 0 ? 0 : n - 1));
        if (spec.start >= n) {
            config_fail(sec + "start", r.find(sec + "start"), "start node out of range");
        }
        spec.wake = r.integer(sec + "wake", 0);
    }
    ex.run.distinct_labels = r.boolean("run.distinct_labels", true);
    if (ex.run.distinct_labels && ex.run.agents[0].label == ex.run.agents[1].label) {
        config_fail("agent.1.label", r.find("agent.1.label"), "agents need different labels");
    }
    ex.run.make_program = build_programs(r, *ex.run.graph);
    build_adversary(r, ex);
    ex.run.horizon = r.integer("run.horizon", 1'000'000);
    ex.run.seed = r.integer("run.seed", 1);
    ex.run.dormant_meeting = r.boolean("run.dormant_meeting", true);
    ex.run.detect_crossings = r.boolean("run.crossings", true);
    ex.trials = r.integer("run.trials", 100);
    ex.jobs = static_cast<unsigned>(r.integer("run.jobs", 1));
    ex.random_starts = r.boolean("run.random_starts", false);
    ex.trace_path = r.text("run.trace", "");
    if (ex.random_starts && n < 2) {
        config_fail("run.random_starts", r.find("run.random_starts"), "needs at least two nodes");
    }
    if (!ex.random_starts && ex.run.agents[0].start == ex.run.agents[1].start) {
        config_fail("agent.1.start", r.find("agent.1.start"), "agents must start at different nodes");
    }
    ex.objective = r.guarded("run.objective", [&] { return parse_objective(r.text("run.objective", "max-cost")); });
    return ex;
}

std::vector<std::vector<std::pair<std::string, std::string>>> sweep_cells(const config_file& cfg) {
    std::vector<std::vector<std::pair<std::string, std::string>>> cells{{}};
    for (const auto& [key, values] : cfg.sweep_axes()) {
        std::vector<std::vector<std::pair<std::string, std::string>>> grown;
        for (const auto& cell : cells) {
            for (const auto& v : values) {
                auto c = cell;
                c.emplace_back(key, v);
                grown.push_back(std::move(c));
            }
        }
        cells = std::move(grown);
    }
    return cells;
}

std::string run_sweep(const config_file& cfg, std::uint64_t trials, std::uint64_t seed, unsigned jobs,
                      std::vector<std::string>* errors) {
    std::vector<std::string> names;
    for (const auto& axis : cfg.sweep_axes()) {
        names.push_back(axis.first);
    }
    std::string out = summary_csv_header(names) + "\n";
    for (const auto& cell : sweep_cells(cfg)) {
        std::vector<std::string> values;
        auto local = cfg;
        for (const auto& [key, value] : cell) {
            local.set(key, value);
            values.push_back(value);
        }
        try {
            const auto ex = build_experiment(local);
            const auto s = monte_carlo(ex.run, {trials, seed, jobs, ex.random_starts});
            out += summary_csv_row(values, s) + "\n";
        } catch (const std::exception& e) {
            if (errors) {
                std::string where;
                for (const auto& [key, value] : cell) {
                    where += key + "=" + value + " ";
                }
                errors->push_back(where + ": " + e.what());
            }
            mc_summary empty;
            out += summary_csv_row(values, empty) + "\n";
        }
    }
    return out;
}

}  // namespace rdv
