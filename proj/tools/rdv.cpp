// rdv: command-line front end for rendezvous experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "rdv/engine.hpp"
#include "rdv/error.hpp"
#include "rdv/experiment.hpp"
#include "rdv/uxs.hpp"
#include "rdv/worst_case.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_truncated = 3;
constexpr int exit_resource = 4;

constexpr std::uint64_t default_seed = 1;

struct common_flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> jobs;
    std::string out;
    std::string uxs_dir;
    std::vector<std::string> sets;
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        rdv::fail(rdv::error_code::config_error, "cannot write " + path);
    }
    out << text;
}

rdv::config_file load_config(const common_flags& f) {
    auto cfg = rdv::config_file::load(f.config);
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            rdv::fail(rdv::error_code::config_error, "--set expects section.key=value, got '" + s + "'");
        }
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (f.seed) {
        cfg.set("run.seed", std::to_string(*f.seed));
    }
    if (f.horizon) {
        cfg.set("run.horizon", std::to_string(*f.horizon));
    }
    if (f.trials) {
        cfg.set("run.trials", std::to_string(*f.trials));
    }
    if (f.jobs) {
        cfg.set("run.jobs", std::to_string(*f.jobs));
    }
    if (!f.uxs_dir.empty()) {
        cfg.set("algorithm.uxs_dir", f.uxs_dir);
    }
    return cfg;
}

int cmd_run(const common_flags& f) {
    auto ex = rdv::build_experiment(load_config(f));
    const auto trace_path = !f.out.empty() ? f.out : ex.trace_path;
    if (!trace_path.empty()) {
        ex.run.trace = rdv::trace_level::full;
    }
    const auto r = rdv::run(ex.run);
    if (!trace_path.empty()) {
        write_output(trace_path, rdv::trace_jsonl(r));
    }
    std::cout << "met=" << (r.met ? "true" : "false") << " cost=" << r.cost << " round="
              << (r.met ? r.meeting_round : r.rounds) << " node=";
    if (r.met) {
        std::cout << r.meeting_node;
    } else {
        std::cout << "none";
    }
    std::cout << " traversals=" << r.traversals[0] << ',' << r.traversals[1] << " faults=" << r.faults[0] << ','
              << r.faults[1] << " crossings=" << r.crossings.size() << " truncated=" << (r.truncated ? "true" : "false")
              << '\n';
    return r.met ? exit_ok : exit_truncated;
}

int cmd_montecarlo(const common_flags& f) {
    const auto ex = rdv::build_experiment(load_config(f));
    const auto seed = f.seed.value_or(ex.run.seed);
    const auto s = rdv::monte_carlo(ex.run, {ex.trials, seed, ex.jobs, ex.random_starts});
    std::ostringstream csv;
    csv << rdv::summary_csv_header({}) << '\n' << rdv::summary_csv_row({}, s) << '\n';
    write_output(f.out, csv.str());
    return exit_ok;
}

int cmd_sweep(const common_flags& f) {
    const auto cfg = load_config(f);
    const auto ex = rdv::build_experiment(cfg);
    std::vector<std::string> errors;
    const auto csv = rdv::run_sweep(cfg, ex.trials, f.seed.value_or(ex.run.seed), ex.jobs, &errors);
    write_output(f.out, csv);
    for (const auto& e : errors) {
        std::cerr << "cell failed: " << e << '\n';
    }
    return exit_ok;
}

int cmd_worst_case(const common_flags& f, const std::string& objective, std::size_t memo) {
    auto cfg = load_config(f);
    if (!objective.empty()) {
        cfg.set("run.objective", objective);
    }
    const auto ex = rdv::build_experiment(cfg);
    rdv::wc_options opts;
    opts.objective = ex.objective;
    opts.horizon = f.horizon.value_or(cfg.entries().count("run.horizon") ? ex.run.horizon : 10'000);
    opts.memo_ceiling = memo;
    if (ex.model.what != rdv::fault_model::kind::bounded && ex.model.what != rdv::fault_model::kind::none) {
        rdv::fail(rdv::error_code::config_error, "key 'adversary.kind': worst-case search needs a bounded model");
    }
    const auto r = rdv::worst_case_search(ex.run, ex.model, opts);
    if (!f.out.empty()) {
        std::ostringstream text;
        text << "# worst-case " << rdv::to_string(opts.objective) << " model=" << rdv::to_string(ex.model)
             << " value=" << r.value << '\n'
             << rdv::schedule_to_text(r.faults);
        write_output(f.out, text.str());
    }
    std::cout << "value=";
    if (r.value == rdv::forever) {
        std::cout << "unbounded";
    } else {
        std::cout << r.value;
    }
    std::cout << " met=" << (r.met ? "true" : "false") << " avoidable=" << (r.avoidable ? "true" : "false")
              << " max_cost=" << r.max_cost << " faults=" << r.faults.size() << " states=" << r.states
              << " search=" << (r.exhaustive ? "exhaustive" : "beam") << '\n';
    return exit_ok;
}

int cmd_verify_uxs(std::size_t m, const std::string& mode, const common_flags& f, std::size_t samples) {
    const auto dir = f.uxs_dir.empty() ? rdv::default_uxs_dir() : f.uxs_dir;
    const auto provider = rdv::uxs_provider::load(dir);
    if (m > provider.max_size()) {
        rdv::fail(rdv::error_code::resource_limit, "no cached sequence for m=" + std::to_string(m));
    }
    rdv::verify_options opts;
    opts.samples = samples;
    opts.seed = f.seed.value_or(default_seed);
    const auto vm = mode == "sampled" ? rdv::verify_mode::sampled : rdv::verify_mode::exhaustive;
    const auto report = rdv::verify_uxs(provider.for_size(m), m, vm, opts);
    std::cout << "m=" << m << " mode=" << mode << " length=" << provider.length(m) << " graphs=" << report.graphs
              << " checks=" << report.records.size() << " failures=" << report.failures()
              << " result=" << (report.passed ? "pass" : "fail") << '\n';
    return report.passed ? exit_ok : exit_failure;
}

int cmd_search_uxs(std::size_t m, std::size_t budget, bool save, bool extend, rdv::search_options opts,
                   const common_flags& f) {
    const auto dir = f.uxs_dir.empty() ? rdv::default_uxs_dir() : f.uxs_dir;
    opts.seed = f.seed.value_or(default_seed);
    if (extend && m > 1) {
        const auto prev = rdv::load_uxs(m - 1, dir);
        if (!prev) {
            rdv::fail(rdv::error_code::config_error, "--extend needs " + rdv::uxs_file_name(m - 1) + " in " + dir);
        }
        opts.prefix = prev->terms;
    }
    const auto seq = rdv::find_uxs(m, budget, opts);
    if (save) {
        rdv::save_uxs(seq, dir);
    }
    std::cout << "m=" << m << " length=" << seq.length() << " verification=" << rdv::to_string(seq.verified)
              << " terms=";
    for (std::size_t i = 0; i < seq.terms.size(); ++i) {
        std::cout << (i ? "," : "") << seq.terms[i];
    }
    std::cout << '\n';
    return exit_ok;
}

int cmd_validate_schedule(const std::string& path, const std::string& model) {
    const auto sched = rdv::load_schedule(path);
    rdv::validate_schedule(sched, rdv::parse_fault_model(model));
    std::cout << "valid entries=" << sched.size() << " model=" << model << '\n';
    return exit_ok;
}

int exit_code_for(rdv::error_code code) {
    switch (code) {
        case rdv::error_code::config_error:
        case rdv::error_code::parse_error:
        case rdv::error_code::invalid_parameter:
            return exit_config;
        case rdv::error_code::resource_limit:
            return exit_resource;
        default:
            return exit_failure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-agent rendezvous under delay faults"};
    app.require_subcommand(1);
    common_flags f;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) {
            sub->add_option("--config", f.config, "Experiment config file")->required();
            sub->add_option("--set", f.sets, "Override a config key: section.key=value");
            sub->add_option("--trials", f.trials, "Number of trials");
            sub->add_option("--jobs", f.jobs, "Worker threads");
            sub->add_option("--horizon", f.horizon, "Round horizon");
        }
        sub->add_option("--seed", f.seed, "Random seed (default 1)");
        sub->add_option("--out", f.out, "Output file");
        sub->add_option("--uxs-dir", f.uxs_dir, "Directory of cached sequences");
    };

    auto* run = app.add_subcommand("run", "Single run; prints a summary line");
    add_common(run, true);
    auto* mc = app.add_subcommand("montecarlo", "Seeded independent trials; CSV summary");
    add_common(mc, true);
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo over the [sweep] grid; CSV");
    add_common(sweep, true);

    auto* wc = app.add_subcommand("worst-case", "Exhaustive adversarial schedule search");
    add_common(wc, true);
    std::string objective;
    std::size_t memo = 4'000'000;
    wc->add_option("--objective", objective, "max-cost or prevent-meeting");
    wc->add_option("--memo", memo, "Memo ceiling before falling back to beam search");

    std::size_t m = 1;
    std::string mode = "exhaustive";
    std::size_t samples = 10000;
    auto* verify = app.add_subcommand("verify-uxs", "Check a cached sequence");
    add_common(verify, false);
    verify->add_option("--m", m, "Size bound")->required();
    verify->add_option("--mode", mode, "exhaustive or sampled")->check(CLI::IsMember({"exhaustive", "sampled"}));
    verify->add_option("--samples", samples, "Graphs for sampled mode");

    std::size_t budget = 1u << 16;
    bool save = false;
    bool extend = false;
    auto* search = app.add_subcommand("search-uxs", "Search a sequence for a size bound");
    add_common(search, false);
    search->add_option("--m", m, "Size bound")->required();
    search->add_option("--budget", budget, "Maximum number of appended terms");
    search->add_flag("--save", save, "Write the result to the cache directory");
    search->add_flag("--extend", extend, "Extend the cached sequence for m-1");
    rdv::search_options search_opts;
    search->add_option("--corpus", search_opts.corpus_samples, "Training graphs above the exhaustive cap");
    search->add_option("--holdout", search_opts.holdout_samples, "Fresh graphs per hardening round");

    std::string schedule_path;
    std::string model = "unbounded";
    auto* validate = app.add_subcommand("validate-schedule", "Check a fault schedule against a model");
    validate->add_option("--schedule", schedule_path, "Schedule file")->required();
    validate->add_option("--model", model, "none, bounded:<c> or unbounded");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*run) {
            return cmd_run(f);
        }
        if (*mc) {
            return cmd_montecarlo(f);
        }
        if (*sweep) {
            return cmd_sweep(f);
        }
        if (*wc) {
            return cmd_worst_case(f, objective, memo);
        }
        if (*verify) {
            return cmd_verify_uxs(m, mode, f, samples);
        }
        if (*search) {
            return cmd_search_uxs(m, budget, save, extend, search_opts, f);
        }
        if (*validate) {
            return cmd_validate_schedule(schedule_path, model);
        }
    } catch (const rdv::error& e) {
        std::cerr << "error (" << rdv::to_string(e.code()) << "): " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_failure;
}
