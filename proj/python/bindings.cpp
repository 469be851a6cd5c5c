#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

#include "rdv/algorithms.hpp"
#include "rdv/error.hpp"
#include "rdv/experiment.hpp"
#include "rdv/graph.hpp"
#include "rdv/uxs.hpp"
#include "rdv/worst_case.hpp"

namespace py = pybind11;

namespace {

rdv::config_file config(const std::string& text, const std::map<std::string, std::string>& overrides) {
    auto cfg = rdv::config_file::parse_text(text);
    for (const auto& [k, v] : overrides) {
        cfg.set(k, v);
    }
    return cfg;
}

py::dict run_dict(const rdv::run_result& r) {
    py::dict d;
    d["met"] = r.met;
    d["truncated"] = r.truncated;
    d["meeting_round"] = r.meeting_round;
    d["meeting_node"] = r.met ? py::cast(r.meeting_node) : py::none();
    d["cost"] = r.cost;
    d["traversals"] = py::make_tuple(r.traversals[0], r.traversals[1]);
    d["faults"] = py::make_tuple(r.faults[0], r.faults[1]);
    d["rounds"] = r.rounds;
    d["crossings"] = r.crossings.size();
    return d;
}

py::dict summary_dict(const rdv::mc_summary& s) {
    py::dict d;
    d["trials"] = s.trials;
    d["met"] = s.met;
    d["met_rate"] = s.met_rate;
    d["cost_min"] = s.cost_min;
    d["cost_med"] = s.cost_med;
    d["cost_p95"] = s.cost_p95;
    d["cost_max"] = s.cost_max;
    d["rounds_med"] = s.rounds_med;
    d["costs"] = s.costs;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-agent rendezvous under delay faults";
#ifdef RDV_VERSION
    m.attr("__version__") = RDV_VERSION;
#endif

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> rdv_error;
    rdv_error.call_once_and_store_result(
        [&]() { return py::exception<rdv::error>(m, "RdvError", PyExc_RuntimeError); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const rdv::error& e) {
            const auto msg = std::string(rdv::to_string(e.code())) + ": " + e.what();
            py::set_error(rdv_error.get_stored(), msg.c_str());
        }
    });

    m.def(
        "run",
        [](const std::string& text, const std::map<std::string, std::string>& overrides, bool trace) {
            auto ex = rdv::build_experiment(config(text, overrides));
            if (trace) {
                ex.run.trace = rdv::trace_level::full;
            }
            const auto r = rdv::run(ex.run);
            auto d = run_dict(r);
            if (trace) {
                d["trace"] = rdv::trace_jsonl(r);
            }
            return d;
        },
        py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("trace") = false,
        "Runs one scenario described by config text.");

    m.def(
        "monte_carlo",
        [](const std::string& text, const std::map<std::string, std::string>& overrides, std::uint64_t trials,
           std::uint64_t seed, unsigned jobs) {
            const auto ex = rdv::build_experiment(config(text, overrides));
            rdv::mc_summary s;
            {
                py::gil_scoped_release release;
                s = rdv::monte_carlo(ex.run, {trials, seed, jobs, ex.random_starts});
            }
            return summary_dict(s);
        },
        py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("trials") = 100,
        py::arg("seed") = 1, py::arg("jobs") = 1);

    m.def(
        "sweep",
        [](const std::string& text, std::uint64_t trials, std::uint64_t seed, unsigned jobs) {
            const auto cfg = config(text, {});
            std::vector<std::string> errors;
            auto csv = rdv::run_sweep(cfg, trials, seed, jobs, &errors);
            return py::make_tuple(csv, errors);
        },
        py::arg("config"), py::arg("trials") = 100, py::arg("seed") = 1, py::arg("jobs") = 1,
        "CSV summary per sweep cell and the list of failed cells.");

    m.def(
        "worst_case",
        [](const std::string& text, const std::map<std::string, std::string>& overrides, std::uint64_t horizon) {
            const auto ex = rdv::build_experiment(config(text, overrides));
            rdv::wc_options opts;
            opts.objective = ex.objective;
            opts.horizon = horizon;
            const auto r = rdv::worst_case_search(ex.run, ex.model, opts);
            py::dict d;
            d["value"] = r.value == rdv::forever ? py::none() : py::cast(r.value);
            d["max_cost"] = r.max_cost;
            d["met"] = r.met;
            d["avoidable"] = r.avoidable;
            d["exhaustive"] = r.exhaustive;
            d["states"] = r.states;
            d["schedule"] = rdv::schedule_to_text(r.faults);
            return d;
        },
        py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("horizon") = 10'000);

    m.def("modified_label", &rdv::modified_label, py::arg("label"));
    m.def(
        "dance_script",
        [](std::uint64_t label) {
            std::string s;
            for (auto step : rdv::dance_script(label)) {
                s += step == rdv::dance_step::cross ? 'x' : '.';
            }
            return s;
        },
        py::arg("label"), "Dance rounds as a string: 'x' crosses the edge, '.' idles.");

    m.def("uxs_dir", &rdv::default_uxs_dir);
    m.def(
        "uxs_terms", [](std::size_t size) { return rdv::default_uxs_provider()->for_size(size).terms; },
        py::arg("m"));
    m.def(
        "verify_uxs",
        [](std::size_t size, const std::string& mode, std::size_t samples, std::uint64_t seed) {
            const auto provider = rdv::default_uxs_provider();
            if (size > provider->max_size()) {
                rdv::fail(rdv::error_code::resource_limit, "no cached sequence for m=" + std::to_string(size));
            }
            rdv::verify_options opts;
            opts.samples = samples;
            opts.seed = seed;
            const auto vm = mode == "exhaustive" ? rdv::verify_mode::exhaustive : rdv::verify_mode::sampled;
            const auto r = rdv::verify_uxs(provider->for_size(size), size, vm, opts);
            py::dict d;
            d["passed"] = r.passed;
            d["graphs"] = r.graphs;
            d["failures"] = r.failures();
            return d;
        },
        py::arg("m"), py::arg("mode") = "exhaustive", py::arg("samples") = 10000, py::arg("seed") = 1);

    m.def(
        "trees",
        [](std::size_t n) {
            std::vector<std::string> out;
            for (const auto& t : rdv::enumerate_trees(n)) {
                out.push_back(rdv::to_text(t));
            }
            return out;
        },
        py::arg("n"), "Non-isomorphic trees of size n in graph text form.");
}
