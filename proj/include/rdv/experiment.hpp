#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rdv/adversary.hpp"
#include "rdv/engine.hpp"
#include "rdv/worst_case.hpp"

namespace rdv {

/// Flat `key = value` text with `[section]` headers and '#' comments.
class config_file {
public:
    struct entry {
        std::string value;
        std::size_t line = 0;  // 0 for overrides
    };

    static config_file parse(std::istream& in);
    static config_file parse_text(const std::string& text);
    static config_file load(const std::string& path);

    /// Sets `section.key` (used for command-line overrides and sweep cells).
    void set(const std::string& dotted_key, const std::string& value);

    const std::map<std::string, entry>& entries() const noexcept { return entries_; }
    /// Sweep axes in file order: dotted key and its values.
    const std::vector<std::pair<std::string, std::vector<std::string>>>& sweep_axes() const noexcept { return sweep_; }

private:
    std::map<std::string, entry> entries_;
    std::vector<std::pair<std::string, std::vector<std::string>>> sweep_;
};

struct experiment {
    run_config run;
    fault_model model;
    std::uint64_t trials = 100;
    unsigned jobs = 1;
    bool random_starts = false;
    std::string trace_path;
    wc_objective objective = wc_objective::max_cost;
};

/// Resolves every key; unknown keys and bad values raise config-error with the line.
experiment build_experiment(const config_file& cfg);

/// Cartesian product of the sweep axes; each cell lists (dotted key, value).
std::vector<std::vector<std::pair<std::string, std::string>>> sweep_cells(const config_file& cfg);

/// Every cell as a Monte Carlo summary in CSV (header plus one row per cell). Cells
/// that fail are reported in `errors` and written with zero trials.
std::string run_sweep(const config_file& cfg, std::uint64_t trials, std::uint64_t seed, unsigned jobs,
                      std::vector<std::string>* errors = nullptr);

}  // namespace rdv
