#include "rdv/uxs.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "rdv/error.hpp"
#include "rdv/random.hpp"

#ifndef RDV_DEFAULT_UXS_DIR
#define RDV_DEFAULT_UXS_DIR "data/uxs"
#endif

namespace rdv {

const char* to_string(verification v) noexcept {
    switch (v) {
        case verification::unverified: return "unverified";
        case verification::sampled: return "sampled";
        case verification::exhaustive: return "exhaustive";
    }
    return "unverified";
}

port_t apply_uxs_step(std::optional<port_t> entry, port_t degree, std::uint64_t term) {
    if (degree == 0) {
        fail(error_code::invalid_parameter, "uxs step at a node of degree 0");
    }
    const std::uint64_t p = entry.value_or(0);
    return static_cast<port_t>((p + term) % degree);
}

std::vector<port_t> reingold_trajectory(const port_graph& g, node_id v, const std::vector<std::uint32_t>& terms) {
    if (v >= g.node_count()) {
        fail(error_code::invalid_parameter, "trajectory start out of range");
    }
    std::vector<port_t> ports;
    if (g.degree(v) == 0) {
        return ports;
    }
    ports.reserve(2 * terms.size());
    std::vector<port_t> entries;
    entries.reserve(terms.size());
    node_id at = v;
    port_t entry = 0;
    for (std::uint32_t x : terms) {
        const port_t out = apply_uxs_step(entry, g.degree(at), x);
        ports.push_back(out);
        const endpoint e = g.step(at, out);
        at = e.node;
        entry = e.port;
        entries.push_back(entry);
    }
    ports.insert(ports.end(), entries.rbegin(), entries.rend());
    return ports;
}

std::size_t edges_covered(const port_graph& g, node_id v, const std::vector<std::uint32_t>& terms) {
    std::vector<bool> seen(g.edge_count(), false);
    std::size_t count = 0;
    if (g.degree(v) == 0) {
        return 0;
    }
    node_id at = v;
    port_t entry = 0;
    for (std::uint32_t x : terms) {
        const port_t out = static_cast<port_t>((entry + x) % g.degree(at));
        const auto id = g.edge_id(at, out);
        if (!seen[id]) {
            seen[id] = true;
            ++count;
        }
        const endpoint e = g.step(at, out);
        at = e.node;
        entry = e.port;
    }
    return count;
}

std::size_t verification_report::failures() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const coverage_record& r) { return !r.covered; }));
}

port_graph random_connected_graph(std::size_t n, std::mt19937_64& rng) {
    if (n == 0) {
        fail(error_code::invalid_parameter, "graph size must be positive");
    }
    std::vector<node_id> perm(n);
    std::iota(perm.begin(), perm.end(), node_id{0});
    for (std::size_t i = n; i > 1; --i) {
        std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
    }
    std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
    std::vector<std::vector<node_id>> nbrs(n);
    auto add = [&](node_id a, node_id b) {
        has[a][b] = has[b][a] = true;
        nbrs[a].push_back(b);
        nbrs[b].push_back(a);
    };
    for (std::size_t i = 1; i < n; ++i) {
        add(perm[i], perm[uniform_below(rng, i)]);
    }
    const double density = unit_interval(rng);
    for (node_id a = 0; a < n; ++a) {
        for (node_id b = a + 1; b < n; ++b) {
            if (!has[a][b] && unit_interval(rng) < density) {
                add(a, b);
            }
        }
    }
    for (auto& list : nbrs) {
        for (std::size_t i = list.size(); i > 1; --i) {
            std::swap(list[i - 1], list[uniform_below(rng, i)]);
        }
    }
    port_graph::adjacency adj(n);
    for (node_id u = 0; u < n; ++u) {
        for (node_id v : nbrs[u]) {
            const auto it = std::find(nbrs[v].begin(), nbrs[v].end(), u);
            adj[u].push_back({v, static_cast<port_t>(it - nbrs[v].begin())});
        }
    }
    return port_graph(std::move(adj));
}

namespace {

struct walk_state {
    std::size_t graph;
    node_id start;
    node_id at;
    port_t entry;
    std::uint64_t covered;
    std::uint64_t full;

    bool done() const noexcept { return covered == full; }
};

walk_state initial_state(const std::vector<port_graph>& graphs, std::size_t gi, node_id start) {
    const auto edges = graphs[gi].edge_count();
    const std::uint64_t full = edges >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << edges) - 1);
    return {gi, start, start, 0, 0, full};
}

inline void advance(const port_graph& g, walk_state& s, std::uint32_t x) {
    const port_t out = static_cast<port_t>((s.entry + x) % g.degree(s.at));
    s.covered |= std::uint64_t{1} << g.edge_id(s.at, out);
    const endpoint& e = g.step(s.at, out);
    s.at = e.node;
    s.entry = e.port;
}

bool run_to_end(const std::vector<port_graph>& graphs, walk_state& s, const std::vector<std::uint32_t>& terms) {
    const auto& g = graphs[s.graph];
    if (g.edge_count() == 0) {
        return true;
    }
    for (std::uint32_t x : terms) {
        if (s.done()) {
            break;
        }
        advance(g, s, x);
    }
    return s.done();
}

std::vector<port_graph> sample_graphs(std::size_t m, std::size_t count, std::mt19937_64& rng) {
    std::vector<port_graph> out;
    out.reserve(count);
    const std::size_t low = m >= 2 ? 2 : 1;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n = low + uniform_below(rng, m - low + 1);
        out.push_back(random_connected_graph(n, rng));
    }
    return out;
}

std::size_t candidate_span(std::size_t m) {
    std::size_t span = 1;
    for (std::size_t d = 2; d + 1 <= m; ++d) {
        span = std::lcm(span, d);
    }
    return span;
}

// Greedily extends `seq` until every state in `states` covers its graph.
bool greedy_extend(const std::vector<port_graph>& graphs, std::vector<walk_state> states,
                   std::vector<std::uint32_t>& seq, std::size_t span, std::size_t& budget, std::mt19937_64& rng,
                   bool randomize) {
    std::erase_if(states, [](const walk_state& s) { return s.done(); });
    std::vector<std::uint64_t> gain(span + 1);
    while (!states.empty()) {
        if (budget == 0) {
            return false;
        }
        std::fill(gain.begin(), gain.end(), 0);
        for (const walk_state& s : states) {
            const auto& g = graphs[s.graph];
            const port_t d = g.degree(s.at);
            for (std::size_t x = 1; x <= span; ++x) {
                const port_t out = static_cast<port_t>((s.entry + x) % d);
                if (!(s.covered >> g.edge_id(s.at, out) & 1u)) {
                    ++gain[x];
                }
            }
        }
        const auto best = *std::max_element(gain.begin() + 1, gain.end());
        std::vector<std::uint32_t> ties;
        for (std::size_t x = 1; x <= span; ++x) {
            if (gain[x] == best) {
                ties.push_back(static_cast<std::uint32_t>(x));
            }
        }
        std::uint32_t pick = ties.front();
        if (best == 0 || randomize) {
            pick = ties[uniform_below(rng, ties.size())];
        }
        seq.push_back(pick);
        --budget;
        for (walk_state& s : states) {
            advance(graphs[s.graph], s, pick);
        }
        std::erase_if(states, [](const walk_state& s) { return s.done(); });
    }
    return true;
}

std::vector<walk_state> states_for(const std::vector<port_graph>& graphs, const std::vector<std::uint32_t>& prefix) {
    std::vector<walk_state> states;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        if (graphs[gi].edge_count() == 0) {
            continue;
        }
        for (node_id v = 0; v < graphs[gi].node_count(); ++v) {
            walk_state s = initial_state(graphs, gi, v);
            if (!run_to_end(graphs, s, prefix)) {
                states.push_back(s);
            }
        }
    }
    return states;
}

}  // namespace

verification_report verify_uxs(const std::vector<std::uint32_t>& terms, std::size_t m, verify_mode mode,
                               const verify_options& options) {
    if (m == 0) {
        fail(error_code::invalid_parameter, "size bound must be positive");
    }
    verification_report report;
    report.mode = mode;
    report.size_bound = m;
    std::vector<port_graph> graphs;
    if (mode == verify_mode::exhaustive) {
        if (m > options.exhaustive_cap) {
            fail(error_code::resource_limit,
                 "exhaustive verification capped at m=" + std::to_string(options.exhaustive_cap));
        }
        enumeration_limits limits;
        limits.graph_cap = std::max(limits.graph_cap, options.exhaustive_cap);
        for (std::size_t n = 1; n <= m; ++n) {
            for_each_connected_graph(n, labeling_mode::all, [&](const port_graph& g) { graphs.push_back(g); },
                                     limits);
        }
    } else {
        std::mt19937_64 rng(options.seed);
        graphs = sample_graphs(m, options.samples, rng);
    }
    report.graphs = graphs.size();
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        for (node_id v = 0; v < graphs[gi].node_count(); ++v) {
            walk_state s = initial_state(graphs, gi, v);
            const bool ok = run_to_end(graphs, s, terms);
            report.records.push_back({gi, graphs[gi].node_count(), v, ok});
            report.passed = report.passed && ok;
        }
    }
    return report;
}

uxs find_uxs(std::size_t m, std::size_t budget, const search_options& options) {
    if (m == 0) {
        fail(error_code::invalid_parameter, "size bound must be positive");
    }
    if (budget == 0) {
        fail(error_code::invalid_parameter, "search budget must be positive");
    }
    const bool exhaustive = m <= options.exhaustive_cap;
    std::mt19937_64 rng(options.seed);
    std::vector<port_graph> corpus;
    if (exhaustive) {
        enumeration_limits limits;
        limits.graph_cap = std::max(limits.graph_cap, options.exhaustive_cap);
        for (std::size_t n = 1; n <= m; ++n) {
            for_each_connected_graph(n, labeling_mode::all, [&](const port_graph& g) { corpus.push_back(g); },
                                     limits);
        }
    } else {
        corpus = sample_graphs(m, options.corpus_samples, rng);
    }
    const std::size_t span = candidate_span(m);

    std::optional<std::vector<std::uint32_t>> best;
    std::size_t remaining = budget;
    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, options.restarts); ++attempt) {
        std::vector<std::uint32_t> seq = options.prefix;
        std::vector<port_graph> graphs = corpus;
        bool ok = greedy_extend(graphs, states_for(graphs, seq), seq, span, remaining, rng, attempt > 0);
        // Above the exhaustive cap, harden against fresh samples until one passes.
        std::size_t clean = 0;
        for (std::size_t round = 0; ok && !exhaustive && round < 256 && clean < 4; ++round) {
            std::mt19937_64 holdout_rng(options.seed ^ (0x9e3779b97f4a7c15ull * (attempt * 64 + round + 1)));
            auto fresh = sample_graphs(m, options.holdout_samples, holdout_rng);
            std::vector<port_graph> missed;
            for (auto& g : fresh) {
                std::vector<port_graph> one{g};
                if (!states_for(one, seq).empty()) {
                    missed.push_back(std::move(g));
                }
            }
            if (missed.empty()) {
                ++clean;
                continue;
            }
            clean = 0;
            graphs.insert(graphs.end(), missed.begin(), missed.end());
            ok = greedy_extend(graphs, states_for(graphs, seq), seq, span, remaining, rng, attempt > 0);
        }
        if (ok && (!best || seq.size() < best->size())) {
            best = seq;
        }
        if (remaining == 0) {
            break;
        }
    }
    if (!best) {
        fail(error_code::search_failure, "uxs search for m=" + std::to_string(m) + " exhausted its budget");
    }
    uxs out;
    out.terms = std::move(*best);
    out.size_bound = m;
    if (exhaustive) {
        if (!verify_uxs(out.terms, m, verify_mode::exhaustive, {options.exhaustive_cap}).passed) {
            fail(error_code::search_failure, "uxs search produced a sequence failing exhaustive verification");
        }
        out.verified = verification::exhaustive;
    } else {
        verify_options vo;
        vo.exhaustive_cap = options.exhaustive_cap;
        vo.samples = options.holdout_samples;
        vo.seed = options.seed ^ 0xa5a5a5a5ull;
        out.verified = verify_uxs(out.terms, m, verify_mode::sampled, vo).passed ? verification::sampled
                                                                                  : verification::unverified;
        out.trials = vo.samples;
    }
    return out;
}

std::string uxs_file_name(std::size_t m) { return "uxs_m" + std::to_string(m) + ".txt"; }

void save_uxs(const uxs& seq, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / uxs_file_name(seq.size_bound);
    std::ofstream out(path);
    if (!out) {
        fail(error_code::config_error, "cannot write " + path.string());
    }
    out << "# m=" << seq.size_bound << " verification=" << to_string(seq.verified) << " trials=" << seq.trials
        << '\n';
    for (std::uint32_t x : seq.terms) {
        out << x << '\n';
    }
}

std::optional<uxs> load_uxs(std::size_t m, const std::string& dir) {
    const auto path = std::filesystem::path(dir) / uxs_file_name(m);
    std::ifstream in(path);
    if (!in) {
        return std::nullopt;
    }
    uxs seq;
    seq.size_bound = m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (line.find("verification=exhaustive") != std::string::npos) {
                seq.verified = verification::exhaustive;
            } else if (line.find("verification=sampled") != std::string::npos) {
                seq.verified = verification::sampled;
            }
            const auto t = line.find("trials=");
            if (t != std::string::npos) {
                seq.trials = std::stoul(line.substr(t + 7));
            }
            continue;
        }
        try {
            seq.terms.push_back(static_cast<std::uint32_t>(std::stoul(line)));
        } catch (const std::logic_error&) {
            fail(error_code::parse_error, "bad term '" + line + "' in " + path.string());
        }
    }
    return seq;
}

uxs_provider::uxs_provider(std::vector<uxs> by_size) : by_size_(std::move(by_size)) {
    if (by_size_.empty()) {
        fail(error_code::invalid_parameter, "uxs provider needs at least one sequence");
    }
    for (std::size_t i = 0; i < by_size_.size(); ++i) {
        if (by_size_[i].size_bound != i + 1) {
            fail(error_code::invalid_parameter, "uxs provider sequences must cover bounds 1..k in order");
        }
        if (i > 0) {
            const auto& shorter = by_size_[i - 1].terms;
            const auto& longer = by_size_[i].terms;
            if (longer.size() < shorter.size() || !std::equal(shorter.begin(), shorter.end(), longer.begin())) {
                fail(error_code::invalid_parameter, "uxs provider sequences must be nested prefixes");
            }
        }
    }
}

uxs_provider uxs_provider::load(const std::string& dir) {
    std::vector<uxs> seqs;
    for (std::size_t m = 1;; ++m) {
        auto seq = load_uxs(m, dir);
        if (!seq) {
            break;
        }
        seqs.push_back(std::move(*seq));
    }
    if (seqs.empty()) {
        fail(error_code::config_error, "no uxs cache files in " + dir);
    }
    return uxs_provider(std::move(seqs));
}

const uxs& uxs_provider::for_size(std::size_t m) const {
    if (m == 0) {
        fail(error_code::invalid_parameter, "size bound must be positive");
    }
    return by_size_[std::min(m, by_size_.size()) - 1];
}

std::vector<std::uint32_t> uxs_provider::prefix(std::size_t u, bool* cycled) const {
    const auto& longest = by_size_.back().terms;
    std::vector<std::uint32_t> out;
    out.reserve(u);
    if (cycled) {
        *cycled = u > longest.size();
    }
    if (longest.empty()) {
        out.assign(u, 1);
        return out;
    }
    for (std::size_t i = 0; i < u; ++i) {
        out.push_back(longest[i % longest.size()]);
    }
    return out;
}

std::string default_uxs_dir() {
    if (const char* env = std::getenv("RDV_UXS_DIR"); env && *env) {
        return env;
    }
    return RDV_DEFAULT_UXS_DIR;
}

std::shared_ptr<const uxs_provider> default_uxs_provider() {
    static std::mutex mu;
    static std::shared_ptr<const uxs_provider> cached;
    std::lock_guard lock(mu);
    if (!cached) {
        try {
            cached = std::make_shared<const uxs_provider>(uxs_provider::load(default_uxs_dir()));
        } catch (const error&) {
            std::vector<uxs> seqs;
            std::vector<std::uint32_t> prefix;
            for (std::size_t m = 1; m <= 4; ++m) {
                search_options opts;
                opts.prefix = prefix;
                seqs.push_back(find_uxs(m, 1u << 16, opts));
                prefix = seqs.back().terms;
            }
            cached = std::make_shared<const uxs_provider>(std::move(seqs));
        }
    }
    return cached;
}

}  // namespace rdv
