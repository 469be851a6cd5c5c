#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rdv/graph.hpp"

namespace rdv {

enum class verification { unverified, sampled, exhaustive };

const char* to_string(verification v) noexcept;

/// Universal exploration sequence for graphs of size at most `size_bound`.
///
/// The exit port after entering a degree-d node by port p is (p + term) mod d; the
/// start node counts as entered by port 0. length() is the P(m) of this provider.
struct uxs {
    std::vector<std::uint32_t> terms;
    std::size_t size_bound = 1;
    verification verified = verification::unverified;
    std::size_t trials = 0;  // graphs checked by sampled verification

    std::size_t length() const noexcept { return terms.size(); }
};

port_t apply_uxs_step(std::optional<port_t> entry, port_t degree, std::uint64_t term);

/// Forward application of the sequence from v, then the reverse walk back to v.
std::vector<port_t> reingold_trajectory(const port_graph& g, node_id v, const std::vector<std::uint32_t>& terms);
inline std::vector<port_t> reingold_trajectory(const port_graph& g, node_id v, const uxs& seq) {
    return reingold_trajectory(g, v, seq.terms);
}

/// Number of distinct edges touched by following `terms` from v (entry port 0).
std::size_t edges_covered(const port_graph& g, node_id v, const std::vector<std::uint32_t>& terms);

enum class verify_mode { exhaustive, sampled };

struct verify_options {
    std::size_t exhaustive_cap = 4;
    std::size_t samples = 10000;
    std::uint64_t seed = 0x5eed;
};

struct coverage_record {
    std::size_t graph_index;
    std::size_t graph_size;
    node_id start;
    bool covered;
};

struct verification_report {
    bool passed = true;
    verify_mode mode = verify_mode::exhaustive;
    std::size_t size_bound = 0;
    std::size_t graphs = 0;
    std::vector<coverage_record> records;

    std::size_t failures() const noexcept;
};

/// Checks edge coverage from every start node of every connected port-labeled graph
/// of size <= m (exhaustive), or of `samples` random ones (sampled).
verification_report verify_uxs(const std::vector<std::uint32_t>& terms, std::size_t m, verify_mode mode,
                               const verify_options& options = {});
inline verification_report verify_uxs(const uxs& seq, std::size_t m, verify_mode mode,
                                      const verify_options& options = {}) {
    return verify_uxs(seq.terms, m, mode, options);
}

/// Uniformly sized random connected graph on n nodes with a random port labeling.
port_graph random_connected_graph(std::size_t n, std::mt19937_64& rng);

struct search_options {
    std::size_t exhaustive_cap = 4;
    std::size_t corpus_samples = 20000;   // training graphs when m is above the cap
    std::size_t holdout_samples = 10000;  // fresh graphs checked after each sampled round
    std::size_t restarts = 4;
    std::uint64_t seed = 1;
    std::vector<std::uint32_t> prefix;  // the search only appends to this
};

/// Greedy randomized search for a sequence covering every graph of size <= m.
/// `budget` caps the total number of terms appended across restarts.
uxs find_uxs(std::size_t m, std::size_t budget, const search_options& options = {});

std::string uxs_file_name(std::size_t m);
void save_uxs(const uxs& seq, const std::string& dir);
std::optional<uxs> load_uxs(std::size_t m, const std::string& dir);

/// Nested family of sequences: the sequence for m is a prefix of the one for m+1, so
/// any prefix of the longest sequence of length P(k) covers every graph of size <= k.
class uxs_provider {
public:
    explicit uxs_provider(std::vector<uxs> by_size);

    static uxs_provider load(const std::string& dir);

    std::size_t max_size() const noexcept { return by_size_.size(); }

    /// Sequence for bound m, clamped to the largest available bound.
    const uxs& for_size(std::size_t m) const;
    std::size_t length(std::size_t m) const { return for_size(m).length(); }

    /// First u terms of the longest sequence, cycled when u exceeds its length.
    std::vector<std::uint32_t> prefix(std::size_t u, bool* cycled = nullptr) const;

private:
    std::vector<uxs> by_size_;  // index m-1
};

/// Directory holding the shipped cache files (RDV_UXS_DIR overrides the built-in path).
std::string default_uxs_dir();

/// Provider backed by the shipped cache; searches bounds up to 4 if the cache is absent.
std::shared_ptr<const uxs_provider> default_uxs_provider();

}  // namespace rdv
