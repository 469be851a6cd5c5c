#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "rdv/error.hpp"
#include "rdv/graph.hpp"

namespace rdv {
namespace {

using edge_list = std::vector<std::pair<node_id, node_id>>;
using neighbours = std::vector<std::vector<node_id>>;

neighbours to_neighbours(std::size_t n, const edge_list& edges) {
    neighbours nb(n);
    for (const auto& [u, v] : edges) {
        nb[u].push_back(v);
        nb[v].push_back(u);
    }
    return nb;
}

// AHU encoding of the subtree hanging below `root`.
std::string encode(const neighbours& nb, node_id root, node_id parent) {
    std::vector<std::string> children;
    for (node_id c : nb[root]) {
        if (c != parent) {
            children.push_back(encode(nb, c, root));
        }
    }
    std::sort(children.begin(), children.end());
    std::string out = "(";
    for (const auto& s : children) {
        out += s;
    }
    out += ')';
    return out;
}

std::vector<node_id> centers(const neighbours& nb) {
    const std::size_t n = nb.size();
    if (n <= 2) {
        std::vector<node_id> all(n);
        std::iota(all.begin(), all.end(), node_id{0});
        return all;
    }
    std::vector<std::size_t> degree(n);
    std::vector<node_id> layer;
    for (node_id u = 0; u < n; ++u) {
        degree[u] = nb[u].size();
        if (degree[u] <= 1) {
            layer.push_back(u);
        }
    }
    std::size_t remaining = n;
    while (remaining > 2) {
        remaining -= layer.size();
        std::vector<node_id> next;
        for (node_id leaf : layer) {
            for (node_id v : nb[leaf]) {
                if (--degree[v] == 1) {
                    next.push_back(v);
                }
            }
        }
        layer = std::move(next);
    }
    return layer;
}

std::string canonical_tree_code(std::size_t n, const edge_list& edges) {
    const auto nb = to_neighbours(n, edges);
    std::string best;
    for (node_id c : centers(nb)) {
        auto code = encode(nb, c, c);
        if (best.empty() || code < best) {
            best = std::move(code);
        }
    }
    return best;
}

// Rebuilds a tree from its AHU code; node ids follow preorder.
edge_list decode_tree(const std::string& code) {
    edge_list edges;
    std::vector<node_id> stack;
    node_id next = 0;
    for (char ch : code) {
        if (ch == '(') {
            const node_id id = next++;
            if (!stack.empty()) {
                edges.emplace_back(stack.back(), id);
            }
            stack.push_back(id);
        } else {
            stack.pop_back();
        }
    }
    return edges;
}

std::vector<std::string> tree_codes(std::size_t n) {
    std::set<std::string> codes{"()"};
    for (std::size_t size = 2; size <= n; ++size) {
        std::set<std::string> grown;
        for (const auto& code : codes) {
            edge_list edges = decode_tree(code);
            for (node_id u = 0; u + 1 < size; ++u) {
                edges.emplace_back(u, static_cast<node_id>(size - 1));
                grown.insert(canonical_tree_code(size, edges));
                edges.pop_back();
            }
        }
        codes = std::move(grown);
    }
    return {codes.begin(), codes.end()};
}

bool connected(std::size_t n, const edge_list& edges) {
    std::vector<node_id> parent(n);
    std::iota(parent.begin(), parent.end(), node_id{0});
    auto find = [&](node_id x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    std::size_t components = n;
    for (const auto& [u, v] : edges) {
        const auto a = find(u);
        const auto b = find(v);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

}  // namespace

void for_each_labeling(std::size_t n, const edge_list& edges, const std::function<void(const port_graph&)>& visit) {
    auto order = to_neighbours(n, edges);
    for (auto& list : order) {
        std::sort(list.begin(), list.end());
    }
    while (true) {
        port_graph::adjacency adj(n);
        for (node_id u = 0; u < n; ++u) {
            for (node_id v : order[u]) {
                const auto it = std::find(order[v].begin(), order[v].end(), u);
                adj[u].push_back({v, static_cast<port_t>(it - order[v].begin())});
            }
        }
        visit(port_graph(std::move(adj)));

        // Odometer over the per-node permutations.
        std::size_t u = 0;
        while (u < n && !std::next_permutation(order[u].begin(), order[u].end())) {
            ++u;
        }
        if (u == n) {
            return;
        }
    }
}

std::vector<port_graph> enumerate_trees(std::size_t n, labeling_mode mode, const enumeration_limits& limits) {
    if (n == 0) {
        fail(error_code::invalid_parameter, "tree size must be positive");
    }
    if (n > limits.tree_cap) {
        fail(error_code::resource_limit, "tree enumeration capped at n=" + std::to_string(limits.tree_cap));
    }
    if (mode == labeling_mode::all && n > limits.tree_all_labelings_cap) {
        fail(error_code::resource_limit,
             "all-labelings tree enumeration capped at n=" + std::to_string(limits.tree_all_labelings_cap));
    }
    std::vector<port_graph> out;
    for (const auto& code : tree_codes(n)) {
        const auto edges = decode_tree(code);
        if (mode == labeling_mode::canonical) {
            out.push_back(from_edges(n, edges));
        } else {
            for_each_labeling(n, edges, [&](const port_graph& g) { out.push_back(g); });
        }
    }
    return out;
}

std::vector<edge_list> connected_graph_shapes(std::size_t n, const enumeration_limits& limits) {
    if (n == 0) {
        fail(error_code::invalid_parameter, "graph size must be positive");
    }
    if (n > limits.graph_cap) {
        fail(error_code::resource_limit, "graph enumeration capped at n=" + std::to_string(limits.graph_cap));
    }
    edge_list pairs;
    for (node_id u = 0; u < n; ++u) {
        for (node_id v = u + 1; v < n; ++v) {
            pairs.emplace_back(u, v);
        }
    }
    auto pair_index = [&](node_id u, node_id v) {
        if (u > v) {
            std::swap(u, v);
        }
        return static_cast<std::size_t>(std::find(pairs.begin(), pairs.end(), std::make_pair(u, v)) - pairs.begin());
    };
    std::vector<node_id> perm(n);
    std::iota(perm.begin(), perm.end(), node_id{0});
    std::vector<std::vector<std::size_t>> relabel;  // relabel[k][pair] = permuted pair index
    do {
        std::vector<std::size_t> map(pairs.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            map[i] = pair_index(perm[pairs[i].first], perm[pairs[i].second]);
        }
        relabel.push_back(std::move(map));
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::set<std::uint32_t> seen;
    std::vector<edge_list> shapes;
    const std::uint32_t total = 1u << pairs.size();
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        edge_list edges;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (mask & (1u << i)) {
                edges.push_back(pairs[i]);
            }
        }
        if (!connected(n, edges)) {
            continue;
        }
        std::uint32_t canon = mask;
        for (const auto& map : relabel) {
            std::uint32_t image = 0;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                if (mask & (1u << i)) {
                    image |= 1u << map[i];
                }
            }
            canon = std::min(canon, image);
        }
        if (seen.insert(canon).second) {
            edge_list canon_edges;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                if (canon & (1u << i)) {
                    canon_edges.push_back(pairs[i]);
                }
            }
            shapes.push_back(std::move(canon_edges));
        }
    }
    return shapes;
}

void for_each_connected_graph(std::size_t n, labeling_mode mode, const std::function<void(const port_graph&)>& visit,
                              const enumeration_limits& limits) {
    for (const auto& edges : connected_graph_shapes(n, limits)) {
        if (mode == labeling_mode::canonical) {
            visit(from_edges(n, edges));
        } else {
            for_each_labeling(n, edges, visit);
        }
    }
}

std::vector<port_graph> enumerate_connected_graphs(std::size_t n, labeling_mode mode,
                                                   const enumeration_limits& limits) {
    std::vector<port_graph> out;
    for_each_connected_graph(n, mode, [&](const port_graph& g) { out.push_back(g); }, limits);
    return out;
}

}  // namespace rdv
