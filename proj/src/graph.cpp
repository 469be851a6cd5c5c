#include "rdv/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <queue>
#include <sstream>

#include "rdv/error.hpp"

namespace rdv {

port_graph::port_graph(adjacency adj) : adj_(std::move(adj)) {
    const std::size_t n = adj_.size();
    if (n == 0) {
        fail(error_code::invalid_parameter, "port graph needs at least one node");
    }
    edge_ids_.resize(n);
    std::size_t half_edges = 0;
    for (node_id u = 0; u < n; ++u) {
        const auto& ports = adj_[u];
        edge_ids_[u].assign(ports.size(), 0);
        half_edges += ports.size();
        std::vector<node_id> seen;
        for (port_t p = 0; p < ports.size(); ++p) {
            const endpoint e = ports[p];
            if (e.node >= n) {
                fail(error_code::invalid_parameter,
                     "node " + std::to_string(u) + " port " + std::to_string(p) + " leads outside the graph");
            }
            if (e.node == u) {
                fail(error_code::invalid_parameter, "self-loop at node " + std::to_string(u));
            }
            if (e.port >= adj_[e.node].size() || adj_[e.node][e.port] != endpoint{u, p}) {
                fail(error_code::invalid_parameter, "asymmetric edge at node " + std::to_string(u) + " port " +
                                                        std::to_string(p));
            }
            seen.push_back(e.node);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            fail(error_code::invalid_parameter, "parallel edges at node " + std::to_string(u));
        }
    }
    edge_count_ = half_edges / 2;

    std::uint32_t next_edge = 0;
    for (node_id u = 0; u < n; ++u) {
        for (port_t p = 0; p < adj_[u].size(); ++p) {
            const endpoint e = adj_[u][p];
            if (u < e.node) {
                edge_ids_[u][p] = next_edge;
                edge_ids_[e.node][e.port] = next_edge;
                ++next_edge;
            }
        }
    }

    std::vector<bool> reached(n, false);
    std::queue<node_id> frontier;
    frontier.push(0);
    reached[0] = true;
    std::size_t count = 1;
    while (!frontier.empty()) {
        const node_id u = frontier.front();
        frontier.pop();
        for (const endpoint& e : adj_[u]) {
            if (!reached[e.node]) {
                reached[e.node] = true;
                ++count;
                frontier.push(e.node);
            }
        }
    }
    if (count != n) {
        fail(error_code::invalid_parameter, "port graph is not connected");
    }
}

std::size_t port_graph::max_degree() const noexcept {
    std::size_t d = 0;
    for (const auto& ports : adj_) {
        d = std::max(d, ports.size());
    }
    return d;
}

endpoint port_graph::traverse(node_id u, port_t p) const {
    if (u >= adj_.size()) {
        fail(error_code::invalid_parameter, "node " + std::to_string(u) + " out of range");
    }
    if (p >= adj_[u].size()) {
        fail(error_code::invalid_parameter,
             "port " + std::to_string(p) + " out of range at node " + std::to_string(u));
    }
    return adj_[u][p];
}

port_graph from_edges(std::size_t n, const std::vector<std::pair<node_id, node_id>>& edges) {
    std::vector<std::vector<node_id>> nbrs(n);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) {
            fail(error_code::invalid_parameter, "edge endpoint out of range");
        }
        nbrs[u].push_back(v);
        nbrs[v].push_back(u);
    }
    for (auto& list : nbrs) {
        std::sort(list.begin(), list.end());
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

port_graph build_oriented_ring(std::size_t n) {
    if (n < 3) {
        fail(error_code::invalid_parameter, "oriented ring needs n >= 3");
    }
    port_graph::adjacency adj(n);
    for (node_id i = 0; i < n; ++i) {
        const auto next = static_cast<node_id>((i + 1) % n);
        const auto prev = static_cast<node_id>((i + n - 1) % n);
        adj[i] = {{next, 1}, {prev, 0}};
    }
    return port_graph(std::move(adj));
}

port_graph build_homogeneous_ring(std::size_t n) {
    if (n < 4 || n % 2 != 0) {
        fail(error_code::invalid_parameter, "homogeneous ring needs an even n >= 4");
    }
    // Edge {i, i+1} carries port i mod 2 at both ends.
    port_graph::adjacency adj(n, std::vector<endpoint>(2));
    for (node_id i = 0; i < n; ++i) {
        const auto next = static_cast<node_id>((i + 1) % n);
        const port_t p = i % 2;
        adj[i][p] = {next, p};
        adj[next][p] = {i, p};
    }
    return port_graph(std::move(adj));
}

port_graph build_ring(std::size_t n) {
    if (n < 3) {
        fail(error_code::invalid_parameter, "ring needs n >= 3");
    }
    std::vector<std::pair<node_id, node_id>> edges;
    for (node_id i = 0; i < n; ++i) {
        edges.emplace_back(i, static_cast<node_id>((i + 1) % n));
    }
    return from_edges(n, edges);
}

port_graph build_path(std::size_t n) {
    if (n < 1) {
        fail(error_code::invalid_parameter, "path needs n >= 1");
    }
    std::vector<std::pair<node_id, node_id>> edges;
    for (node_id i = 0; i + 1 < n; ++i) {
        edges.emplace_back(i, i + 1);
    }
    return from_edges(n, edges);
}

port_graph build_star(std::size_t leaves) {
    if (leaves < 1) {
        fail(error_code::invalid_parameter, "star needs at least one leaf");
    }
    std::vector<std::pair<node_id, node_id>> edges;
    for (node_id i = 1; i <= leaves; ++i) {
        edges.emplace_back(0, i);
    }
    return from_edges(leaves + 1, edges);
}

port_graph single_node() { return port_graph(port_graph::adjacency(1)); }

std::vector<port_t> basic_walk(const port_graph& g, node_id start) {
    if (!g.is_tree()) {
        fail(error_code::invalid_parameter, "basic walk requires a tree");
    }
    if (start >= g.node_count()) {
        fail(error_code::invalid_parameter, "start node out of range");
    }
    std::vector<port_t> ports;
    if (g.node_count() == 1) {
        return ports;
    }
    const std::size_t length = 2 * (g.node_count() - 1);
    ports.reserve(length);
    node_id at = start;
    port_t out = 0;
    for (std::size_t i = 0; i < length; ++i) {
        ports.push_back(out);
        const endpoint e = g.step(at, out);
        at = e.node;
        out = (e.port + 1) % g.degree(at);
    }
    return ports;
}

std::vector<node_id> follow_ports(const port_graph& g, node_id start, const std::vector<port_t>& ports) {
    std::vector<node_id> nodes{start};
    node_id at = start;
    for (port_t p : ports) {
        at = g.traverse(at, p).node;
        nodes.push_back(at);
    }
    return nodes;
}

std::string to_text(const port_graph& g) {
    std::ostringstream out;
    const auto& adj = g.adjacency_list();
    for (node_id u = 0; u < adj.size(); ++u) {
        out << "node " << u << " :";
        for (const endpoint& e : adj[u]) {
            out << ' ' << e.node << '@' << e.port;
        }
        out << '\n';
    }
    return out.str();
}

port_graph parse_graph(std::istream& in) {
    port_graph::adjacency adj;
    std::string line;
    std::size_t line_no = 0;
    auto bad = [&](const std::string& why) {
        fail(error_code::parse_error, "graph line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream tokens(line);
        std::string word;
        if (!(tokens >> word)) {
            continue;
        }
        if (word != "node") {
            bad("expected 'node'");
        }
        std::size_t id = 0;
        std::string colon;
        if (!(tokens >> id >> colon) || colon != ":") {
            bad("expected '<id> :'");
        }
        if (id != adj.size()) {
            bad("node ids must be consecutive from 0");
        }
        std::vector<endpoint> ports;
        std::string item;
        while (tokens >> item) {
            const auto at = item.find('@');
            if (at == std::string::npos || at == 0 || at + 1 == item.size()) {
                bad("expected <neighbor@entryport>, got '" + item + "'");
            }
            try {
                std::size_t used = 0;
                const auto v = std::stoul(item.substr(0, at), &used);
                if (used != at) {
                    bad("bad neighbor in '" + item + "'");
                }
                const auto q = std::stoul(item.substr(at + 1), &used);
                if (used != item.size() - at - 1) {
                    bad("bad port in '" + item + "'");
                }
                ports.push_back({static_cast<node_id>(v), static_cast<port_t>(q)});
            } catch (const std::logic_error&) {
                bad("bad number in '" + item + "'");
            }
        }
        adj.push_back(std::move(ports));
    }
    if (adj.empty()) {
        fail(error_code::parse_error, "graph text contains no nodes");
    }
    return port_graph(std::move(adj));
}

port_graph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

port_graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(error_code::config_error, "cannot open graph file " + path);
    }
    return parse_graph(in);
}

}  // namespace rdv
