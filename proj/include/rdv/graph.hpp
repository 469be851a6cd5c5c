#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rdv {

using node_id = std::uint32_t;
using port_t = std::uint32_t;

/// Far end of a port: the neighbour reached and the port by which it is entered.
struct endpoint {
    node_id node;
    port_t port;

    friend bool operator==(const endpoint&, const endpoint&) = default;
};

/// Anonymous undirected graph with local port numbers.
///
/// Node ids are simulation handles; agent programs never see them. Instances are
/// immutable once built and the constructor enforces the port-graph invariants:
/// ports at a degree-d node are 0..d-1, every port is matched by its reverse, no
/// self-loops or parallel edges, and the graph is connected.
class port_graph {
public:
    using adjacency = std::vector<std::vector<endpoint>>;

    explicit port_graph(adjacency adj);

    std::size_t node_count() const noexcept { return adj_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    port_t degree(node_id u) const { return static_cast<port_t>(adj_.at(u).size()); }
    std::size_t max_degree() const noexcept;

    endpoint traverse(node_id u, port_t p) const;

    /// Unchecked variant for simulation hot loops; caller guarantees p < degree(u).
    const endpoint& step(node_id u, port_t p) const noexcept { return adj_[u][p]; }

    /// Dense id of the undirected edge behind (u, p), in [0, edge_count()).
    std::uint32_t edge_id(node_id u, port_t p) const noexcept { return edge_ids_[u][p]; }

    bool is_tree() const noexcept { return edge_count_ + 1 == adj_.size(); }
    const adjacency& adjacency_list() const noexcept { return adj_; }

    friend bool operator==(const port_graph& a, const port_graph& b) { return a.adj_ == b.adj_; }

private:
    adjacency adj_;
    std::vector<std::vector<std::uint32_t>> edge_ids_;
    std::size_t edge_count_ = 0;
};

/// Builds a port graph from an undirected edge list, assigning ports at each node in
/// increasing neighbour-id order (the canonical labeling).
port_graph from_edges(std::size_t n, const std::vector<std::pair<node_id, node_id>>& edges);

port_graph build_oriented_ring(std::size_t n);
port_graph build_homogeneous_ring(std::size_t n);
port_graph build_ring(std::size_t n);
port_graph build_path(std::size_t n);
port_graph build_star(std::size_t leaves);
port_graph single_node();

/// Ports applied in order from `start` following the tree rule: leave the start by
/// port 0, and after entering a node of degree d by port i leave by (i+1) mod d.
std::vector<port_t> basic_walk(const port_graph& g, node_id start);

/// Follows `ports` from `start`; returns the visited node sequence (length ports+1).
std::vector<node_id> follow_ports(const port_graph& g, node_id start, const std::vector<port_t>& ports);

// Enumeration of small graphs.

struct enumeration_limits {
    std::size_t tree_cap = 8;
    std::size_t tree_all_labelings_cap = 5;
    std::size_t graph_cap = 5;
};

enum class labeling_mode { canonical, all };

/// All non-isomorphic trees on exactly n nodes, canonical labeling, or every port
/// labeling of each of them in `all` mode.
std::vector<port_graph> enumerate_trees(std::size_t n, labeling_mode mode = labeling_mode::canonical,
                                        const enumeration_limits& limits = {});

/// Unlabeled shapes (edge lists) of the connected simple graphs on exactly n nodes.
std::vector<std::vector<std::pair<node_id, node_id>>> connected_graph_shapes(std::size_t n,
                                                                             const enumeration_limits& limits = {});

/// Visits every connected simple graph on exactly n nodes; in `all` mode every port
/// labeling of each isomorphism class is visited.
void for_each_connected_graph(std::size_t n, labeling_mode mode, const std::function<void(const port_graph&)>& visit,
                              const enumeration_limits& limits = {});

std::vector<port_graph> enumerate_connected_graphs(std::size_t n, labeling_mode mode = labeling_mode::canonical,
                                                   const enumeration_limits& limits = {});

/// Every port labeling of a shape: the product over nodes of all port permutations.
void for_each_labeling(std::size_t n, const std::vector<std::pair<node_id, node_id>>& edges,
                       const std::function<void(const port_graph&)>& visit);

// Text format: one line per node, `node <id> : <neighbor@entryport> ...` by local port.

std::string to_text(const port_graph& g);
port_graph parse_graph(std::istream& in);
port_graph parse_graph(const std::string& text);
port_graph load_graph(const std::string& path);

}  // namespace rdv
