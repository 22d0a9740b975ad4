#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace wdmsim {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

/// Undirected fiber between two nodes. Endpoints are stored with a < b.
struct Link {
    NodeId a = 0;
    NodeId b = 0;

    NodeId other(NodeId n) const { return n == a ? b : a; }
    friend bool operator==(const Link&, const Link&) = default;
};

struct Adjacent {
    NodeId node;
    LinkId link;
};

/// Physical network: N nodes, undirected links, W wavelengths on every link.
/// Immutable once built. Link ids are dense and follow insertion order.
class Topology {
public:
    /// Throws std::invalid_argument on self-loops, duplicate links,
    /// out-of-range endpoints, fewer than one node, or W < 1.
    Topology(std::size_t node_count, std::uint32_t wavelengths, std::vector<Link> links,
             std::size_t repaired_edges = 0);

    std::size_t node_count() const { return node_count_; }
    std::uint32_t wavelengths() const { return wavelengths_; }
    std::size_t link_count() const { return links_.size(); }
    const std::vector<Link>& links() const { return links_; }
    const Link& link(LinkId id) const { return links_.at(id); }

    /// Neighbors of `n` in ascending node order.
    std::span<const Adjacent> neighbors(NodeId n) const;
    std::size_t degree(NodeId n) const { return neighbors(n).size(); }
    std::optional<LinkId> link_between(NodeId u, NodeId v) const;

    /// Number of trailing links that were added to repair connectivity.
    std::size_t repaired_edges() const { return repaired_edges_; }
    bool is_connected() const;

    /// Same graph with a different per-link wavelength count.
    Topology with_wavelengths(std::uint32_t wavelengths) const;

    /// FNV-1a over node count and edge list; ignores W.
    std::uint64_t graph_hash() const;

private:
    std::size_t node_count_;
    std::uint32_t wavelengths_;
    std::vector<Link> links_;
    std::size_t repaired_edges_;
    std::vector<std::size_t> adjacency_offsets_;
    std::vector<Adjacent> adjacency_;
};

/// A simple path. nodes.size() == hops.size() + 1.
struct Route {
    std::vector<LinkId> hops;
    std::vector<NodeId> nodes;

    std::size_t hop_count() const { return hops.size(); }
    NodeId src() const { return nodes.front(); }
    NodeId dst() const { return nodes.back(); }
    friend bool operator==(const Route&, const Route&) = default;
};

/// Builds a route from a node sequence. Throws std::invalid_argument when
/// consecutive nodes are not adjacent, a node repeats, or fewer than two
/// nodes are given.
Route make_route(const Topology& t, std::span<const NodeId> nodes);

/// Erdos-Renyi G(n, p) with connectivity repair: while the graph is
/// disconnected, a uniformly random node pair spanning two components is
/// linked. Repair links are appended after the sampled ones.
Topology generate_random_topology(std::size_t n, double p, std::uint32_t wavelengths,
                                  std::uint64_t seed);

enum class PairMode { ordered, unordered };

/// n(n-1) ordered pairs or n(n-1)/2 unordered pairs.
std::uint64_t route_count(std::uint64_t n, PairMode mode);

/// Up to k loop-free routes ordered by hop count, then by node sequence.
std::vector<Route> k_shortest_routes(const Topology& t, NodeId src, NodeId dst, std::size_t k);

/// Candidate routes for every ordered node pair, computed once.
class RouteTable {
public:
    RouteTable(const Topology& t, std::size_t k);

    std::size_t k() const { return k_; }
    std::size_t node_count() const { return n_; }
    const std::vector<Route>& routes(NodeId src, NodeId dst) const;

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<std::vector<Route>> routes_;
};

/// Text format: `N W`, one `u v` line per link, then `# repaired K`.
void write_topology(std::ostream& os, const Topology& t);
Topology read_topology(std::istream& is);

}  // namespace wdmsim
