#include "wdmsim/topology.hpp"

#include "wdmsim/random.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wdmsim {

Topology::Topology(std::size_t node_count, std::uint32_t wavelengths, std::vector<Link> links,
                   std::size_t repaired_edges)
    : node_count_(node_count),
      wavelengths_(wavelengths),
      links_(std::move(links)),
      repaired_edges_(repaired_edges) {
    if (node_count_ < 1) throw std::invalid_argument("topology needs at least one node");
    if (wavelengths_ < 1) throw std::invalid_argument("wavelength count must be >= 1");
    if (repaired_edges_ > links_.size()) throw std::invalid_argument("more repaired edges than links");

    std::set<std::pair<NodeId, NodeId>> seen;
    std::vector<std::size_t> degree(node_count_, 0);
    for (auto& l : links_) {
        if (l.a == l.b) throw std::invalid_argument("self-loop at node " + std::to_string(l.a));
        if (l.a >= node_count_ || l.b >= node_count_)
            throw std::invalid_argument("link endpoint out of range");
        if (l.a > l.b) std::swap(l.a, l.b);
        if (!seen.emplace(l.a, l.b).second)
            throw std::invalid_argument("duplicate link " + std::to_string(l.a) + "-" + std::to_string(l.b));
        ++degree[l.a];
        ++degree[l.b];
    }

    adjacency_offsets_.assign(node_count_ + 1, 0);
    for (std::size_t n = 0; n < node_count_; ++n) adjacency_offsets_[n + 1] = adjacency_offsets_[n] + degree[n];
    adjacency_.resize(adjacency_offsets_.back());
    std::vector<std::size_t> fill(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
    for (LinkId id = 0; id < links_.size(); ++id) {
        const Link& l = links_[id];
        adjacency_[fill[l.a]++] = {l.b, id};
        adjacency_[fill[l.b]++] = {l.a, id};
    }
    for (std::size_t n = 0; n < node_count_; ++n) {
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[n]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[n + 1]),
                  [](const Adjacent& x, const Adjacent& y) { return x.node < y.node; });
    }
}

std::span<const Adjacent> Topology::neighbors(NodeId n) const {
    if (n >= node_count_) throw std::out_of_range("node id out of range");
    return {adjacency_.data() + adjacency_offsets_[n], adjacency_offsets_[n + 1] - adjacency_offsets_[n]};
}

std::optional<LinkId> Topology::link_between(NodeId u, NodeId v) const {
    const auto adj = neighbors(u);
    const auto it = std::lower_bound(adj.begin(), adj.end(), v,
                                     [](const Adjacent& a, NodeId x) { return a.node < x; });
    if (it != adj.end() && it->node == v) return it->link;
    return std::nullopt;
}

bool Topology::is_connected() const {
    std::vector<bool> seen(node_count_, false);
    std::deque<NodeId> queue{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (const auto& adj : neighbors(u)) {
            if (!seen[adj.node]) {
                seen[adj.node] = true;
                ++reached;
                queue.push_back(adj.node);
            }
        }
    }
    return reached == node_count_;
}

Topology Topology::with_wavelengths(std::uint32_t wavelengths) const {
    return Topology(node_count_, wavelengths, links_, repaired_edges_);
}

std::uint64_t Topology::graph_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto feed = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    feed(node_count_);
    for (const auto& l : links_) {
        feed(l.a);
        feed(l.b);
    }
    return h;
}

Route make_route(const Topology& t, std::span<const NodeId> nodes) {
    if (nodes.size() < 2) throw std::invalid_argument("route needs at least two nodes");
    Route r;
    r.nodes.assign(nodes.begin(), nodes.end());
    std::set<NodeId> seen;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!seen.insert(nodes[i]).second) throw std::invalid_argument("route repeats a node");
        if (i + 1 < nodes.size()) {
            const auto link = t.link_between(nodes[i], nodes[i + 1]);
            if (!link) throw std::invalid_argument("route uses a missing link");
            r.hops.push_back(*link);
        }
    }
    return r;
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

}  // namespace

Topology generate_random_topology(std::size_t n, double p, std::uint32_t wavelengths, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random topology needs n >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("connection probability must be in [0,1]");

    Rng rng(derive_seed(seed, Stream::topology, n));
    std::vector<Link> links;
    DisjointSets components(n);
    std::size_t component_count = n;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (uniform01(rng) < p) {
                links.push_back({u, v});
                if (components.unite(u, v)) --component_count;
            }
        }
    }

    std::size_t repaired = 0;
    while (component_count > 1) {
        const auto u = static_cast<NodeId>(uniform_index(rng, n));
        const auto v = static_cast<NodeId>(uniform_index(rng, n));
        if (components.find(u) == components.find(v)) continue;
        links.push_back({std::min(u, v), std::max(u, v)});
        components.unite(u, v);
        --component_count;
        ++repaired;
    }
    return Topology(n, wavelengths, std::move(links), repaired);
}

std::uint64_t route_count(std::uint64_t n, PairMode mode) {
    if (n < 2) return 0;
    const std::uint64_t ordered = n * (n - 1);
    return mode == PairMode::ordered ? ordered : ordered / 2;
}

namespace {

struct SearchMask {
    std::vector<bool> blocked_node;
    std::set<LinkId> blocked_link;
};

// Lexicographically smallest minimum-hop path from src to dst avoiding the
// mask, as a node sequence. Empty when unreachable.
std::vector<NodeId> smallest_shortest_path(const Topology& t, NodeId src, NodeId dst, const SearchMask& mask) {
    constexpr auto unreached = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(t.node_count(), unreached);
    std::deque<NodeId> queue{dst};
    dist[dst] = 0;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        if (u == src) break;
        for (const auto& adj : t.neighbors(u)) {
            if (dist[adj.node] != unreached || mask.blocked_node[adj.node]) continue;
            if (mask.blocked_link.count(adj.link)) continue;
            dist[adj.node] = dist[u] + 1;
            queue.push_back(adj.node);
        }
    }
    if (dist[src] == unreached) return {};

    std::vector<NodeId> path{src};
    NodeId at = src;
    while (at != dst) {
        for (const auto& adj : t.neighbors(at)) {
            if (mask.blocked_node[adj.node] || mask.blocked_link.count(adj.link)) continue;
            if (dist[adj.node] + 1 == dist[at]) {
                at = adj.node;
                break;
            }
        }
        path.push_back(at);
    }
    return path;
}

struct Candidate {
    std::vector<NodeId> nodes;
    bool operator<(const Candidate& o) const {
        if (nodes.size() != o.nodes.size()) return nodes.size() < o.nodes.size();
        return nodes < o.nodes;
    }
};

}  // namespace

std::vector<Route> k_shortest_routes(const Topology& t, NodeId src, NodeId dst, std::size_t k) {
    if (src == dst) throw std::invalid_argument("k_shortest_routes requires src != dst");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (src >= t.node_count() || dst >= t.node_count()) throw std::out_of_range("node id out of range");

    SearchMask mask{std::vector<bool>(t.node_count(), false), {}};
    std::vector<std::vector<NodeId>> accepted;
    auto first = smallest_shortest_path(t, src, dst, mask);
    if (first.empty()) return {};
    accepted.push_back(std::move(first));

    std::set<Candidate> candidates;
    while (accepted.size() < k) {
        const auto& last = accepted.back();
        for (std::size_t spur = 0; spur + 1 < last.size(); ++spur) {
            mask.blocked_node.assign(t.node_count(), false);
            mask.blocked_link.clear();
            for (std::size_t i = 0; i < spur; ++i) mask.blocked_node[last[i]] = true;
            for (const auto& path : accepted) {
                if (path.size() > spur + 1 && std::equal(path.begin(), path.begin() + spur + 1, last.begin()))
                    mask.blocked_link.insert(*t.link_between(path[spur], path[spur + 1]));
            }
            auto tail = smallest_shortest_path(t, last[spur], dst, mask);
            if (tail.empty()) continue;
            Candidate c;
            c.nodes.assign(last.begin(), last.begin() + static_cast<std::ptrdiff_t>(spur));
            c.nodes.insert(c.nodes.end(), tail.begin(), tail.end());
            candidates.insert(std::move(c));
        }
        // Drop candidates that duplicate an accepted path.
        while (!candidates.empty() &&
               std::find(accepted.begin(), accepted.end(), candidates.begin()->nodes) != accepted.end())
            candidates.erase(candidates.begin());
        if (candidates.empty()) break;
        accepted.push_back(candidates.begin()->nodes);
        candidates.erase(candidates.begin());
    }

    std::vector<Route> routes;
    routes.reserve(accepted.size());
    for (const auto& nodes : accepted) routes.push_back(make_route(t, nodes));
    return routes;
}

RouteTable::RouteTable(const Topology& t, std::size_t k) : n_(t.node_count()), k_(k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    routes_.resize(n_ * n_);
    for (NodeId s = 0; s < n_; ++s)
        for (NodeId d = 0; d < n_; ++d)
            if (s != d) routes_[s * n_ + d] = k_shortest_routes(t, s, d, k);
}

const std::vector<Route>& RouteTable::routes(NodeId src, NodeId dst) const {
    if (src >= n_ || dst >= n_) throw std::out_of_range("node id out of range");
    return routes_[src * n_ + dst];
}

void write_topology(std::ostream& os, const Topology& t) {
    os << t.node_count() << ' ' << t.wavelengths() << '\n';
    for (const auto& l : t.links()) os << l.a << ' ' << l.b << '\n';
    os << "# repaired " << t.repaired_edges() << '\n';
}

Topology read_topology(std::istream& is) {
    std::string line;
    std::size_t n = 0;
    std::uint32_t w = 0;
    if (!std::getline(is, line) || !(std::istringstream(line) >> n >> w))
        throw std::invalid_argument("topology file: bad header line");
    std::vector<Link> links;
    std::optional<std::size_t> repaired;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream in(line.substr(1));
            std::string word;
            std::size_t count = 0;
            if (in >> word && word == "repaired" && in >> count) repaired = count;
            continue;
        }
        std::istringstream in(line);
        NodeId u = 0, v = 0;
        if (!(in >> u >> v)) throw std::invalid_argument("topology file: bad link on line " + std::to_string(line_no));
        links.push_back({u, v});
    }
    return Topology(n, w, std::move(links), repaired.value_or(0));
}

}  // namespace wdmsim
