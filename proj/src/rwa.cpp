#include "wdmsim/rwa.hpp"

#include "wdmsim/errors.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace wdmsim {

NetworkState::NetworkState(const Topology& t)
    : link_count_(t.link_count()),
      wavelengths_(t.wavelengths()),
      owners_(t.link_count() * t.wavelengths(), no_lightpath),
      usage_(t.wavelengths(), 0) {}

LightpathId NetworkState::occupy(LightpathAssignment& lp) {
    if (lp.wavelengths.size() != lp.route.hops.size())
        throw InvariantViolation("lightpath has " + std::to_string(lp.wavelengths.size()) + " wavelengths for " +
                                 std::to_string(lp.route.hops.size()) + " hops");
    for (std::size_t i = 0; i < lp.route.hops.size(); ++i) {
        const auto link = lp.route.hops[i];
        const auto w = lp.wavelengths[i];
        if (link >= link_count_ || w >= wavelengths_) throw InvariantViolation("slot out of range");
        if (!is_free(link, w))
            throw InvariantViolation("double occupancy on link " + std::to_string(link) + " wavelength " +
                                     std::to_string(w));
    }
    lp.id = next_id_++;
    for (std::size_t i = 0; i < lp.route.hops.size(); ++i) {
        owners_[slot(lp.route.hops[i], lp.wavelengths[i])] = lp.id;
        ++usage_[lp.wavelengths[i]];
    }
    busy_ += lp.route.hops.size();
    ++active_;
    return lp.id;
}

void NetworkState::release(const LightpathAssignment& lp) {
    if (lp.id == no_lightpath) throw InvariantViolation("release of a lightpath that was never established");
    if (lp.wavelengths.size() != lp.route.hops.size()) throw InvariantViolation("malformed lightpath on release");
    for (std::size_t i = 0; i < lp.route.hops.size(); ++i) {
        const auto link = lp.route.hops[i];
        const auto w = lp.wavelengths[i];
        if (link >= link_count_ || w >= wavelengths_ || owner(link, w) != lp.id)
            throw InvariantViolation("lightpath " + std::to_string(lp.id) + " does not own link " +
                                     std::to_string(link) + " wavelength " + std::to_string(w));
    }
    for (std::size_t i = 0; i < lp.route.hops.size(); ++i) {
        owners_[slot(lp.route.hops[i], lp.wavelengths[i])] = no_lightpath;
        --usage_[lp.wavelengths[i]];
    }
    busy_ -= lp.route.hops.size();
    --active_;
}

std::vector<std::uint32_t> common_free_wavelengths(const NetworkState& state, const Route& route) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t w = 0; w < state.wavelengths(); ++w) {
        const bool free = std::all_of(route.hops.begin(), route.hops.end(),
                                      [&](LinkId l) { return state.is_free(l, w); });
        if (free) out.push_back(w);
    }
    return out;
}

namespace {

std::uint32_t pick_wavelength(const NetworkState& state, std::span<const std::uint32_t> candidates,
                              AssignmentPolicy policy, Rng* decisions) {
    switch (policy) {
    case AssignmentPolicy::first_fit:
        return candidates.front();
    case AssignmentPolicy::most_used:
        // max_element keeps the first maximum, i.e. the lowest index.
        return *std::max_element(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
            return state.usage(a) < state.usage(b);
        });
    case AssignmentPolicy::least_used:
        return *std::min_element(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
            return state.usage(a) < state.usage(b);
        });
    case AssignmentPolicy::random:
        if (decisions == nullptr) throw std::invalid_argument("random assignment needs a decision stream");
        return candidates[uniform_index(*decisions, candidates.size())];
    }
    return candidates.front();
}

LightpathAssignment uniform_assignment(const Route& route, std::uint32_t w) {
    LightpathAssignment lp;
    lp.route = route;
    lp.wavelengths.assign(route.hops.size(), w);
    return lp;
}

}  // namespace

std::optional<std::uint32_t> continuity_assign(const NetworkState& state, const Route& route,
                                               AssignmentPolicy policy, Rng* decisions) {
    const auto free = common_free_wavelengths(state, route);
    if (free.empty()) return std::nullopt;
    return pick_wavelength(state, free, policy, decisions);
}

std::optional<LightpathAssignment> segmented_assign(const NetworkState& state, const Route& route,
                                                    const ConverterPlacement& placement) {
    constexpr std::uint32_t inf = std::numeric_limits<std::uint32_t>::max() / 2;
    const std::size_t hops = route.hops.size();
    const std::uint32_t width = state.wavelengths();
    if (hops == 0) return std::nullopt;

    // cost[i*width + w]: fewest conversions for hops i.. when hop i uses w.
    std::vector<std::uint32_t> cost(hops * width, inf);
    const auto at = [&](std::size_t i, std::uint32_t w) -> std::uint32_t& { return cost[i * width + w]; };

    for (std::uint32_t w = 0; w < width; ++w)
        if (state.is_free(route.hops[hops - 1], w)) at(hops - 1, w) = 0;

    const bool full = placement.degree().kind == ConversionDegree::Kind::full;
    for (std::size_t i = hops - 1; i-- > 0;) {
        const NodeId junction = route.nodes[i + 1];
        const bool converts = placement.contains(junction);

        // Smallest and second-smallest downstream cost, for full conversion.
        std::uint32_t best = inf, second = inf, best_w = width;
        if (converts && full) {
            for (std::uint32_t w = 0; w < width; ++w) {
                const auto c = at(i + 1, w);
                if (c < best) {
                    second = best;
                    best = c;
                    best_w = w;
                } else if (c < second) {
                    second = c;
                }
            }
        }

        for (std::uint32_t w = 0; w < width; ++w) {
            if (!state.is_free(route.hops[i], w)) continue;
            std::uint32_t c = at(i + 1, w);
            if (converts) {
                if (full) {
                    const auto other = (w == best_w) ? second : best;
                    if (other < inf) c = std::min(c, other + 1);
                } else {
                    const auto d = placement.degree().range;
                    const std::uint32_t lo = w > d ? w - d : 0;
                    const std::uint32_t hi = std::min(width - 1, w + d);
                    for (std::uint32_t v = lo; v <= hi; ++v)
                        if (v != w && at(i + 1, v) < inf) c = std::min(c, at(i + 1, v) + 1);
                }
            }
            at(i, w) = c;
        }
    }

    std::uint32_t first_w = width;
    std::uint32_t total = inf;
    for (std::uint32_t w = 0; w < width; ++w) {
        if (at(0, w) < total) {
            total = at(0, w);
            first_w = w;
        }
    }
    if (total >= inf) return std::nullopt;

    LightpathAssignment lp;
    lp.route = route;
    lp.wavelengths.reserve(hops);
    lp.wavelengths.push_back(first_w);
    for (std::size_t i = 0; i + 1 < hops; ++i) {
        const std::uint32_t cur = lp.wavelengths.back();
        const std::uint32_t remaining = at(i, cur);
        const NodeId junction = route.nodes[i + 1];
        std::uint32_t next = width;
        for (std::uint32_t v = 0; v < width && next == width; ++v) {
            if (v == cur) {
                if (at(i + 1, v) == remaining) next = v;
            } else if (at(i + 1, v) < inf && at(i + 1, v) + 1 == remaining &&
                       can_convert(placement, junction, cur, v)) {
                next = v;
            }
        }
        if (next == width) throw InvariantViolation("segmented_assign: inconsistent cost table");
        if (next != cur) lp.conversions.push_back({junction, cur, next});
        lp.wavelengths.push_back(next);
    }
    return lp;
}

namespace {

std::optional<LightpathAssignment> assign_on_route(const NetworkState& state, const Route& route,
                                                   const ConverterPlacement& placement, AssignmentPolicy policy,
                                                   Rng& decisions) {
    if (auto w = continuity_assign(state, route, policy, &decisions)) return uniform_assignment(route, *w);
    if (placement.empty()) return std::nullopt;
    return segmented_assign(state, route, placement);
}

// Minimum-hop path using only links where `w` is free; lexicographically
// smallest among those. Empty when dst is unreachable.
std::vector<NodeId> path_on_wavelength(const Topology& t, const NetworkState& state, NodeId src, NodeId dst,
                                       std::uint32_t w) {
    constexpr auto unreached = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(t.node_count(), unreached);
    std::deque<NodeId> queue{dst};
    dist[dst] = 0;
    while (!queue.empty() && dist[src] == unreached) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (const auto& adj : t.neighbors(u)) {
            if (dist[adj.node] != unreached || !state.is_free(adj.link, w)) continue;
            dist[adj.node] = dist[u] + 1;
            queue.push_back(adj.node);
        }
    }
    if (dist[src] == unreached) return {};
    std::vector<NodeId> path{src};
    for (NodeId at = src; at != dst;) {
        for (const auto& adj : t.neighbors(at)) {
            if (dist[adj.node] != unreached && dist[adj.node] + 1 == dist[at] && state.is_free(adj.link, w)) {
                at = adj.node;
                break;
            }
        }
        path.push_back(at);
    }
    return path;
}

std::optional<LightpathAssignment> exhaust_continuous(const Topology& t, const NetworkState& state,
                                                      const SessionRequest& req, AssignmentPolicy policy,
                                                      Rng& decisions) {
    std::vector<std::vector<NodeId>> paths(state.wavelengths());
    std::size_t shortest = std::numeric_limits<std::size_t>::max();
    for (std::uint32_t w = 0; w < state.wavelengths(); ++w) {
        paths[w] = path_on_wavelength(t, state, req.src, req.dst, w);
        if (!paths[w].empty()) shortest = std::min(shortest, paths[w].size());
    }
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t w = 0; w < state.wavelengths(); ++w)
        if (!paths[w].empty() && paths[w].size() == shortest) candidates.push_back(w);
    if (candidates.empty()) return std::nullopt;
    const auto w = pick_wavelength(state, candidates, policy, &decisions);
    return uniform_assignment(make_route(t, paths[w]), w);
}

// Minimum (hops, conversions) walk through the node x wavelength graph.
// Returns the node sequence, which may repeat a node.
std::vector<NodeId> layered_search(const Topology& t, const NetworkState& state, const ConverterPlacement& placement,
                                   NodeId src, NodeId dst) {
    const std::uint32_t width = state.wavelengths();
    const std::size_t states = t.node_count() * width;
    using Cost = std::pair<std::uint32_t, std::uint32_t>;
    constexpr Cost unreached{std::numeric_limits<std::uint32_t>::max(), 0};
    std::vector<Cost> best(states, unreached);
    std::vector<std::size_t> parent(states, states);
    using Item = std::tuple<Cost, NodeId, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;

    for (const auto& adj : t.neighbors(src)) {
        for (std::uint32_t w = 0; w < width; ++w) {
            if (!state.is_free(adj.link, w)) continue;
            const std::size_t s = adj.node * width + w;
            const Cost c{1, 0};
            if (c < best[s]) {
                best[s] = c;
                parent[s] = states;
                queue.emplace(c, adj.node, w);
            }
        }
    }
    std::size_t goal = states;
    while (!queue.empty()) {
        const auto [c, u, w] = queue.top();
        queue.pop();
        const std::size_t s = u * width + w;
        if (c != best[s]) continue;
        if (u == dst) {
            goal = s;
            break;
        }
        for (const auto& adj : t.neighbors(u)) {
            if (adj.node == src) continue;
            for (std::uint32_t v = 0; v < width; ++v) {
                if (!state.is_free(adj.link, v) || !can_convert(placement, u, w, v)) continue;
                const Cost next{c.first + 1, c.second + (v != w ? 1u : 0u)};
                const std::size_t ns = adj.node * width + v;
                if (next < best[ns]) {
                    best[ns] = next;
                    parent[ns] = s;
                    queue.emplace(next, adj.node, v);
                }
            }
        }
    }
    if (goal == states) return {};
    std::vector<NodeId> reversed;
    for (std::size_t s = goal; s != states; s = parent[s]) reversed.push_back(static_cast<NodeId>(s / width));
    reversed.push_back(src);
    return {reversed.rbegin(), reversed.rend()};
}

bool is_simple(std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    return std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end();
}

}  // namespace

std::optional<LightpathAssignment> attempt_establish(NetworkState& state, const Topology& topology,
                                                     const SessionRequest& req, std::span<const Route> routes,
                                                     const ConverterPlacement& placement, const RwaPolicy& policy,
                                                     Rng& decisions) {
    std::optional<LightpathAssignment> found;
    switch (policy.routing) {
    case RoutingPolicy::fixed:
        if (routes.empty()) throw std::invalid_argument("no candidate routes for request");
        found = assign_on_route(state, routes.front(), placement, policy.assignment, decisions);
        break;
    case RoutingPolicy::fixed_alternate: {
        if (routes.empty()) throw std::invalid_argument("no candidate routes for request");
        const auto limit = std::min(routes.size(), policy.k);
        for (std::size_t i = 0; i < limit && !found; ++i)
            found = assign_on_route(state, routes[i], placement, policy.assignment, decisions);
        break;
    }
    case RoutingPolicy::exhaust:
        if (placement.empty()) {
            found = exhaust_continuous(topology, state, req, policy.assignment, decisions);
        } else {
            const auto nodes = layered_search(topology, state, placement, req.src, req.dst);
            if (!nodes.empty() && is_simple(nodes)) {
                found = assign_on_route(state, make_route(topology, nodes), placement, policy.assignment, decisions);
            } else if (!nodes.empty()) {
                // The cheapest walk loops back through a node; fall back to
                // the precomputed simple routes.
                for (const auto& r : routes) {
                    found = assign_on_route(state, r, placement, policy.assignment, decisions);
                    if (found) break;
                }
            }
        }
        break;
    }
    if (found) state.occupy(*found);
    return found;
}

void release(NetworkState& state, const LightpathAssignment& lp) { state.release(lp); }

std::optional<std::string> check_assignment(const LightpathAssignment& lp, const ConverterPlacement& placement,
                                            std::uint32_t wavelengths) {
    const auto& r = lp.route;
    if (r.hops.empty() || r.nodes.size() != r.hops.size() + 1) return "malformed route";
    if (lp.wavelengths.size() != r.hops.size()) return "wavelength count differs from hop count";
    for (auto w : lp.wavelengths)
        if (w >= wavelengths) return "wavelength index out of range";
    std::size_t next_conversion = 0;
    for (std::size_t i = 0; i + 1 < lp.wavelengths.size(); ++i) {
        const auto a = lp.wavelengths[i];
        const auto b = lp.wavelengths[i + 1];
        if (a == b) continue;
        const NodeId junction = r.nodes[i + 1];
        if (!can_convert(placement, junction, a, b))
            return "illegal conversion at node " + std::to_string(junction);
        if (next_conversion >= lp.conversions.size() || !(lp.conversions[next_conversion] == Conversion{junction, a, b}))
            return "conversion list does not match wavelength changes";
        ++next_conversion;
    }
    if (next_conversion != lp.conversions.size()) return "conversion list has extra entries";
    return std::nullopt;
}

std::string to_string(RoutingPolicy p) {
    switch (p) {
    case RoutingPolicy::fixed: return "fixed";
    case RoutingPolicy::fixed_alternate: return "alternate";
    case RoutingPolicy::exhaust: return "exhaust";
    }
    return "?";
}

RoutingPolicy parse_routing_policy(const std::string& text) {
    if (text == "fixed") return RoutingPolicy::fixed;
    if (text == "alternate") return RoutingPolicy::fixed_alternate;
    if (text == "exhaust") return RoutingPolicy::exhaust;
    throw std::invalid_argument("unknown routing policy '" + text + "'");
}

std::string to_string(AssignmentPolicy p) {
    switch (p) {
    case AssignmentPolicy::first_fit: return "first_fit";
    case AssignmentPolicy::most_used: return "most_used";
    case AssignmentPolicy::least_used: return "least_used";
    case AssignmentPolicy::random: return "random";
    }
    return "?";
}

AssignmentPolicy parse_assignment_policy(const std::string& text) {
    if (text == "first_fit") return AssignmentPolicy::first_fit;
    if (text == "most_used") return AssignmentPolicy::most_used;
    if (text == "least_used") return AssignmentPolicy::least_used;
    if (text == "random") return AssignmentPolicy::random;
    throw std::invalid_argument("unknown assignment policy '" + text + "'");
}

}  // namespace wdmsim
