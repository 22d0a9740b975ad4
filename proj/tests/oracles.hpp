#pragma once

// Brute-force reference computations. Deliberately naive and independent of
// the library algorithms they check.

#include "wdmsim/topology.hpp"
#include "wdmsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

using wdmsim::NodeId;

/// Every simple path src -> dst, sorted by hop count then node sequence.
inline std::vector<std::vector<NodeId>> all_simple_paths(const wdmsim::Topology& t, NodeId src, NodeId dst) {
    std::vector<std::vector<NodeId>> out;
    std::vector<NodeId> path{src};
    std::vector<bool> on_path(t.node_count(), false);
    on_path[src] = true;
    std::function<void(NodeId)> dfs = [&](NodeId u) {
        if (u == dst) {
            out.push_back(path);
            return;
        }
        for (NodeId v = 0; v < t.node_count(); ++v) {
            if (on_path[v] || !t.link_between(u, v)) continue;
            on_path[v] = true;
            path.push_back(v);
            dfs(v);
            path.pop_back();
            on_path[v] = false;
        }
    };
    dfs(src);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

/// Occupancy as a plain matrix: busy[hop][w] for the hops of one route.
struct Instance {
    std::vector<std::vector<bool>> busy;   // per hop
    std::vector<NodeId> junctions;         // node between hop i and i+1
    std::set<NodeId> converters;
    bool full = true;
    std::uint32_t range = 0;
    std::uint32_t width = 0;
};

inline bool may_change(const Instance& in, NodeId node, std::uint32_t a, std::uint32_t b) {
    if (a == b) return true;
    if (!in.converters.count(node)) return false;
    if (in.full) return true;
    return (a > b ? a - b : b - a) <= in.range;
}

struct Best {
    std::uint32_t conversions;
    std::vector<std::uint32_t> wavelengths;
};

/// Enumerates all width^hops wavelength vectors; keeps the feasible one with
/// fewest changes, then lexicographically smallest.
inline std::optional<Best> enumerate_assignments(const Instance& in) {
    const std::size_t hops = in.busy.size();
    std::vector<std::uint32_t> v(hops, 0);
    std::optional<Best> best;
    while (true) {
        bool ok = true;
        std::uint32_t changes = 0;
        for (std::size_t i = 0; i < hops && ok; ++i) {
            if (in.busy[i][v[i]]) ok = false;
            if (ok && i + 1 < hops) {
                if (!may_change(in, in.junctions[i], v[i], v[i + 1])) ok = false;
                if (v[i] != v[i + 1]) ++changes;
            }
        }
        if (ok && (!best || changes < best->conversions ||
                   (changes == best->conversions && v < best->wavelengths)))
            best = Best{changes, v};
        std::size_t pos = hops;
        while (pos > 0) {
            --pos;
            if (++v[pos] < in.width) break;
            v[pos] = 0;
            if (pos == 0) return best;
        }
        if (hops == 0) return best;
    }
}

/// Erlang-B via the closed form a^c/c! / sum_k a^k/k!, in long double.
inline double erlang_b_direct(double load, unsigned servers) {
    long double term = 1.0L, sum = 1.0L;
    for (unsigned k = 1; k <= servers; ++k) {
        term *= static_cast<long double>(load) / k;
        sum += term;
    }
    return static_cast<double>(term / sum);
}

/// Straightforward fixed-alternate + first-fit loss network on a plain
/// busy-until table. Departures at or before an arrival instant are freed
/// first. Returns acceptance per request.
inline std::vector<bool> reference_fixed_alternate_first_fit(const wdmsim::Topology& t,
                                                             const std::vector<wdmsim::SessionRequest>& requests,
                                                             std::size_t k) {
    const std::uint32_t width = t.wavelengths();
    // busy_until[link][w]; free when <= now.
    std::vector<std::vector<double>> busy_until(t.link_count(), std::vector<double>(width, -1.0));
    std::vector<bool> accepted;
    for (const auto& r : requests) {
        const auto paths = all_simple_paths(t, r.src, r.dst);
        bool ok = false;
        for (std::size_t p = 0; p < std::min(k, paths.size()) && !ok; ++p) {
            std::vector<std::size_t> links;
            for (std::size_t i = 0; i + 1 < paths[p].size(); ++i) links.push_back(*t.link_between(paths[p][i], paths[p][i + 1]));
            for (std::uint32_t w = 0; w < width && !ok; ++w) {
                bool free = true;
                for (auto l : links) free = free && busy_until[l][w] <= r.arrival;
                if (free) {
                    for (auto l : links) busy_until[l][w] = r.arrival + r.holding;
                    ok = true;
                }
            }
        }
        accepted.push_back(ok);
    }
    return accepted;
}

}  // namespace oracle
