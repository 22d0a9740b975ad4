#pragma once

#include "wdmsim/topology.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wdmsim {

/// One lightpath demand.
struct SessionRequest {
    NodeId src = 0;
    NodeId dst = 0;
    double arrival = 0.0;  // seconds
    double holding = 0.0;  // seconds

    friend bool operator==(const SessionRequest&, const SessionRequest&) = default;
};

enum class TrafficKind { cbr, exponential };

/// Session-level traffic: `offered_load` Erlangs for every source/destination
/// pair, sessions lasting `mean_holding` seconds on average.
struct TrafficModel {
    TrafficKind kind = TrafficKind::exponential;
    double offered_load = 0.4;
    double mean_holding = 1.0;

    double arrival_rate() const { return offered_load / mean_holding; }
};

enum class LoadMode { per_pair, total_network };

struct LoadSpec {
    LoadMode mode = LoadMode::per_pair;
    double value = 0.4;
};

struct NodePair {
    NodeId src;
    NodeId dst;
};

/// Uniform share of a network-wide load carried by each of `route_count`
/// routes. Throws std::invalid_argument when route_count is zero.
double per_route_load(double total, std::uint64_t route_count);

/// Erlangs offered to each ordered pair of an n-node network under `spec`.
double per_pair_load(const LoadSpec& spec, std::size_t node_count);

/// All ordered (src, dst) pairs with src != dst, in (src, dst) order.
std::vector<NodePair> all_ordered_pairs(std::size_t node_count);

struct ArrivalOptions {
    /// Forces the CBR initial phase instead of drawing it; used by tests.
    std::optional<double> cbr_phase;
};

/// Merged, time-ordered session requests on [0, horizon). Each pair draws
/// from its own stream derived from (seed, pair index). Ties in arrival time
/// resolve by (src, dst).
std::vector<SessionRequest> generate_arrivals(const TrafficModel& model, std::span<const NodePair> pairs,
                                              double horizon, std::uint64_t seed,
                                              const ArrivalOptions& options = {});

/// CSV dump with header `arrival,src,dst,holding`.
void write_request_trace(std::ostream& os, std::span<const SessionRequest> requests);

std::string to_string(TrafficKind kind);
TrafficKind parse_traffic_kind(const std::string& text);
std::string to_string(LoadMode mode);
LoadMode parse_load_mode(const std::string& text);

}  // namespace wdmsim
