#include "wdmsim/engine.hpp"

#include "wdmsim/errors.hpp"
#include "wdmsim/format.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace wdmsim {

double blocking_probability(const MetricsReport& m) {
    if (m.offered == 0) return 0.0;
    return static_cast<double>(m.blocked) / static_cast<double>(m.offered);
}

double link_utilization(const MetricsReport& m, const Topology& t) {
    const double window = m.horizon - m.warmup;
    const double slots = static_cast<double>(t.link_count()) * t.wavelengths();
    if (!(window > 0.0) || slots == 0.0) return 0.0;
    return m.busy_integral / (window * slots);
}

double link_utilization(const MetricsReport& m) {
    const double window = m.horizon - m.warmup;
    if (!(window > 0.0) || m.capacity == 0) return 0.0;
    return m.busy_integral / (window * static_cast<double>(m.capacity));
}

double erlang_b(double load, std::uint32_t servers) {
    if (load < 0.0) throw std::invalid_argument("erlang_b: load must be >= 0");
    double b = 1.0;
    for (std::uint32_t j = 1; j <= servers; ++j) b = load * b / (static_cast<double>(j) + load * b);
    return b;
}

namespace {

enum class EventKind { arrival, departure };

struct Event {
    double time;
    std::uint64_t sequence;
    EventKind kind;
    std::size_t index;  // request index or lightpath slot

    bool operator>(const Event& o) const {
        if (time != o.time) return time > o.time;
        return sequence > o.sequence;
    }
};

// Rebuilds occupancy from the active lightpaths and compares it with the
// state slot by slot.
void audit_state(const NetworkState& state, const std::map<LightpathId, const LightpathAssignment*>& active,
                 const ConverterPlacement& placement) {
    std::vector<LightpathId> expected(state.link_count() * state.wavelengths(), no_lightpath);
    for (const auto& [id, lp] : active) {
        if (auto problem = check_assignment(*lp, placement, state.wavelengths()))
            throw InvariantViolation("lightpath " + std::to_string(id) + ": " + *problem);
        if (placement.empty() && std::adjacent_find(lp->wavelengths.begin(), lp->wavelengths.end(),
                                                    std::not_equal_to<>()) != lp->wavelengths.end())
            throw InvariantViolation("wavelength changes along a route without converters");
        for (std::size_t i = 0; i < lp->route.hops.size(); ++i) {
            auto& slot = expected[lp->route.hops[i] * state.wavelengths() + lp->wavelengths[i]];
            if (slot != no_lightpath) throw InvariantViolation("two active lightpaths share a slot");
            slot = id;
        }
    }
    for (LinkId l = 0; l < state.link_count(); ++l)
        for (std::uint32_t w = 0; w < state.wavelengths(); ++w)
            if (state.owner(l, w) != expected[l * state.wavelengths() + w])
                throw InvariantViolation("occupancy of link " + std::to_string(l) + " wavelength " +
                                         std::to_string(w) + " disagrees with the active lightpaths");
}

}  // namespace

MetricsReport run_requests(const Topology& topology, const RouteTable& routes, const ConverterPlacement& placement,
                           const RwaPolicy& policy, std::span<const SessionRequest> requests, double horizon,
                           double warmup, std::uint64_t seed, const RunOptions& options) {
    if (!(warmup >= 0.0 && warmup < horizon)) throw std::invalid_argument("need 0 <= warmup < horizon");
    if (routes.node_count() != topology.node_count()) throw std::invalid_argument("route table/topology mismatch");
    for (std::size_t i = 1; i < requests.size(); ++i)
        if (requests[i].arrival < requests[i - 1].arrival)
            throw std::invalid_argument("requests must be sorted by arrival time");

    MetricsReport m;
    m.seed = seed;
    m.horizon = horizon;
    m.warmup = warmup;
    m.capacity = static_cast<std::uint64_t>(topology.link_count()) * topology.wavelengths();
    m.transit.assign(topology.node_count(), 0);

    NetworkState state(topology);
    Rng decisions(derive_seed(seed, Stream::decision));
    std::vector<std::optional<LightpathAssignment>> lightpaths(requests.size());
    std::map<LightpathId, const LightpathAssignment*> active;

    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::uint64_t sequence = 0;
    std::size_t next_request = 0;
    const auto push_next_arrival = [&] {
        if (next_request < requests.size()) {
            events.push({requests[next_request].arrival, sequence++, EventKind::arrival, next_request});
            ++next_request;
        }
    };
    push_next_arrival();

    double last_time = 0.0;
    const auto advance = [&](double t) {
        const double lo = std::max(last_time, warmup);
        const double hi = std::min(t, horizon);
        if (hi > lo) m.busy_integral += static_cast<double>(state.busy_slots()) * (hi - lo);
        last_time = std::max(last_time, t);
    };

    while (!events.empty()) {
        const Event ev = events.top();
        if (ev.time >= horizon && !options.drain) break;
        events.pop();
        if (ev.time < last_time) throw InvariantViolation("event time went backwards");
        advance(ev.time);

        if (ev.kind == EventKind::departure) {
            auto& lp = lightpaths[ev.index];
            active.erase(lp->id);
            release(state, *lp);
            lp.reset();
            if (options.audit) audit_state(state, active, placement);
            continue;
        }

        const SessionRequest& req = requests[ev.index];
        if (req.src == req.dst || !(req.holding > 0.0)) throw std::invalid_argument("malformed session request");

        std::optional<NetworkState> before;
        if (options.audit) before = state;

        auto outcome = attempt_establish(state, topology, req, routes.routes(req.src, req.dst), placement, policy,
                                         decisions);
        const bool counted = req.arrival >= warmup;
        if (counted) ++m.offered;
        if (outcome) {
            if (counted) {
                ++m.accepted;
                for (std::size_t i = 1; i + 1 < outcome->route.nodes.size(); ++i) ++m.transit[outcome->route.nodes[i]];
            }
            lightpaths[ev.index] = *outcome;
            active.emplace(outcome->id, &*lightpaths[ev.index]);
            events.push({req.arrival + req.holding, sequence++, EventKind::departure, ev.index});
        } else {
            if (counted) ++m.blocked;
            if (before && !(*before == state)) throw InvariantViolation("blocked attempt modified network state");
        }
        if (options.audit) audit_state(state, active, placement);
        if (options.on_decision) options.on_decision(req, outcome, state);
        push_next_arrival();
    }
    advance(horizon);

    if (options.drain) m.drained_empty = state.all_free() && active.empty();
    if (m.offered != m.accepted + m.blocked) throw InvariantViolation("offered != accepted + blocked");
    return m;
}

MetricsReport run(const Topology& topology, const RouteTable& routes, const ConverterPlacement& placement,
                  const RwaPolicy& policy, const TrafficModel& traffic, double horizon, double warmup,
                  std::uint64_t seed, const RunOptions& options) {
    std::vector<SessionRequest> requests;
    if (traffic.offered_load > 0.0) {
        const auto pairs = all_ordered_pairs(topology.node_count());
        requests = generate_arrivals(traffic, pairs, horizon, seed);
    }
    return run_requests(topology, routes, placement, policy, requests, horizon, warmup, seed, options);
}

MeanError mean_and_stderr(std::span<const double> values) {
    MeanError out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double n = static_cast<double>(values.size());
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

Scenario build_scenario(const SimulationConfig& config, std::uint64_t seed) {
    Scenario s;
    if (config.topology) {
        s.topology = config.topology;
    } else {
        s.topology = std::make_shared<const Topology>(
            generate_random_topology(config.nodes, config.connection_probability, config.wavelengths, seed));
    }
    const std::size_t k = config.policy.routing == RoutingPolicy::fixed ? 1 : std::max<std::size_t>(1, config.policy.k);
    s.routes = std::make_shared<const RouteTable>(*s.topology, k);
    return s;
}

std::vector<std::uint64_t> baseline_transit(const SimulationConfig& config, const Scenario& scenario,
                                            std::uint64_t seed) {
    const Topology& topology = *scenario.topology;
    const TrafficModel traffic{config.traffic, per_pair_load(config.load, topology.node_count()), config.mean_holding};
    const ConverterPlacement none(topology.node_count(), config.degree);
    return run(topology, *scenario.routes, none, config.policy, traffic, config.horizon, config.effective_warmup(), seed)
        .transit;
}

MetricsReport run_config(const SimulationConfig& config, const Scenario& scenario, std::uint64_t seed,
                         const RunOptions& options, const std::vector<std::uint64_t>* transit) {
    const Topology& topology = *scenario.topology;
    const TrafficModel traffic{config.traffic, per_pair_load(config.load, topology.node_count()), config.mean_holding};

    std::vector<std::uint64_t> own_transit;
    if (config.strategy == PlacementStrategy::transit_rank && transit == nullptr) {
        own_transit = baseline_transit(config, scenario, seed);
        transit = &own_transit;
    }
    const auto placement = place_converters(topology, config.conversion_factor, config.strategy, config.degree, seed,
                                            transit ? std::span<const std::uint64_t>(*transit)
                                                    : std::span<const std::uint64_t>{});
    return run(topology, *scenario.routes, placement, config.policy, traffic, config.horizon,
               config.effective_warmup(), seed, options);
}

ReplicationSummary summarize(std::vector<MetricsReport> runs) {
    ReplicationSummary s;
    std::vector<double> bp, util;
    for (const auto& m : runs) {
        bp.push_back(blocking_probability(m));
        util.push_back(link_utilization(m));
    }
    s.blocking = mean_and_stderr(bp);
    s.utilization = mean_and_stderr(util);
    s.runs = std::move(runs);
    return s;
}

ReplicationSummary replicate(const SimulationConfig& config, std::span<const std::uint64_t> seeds, std::size_t jobs) {
    if (seeds.empty()) throw std::invalid_argument("replicate needs at least one seed");
    const auto one = [&config](std::uint64_t seed) { return run_config(config, build_scenario(config, seed), seed); };

    std::vector<MetricsReport> runs(seeds.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) runs[i] = one(seeds[i]);
    } else {
        for (std::size_t start = 0; start < seeds.size(); start += jobs) {
            std::vector<std::future<MetricsReport>> batch;
            for (std::size_t i = start; i < std::min(seeds.size(), start + jobs); ++i)
                batch.push_back(std::async(std::launch::async, one, seeds[i]));
            for (std::size_t i = 0; i < batch.size(); ++i) runs[start + i] = batch[i].get();
        }
    }
    return summarize(std::move(runs));
}

void write_replication_rows(std::ostream& os, const ReplicationSummary& summary, bool header) {
    if (header) os << "seed,offered,blocked,bp,utilization\n";
    for (const auto& m : summary.runs)
        os << m.seed << ',' << m.offered << ',' << m.blocked << ',' << format_double(blocking_probability(m)) << ','
           << format_double(link_utilization(m)) << '\n';
}

}  // namespace wdmsim
