#pragma once

#include "wdmsim/conversion.hpp"
#include "wdmsim/rwa.hpp"
#include "wdmsim/topology.hpp"
#include "wdmsim/traffic.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace wdmsim {

/// Counters of one replication. Requests arriving before `warmup` are
/// simulated but not counted; occupancy is integrated over [warmup, horizon].
struct MetricsReport {
    std::uint64_t seed = 0;
    std::uint64_t offered = 0;
    std::uint64_t blocked = 0;
    std::uint64_t accepted = 0;
    double busy_integral = 0.0;  // wavelength-seconds over all links
    double horizon = 0.0;
    double warmup = 0.0;
    /// Wavelength slots in the network (sum of W over links).
    std::uint64_t capacity = 0;
    /// Counted lightpaths passing through each node as an intermediate hop.
    std::vector<std::uint64_t> transit;
    /// Set in drain mode: whether every slot was free after the last departure.
    std::optional<bool> drained_empty;
};

double blocking_probability(const MetricsReport& m);
double link_utilization(const MetricsReport& m, const Topology& t);
/// Same, using the capacity recorded in the report.
double link_utilization(const MetricsReport& m);

/// Erlang-B blocking of an M/M/c/c system via B(j) = aB(j-1) / (j + aB(j-1)).
double erlang_b(double load, std::uint32_t servers);

struct RunOptions {
    /// Keep processing departures past the horizon until the network empties.
    bool drain = false;
    /// Re-verify every state invariant after each event (slow; for tests).
    bool audit = false;
    /// Called after every arrival with the outcome and the resulting state.
    std::function<void(const SessionRequest&, const std::optional<LightpathAssignment>&, const NetworkState&)>
        on_decision;
};

/// One replication over a given request stream. Throws InvariantViolation
/// if the RWA layer corrupts state.
MetricsReport run_requests(const Topology& topology, const RouteTable& routes, const ConverterPlacement& placement,
                           const RwaPolicy& policy, std::span<const SessionRequest> requests, double horizon,
                           double warmup, std::uint64_t seed, const RunOptions& options = {});

/// One replication with uniform traffic over every ordered node pair.
MetricsReport run(const Topology& topology, const RouteTable& routes, const ConverterPlacement& placement,
                  const RwaPolicy& policy, const TrafficModel& traffic, double horizon, double warmup,
                  std::uint64_t seed, const RunOptions& options = {});

/// Everything that defines one simulated scenario apart from the seed.
struct SimulationConfig {
    std::size_t nodes = 25;
    double connection_probability = 0.125;
    std::uint32_t wavelengths = 16;
    /// When set, used for every seed instead of a generated topology.
    std::shared_ptr<const Topology> topology;

    double conversion_factor = 0.0;
    PlacementStrategy strategy = PlacementStrategy::random;
    ConversionDegree degree = ConversionDegree::full();

    RwaPolicy policy;

    TrafficKind traffic = TrafficKind::exponential;
    LoadSpec load;
    double mean_holding = 1.0;
    double horizon = 1000.0;
    /// Defaults to 10% of the horizon.
    std::optional<double> warmup;

    double effective_warmup() const { return warmup.value_or(0.1 * horizon); }
};

struct MeanError {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Arithmetic mean and standard error (n-1 denominator; zero for n < 2).
MeanError mean_and_stderr(std::span<const double> values);

struct ReplicationSummary {
    std::vector<MetricsReport> runs;  // ordered as the seeds were given
    MeanError blocking;
    MeanError utilization;
};

/// Precomputed inputs of one replication.
struct Scenario {
    std::shared_ptr<const Topology> topology;
    std::shared_ptr<const RouteTable> routes;
};

/// Builds (or reuses) the topology and route table for `seed`.
Scenario build_scenario(const SimulationConfig& config, std::uint64_t seed);

/// Per-node transit counts of a converter-free run of `config`; the input
/// to transit-ranked placement.
std::vector<std::uint64_t> baseline_transit(const SimulationConfig& config, const Scenario& scenario,
                                            std::uint64_t seed);

/// Runs one seed of `config` on a prepared scenario. Transit-ranked
/// placement uses `transit` when given and runs the baseline otherwise.
MetricsReport run_config(const SimulationConfig& config, const Scenario& scenario, std::uint64_t seed,
                         const RunOptions& options = {}, const std::vector<std::uint64_t>* transit = nullptr);

/// Independent replications, one per seed, folded in seed order.
ReplicationSummary replicate(const SimulationConfig& config, std::span<const std::uint64_t> seeds,
                             std::size_t jobs = 1);

ReplicationSummary summarize(std::vector<MetricsReport> runs);

/// CSV `seed,offered,blocked,bp,utilization`, one row per replication.
void write_replication_rows(std::ostream& os, const ReplicationSummary& summary, bool header = true);

}  // namespace wdmsim
