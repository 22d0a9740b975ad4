#pragma once

#include "wdmsim/config.hpp"
#include "wdmsim/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wdmsim {

/// Parameter grid for a conversion-factor study.
struct SweepSpec {
    std::vector<std::size_t> node_counts{25, 50, 75, 100};
    std::vector<std::uint32_t> wavelength_counts{16, 32, 48, 64};
    std::vector<double> conversion_factors{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<TrafficKind> traffic_kinds{TrafficKind::cbr, TrafficKind::exponential};
    double connection_probability = 0.03;
    LoadSpec load;
    double mean_holding = 1.0;
    double horizon = 100.0;
    std::optional<double> warmup;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    PlacementStrategy strategy = PlacementStrategy::random;
    ConversionDegree degree = ConversionDegree::full();
    RwaPolicy policy;

    /// Throws std::invalid_argument on empty grids or out-of-range values.
    void validate() const;
};

struct ResultRow {
    std::size_t n = 0;
    std::uint32_t w = 0;
    double q = 0.0;
    TrafficKind traffic = TrafficKind::exponential;
    double load = 0.0;  // Erlangs per ordered pair
    std::uint64_t seed = 0;
    std::uint64_t offered = 0;
    std::uint64_t blocked = 0;
    double bp = 0.0;
    double utilization = 0.0;
    std::size_t repaired = 0;
    std::uint64_t topology_hash = 0;
};

struct AggregateRow {
    std::size_t n = 0;
    std::uint32_t w = 0;
    double q = 0.0;
    TrafficKind traffic = TrafficKind::exponential;
    double load = 0.0;
    std::size_t seeds = 0;
    double bp_mean = 0.0;
    double bp_stderr = 0.0;
    double util_mean = 0.0;
    double util_stderr = 0.0;
};

struct SweepResult {
    std::vector<ResultRow> rows;           // (cell, seed) order
    std::vector<AggregateRow> aggregate;   // cell order
};

/// Runs every (n, W, traffic, q) cell for every seed. One topology and
/// route table per (n, seed) is shared by all other cells of that seed.
/// Rows come back in (cell, seed) order whatever `jobs` is. A failing
/// cell aborts the sweep with the cell named in the exception.
SweepResult run_sweep(const SweepSpec& spec, std::size_t jobs = 1,
                      const std::function<void(const std::string&)>& progress = {});

/// Per-cell mean and standard error over seeds; cells keep first-seen order.
std::vector<AggregateRow> aggregate_rows(std::span<const ResultRow> rows);

/// Smallest q after which every per-step BP drop is below
/// `threshold` * (bp.front() - bp.back()). nullopt for curves that do not
/// fall, or whose last step still clears the bar. Throws
/// std::invalid_argument for fewer than three points.
std::optional<double> find_knee(std::span<const double> q, std::span<const double> bp, double threshold);

struct KneeRow {
    std::size_t n;
    std::uint32_t w;
    TrafficKind traffic;
    std::optional<double> knee;
};

/// Knee of every (n, W, traffic) curve in the aggregate, q ascending.
std::vector<KneeRow> knee_report(std::span<const AggregateRow> aggregate, double threshold);

void write_results_csv(std::ostream& os, std::span<const ResultRow> rows);
void write_aggregate_csv(std::ostream& os, std::span<const AggregateRow> rows);
std::vector<AggregateRow> read_aggregate_csv(std::istream& is);
void write_knee_csv(std::ostream& os, std::span<const KneeRow> rows);

/// Writes bp_n<N>_w<W>.dat and util_n<N>_w<W>.dat per (n, W) plus plot.gp.
/// Columns: q, cbr mean, cbr stderr, exp mean, exp stderr; a traffic kind
/// absent from the whole aggregate is written as nan. Throws
/// std::invalid_argument listing every missing (n, W, q, traffic) cell.
std::vector<std::filesystem::path> emit_plot_data(std::span<const AggregateRow> aggregate,
                                                  const std::filesystem::path& out_dir);

/// Parsed content of one emitted data file.
struct PlotSeries {
    std::vector<double> q;
    std::vector<double> cbr_mean, cbr_err, exp_mean, exp_err;
};
PlotSeries read_plot_data(std::istream& is);

/// results.csv, aggregate.csv and the plot files under out_dir.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& out_dir);

/// Builders from a flat config; unspecified keys keep their defaults.
SweepSpec sweep_spec_from_config(const Config& config);
SimulationConfig simulation_config_from_config(const Config& config);

}  // namespace wdmsim
