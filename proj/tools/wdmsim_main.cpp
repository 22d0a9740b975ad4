// wdmsim: command-line front end.
//
//   wdmsim sweep --config FILE [--out DIR] [--jobs N] [--set key=value]...
//   wdmsim run --config FILE [--seeds 1..10] [--drain] [--set key=value]...
//   wdmsim gen-topology --nodes N --prob P --wavelengths W --seed S --out FILE
//   wdmsim erlang-b --load E --servers C
//   wdmsim knee --aggregate FILE --threshold T
//
// Exit codes: 0 success, 1 usage or input error, 2 invariant violation.

#include "wdmsim/config.hpp"
#include "wdmsim/engine.hpp"
#include "wdmsim/errors.hpp"
#include "wdmsim/experiment.hpp"
#include "wdmsim/format.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace wdmsim;

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    Config c = path.empty() ? Config{} : Config::load(path);
    for (const auto& o : overrides) c.set_assignment(o);
    return c;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator for wavelength-routed WDM networks with sparse conversion"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    auto* sweep = app.add_subcommand("sweep", "Run a conversion-factor sweep and write CSV and plot data");
    std::string out_dir;
    std::size_t jobs = 1;
    sweep->add_option("--config", config_path, "Config file (section.key = value)");
    sweep->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--set", overrides, "Override a config key: key=value");

    auto* run = app.add_subcommand("run", "Replicate a single scenario; prints one CSV row per seed");
    std::string seeds_text;
    bool drain = false;
    std::string trace_requests, trace_decisions, dump_placement;
    run->add_option("--config", config_path, "Config file (section.key = value)");
    run->add_option("--set", overrides, "Override a config key: key=value");
    run->add_option("--seeds", seeds_text, "Seeds, e.g. 1,2,3 or 1..10 (overrides sim.seeds)");
    run->add_flag("--drain", drain, "Process departures past the horizon and check the network empties");
    run->add_option("--trace-requests", trace_requests, "CSV of generated requests (first seed)");
    run->add_option("--trace-decisions", trace_decisions, "CSV of per-request outcomes (first seed)");
    run->add_option("--dump-placement", dump_placement, "Converter node list (first seed)");

    auto* gen = app.add_subcommand("gen-topology", "Generate a random connected topology");
    std::size_t nodes = 0;
    double prob = 0.0;
    std::uint32_t wavelengths = 16;
    std::uint64_t seed = 1;
    std::string topo_out;
    gen->add_option("--nodes", nodes, "Node count")->required();
    gen->add_option("--prob", prob, "Link probability per node pair")->required();
    gen->add_option("--wavelengths", wavelengths, "Wavelengths per link");
    gen->add_option("--seed", seed, "PRNG seed");
    gen->add_option("--out", topo_out, "Output file (stdout if omitted)");

    auto* erl = app.add_subcommand("erlang-b", "Erlang-B blocking probability");
    double load = 0.0;
    std::uint32_t servers = 0;
    erl->add_option("--load", load, "Offered load in Erlangs")->required();
    erl->add_option("--servers", servers, "Number of servers")->required();

    auto* knee = app.add_subcommand("knee", "Diminishing-returns point of each BP curve in an aggregate CSV");
    std::string aggregate_path;
    double threshold = 0.05;
    bool threshold_given = false;
    knee->add_option("--aggregate", aggregate_path, "aggregate.csv from a sweep")->required();
    knee->add_option("--threshold", threshold, "Marginal-gain fraction of the total drop")
        ->each([&](const std::string&) { threshold_given = true; });
    knee->add_option("--config", config_path, "Config file providing knee.threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*sweep) {
            const Config c = load_config(config_path, overrides);
            const SweepSpec spec = sweep_spec_from_config(c);
            const std::string dir = out_dir.empty() ? c.get_string("output.dir", "sweep_out") : out_dir;
            const auto result = run_sweep(spec, jobs, [](const std::string& msg) { std::cerr << msg << '\n'; });
            write_sweep_outputs(result, dir);
            write_knee_csv(std::cout, knee_report(result.aggregate, c.get_double("knee.threshold", 0.05)));
            std::cerr << "wrote " << result.rows.size() << " rows to " << dir << '\n';
        } else if (*run) {
            const Config c = load_config(config_path, overrides);
            const SimulationConfig sim = simulation_config_from_config(c);
            const auto seeds = seeds_text.empty() ? c.get_uints("sim.seeds", {1}) : parse_uint_list(seeds_text);
            if (seeds.empty()) throw std::invalid_argument("no seeds given");

            std::vector<MetricsReport> reports;
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                const Scenario scenario = build_scenario(sim, seeds[i]);
                RunOptions options;
                options.drain = drain;
                std::ofstream decisions;
                if (i == 0 && !trace_decisions.empty()) {
                    decisions = open_out(trace_decisions);
                    decisions << "arrival,src,dst,outcome,route_hops,conversions\n";
                    options.on_decision = [&decisions](const SessionRequest& r,
                                                       const std::optional<LightpathAssignment>& lp,
                                                       const NetworkState&) {
                        decisions << format_double(r.arrival) << ',' << r.src << ',' << r.dst << ','
                                  << (lp ? "accepted" : "blocked") << ',' << (lp ? lp->route.hop_count() : 0) << ','
                                  << (lp ? lp->conversions.size() : 0) << '\n';
                    };
                }
                if (i == 0 && !trace_requests.empty()) {
                    const auto& t = *scenario.topology;
                    const TrafficModel model{sim.traffic, per_pair_load(sim.load, t.node_count()), sim.mean_holding};
                    auto out = open_out(trace_requests);
                    if (model.offered_load > 0.0)
                        write_request_trace(out, generate_arrivals(model, all_ordered_pairs(t.node_count()),
                                                                   sim.horizon, seeds[i]));
                    else
                        write_request_trace(out, {});
                }
                if (i == 0 && !dump_placement.empty()) {
                    if (sim.strategy == PlacementStrategy::transit_rank)
                        throw std::invalid_argument("--dump-placement does not support transit placement");
                    auto out = open_out(dump_placement);
                    write_placement(out, place_converters(*scenario.topology, sim.conversion_factor, sim.strategy,
                                                          sim.degree, seeds[i]));
                }
                auto m = run_config(sim, scenario, seeds[i], options);
                if (drain && m.drained_empty && !*m.drained_empty)
                    throw InvariantViolation("network not empty after draining (seed " + std::to_string(seeds[i]) + ")");
                reports.push_back(std::move(m));
            }
            const auto summary = summarize(std::move(reports));
            write_replication_rows(std::cout, summary);
            std::cerr << "bp " << format_double(summary.blocking.mean) << " +- "
                      << format_double(summary.blocking.std_error) << ", utilization "
                      << format_double(summary.utilization.mean) << " +- "
                      << format_double(summary.utilization.std_error) << '\n';
        } else if (*gen) {
            const auto t = generate_random_topology(nodes, prob, wavelengths, seed);
            if (topo_out.empty()) {
                write_topology(std::cout, t);
            } else {
                auto out = open_out(topo_out);
                write_topology(out, t);
            }
        } else if (*erl) {
            std::cout << format_double(erlang_b(load, servers)) << '\n';
        } else if (*knee) {
            if (!threshold_given && !config_path.empty())
                threshold = Config::load(config_path).get_double("knee.threshold", threshold);
            std::ifstream in(aggregate_path);
            if (!in) throw std::invalid_argument("cannot open " + aggregate_path);
            write_knee_csv(std::cout, knee_report(read_aggregate_csv(in), threshold));
        }
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
