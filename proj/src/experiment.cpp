#include "wdmsim/experiment.hpp"

#include "wdmsim/errors.hpp"
#include "wdmsim/format.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace wdmsim {

void SweepSpec::validate() const {
    if (node_counts.empty() || wavelength_counts.empty() || conversion_factors.empty() || traffic_kinds.empty() ||
        seeds.empty())
        throw std::invalid_argument("sweep grids must be nonempty");
    for (auto n : node_counts)
        if (n < 2) throw std::invalid_argument("node counts must be >= 2");
    for (auto w : wavelength_counts)
        if (w < 1) throw std::invalid_argument("wavelength counts must be >= 1");
    for (double q : conversion_factors)
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("conversion factors must be in [0,1]");
    if (!(connection_probability >= 0.0 && connection_probability <= 1.0))
        throw std::invalid_argument("connection probability must be in [0,1]");
    if (load.value < 0.0) throw std::invalid_argument("load must be >= 0");
    if (!(mean_holding > 0.0)) throw std::invalid_argument("mean holding time must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const double wu = warmup.value_or(0.1 * horizon);
    if (!(wu >= 0.0 && wu < horizon)) throw std::invalid_argument("warmup must be in [0, horizon)");
    if (policy.k < 1) throw std::invalid_argument("rwa.k must be >= 1");
}

namespace {

std::string describe_cell(std::size_t n, std::uint32_t w, double q, TrafficKind kind, std::uint64_t seed) {
    return "cell n=" + std::to_string(n) + " w=" + std::to_string(w) + " q=" + format_double(q) +
           " traffic=" + to_string(kind) + " seed=" + std::to_string(seed);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, std::size_t jobs,
                      const std::function<void(const std::string&)>& progress) {
    spec.validate();
    const std::size_t seeds = spec.seeds.size();
    const std::size_t per_n = spec.wavelength_counts.size() * spec.traffic_kinds.size() * spec.conversion_factors.size();
    const std::size_t cells = spec.node_counts.size() * per_n;
    std::vector<ResultRow> rows(cells * seeds);

    // One work item per (n, seed): every cell of that seed shares its graph.
    const std::size_t groups = spec.node_counts.size() * seeds;
    std::vector<std::exception_ptr> failures(groups);
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;

    const auto work = [&] {
        for (std::size_t g = next++; g < groups; g = next++) {
            const std::size_t ni = g / seeds;
            const std::size_t si = g % seeds;
            const std::size_t n = spec.node_counts[ni];
            const std::uint64_t seed = spec.seeds[si];
            std::string current = "topology n=" + std::to_string(n) + " seed=" + std::to_string(seed);
            try {
                SimulationConfig cfg;
                cfg.nodes = n;
                cfg.connection_probability = spec.connection_probability;
                cfg.wavelengths = spec.wavelength_counts.front();
                cfg.strategy = spec.strategy;
                cfg.degree = spec.degree;
                cfg.policy = spec.policy;
                cfg.load = spec.load;
                cfg.mean_holding = spec.mean_holding;
                cfg.horizon = spec.horizon;
                cfg.warmup = spec.warmup;
                const Scenario base = build_scenario(cfg, seed);
                const double pair_load = per_pair_load(spec.load, n);

                std::size_t cell = ni * per_n;
                for (auto w : spec.wavelength_counts) {
                    const Scenario scenario{std::make_shared<const Topology>(base.topology->with_wavelengths(w)),
                                            base.routes};
                    cfg.wavelengths = w;
                    for (auto kind : spec.traffic_kinds) {
                        cfg.traffic = kind;
                        std::vector<std::uint64_t> transit;
                        if (spec.strategy == PlacementStrategy::transit_rank) {
                            current = describe_cell(n, w, 0.0, kind, seed) + " (transit baseline)";
                            transit = baseline_transit(cfg, scenario, seed);
                        }
                        for (double q : spec.conversion_factors) {
                            current = describe_cell(n, w, q, kind, seed);
                            cfg.conversion_factor = q;
                            const MetricsReport m = run_config(cfg, scenario, seed, {}, transit.empty() ? nullptr : &transit);
                            ResultRow& row = rows[cell * seeds + si];
                            row = {n,
                                   w,
                                   q,
                                   kind,
                                   pair_load,
                                   seed,
                                   m.offered,
                                   m.blocked,
                                   blocking_probability(m),
                                   link_utilization(m),
                                   scenario.topology->repaired_edges(),
                                   scenario.topology->graph_hash()};
                            ++cell;
                        }
                    }
                }
                if (progress) {
                    std::lock_guard lock(progress_mutex);
                    progress("done n=" + std::to_string(n) + " seed=" + std::to_string(seed));
                }
            } catch (const InvariantViolation& e) {
                failures[g] = std::make_exception_ptr(InvariantViolation(current + ": " + e.what()));
            } catch (const std::exception& e) {
                failures[g] = std::make_exception_ptr(std::runtime_error(current + ": " + e.what()));
            }
        }
    };

    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, groups);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    SweepResult result;
    result.aggregate = aggregate_rows(rows);
    result.rows = std::move(rows);
    return result;
}

std::vector<AggregateRow> aggregate_rows(std::span<const ResultRow> rows) {
    using Key = std::tuple<std::size_t, std::uint32_t, double, int, double>;
    std::vector<Key> order;
    std::map<Key, std::vector<const ResultRow*>> cells;
    for (const auto& r : rows) {
        const Key key{r.n, r.w, r.q, static_cast<int>(r.traffic), r.load};
        auto [it, inserted] = cells.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&r);
    }
    std::vector<AggregateRow> out;
    out.reserve(order.size());
    for (const auto& key : order) {
        const auto& members = cells[key];
        std::vector<double> bp, util;
        for (const auto* r : members) {
            bp.push_back(r->bp);
            util.push_back(r->utilization);
        }
        const auto b = mean_and_stderr(bp);
        const auto u = mean_and_stderr(util);
        const auto* first = members.front();
        out.push_back({first->n, first->w, first->q, first->traffic, first->load, members.size(), b.mean, b.std_error,
                       u.mean, u.std_error});
    }
    return out;
}

std::optional<double> find_knee(std::span<const double> q, std::span<const double> bp, double threshold) {
    if (q.size() != bp.size()) throw std::invalid_argument("knee: q and bp lengths differ");
    if (q.size() < 3) throw std::invalid_argument("knee: curve needs at least 3 points");
    const double total = bp.front() - bp.back();
    if (!(total > 0.0)) return std::nullopt;
    const double bar = threshold * total;
    const std::size_t last = q.size() - 1;
    for (std::size_t start = 0; start < last; ++start) {
        bool flat_after = true;
        for (std::size_t i = start; i < last && flat_after; ++i) flat_after = (bp[i] - bp[i + 1]) < bar;
        if (flat_after) return q[start];
    }
    return std::nullopt;
}

std::vector<KneeRow> knee_report(std::span<const AggregateRow> aggregate, double threshold) {
    using Key = std::tuple<std::size_t, std::uint32_t, int>;
    std::map<Key, std::vector<std::pair<double, double>>> curves;
    for (const auto& r : aggregate) curves[{r.n, r.w, static_cast<int>(r.traffic)}].emplace_back(r.q, r.bp_mean);
    std::vector<KneeRow> out;
    for (auto& [key, points] : curves) {
        std::sort(points.begin(), points.end());
        std::vector<double> q, bp;
        for (const auto& [x, y] : points) {
            q.push_back(x);
            bp.push_back(y);
        }
        out.push_back({std::get<0>(key), std::get<1>(key), static_cast<TrafficKind>(std::get<2>(key)),
                       find_knee(q, bp, threshold)});
    }
    return out;
}

void write_results_csv(std::ostream& os, std::span<const ResultRow> rows) {
    os << "n,w,q,traffic,load,seed,offered,blocked,bp,utilization,repaired,topology_hash\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.w << ',' << format_double(r.q) << ',' << to_string(r.traffic) << ','
           << format_double(r.load) << ',' << r.seed << ',' << r.offered << ',' << r.blocked << ','
           << format_double(r.bp) << ',' << format_double(r.utilization) << ',' << r.repaired << ','
           << hex64(r.topology_hash) << '\n';
}

void write_aggregate_csv(std::ostream& os, std::span<const AggregateRow> rows) {
    os << "n,w,q,traffic,load,seeds,bp_mean,bp_stderr,util_mean,util_stderr\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.w << ',' << format_double(r.q) << ',' << to_string(r.traffic) << ','
           << format_double(r.load) << ',' << r.seeds << ',' << format_double(r.bp_mean) << ','
           << format_double(r.bp_stderr) << ',' << format_double(r.util_mean) << ','
           << format_double(r.util_stderr) << '\n';
}

namespace {

double field_double(const std::string& text, std::size_t line_no) {
    double v = 0.0;
    if (!parse_double(text, v)) throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + text + "'");
    return v;
}

std::uint64_t field_uint(const std::string& text, std::size_t line_no) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad integer '" + text + "'");
    return v;
}

}  // namespace

std::vector<AggregateRow> read_aggregate_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("n,w,q,traffic", 0) != 0)
        throw std::invalid_argument("aggregate file: missing header");
    std::vector<AggregateRow> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream in(line);
        std::string item;
        while (std::getline(in, item, ',')) f.push_back(item);
        if (f.size() != 10) throw std::invalid_argument("aggregate file line " + std::to_string(line_no) + ": expected 10 fields");
        AggregateRow r;
        r.n = field_uint(f[0], line_no);
        r.w = static_cast<std::uint32_t>(field_uint(f[1], line_no));
        r.q = field_double(f[2], line_no);
        r.traffic = parse_traffic_kind(f[3]);
        r.load = field_double(f[4], line_no);
        r.seeds = field_uint(f[5], line_no);
        r.bp_mean = field_double(f[6], line_no);
        r.bp_stderr = field_double(f[7], line_no);
        r.util_mean = field_double(f[8], line_no);
        r.util_stderr = field_double(f[9], line_no);
        out.push_back(r);
    }
    return out;
}

void write_knee_csv(std::ostream& os, std::span<const KneeRow> rows) {
    os << "n,w,traffic,knee\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.w << ',' << to_string(r.traffic) << ',' << (r.knee ? format_double(*r.knee) : "NONE")
           << '\n';
}

std::vector<std::filesystem::path> emit_plot_data(std::span<const AggregateRow> aggregate,
                                                  const std::filesystem::path& out_dir) {
    if (aggregate.empty()) throw std::invalid_argument("emit_plot_data: empty aggregate");
    std::set<std::size_t> ns;
    std::set<std::uint32_t> ws;
    std::set<double> qs;
    std::set<int> kinds;
    std::map<std::tuple<std::size_t, std::uint32_t, double, int>, const AggregateRow*> cells;
    for (const auto& r : aggregate) {
        ns.insert(r.n);
        ws.insert(r.w);
        qs.insert(r.q);
        kinds.insert(static_cast<int>(r.traffic));
        cells[{r.n, r.w, r.q, static_cast<int>(r.traffic)}] = &r;
    }

    std::vector<std::string> gaps;
    for (auto n : ns)
        for (auto w : ws)
            for (double q : qs)
                for (int k : kinds)
                    if (!cells.count({n, w, q, k}))
                        gaps.push_back("n=" + std::to_string(n) + " w=" + std::to_string(w) + " q=" + format_double(q) +
                                       " traffic=" + to_string(static_cast<TrafficKind>(k)));
    if (!gaps.empty()) {
        std::string msg = "emit_plot_data: missing cells:";
        for (const auto& g : gaps) msg += "\n  " + g;
        throw std::invalid_argument(msg);
    }

    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    std::ostringstream script;
    script << "# gnuplot script; run from this directory: gnuplot plot.gp\n"
           << "set terminal pngcairo size 800,600\n"
           << "set key top right\n"
           << "set xlabel 'wavelength conversion factor'\n";

    const auto column = [&](std::size_t n, std::uint32_t w, double q, TrafficKind kind, bool bp) -> std::string {
        const auto it = cells.find({n, w, q, static_cast<int>(kind)});
        if (it == cells.end()) return "nan nan";
        const auto& r = *it->second;
        return bp ? format_double(r.bp_mean) + ' ' + format_double(r.bp_stderr)
                  : format_double(r.util_mean) + ' ' + format_double(r.util_stderr);
    };

    for (auto n : ns) {
        for (auto w : ws) {
            for (bool bp : {true, false}) {
                const std::string stem = std::string(bp ? "bp" : "util") + "_n" + std::to_string(n) + "_w" + std::to_string(w);
                const auto path = out_dir / (stem + ".dat");
                std::ofstream out(path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + path.string());
                const std::string metric = bp ? "bp" : "util";
                out << "# q " << metric << "_cbr " << metric << "_cbr_err " << metric << "_exp " << metric << "_exp_err\n";
                for (double q : qs)
                    out << format_double(q) << ' ' << column(n, w, q, TrafficKind::cbr, bp) << ' '
                        << column(n, w, q, TrafficKind::exponential, bp) << '\n';
                written.push_back(path);

                script << "set output '" << stem << ".png'\n"
                       << "set title '" << (bp ? "Blocking probability" : "Link utilization") << ", N=" << n
                       << ", W=" << w << "'\n"
                       << "set ylabel '" << (bp ? "blocking probability" : "link utilization") << "'\n"
                       << "plot '" << stem << ".dat' using 1:2:3 with yerrorlines title 'CBR', \\\n"
                       << "     '" << stem << ".dat' using 1:4:5 with yerrorlines title 'Exponential'\n";
            }
        }
    }
    const auto script_path = out_dir / "plot.gp";
    std::ofstream(script_path, std::ios::binary) << script.str();
    written.push_back(script_path);
    return written;
}

PlotSeries read_plot_data(std::istream& is) {
    PlotSeries s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream in(line);
        std::string f[5];
        for (auto& x : f)
            if (!(in >> x)) throw std::invalid_argument("plot data line " + std::to_string(line_no) + ": expected 5 columns");
        s.q.push_back(field_double(f[0], line_no));
        s.cbr_mean.push_back(field_double(f[1], line_no));
        s.cbr_err.push_back(field_double(f[2], line_no));
        s.exp_mean.push_back(field_double(f[3], line_no));
        s.exp_err.push_back(field_double(f[4], line_no));
    }
    return s;
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir / "results.csv", std::ios::binary);
        write_results_csv(out, result.rows);
    }
    {
        std::ofstream out(out_dir / "aggregate.csv", std::ios::binary);
        write_aggregate_csv(out, result.aggregate);
    }
    emit_plot_data(result.aggregate, out_dir / "plots");
}

namespace {

ConversionDegree degree_from(const Config& c) {
    const auto kind = c.get_string("conv.degree", "full");
    if (kind == "full") return ConversionDegree::full();
    if (kind == "limited") return ConversionDegree::limited(static_cast<std::uint32_t>(c.get_uint("conv.range", 1)));
    throw std::invalid_argument("conv.degree must be full or limited");
}

RwaPolicy policy_from(const Config& c) {
    RwaPolicy p;
    p.routing = parse_routing_policy(c.get_string("rwa.routing", "alternate"));
    p.k = c.get_uint("rwa.k", 3);
    p.assignment = parse_assignment_policy(c.get_string("rwa.assignment", "first_fit"));
    if (p.k < 1) throw std::invalid_argument("rwa.k must be >= 1");
    return p;
}

LoadSpec load_from(const Config& c) {
    return {parse_load_mode(c.get_string("traffic.load_mode", "per_pair")), c.get_double("traffic.load_erlang", 0.4)};
}

}  // namespace

SweepSpec sweep_spec_from_config(const Config& c) {
    SweepSpec s;
    s.node_counts.clear();
    for (auto n : c.get_uints("sweep.nodes", {25, 50, 75, 100})) s.node_counts.push_back(n);
    s.wavelength_counts.clear();
    for (auto w : c.get_uints("sweep.wavelengths", {16, 32, 48, 64})) s.wavelength_counts.push_back(static_cast<std::uint32_t>(w));
    s.conversion_factors = c.get_doubles("sweep.factors", s.conversion_factors);
    s.traffic_kinds.clear();
    for (const auto& k : c.get_strings("sweep.traffic", {"cbr", "exp"})) s.traffic_kinds.push_back(parse_traffic_kind(k));
    s.connection_probability = c.get_double("topology.prob", s.connection_probability);
    s.load = load_from(c);
    s.mean_holding = c.get_double("traffic.mean_holding_s", s.mean_holding);
    s.horizon = c.get_double("traffic.horizon_s", s.horizon);
    if (c.has("sim.warmup_s")) s.warmup = c.get_double("sim.warmup_s", 0.0);
    s.seeds = c.get_uints("sim.seeds", s.seeds);
    s.strategy = parse_placement_strategy(c.get_string("conv.strategy", "random"));
    s.degree = degree_from(c);
    s.policy = policy_from(c);
    s.validate();
    return s;
}

SimulationConfig simulation_config_from_config(const Config& c) {
    SimulationConfig s;
    s.nodes = c.get_uint("topology.nodes", s.nodes);
    s.connection_probability = c.get_double("topology.prob", s.connection_probability);
    s.wavelengths = static_cast<std::uint32_t>(c.get_uint("topology.wavelengths", s.wavelengths));
    if (auto file = c.get("topology.file")) {
        std::ifstream in(*file);
        if (!in) throw std::invalid_argument("cannot open topology file " + *file);
        auto t = read_topology(in);
        if (c.has("topology.wavelengths")) t = t.with_wavelengths(s.wavelengths);
        s.nodes = t.node_count();
        s.wavelengths = t.wavelengths();
        s.topology = std::make_shared<const Topology>(std::move(t));
    }
    s.conversion_factor = c.get_double("conv.factor", 0.0);
    if (!(s.conversion_factor >= 0.0 && s.conversion_factor <= 1.0))
        throw std::invalid_argument("conv.factor must be in [0,1]");
    s.strategy = parse_placement_strategy(c.get_string("conv.strategy", "random"));
    s.degree = degree_from(c);
    s.policy = policy_from(c);
    s.traffic = parse_traffic_kind(c.get_string("traffic.kind", "exp"));
    s.load = load_from(c);
    s.mean_holding = c.get_double("traffic.mean_holding_s", s.mean_holding);
    s.horizon = c.get_double("traffic.horizon_s", s.horizon);
    if (c.has("sim.warmup_s")) s.warmup = c.get_double("sim.warmup_s", 0.0);
    if (!(s.effective_warmup() >= 0.0 && s.effective_warmup() < s.horizon))
        throw std::invalid_argument("warmup must be in [0, horizon)");
    return s;
}

}  // namespace wdmsim
