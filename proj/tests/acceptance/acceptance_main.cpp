// Acceptance suite. Prints one PASS/FAIL line per criterion; exits nonzero
// if any selected criterion fails. Tolerances and scenarios are fixed here.

#include "../oracles.hpp"
#include "wdmsim/engine.hpp"
#include "wdmsim/errors.hpp"
#include "wdmsim/experiment.hpp"
#include "wdmsim/format.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <map>
#include <sstream>
#include <thread>

using namespace wdmsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

double pooled(const MeanError& a, const MeanError& b) { return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error); }

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t last) {
    std::vector<std::uint64_t> s;
    for (auto i = first; i <= last; ++i) s.push_back(i);
    return s;
}

// Monotone test shared by the trend criteria: each step may rise by at most
// one pooled standard error.
bool non_increasing_within_se(const std::vector<MeanError>& curve, std::string& why) {
    bool ok = true;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double rise = curve[i + 1].mean - curve[i].mean;
        if (rise > pooled(curve[i], curve[i + 1])) {
            why += " step " + std::to_string(i) + " rises " + fmt(rise) + ";";
            ok = false;
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------

Outcome erlang_b_oracle() {
    const auto t0 = Clock::now();
    const double expected = 0.030420;  // B(4 E, 8 servers)
    const double tolerance = 0.005;
    const std::uint64_t min_offered = 200'000;

    SimulationConfig c;
    c.topology = std::make_shared<const Topology>(2, 8, std::vector<Link>{{0, 1}});
    c.policy = {RoutingPolicy::fixed, 1, AssignmentPolicy::first_fit};
    c.traffic = TrafficKind::exponential;
    c.load = {LoadMode::total_network, 4.0};  // 2 E per direction on the one link
    c.mean_holding = 1.0;
    c.horizon = 60'000.0;                     // 0.9 * 60000 s * 4/s = 216000 expected requests
    const auto seeds = seed_range(1, 10);
    const auto s = replicate(c, seeds);

    Outcome o;
    std::uint64_t fewest = UINT64_MAX;
    for (const auto& m : s.runs) fewest = std::min(fewest, m.offered);
    const double secs = seconds_since(t0);
    o.pass = std::abs(s.blocking.mean - expected) <= tolerance && fewest >= min_offered && secs <= 10.0;
    o.detail = "mean BP " + fmt(s.blocking.mean) + " (+- " + fmt(s.blocking.std_error) + ") vs " + fmt(expected) +
               " tol " + fmt(tolerance) + "; fewest offered per seed " + std::to_string(fewest) + "; " + fmt(secs) +
               " s (limit 10)";
    return o;
}

// Shared scenario of criteria 2 and 3.
SimulationConfig trend_config() {
    SimulationConfig c;
    c.nodes = 25;
    c.connection_probability = 0.125;
    c.wavelengths = 16;
    c.policy = {RoutingPolicy::fixed_alternate, 3, AssignmentPolicy::first_fit};
    c.strategy = PlacementStrategy::transit_rank;
    c.traffic = TrafficKind::exponential;
    c.load = {LoadMode::per_pair, 0.2};
    c.horizon = 200.0;
    return c;
}

const std::vector<double> trend_q{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

struct TrendCurve {
    std::vector<MeanError> bp;
    double seconds = 0.0;
};

// Same topology, arrival stream and baseline per seed at every q.
TrendCurve trend_curve(SimulationConfig c, const std::vector<double>& qs) {
    const auto t0 = Clock::now();
    const auto seeds = seed_range(1, 10);
    std::vector<std::vector<double>> per_q(qs.size());
    for (auto seed : seeds) {
        const auto scenario = build_scenario(c, seed);
        std::vector<std::uint64_t> transit;
        if (c.strategy == PlacementStrategy::transit_rank) transit = baseline_transit(c, scenario, seed);
        for (std::size_t i = 0; i < qs.size(); ++i) {
            c.conversion_factor = qs[i];
            per_q[i].push_back(blocking_probability(run_config(c, scenario, seed, {}, transit.empty() ? nullptr : &transit)));
        }
    }
    TrendCurve out;
    for (const auto& v : per_q) out.bp.push_back(mean_and_stderr(v));
    out.seconds = seconds_since(t0);
    return out;
}

const TrendCurve& criterion2_curve() {
    static const TrendCurve curve = trend_curve(trend_config(), trend_q);
    return curve;
}

std::string describe(const std::vector<double>& qs, const std::vector<MeanError>& curve) {
    std::string s;
    for (std::size_t i = 0; i < qs.size(); ++i) s += " q" + fmt(qs[i]) + "=" + fmt(curve[i].mean);
    return s;
}

Outcome conversion_trend() {
    const auto& curve = criterion2_curve();
    Outcome o;
    std::string why;
    const bool calibrated = curve.bp.front().mean >= 0.1 && curve.bp.front().mean <= 0.4;
    const bool monotone = non_increasing_within_se(curve.bp, why);
    const double ratio = curve.bp.back().mean / curve.bp.front().mean;
    o.pass = calibrated && monotone && ratio <= 0.8 && curve.seconds <= 120.0;
    o.detail = "BP" + describe(trend_q, curve.bp) + "; BP(1)/BP(0) " + fmt(ratio) + " (limit 0.8); BP(0) in [0.1,0.4]: " +
               (calibrated ? "yes" : "no") + "; monotone: " + (monotone ? "yes" : "no" + why) + "; " +
               fmt(curve.seconds) + " s (limit 120)";

    // Informational: the same scenario with uniformly random converter sites.
    auto random_config = trend_config();
    random_config.strategy = PlacementStrategy::random;
    const auto random_curve = trend_curve(random_config, trend_q);
    o.detail += "\n       random placement, for reference:" + describe(trend_q, random_curve.bp);
    return o;
}

Outcome diminishing_returns() {
    const auto& curve = criterion2_curve();
    // indices: q=0 -> 0, q=0.6 -> 3, q=1 -> 5
    const double early = curve.bp[0].mean - curve.bp[3].mean;
    const double late = curve.bp[3].mean - curve.bp[5].mean;
    std::vector<AggregateRow> aggregate;
    for (std::size_t i = 0; i < trend_q.size(); ++i) {
        AggregateRow r;
        r.n = 25;
        r.w = 16;
        r.q = trend_q[i];
        r.bp_mean = curve.bp[i].mean;
        aggregate.push_back(r);
    }
    const auto knee = knee_report(aggregate, 0.05).front().knee;
    Outcome o;
    o.pass = late < early && knee && *knee <= 0.8;
    o.detail = "drop over [0,0.6] " + fmt(early) + ", over [0.6,1] " + fmt(late) + "; knee(0.05) " +
               (knee ? fmt(*knee) : std::string("NONE")) + " (limit 0.8)";
    return o;
}

Outcome traffic_ordering() {
    SimulationConfig c;
    c.nodes = 10;
    c.connection_probability = 0.5;
    c.wavelengths = 4;
    c.policy = {RoutingPolicy::fixed_alternate, 3, AssignmentPolicy::first_fit};
    c.load = {LoadMode::per_pair, 0.9};
    c.horizon = 200.0;
    const auto seeds = seed_range(1, 10);
    c.traffic = TrafficKind::cbr;
    const auto cbr = replicate(c, seeds);
    c.traffic = TrafficKind::exponential;
    const auto exp = replicate(c, seeds);

    const double util_gap = cbr.utilization.mean - exp.utilization.mean;
    const double bp_gap = exp.blocking.mean - cbr.blocking.mean;
    const double util_se = pooled(cbr.utilization, exp.utilization);
    const double bp_se = pooled(cbr.blocking, exp.blocking);
    Outcome o;
    o.pass = util_gap >= util_se && bp_gap >= bp_se;
    o.detail = "utilization cbr " + fmt(cbr.utilization.mean) + " exp " + fmt(exp.utilization.mean) + " (gap " +
               fmt(util_gap) + ", pooled se " + fmt(util_se) + "); BP cbr " + fmt(cbr.blocking.mean) + " exp " +
               fmt(exp.blocking.mean) + " (gap " + fmt(bp_gap) + ", pooled se " + fmt(bp_se) + ")";
    return o;
}

Outcome utilization_vs_w() {
    SimulationConfig c;
    c.nodes = 25;
    c.connection_probability = 0.125;
    c.policy = {RoutingPolicy::fixed_alternate, 3, AssignmentPolicy::first_fit};
    c.traffic = TrafficKind::exponential;
    c.load = {LoadMode::per_pair, 0.2};
    c.horizon = 200.0;
    const auto seeds = seed_range(1, 10);
    std::vector<double> util;
    for (std::uint32_t w : {16u, 32u, 48u, 64u}) {
        c.wavelengths = w;
        util.push_back(replicate(c, seeds).utilization.mean);
    }
    Outcome o;
    o.pass = util[0] > util[1] && util[1] > util[2] && util[2] > util[3];
    o.detail = "utilization W16 " + fmt(util[0]) + ", W32 " + fmt(util[1]) + ", W48 " + fmt(util[2]) + ", W64 " +
               fmt(util[3]);
    return o;
}

Outcome invariant_suite() {
    const auto t0 = Clock::now();
    std::uint64_t violations = 0, decisions = 0, accepted_total = 0;
    std::string first_problem;
    const auto note = [&](const std::string& what) {
        ++violations;
        if (first_problem.empty()) first_problem = what;
    };
    std::set<AssignmentPolicy> policies_seen;

    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        std::mt19937_64 gen(seed);
        const std::size_t n = 10 + gen() % 16;
        const std::uint32_t w = 2 + static_cast<std::uint32_t>(gen() % 7);
        const auto t = generate_random_topology(n, 0.2, w, seed);
        const RwaPolicy policy{static_cast<RoutingPolicy>(gen() % 3), 1 + gen() % 3,
                               static_cast<AssignmentPolicy>(seed % 4)};
        policies_seen.insert(policy.assignment);
        const RouteTable routes(t, policy.routing == RoutingPolicy::fixed ? 1 : policy.k);
        const double q = (seed % 5 == 0) ? 0.0 : static_cast<double>(gen() % 11) / 10.0;
        const auto degree = gen() % 2 ? ConversionDegree::full() : ConversionDegree::limited(1 + gen() % 2);
        const auto placement = place_converters(t, q, PlacementStrategy::random, degree, seed);

        const TrafficModel model{TrafficKind::exponential, 0.3, 1.0};
        auto requests = generate_arrivals(model, all_ordered_pairs(n), 1000.0, seed);
        requests.resize(std::min<std::size_t>(requests.size(), 1000));
        if (requests.size() < 1000) note("seed " + std::to_string(seed) + ": fewer than 1000 requests");

        RunOptions options;
        options.audit = true;
        options.drain = true;
        options.on_decision = [&](const SessionRequest& req, const std::optional<LightpathAssignment>& lp,
                                  const NetworkState& state) {
            ++decisions;
            if (!lp) return;
            ++accepted_total;
            if (lp->route.src() != req.src || lp->route.dst() != req.dst) note("route endpoints differ from request");
            if (auto p = check_assignment(*lp, placement, w)) note(*p);
            if (placement.empty())
                for (auto x : lp->wavelengths)
                    if (x != lp->wavelengths.front()) note("wavelength changes without converters");
            for (std::size_t i = 0; i < lp->route.hops.size(); ++i)
                if (state.owner(lp->route.hops[i], lp->wavelengths[i]) != lp->id) note("slot not owned by new lightpath");
        };
        try {
            const double horizon = requests.back().arrival + 1e-6;
            const auto m = run_requests(t, routes, placement, policy, requests, horizon, 0.0, seed, options);
            if (m.offered != m.accepted + m.blocked) note("conservation");
            if (m.offered != requests.size()) note("offered count differs from request count");
            if (!m.drained_empty || !*m.drained_empty) note("network not empty after draining");
        } catch (const InvariantViolation& e) {
            note(std::string("seed ") + std::to_string(seed) + ": " + e.what());
        }
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = violations == 0 && policies_seen.size() == 4 && secs <= 60.0;
    o.detail = std::to_string(decisions) + " decisions, " + std::to_string(accepted_total) + " accepted, " +
               std::to_string(violations) + " violations" + (first_problem.empty() ? "" : " (first: " + first_problem + ")") +
               "; " + fmt(secs) + " s (limit 60)";
    return o;
}

Outcome assignment_oracle() {
    const auto t0 = Clock::now();
    std::uint64_t checked = 0, mismatches = 0;
    std::mt19937_64 gen(2718);
    const std::vector<ConversionDegree> degrees{ConversionDegree::full(), ConversionDegree::limited(1),
                                                ConversionDegree::limited(2)};
    for (std::uint32_t width = 1; width <= 6; ++width) {
        const Topology t(5, width, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
        // every sub-path of the 5-node path, both directions
        std::vector<Route> routes;
        for (NodeId a = 0; a < 5; ++a)
            for (NodeId b = 0; b < 5; ++b) {
                if (a == b) continue;
                std::vector<NodeId> nodes;
                for (NodeId x = a;; x = a < b ? x + 1 : x - 1) {
                    nodes.push_back(x);
                    if (x == b) break;
                }
                routes.push_back(make_route(t, nodes));
            }
        for (unsigned mask = 0; mask < 32; ++mask) {
            std::vector<NodeId> members;
            for (NodeId v = 0; v < 5; ++v)
                if (mask & (1u << v)) members.push_back(v);
            for (const auto& degree : degrees) {
                const ConverterPlacement placement(5, members, degree);
                for (int pattern = 0; pattern < 100; ++pattern) {
                    // random occupancy of every (link, wavelength) slot
                    NetworkState state(t);
                    const unsigned density = gen() % 90;
                    for (LinkId l = 0; l < 4; ++l)
                        for (std::uint32_t w = 0; w < width; ++w)
                            if (gen() % 100 < density) {
                                const std::vector<NodeId> nodes{t.link(l).a, t.link(l).b};
                                LightpathAssignment lp{no_lightpath, make_route(t, nodes), {w}, {}};
                                state.occupy(lp);
                            }
                    for (const auto& r : routes) {
                        oracle::Instance in;
                        in.width = width;
                        in.full = degree.kind == ConversionDegree::Kind::full;
                        in.range = degree.range;
                        in.converters.insert(members.begin(), members.end());
                        for (std::size_t i = 0; i < r.hops.size(); ++i) {
                            std::vector<bool> row(width);
                            for (std::uint32_t w = 0; w < width; ++w) row[w] = !state.is_free(r.hops[i], w);
                            in.busy.push_back(row);
                            if (i + 1 < r.hops.size()) in.junctions.push_back(r.nodes[i + 1]);
                        }
                        const auto expect = oracle::enumerate_assignments(in);
                        const auto got = segmented_assign(state, r, placement);
                        ++checked;
                        const bool same = expect.has_value() == got.has_value() &&
                                          (!got || (got->wavelengths == expect->wavelengths &&
                                                    got->conversions.size() == expect->conversions));
                        if (!same) ++mismatches;
                    }
                }
            }
        }
    }
    Outcome o;
    o.pass = mismatches == 0;
    o.detail = std::to_string(checked) + " instances, " + std::to_string(mismatches) + " mismatches; " +
               fmt(seconds_since(t0)) + " s";
    return o;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        files[fs::relative(e.path(), root).string()] = os.str();
    }
    return files;
}

Outcome determinism() {
    SweepSpec spec;
    spec.node_counts = {10, 14};
    spec.wavelength_counts = {4, 8};
    spec.conversion_factors = {0.0, 0.5, 1.0};
    spec.connection_probability = 0.25;
    spec.load = {LoadMode::per_pair, 0.4};
    spec.horizon = 50.0;
    spec.seeds = {1, 2, 3};
    spec.policy.assignment = AssignmentPolicy::random;

    const auto base = fs::temp_directory_path() / "wdmsim_acceptance_determinism";
    fs::remove_all(base);
    write_sweep_outputs(run_sweep(spec, 1), base / "a");
    write_sweep_outputs(run_sweep(spec, 4), base / "b");
    const auto a = read_tree(base / "a");
    const auto b = read_tree(base / "b");
    fs::remove_all(base);

    std::size_t differing = 0;
    for (const auto& [name, bytes] : a) {
        const auto it = b.find(name);
        if (it == b.end() || it->second != bytes) ++differing;
    }
    Outcome o;
    o.pass = a.size() == b.size() && differing == 0 && a.count("results.csv") && a.count("aggregate.csv") &&
             a.count("plots/plot.gp");
    o.detail = std::to_string(a.size()) + " files per run, " + std::to_string(differing) + " differ";
    return o;
}

Outcome full_scale() {
    const auto t0 = Clock::now();
    SweepSpec spec;
    spec.node_counts = {100};
    spec.connection_probability = 0.03;
    spec.load = {LoadMode::per_pair, 0.05};
    spec.horizon = 200.0;
    spec.seeds = {1, 2, 3, 4, 5};
    const auto result = run_sweep(spec, std::max(1u, std::thread::hardware_concurrency()));
    const double secs = seconds_since(t0);

    std::map<std::pair<std::uint32_t, TrafficKind>, std::vector<MeanError>> curves;
    for (const auto& r : result.aggregate) curves[std::pair(r.w, r.traffic)].push_back(MeanError{r.bp_mean, r.bp_stderr});
    bool monotone = true;
    std::string summary;
    for (const auto& [key, curve] : curves) {
        std::string why;
        const bool ok = non_increasing_within_se(curve, why);
        monotone = monotone && ok;
        summary += "\n       W" + std::to_string(key.first) + " " + to_string(key.second) + ": BP(0) " +
                   fmt(curve.front().mean) + " BP(1) " + fmt(curve.back().mean) + (ok ? " monotone" : " NOT monotone:" + why);
    }
    Outcome o;
    o.pass = monotone && curves.size() == 8 && secs <= 900.0;
    o.detail = std::to_string(result.rows.size()) + " runs in " + fmt(secs) + " s (limit 900)" + summary;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"erlang-b oracle", erlang_b_oracle},
        {"conversion-factor trend", conversion_trend},
        {"diminishing-returns knee", diminishing_returns},
        {"traffic-model ordering", traffic_ordering},
        {"utilization vs wavelengths", utilization_vs_w},
        {"invariant suite", invariant_suite},
        {"assignment oracle equivalence", assignment_oracle},
        {"determinism", determinism},
        {"full-scale sweep", full_scale},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " C" << id << " " << criteria[i].first << ": " << o.detail
                  << std::endl;
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
