#include "wdmsim/traffic.hpp"

#include "wdmsim/format.hpp"
#include "wdmsim/random.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace wdmsim {

double per_route_load(double total, std::uint64_t route_count) {
    if (route_count == 0) throw std::invalid_argument("per_route_load: route_count must be >= 1");
    return total / static_cast<double>(route_count);
}

double per_pair_load(const LoadSpec& spec, std::size_t node_count) {
    if (spec.value < 0.0) throw std::invalid_argument("load must be >= 0");
    if (spec.mode == LoadMode::per_pair) return spec.value;
    return per_route_load(spec.value, route_count(node_count, PairMode::ordered));
}

std::vector<NodePair> all_ordered_pairs(std::size_t node_count) {
    std::vector<NodePair> pairs;
    pairs.reserve(node_count * (node_count > 0 ? node_count - 1 : 0));
    for (NodeId s = 0; s < node_count; ++s)
        for (NodeId d = 0; d < node_count; ++d)
            if (s != d) pairs.push_back({s, d});
    return pairs;
}

std::vector<SessionRequest> generate_arrivals(const TrafficModel& model, std::span<const NodePair> pairs,
                                              double horizon, std::uint64_t seed,
                                              const ArrivalOptions& options) {
    if (pairs.empty()) throw std::invalid_argument("generate_arrivals: no source/destination pairs");
    if (!(horizon > 0.0)) throw std::invalid_argument("generate_arrivals: horizon must be positive");
    if (!(model.offered_load > 0.0)) throw std::invalid_argument("offered load must be positive");
    if (!(model.mean_holding > 0.0)) throw std::invalid_argument("mean holding time must be positive");

    const double rate = model.arrival_rate();
    const double mean_gap = 1.0 / rate;
    std::vector<SessionRequest> out;
    out.reserve(static_cast<std::size_t>(static_cast<double>(pairs.size()) * horizon * rate * 1.05) + 16);

    for (std::size_t index = 0; index < pairs.size(); ++index) {
        const auto [src, dst] = pairs[index];
        if (src == dst) throw std::invalid_argument("generate_arrivals: pair with src == dst");
        Rng rng(derive_seed(seed, Stream::traffic, index));

        if (model.kind == TrafficKind::exponential) {
            double t = exponential(rng, mean_gap);
            while (t < horizon) {
                double holding = exponential(rng, model.mean_holding);
                while (!(holding > 0.0)) holding = exponential(rng, model.mean_holding);
                out.push_back({src, dst, t, holding});
                t += exponential(rng, mean_gap);
            }
        } else {
            const double phase = options.cbr_phase ? *options.cbr_phase : uniform01(rng) * mean_gap;
            for (std::uint64_t k = 0;; ++k) {
                const double t = phase + static_cast<double>(k) * mean_gap;
                if (t >= horizon) break;
                out.push_back({src, dst, t, model.mean_holding});
            }
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const SessionRequest& a, const SessionRequest& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    });
    return out;
}

void write_request_trace(std::ostream& os, std::span<const SessionRequest> requests) {
    os << "arrival,src,dst,holding\n";
    for (const auto& r : requests)
        os << format_double(r.arrival) << ',' << r.src << ',' << r.dst << ',' << format_double(r.holding) << '\n';
}

std::string to_string(TrafficKind kind) { return kind == TrafficKind::cbr ? "cbr" : "exp"; }

TrafficKind parse_traffic_kind(const std::string& text) {
    if (text == "cbr") return TrafficKind::cbr;
    if (text == "exp" || text == "exponential") return TrafficKind::exponential;
    throw std::invalid_argument("unknown traffic kind '" + text + "'");
}

std::string to_string(LoadMode mode) { return mode == LoadMode::per_pair ? "per_pair" : "total"; }

LoadMode parse_load_mode(const std::string& text) {
    if (text == "per_pair") return LoadMode::per_pair;
    if (text == "total" || text == "total_network") return LoadMode::total_network;
    throw std::invalid_argument("unknown load mode '" + text + "'");
}

}  // namespace wdmsim
