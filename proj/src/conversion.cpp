#include "wdmsim/conversion.hpp"

#include "wdmsim/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace wdmsim {

ConversionDegree ConversionDegree::limited(std::uint32_t d) {
    if (d < 1) throw std::invalid_argument("limited conversion range must be >= 1");
    return {Kind::limited, d};
}

ConverterPlacement::ConverterPlacement(std::size_t node_count, ConversionDegree degree)
    : member_(node_count, false), degree_(degree) {}

ConverterPlacement::ConverterPlacement(std::size_t node_count, std::span<const NodeId> nodes,
                                       ConversionDegree degree)
    : member_(node_count, false), degree_(degree) {
    if (degree.kind == ConversionDegree::Kind::limited && degree.range < 1)
        throw std::invalid_argument("limited conversion range must be >= 1");
    for (NodeId n : nodes) {
        if (n >= node_count) throw std::invalid_argument("converter node out of range");
        if (!member_[n]) {
            member_[n] = true;
            ++count_;
        }
    }
}

std::vector<NodeId> ConverterPlacement::nodes() const {
    std::vector<NodeId> out;
    out.reserve(count_);
    for (NodeId n = 0; n < member_.size(); ++n)
        if (member_[n]) out.push_back(n);
    return out;
}

std::size_t converter_count(double q, std::size_t node_count) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("conversion factor must be in [0,1]");
    // The epsilon absorbs representation error in products like 0.3 * 25.
    const double k = std::floor(q * static_cast<double>(node_count) + 0.5 + 1e-9);
    return std::min(node_count, static_cast<std::size_t>(k));
}

namespace {

std::vector<NodeId> ranked(std::size_t n, const auto& score) {
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return score(a) > score(b); });
    return order;
}

}  // namespace

ConverterPlacement place_converters(const Topology& t, double q, PlacementStrategy strategy,
                                    ConversionDegree degree, std::uint64_t seed,
                                    std::span<const std::uint64_t> transit) {
    const std::size_t n = t.node_count();
    const std::size_t k = converter_count(q, n);

    std::vector<NodeId> order;
    switch (strategy) {
    case PlacementStrategy::random: {
        order.resize(n);
        std::iota(order.begin(), order.end(), NodeId{0});
        Rng rng(derive_seed(seed, Stream::placement, n));
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto j = i + uniform_index(rng, n - i);
            std::swap(order[i], order[j]);
        }
        break;
    }
    case PlacementStrategy::degree_rank:
        order = ranked(n, [&](NodeId v) { return t.degree(v); });
        break;
    case PlacementStrategy::transit_rank:
        if (transit.size() != n)
            throw std::invalid_argument("transit placement needs one transit count per node");
        order = ranked(n, [&](NodeId v) { return transit[v]; });
        break;
    }
    order.resize(k);
    return ConverterPlacement(n, order, degree);
}

bool can_convert(const ConverterPlacement& p, NodeId node, std::uint32_t from_w, std::uint32_t to_w) {
    if (from_w == to_w) return true;
    if (!p.contains(node)) return false;
    if (p.degree().kind == ConversionDegree::Kind::full) return true;
    const auto diff = from_w > to_w ? from_w - to_w : to_w - from_w;
    return diff <= p.degree().range;
}

void write_placement(std::ostream& os, const ConverterPlacement& p) {
    for (NodeId n : p.nodes()) os << n << '\n';
}

std::string to_string(PlacementStrategy s) {
    switch (s) {
    case PlacementStrategy::random: return "random";
    case PlacementStrategy::degree_rank: return "degree";
    case PlacementStrategy::transit_rank: return "transit";
    }
    return "?";
}

PlacementStrategy parse_placement_strategy(const std::string& text) {
    if (text == "random") return PlacementStrategy::random;
    if (text == "degree") return PlacementStrategy::degree_rank;
    if (text == "transit") return PlacementStrategy::transit_rank;
    throw std::invalid_argument("unknown placement strategy '" + text + "'");
}

}  // namespace wdmsim
