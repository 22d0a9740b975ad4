#pragma once

#include "wdmsim/topology.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wdmsim {

/// Full converters shift any wavelength to any other; limited ones shift by
/// at most `range` indices.
struct ConversionDegree {
    enum class Kind { full, limited };
    Kind kind = Kind::full;
    std::uint32_t range = 0;

    static ConversionDegree full() { return {Kind::full, 0}; }
    static ConversionDegree limited(std::uint32_t d);
};

enum class PlacementStrategy { random, degree_rank, transit_rank };

class ConverterPlacement {
public:
    /// Empty placement: no node converts.
    explicit ConverterPlacement(std::size_t node_count = 0, ConversionDegree degree = ConversionDegree::full());
    ConverterPlacement(std::size_t node_count, std::span<const NodeId> nodes, ConversionDegree degree);

    bool contains(NodeId node) const { return node < member_.size() && member_[node]; }
    /// Converter nodes in ascending order.
    std::vector<NodeId> nodes() const;
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    const ConversionDegree& degree() const { return degree_; }

private:
    std::vector<bool> member_;
    std::size_t count_ = 0;
    ConversionDegree degree_;
};

/// K = round(q * N), halves rounding up.
std::size_t converter_count(double q, std::size_t node_count);

/// Chooses round(q * N) converter nodes. RANDOM takes a prefix of a seeded
/// permutation, so placements for one seed nest as q grows. The rank
/// strategies order by degree or by `transit` count, descending, ties by
/// ascending node id.
ConverterPlacement place_converters(const Topology& t, double q, PlacementStrategy strategy,
                                    ConversionDegree degree, std::uint64_t seed,
                                    std::span<const std::uint64_t> transit = {});

bool can_convert(const ConverterPlacement& p, NodeId node, std::uint32_t from_w, std::uint32_t to_w);

/// One node id per line.
void write_placement(std::ostream& os, const ConverterPlacement& p);

std::string to_string(PlacementStrategy s);
PlacementStrategy parse_placement_strategy(const std::string& text);

}  // namespace wdmsim
