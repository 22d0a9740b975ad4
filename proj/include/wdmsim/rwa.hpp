#pragma once

#include "wdmsim/conversion.hpp"
#include "wdmsim/random.hpp"
#include "wdmsim/topology.hpp"
#include "wdmsim/traffic.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wdmsim {

using LightpathId = std::uint64_t;
inline constexpr LightpathId no_lightpath = 0;

struct Conversion {
    NodeId node;
    std::uint32_t from_w;
    std::uint32_t to_w;

    friend bool operator==(const Conversion&, const Conversion&) = default;
};

/// Route plus the wavelength used on each hop. `id` is set once the
/// lightpath has been established in a NetworkState.
struct LightpathAssignment {
    LightpathId id = no_lightpath;
    Route route;
    std::vector<std::uint32_t> wavelengths;
    std::vector<Conversion> conversions;
};

/// Occupancy of every (link, wavelength) slot. Single writer.
class NetworkState {
public:
    explicit NetworkState(const Topology& t);

    std::size_t link_count() const { return link_count_; }
    std::uint32_t wavelengths() const { return wavelengths_; }

    bool is_free(LinkId link, std::uint32_t w) const { return owners_[slot(link, w)] == no_lightpath; }
    LightpathId owner(LinkId link, std::uint32_t w) const { return owners_[slot(link, w)]; }
    /// Number of links on which wavelength `w` is busy.
    std::uint64_t usage(std::uint32_t w) const { return usage_[w]; }
    std::size_t busy_slots() const { return busy_; }
    std::size_t active_lightpaths() const { return active_; }
    bool all_free() const { return busy_ == 0; }

    /// Claims every (hop, wavelength) slot of `lp` and assigns it a fresh id.
    /// Throws InvariantViolation, leaving the state untouched, if any slot is
    /// already taken.
    LightpathId occupy(LightpathAssignment& lp);

    /// Frees the slots of `lp`. Throws InvariantViolation, leaving the state
    /// untouched, if any slot is not owned by lp.id.
    void release(const LightpathAssignment& lp);

    friend bool operator==(const NetworkState& a, const NetworkState& b) {
        return a.owners_ == b.owners_ && a.usage_ == b.usage_ && a.busy_ == b.busy_ && a.active_ == b.active_;
    }

private:
    std::size_t slot(LinkId link, std::uint32_t w) const { return static_cast<std::size_t>(link) * wavelengths_ + w; }

    std::size_t link_count_;
    std::uint32_t wavelengths_;
    std::vector<LightpathId> owners_;
    std::vector<std::uint64_t> usage_;
    std::size_t busy_ = 0;
    std::size_t active_ = 0;
    LightpathId next_id_ = 1;
};

enum class RoutingPolicy { fixed, fixed_alternate, exhaust };
enum class AssignmentPolicy { first_fit, most_used, least_used, random };

struct RwaPolicy {
    RoutingPolicy routing = RoutingPolicy::fixed_alternate;
    std::size_t k = 3;
    AssignmentPolicy assignment = AssignmentPolicy::first_fit;
};

/// Wavelengths free on every hop of `route`, ascending.
std::vector<std::uint32_t> common_free_wavelengths(const NetworkState& state, const Route& route);

/// Single wavelength for the whole route, or nullopt when no wavelength is
/// free end to end. RANDOM draws from `decisions`, which must then be set.
std::optional<std::uint32_t> continuity_assign(const NetworkState& state, const Route& route,
                                               AssignmentPolicy policy, Rng* decisions = nullptr);

/// Per-hop wavelengths that may change only at converter nodes within the
/// conversion degree. Picks the fewest conversions, then the
/// lexicographically smallest wavelength vector. With no converters this is
/// first-fit under wavelength continuity.
std::optional<LightpathAssignment> segmented_assign(const NetworkState& state, const Route& route,
                                                    const ConverterPlacement& placement);

/// Routes and assigns one request and, on success, occupies its slots.
/// On failure the state is left untouched. `routes` is the precomputed
/// candidate list for (req.src, req.dst); EXHAUST searches the live state
/// and uses `routes` only as a fallback.
std::optional<LightpathAssignment> attempt_establish(NetworkState& state, const Topology& topology,
                                                     const SessionRequest& req, std::span<const Route> routes,
                                                     const ConverterPlacement& placement, const RwaPolicy& policy,
                                                     Rng& decisions);

/// Frees an established lightpath. Throws InvariantViolation on ownership
/// mismatch (never established, or already released).
void release(NetworkState& state, const LightpathAssignment& lp);

/// Checks that `lp` is internally consistent: one wavelength per hop, each
/// change happening at a node allowed to convert it, and the conversion
/// list matching the changes. Returns a description of the first problem.
std::optional<std::string> check_assignment(const LightpathAssignment& lp, const ConverterPlacement& placement,
                                            std::uint32_t wavelengths);

std::string to_string(RoutingPolicy p);
RoutingPolicy parse_routing_policy(const std::string& text);
std::string to_string(AssignmentPolicy p);
AssignmentPolicy parse_assignment_policy(const std::string& text);

}  // namespace wdmsim
