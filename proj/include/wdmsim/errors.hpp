#pragma once

#include <stdexcept>
#include <string>

namespace wdmsim {

/// Raised when simulation state stops satisfying its invariants (double
/// occupancy, releasing a slot the lightpath does not own, ...). Fatal.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace wdmsim
