#pragma once
// CSV writers for sweep / surface / transitions output.  All numeric fields
// are rendered with nine significant digits so outputs are reproducible
// byte-for-byte across worker counts and machines.

#include <ostream>
#include <string>
#include <vector>

#include "mcair/detection.hpp"
#include "mcair/montecarlo.hpp"
#include "mcair/optimize.hpp"

namespace mcair {

// Shortest-width nine-significant-digit rendering ("%.9g").
std::string format_g9(double value);

void write_sweep_csv(std::ostream& os, const std::string& scenario,
                     const std::vector<SweepPoint>& points);

void write_surface_csv(std::ostream& os, const Surface& surface);

void write_transitions_csv(std::ostream& os, const TransitionTable& table);

void write_transitions_csv(std::ostream& os, const EmpiricalTransitions& table);

}  // namespace mcair
