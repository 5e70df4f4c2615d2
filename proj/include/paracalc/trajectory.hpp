#pragma once

#include <string>
#include <vector>

#include "paracalc/grid.hpp"

namespace paracalc {

// Recorded solution: states[l] = u(times[l]); Lu_record[l] = L u at that time (the forcing for exact runs).
struct Trajectory {
    std::string scenario;
    std::vector<double> times;
    std::vector<GridFunction> states;
    std::vector<GridFunction> Lu_record;

    std::size_t size() const { return times.size(); }
};

}  // namespace paracalc
