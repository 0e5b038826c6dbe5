#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cell_type.hpp"

namespace cryptsim {

/// Population counts per cell state sampled on a regular time grid.
struct Trajectory {
    std::vector<double> times;
    std::vector<Populations> populations;
    std::uint64_t seed = 0;
    std::string params_digest;

    std::size_t size() const noexcept { return times.size(); }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

} // namespace cryptsim
