// Empirical constants of the paraproduct, product, interpolation and
// smoothing bounds: max over random samples of lhs / rhs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mhd {

struct RatioStat {
    std::string id;
    double max = 0, mean = 0;
    int samples = 0, n = 0;
};

// fields are random scalars with |k| <= n/4 and a per-sample spectral decay,
// so the products below are resolved on the grid
std::vector<RatioStat> inequality_ratios(int n, int samples, std::uint64_t seed, int threads = 1);

}  // namespace mhd
