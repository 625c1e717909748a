// Fourier-mode Ornstein-Uhlenbeck coefficients of the two stochastic
// convolutions, their mollified fields, the auxiliary Q fields and the
// deterministic perturbation forcing.
#pragma once

#include "mhd/spectral.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mhd {

// Stateless counter-based generator: every draw is a hash of
// (seed, stream, step, mode, draw count). Satisfies UniformRandomBitGenerator.
class CounterEngine {
public:
    using result_type = std::uint64_t;
    CounterEngine(std::uint64_t seed, std::uint64_t stream, std::uint64_t step, std::uint64_t mode);
    result_type operator()();
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

enum class Channel { u = 0, b = 1 };

struct NoiseState {
    NoiseState(const Grid& g, double nu, std::uint64_t seed, double mode_cutoff = -1.0);

    const Grid* grid;
    double t = 0;
    double nu;
    std::uint64_t seed;
    std::uint64_t steps = 0;  // step counter fed to the generator
    double mode_cutoff;       // modes with |m| > cutoff stay zero
    Coeffs fu, fb;            // F(m) with F(-m) = -conj F(m)

    const Coeffs& coeffs(Channel c) const { return c == Channel::u ? fu : fb; }
    bool active(int i, int j) const;  // nonzero live mode within the cutoff
};

// variance of one increment of length h for |m|^2 = q
double ou_increment_variance(double nu, double q, double h);

void ou_step(NoiseState& s, double h);
// X_l = sum_m F_l(m) e_m; lambda > 0 weights each mode by low_profile(|m|/lambda)
Vec2 noise_field(const NoiseState& s, Channel c, std::optional<double> lambda = std::nullopt);
std::pair<Vec2, Vec2> noise_fields(const NoiseState& s, std::optional<double> lambda = std::nullopt);

// (d_t - nu Lap) Q = 2X over one step, X linear in time between x0 and x1
Vec2 q_step(const Grid& g, const Vec2& q, const Vec2& x0, const Vec2& x1, double h, double nu);
// phi-functions (e^z - 1)/z and (e^z - 1 - z)/z^2, series near 0
double phi1(double z);
double phi2(double z);

struct PerturbationSpec {
    std::string kind = "zero";  // zero | single | random
    int k1 = 0, k2 = 0;
    double amp1 = 0, amp2 = 0;  // coefficient vector at (k1,k2) for kind single
    std::uint64_t seed = 0;     // kind random
    double band = 4;
    double amplitude = 0;       // L2 norm of the random field
};
// returns (zeta_u, zeta_b); throws std::invalid_argument for a non-solenoidal single mode
std::pair<Vec2, Vec2> perturbation_fields(const Grid& g, const PerturbationSpec& u_spec,
                                          const PerturbationSpec& b_spec);

// Monte Carlo moments of single modes at time t over independent paths:
// E|F_u|^2 and E|F_b|^2 against the closed-form variance, E Re(F_u conj F_b) against 0
struct ModeStat {
    std::string what;  // "u", "b" or "cross"
    int k1 = 0, k2 = 0;
    double mean = 0, se = 0, target = 0, z = 0;
};
struct NoiseStats {
    double t = 0, nu = 0;
    int paths = 0, n = 0;
    std::vector<ModeStat> rows;
    bool pass = false;  // every |z| < 3
    std::string to_json() const;
};
NoiseStats noise_statistics(int paths, double t, double nu, int n, const std::vector<std::array<int, 2>>& modes,
                            std::uint64_t seed, int threads = 1);

// one JSON object per line per half-lattice mode: t, field, k1, k2, re, im
void dump_json_lines(const NoiseState& s, std::ostream& os);

}  // namespace mhd
