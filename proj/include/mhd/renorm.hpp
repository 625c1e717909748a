// Enhanced noise: the 4x4 gradient matrix of the noise pair, its resolvent
// image, the renormalization constant and Monte Carlo checks of the
// zeroth-chaos structure of the resonant product.
#pragma once

#include "mhd/lp.hpp"
#include "mhd/noise.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mhd {

// [[symm grad xu, anti grad xb], [-anti grad xb, -symm grad xu]]
Mat4 nabla_spec(const Grid& g, const Vec2& xu, const Vec2& xb);

// sum_{k != 0} 1/4 low(|k|/lam)^2 (1 - e^{-2 nu |k|^2 t}) / nu / (nu |k|^2 / 2 + 1)
double r_lambda(double lambda, double t, double nu);
// the same sum restricted to the noise modes carried by grid g
double r_lambda_grid(const Grid& g, double lambda, double t, double nu);

struct EnhancedNoise {
    Mat4 grad_spec;  // nabla_spec of the mollified noise
    Mat4 resolvent;  // (nu |k|^2/2 + 1)^{-1} grad_spec
    Mat4 resonant;   // grad_spec o resolvent as a matrix product, minus r Id
    double lambda = 0, t = 0, r_value = 0;
};

// resonant product of two 4x4 fields: (A o B)_ij = sum_k A_ik o B_kj
Mat4 resonant_matrix(const LPConfig& lp, const Mat4& a, const Mat4& b);
Coeffs resonant_entry(const LPConfig& lp, const Mat4& a, const Mat4& b, int i, int j);
// spatial means of the same 16 entries (mean of a resonant product = mean of the product)
std::array<std::array<double, 4>, 4> resonant_means(const Mat4& a, const Mat4& b);
Mat4 resolvent(const Grid& g, const Mat4& m, double nu);
EnhancedNoise enhanced_noise(const LPConfig& lp, const NoiseState& s, double lambda);

// Fresh stationary-from-zero sample at time t: one exact OU step from F = 0.
NoiseState sample_noise_at(const Grid& g, double nu, double t, std::uint64_t seed);

struct EntryStat {
    double mean = 0, stderr_ = 0, target = 0, z = 0;
};
struct ChaosReport {
    double lambda = 0, t = 0, nu = 0, r_value = 0;
    int samples = 0, n = 0;
    EntryStat entry[4][4];  // unrenormalized grad_spec o resolvent
    bool pass = false;      // every |z| < 5
    std::string to_json() const;
};

// spatial-plus-ensemble means of each entry; parallel over samples with
// an order-fixed reduction
ChaosReport chaos_diagnostics(int samples, double lambda, double t, double nu, int n, std::uint64_t seed,
                              int threads = 1);

// per-block energies E||Delta_m F||^2 of the renormalized (4,4) entry
std::vector<double> block_variance_44(int samples, double lambda, double t, double nu, int n,
                                      std::uint64_t seed, int threads = 1);

// sum_m 2^{-2 kappa m} E||Delta_m (F_{lam_l} - F_{lam_{l+1}})||^2 along a lambda list,
// coupled through a common noise sample; F is the renormalized (4,4) entry
std::vector<double> cauchy_differences_44(int samples, const std::vector<double>& lambdas, double kappa, double t,
                                          double nu, int n, std::uint64_t seed, int threads = 1);

// CSV table lambda,t,r over a grid
std::string r_lambda_csv(const std::vector<double>& lambdas, const std::vector<double>& times, double nu);

// run fn(i) for i in [0, count) on up to `threads` workers
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace mhd
