// Littlewood-Paley blocks, Besov norms, Bony paraproducts and the smooth
// high/low frequency projections.
#pragma once

#include "mhd/spectral.hpp"

#include <vector>

namespace mhd {

// smooth step: 0 for x <= 0, 1 for x >= 1
double smooth_step(double x);
// ball cutoff: 1 on [0, 3/4], 0 beyond 4/3
double chi_profile(double r);
// annulus profile chi(r/2) - chi(r), supported in [3/4, 8/3]
double rho_profile(double r);
// high-pass profile: 0 on [0, 1/2], 1 on [1, inf); low = 1 - high
double high_profile(double r);
double low_profile(double r);

class LPConfig {
public:
    explicit LPConfig(const Grid& g);

    const Grid& grid() const { return *g_; }
    int j_max() const { return jmax_; }
    // weight array of block j, j in [-1, j_max]
    const Real2D& weight(int j) const;
    int nblocks() const { return jmax_ + 2; }

private:
    const Grid* g_;
    int jmax_;
    std::vector<Real2D> w_;
};

Coeffs lp_block(const LPConfig& lp, const Coeffs& f, int j);
Vec2 lp_block(const LPConfig& lp, const Vec2& f, int j);
Coeffs low_cutoff(const LPConfig& lp, const Coeffs& f, int i);  // S_i = sum_{j <= i-1} Delta_j
Vec2 low_cutoff(const LPConfig& lp, const Vec2& f, int i);

// q <= 0 means q = infinity; likewise p <= 0
double besov_norm(const LPConfig& lp, const Coeffs& f, double s, double p, double q);
double besov_norm(const LPConfig& lp, const Vec2& f, double s, double p, double q);
double lp_norm(const Grid& g, const Coeffs& f, double p);  // physical-space L^p, p <= 0 is sup
double lp_norm(const Grid& g, const Vec2& f, double p);    // of the Euclidean magnitude

Coeffs freq_project(const Grid& g, const Coeffs& f, double lambda, bool high);
Vec2 freq_project(const Grid& g, const Vec2& f, double lambda, bool high);
Real2D low_symbol(const Grid& g, double lambda);

struct ScalarTriple {
    Coeffs lt, gt, res;
};
struct TensorTriple {
    Mat2 lt, gt, res;
};

ScalarTriple bony_decompose(const LPConfig& lp, const Coeffs& f, const Coeffs& h);
// flavor plain gives the tensor (f_i g_j) pieces; symm/anti symmetrize them
TensorTriple bony_decompose(const LPConfig& lp, const Vec2& f, const Vec2& h, Flavor fl);
// vector-tensor pieces (f_k T_ij) are not needed; matrix entries use the scalar form

Mat2 para_lt(const LPConfig& lp, const Vec2& f, const Vec2& h, Flavor fl);
Coeffs resonant(const LPConfig& lp, const Coeffs& f, const Coeffs& h);
// spatial mean of the resonant product (equals the mean of the full product)
double resonant_mean(const Coeffs& f, const Coeffs& h);

// block offset N1 for which Delta_m(f < g) only sees |j - m| <= N1
int paraproduct_block_reach();

}  // namespace mhd
