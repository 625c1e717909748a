#include "mhd/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace mhd {

double smooth_step(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double chi_profile(double r) { return 1.0 - smooth_step((r - 0.75) / (4.0 / 3.0 - 0.75)); }
double rho_profile(double r) { return chi_profile(0.5 * r) - chi_profile(r); }
double high_profile(double r) { return smooth_step(2.0 * r - 1.0); }
double low_profile(double r) { return 1.0 - high_profile(r); }

LPConfig::LPConfig(const Grid& g) : g_(&g) {
    double kmax = g.kabs.maxCoeff();
    jmax_ = std::max(0, int(std::ceil(std::log2(g.n / 2.0))));
    // enough blocks that chi(2^{-jmax-1} k) = 1 on every grid mode
    while (chi_profile(kmax / std::ldexp(1.0, jmax_ + 1)) < 1.0) ++jmax_;
    for (int j = -1; j <= jmax_; ++j) {
        Real2D w(g.n, g.n);
        for (int b = 0; b < g.n; ++b)
            for (int a = 0; a < g.n; ++a) {
                double r = g.kabs(a, b);
                w(a, b) = g.live(a, b) ? (j < 0 ? chi_profile(r) : rho_profile(std::ldexp(r, -j))) : 0.0;
            }
        w_.push_back(w);
    }
}

const Real2D& LPConfig::weight(int j) const {
    if (j < -1 || j > jmax_) throw std::out_of_range("LP block index out of range");
    return w_[j + 1];
}

Coeffs lp_block(const LPConfig& lp, const Coeffs& f, int j) { return multiply_symbol(f, lp.weight(j)); }
Vec2 lp_block(const LPConfig& lp, const Vec2& f, int j) { return multiply_symbol(f, lp.weight(j)); }

Coeffs low_cutoff(const LPConfig& lp, const Coeffs& f, int i) {
    if (i < 0) throw std::invalid_argument("low_cutoff index must be >= 0");
    Real2D s = Real2D::Zero(f.rows(), f.cols());
    for (int j = -1; j <= std::min(i - 1, lp.j_max()); ++j) s += lp.weight(j);
    return multiply_symbol(f, s);
}
Vec2 low_cutoff(const LPConfig& lp, const Vec2& f, int i) {
    return {{low_cutoff(lp, f[0], i), low_cutoff(lp, f[1], i)}};
}

double lp_norm(const Grid& g, const Coeffs& f, double p) {
    Real2D x = to_physical(g, f).abs();
    if (p <= 0) return x.maxCoeff();
    if (p == 2) return std::sqrt(f.abs2().sum());
    return std::pow(x.pow(p).mean(), 1.0 / p);
}

double lp_norm(const Grid& g, const Vec2& f, double p) {
    if (p == 2) return norm_l2(f);
    Real2D x = (to_physical(g, f[0]).square() + to_physical(g, f[1]).square()).sqrt();
    if (p <= 0) return x.maxCoeff();
    return std::pow(x.pow(p).mean(), 1.0 / p);
}

namespace {
template <class F>
double besov_impl(const LPConfig& lp, const F& f, double s, double p, double q) {
    const Grid& g = lp.grid();
    double acc = 0, sup = 0;
    for (int m = -1; m <= lp.j_max(); ++m) {
        double v = std::pow(2.0, s * m) * lp_norm(g, lp_block(lp, f, m), p);
        if (q <= 0) sup = std::max(sup, v);
        else acc += std::pow(v, q);
    }
    return q <= 0 ? sup : std::pow(acc, 1.0 / q);
}
}  // namespace

double besov_norm(const LPConfig& lp, const Coeffs& f, double s, double p, double q) {
    return besov_impl(lp, f, s, p, q);
}
double besov_norm(const LPConfig& lp, const Vec2& f, double s, double p, double q) {
    return besov_impl(lp, f, s, p, q);
}

Real2D low_symbol(const Grid& g, double lambda) {
    if (lambda <= 0) throw std::invalid_argument("frequency threshold must be positive");
    return g.kabs.unaryExpr([lambda](double r) { return low_profile(r / lambda); });
}

Coeffs freq_project(const Grid& g, const Coeffs& f, double lambda, bool high) {
    Real2D l = low_symbol(g, lambda);
    return high ? multiply_symbol(f, 1.0 - l) : multiply_symbol(f, l);
}
Vec2 freq_project(const Grid& g, const Vec2& f, double lambda, bool high) {
    return {{freq_project(g, f[0], lambda, high), freq_project(g, f[1], lambda, high)}};
}

namespace {
std::vector<Real2D> phys_blocks(const LPConfig& lp, const Coeffs& f) {
    std::vector<Real2D> out;
    for (int j = -1; j <= lp.j_max(); ++j) out.push_back(to_physical(lp.grid(), lp_block(lp, f, j)));
    return out;
}
// running partial sums: low[b] = S_{b-1} f = sum of blocks l <= b-2 (index b+1 in vector)
std::vector<Real2D> phys_lows(const std::vector<Real2D>& blk) {
    std::vector<Real2D> low(blk.size());
    Real2D acc = Real2D::Zero(blk[0].rows(), blk[0].cols());
    for (std::size_t k = 0; k < blk.size(); ++k) {
        // vector index k is block b = k-1; S_{b-1} holds blocks up to b-2 = index k-2
        low[k] = acc;
        if (k >= 1) acc += blk[k - 1];
    }
    return low;
}
}  // namespace

ScalarTriple bony_decompose(const LPConfig& lp, const Coeffs& f, const Coeffs& h) {
    const Grid& g = lp.grid();
    auto bf = phys_blocks(lp, f), bh = phys_blocks(lp, h);
    auto lf = phys_lows(bf), lh = phys_lows(bh);
    const int nb = int(bf.size()), m = g.padded;
    Real2D lt = Real2D::Zero(m, m), gt = lt, res = lt;
    for (int k = 0; k < nb; ++k) {
        lt += lf[k] * bh[k];
        gt += bf[k] * lh[k];
        Real2D near = bh[k];
        if (k > 0) near += bh[k - 1];
        if (k + 1 < nb) near += bh[k + 1];
        res += bf[k] * near;
    }
    return {to_spectral(g, lt), to_spectral(g, gt), to_spectral(g, res)};
}

TensorTriple bony_decompose(const LPConfig& lp, const Vec2& f, const Vec2& h, Flavor fl) {
    const Grid& g = lp.grid();
    std::array<std::vector<Real2D>, 2> bf{phys_blocks(lp, f[0]), phys_blocks(lp, f[1])};
    std::array<std::vector<Real2D>, 2> bh{phys_blocks(lp, h[0]), phys_blocks(lp, h[1])};
    std::array<std::vector<Real2D>, 2> lf{phys_lows(bf[0]), phys_lows(bf[1])};
    std::array<std::vector<Real2D>, 2> lh{phys_lows(bh[0]), phys_lows(bh[1])};
    const int nb = int(bf[0].size()), m = g.padded;
    Real2D z = Real2D::Zero(m, m);
    std::array<std::array<Real2D, 2>, 2> lt{{{z, z}, {z, z}}}, gt = lt, res = lt;
    std::array<Real2D, 2> near;
    for (int k = 0; k < nb; ++k) {
        for (int j = 0; j < 2; ++j) {
            near[j] = bh[j][k];
            if (k > 0) near[j] += bh[j][k - 1];
            if (k + 1 < nb) near[j] += bh[j][k + 1];
        }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                lt[i][j] += lf[i][k] * bh[j][k];
                gt[i][j] += bf[i][k] * lh[j][k];
                res[i][j] += bf[i][k] * near[j];
            }
    }
    auto finish = [&](std::array<std::array<Real2D, 2>, 2>& t) {
        Mat2 out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Real2D e;
                switch (fl) {
                    case Flavor::plain: e = t[i][j]; break;
                    case Flavor::symm: e = 0.5 * (t[i][j] + t[j][i]); break;
                    case Flavor::anti: e = 0.5 * (t[i][j] - t[j][i]); break;
                }
                out(i, j) = to_spectral(g, e);
            }
        return out;
    };
    return {finish(lt), finish(gt), finish(res)};
}

Mat2 para_lt(const LPConfig& lp, const Vec2& f, const Vec2& h, Flavor fl) {
    const Grid& g = lp.grid();
    std::array<std::vector<Real2D>, 2> lf{phys_lows(phys_blocks(lp, f[0])), phys_lows(phys_blocks(lp, f[1]))};
    std::array<std::vector<Real2D>, 2> bh{phys_blocks(lp, h[0]), phys_blocks(lp, h[1])};
    const int nb = int(bh[0].size()), m = g.padded;
    Real2D z = Real2D::Zero(m, m);
    std::array<std::array<Real2D, 2>, 2> t{{{z, z}, {z, z}}};
    for (int k = 0; k < nb; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) t[i][j] += lf[i][k] * bh[j][k];
    Mat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Real2D e = fl == Flavor::plain ? t[i][j]
                     : fl == Flavor::symm  ? Real2D(0.5 * (t[i][j] + t[j][i]))
                                           : Real2D(0.5 * (t[i][j] - t[j][i]));
            out(i, j) = to_spectral(g, e);
        }
    return out;
}

Coeffs resonant(const LPConfig& lp, const Coeffs& f, const Coeffs& h) {
    const Grid& g = lp.grid();
    auto bf = phys_blocks(lp, f), bh = phys_blocks(lp, h);
    const int nb = int(bf.size());
    Real2D res = Real2D::Zero(g.padded, g.padded);
    for (int k = 0; k < nb; ++k) {
        Real2D near = bh[k];
        if (k > 0) near += bh[k - 1];
        if (k + 1 < nb) near += bh[k + 1];
        res += bf[k] * near;
    }
    return to_spectral(g, res);
}

double resonant_mean(const Coeffs& f, const Coeffs& h) {
    // rho_c rho_d vanishes for |c - d| > 1, so the block double sum collapses
    // to the full Parseval pairing of f with the reflection of h
    return inner(f, h);
}

int paraproduct_block_reach() {
    // S_{j-1} f lives in |xi| <= (2/3) 2^j and Delta_j g in [3/4, 8/3] 2^j,
    // so the product meets Delta_m only for -2 <= j - m <= 4
    return 4;
}

}  // namespace mhd
