#include "mhd/ratios.hpp"

#include "mhd/lp.hpp"
#include "mhd/noise.hpp"
#include "mhd/renorm.hpp"

#include <cmath>

namespace mhd {

namespace {

constexpr double INF = 0;  // besov_norm reads p, q <= 0 as infinity

double hdot(const Grid& g, const Coeffs& f, double s) { return norm_hdot(g, Vec2{{f, Coeffs::Zero(f.rows(), f.cols())}}, s); }

// index of the ratio, then its value for one sample pair
std::vector<std::pair<const char*, double>> one_sample(const LPConfig& lp, std::uint64_t seed) {
    const Grid& g = lp.grid();
    double band = g.n / 4.0;
    // decay between 0.5 and 2 so rough and smooth samples both show up
    double df = 0.5 + 1.5 * ((mix64(seed) >> 11) * 0x1.0p-53);
    double dh = 0.5 + 1.5 * ((mix64(seed + 1) >> 11) * 0x1.0p-53);
    Coeffs f = random_scalar(g, mix64(seed + 2), band, df);
    Coeffs h = random_scalar(g, mix64(seed + 3), band, dh);
    ScalarTriple p = bony_decompose(lp, f, h);
    auto hs = [&](const Coeffs& c, double s) { return besov_norm(lp, c, s, 2, 2); };
    auto cs = [&](const Coeffs& c, double s) { return besov_norm(lp, c, s, INF, INF); };
    double lam = g.n / 8.0;

    std::vector<std::pair<const char*, double>> r;
    // f < h in H^{b-a} by f in L2, h in C^b, a = 1/2, b = 1
    r.push_back({"lt_l2", hs(p.lt, 0.5) / (lp_norm(g, f, 2) * cs(h, 1.0))});
    // f > h in H^a by f in H^a, h in L^inf, a = 1/2
    r.push_back({"gt_linf", hs(p.gt, 0.5) / (hs(f, 0.5) * lp_norm(g, h, INF))});
    // negative regularity on the low factor: a = -1/2, b = 3/4
    r.push_back({"lt_negative", hs(p.lt, 0.25) / (hs(f, -0.5) * cs(h, 0.75))});
    // negative regularity on the high factor: a = 3/4, b = -1/2
    r.push_back({"gt_negative", hs(p.gt, 0.25) / (hs(f, 0.75) * cs(h, -0.5))});
    // resonant term, a + b = 1/4 > 0
    r.push_back({"resonant", hs(p.res, 0.25) / (hs(f, 0.75) * cs(h, -0.5))});
    // homogeneous product, s1 = s2 = 3/4
    r.push_back({"product_hdot", hdot(g, product(g, f, h), 0.5) / (hdot(g, f, 0.75) * hdot(g, h, 0.75))});
    double l4 = lp_norm(g, f, 4), l2 = lp_norm(g, f, 2);
    r.push_back({"l4_by_b_half_4_2", l4 / std::sqrt(l2 * besov_norm(lp, f, 0.5, 4, 2))});
    r.push_back({"l4_by_b_0_inf_2", l4 / std::sqrt(l2 * besov_norm(lp, f, 0.0, INF, 2))});
    // smoothing of the projections, a = 0, b = 1
    r.push_back({"low_smoothing", besov_norm(lp, freq_project(g, f, lam, false), 1, 2, 2) / (lam * besov_norm(lp, f, 0, 2, 2))});
    r.push_back({"high_smoothing", besov_norm(lp, freq_project(g, f, lam, true), 0, 2, 2) / (besov_norm(lp, f, 1, 2, 2) / lam)});
    return r;
}

}  // namespace

std::vector<RatioStat> inequality_ratios(int n, int samples, std::uint64_t seed, int threads) {
    Grid g(n);
    LPConfig lp(g);
    std::vector<std::vector<std::pair<const char*, double>>> all(samples);
    parallel_for(samples, threads, [&](int s) { all[s] = one_sample(lp, seed + 4 * static_cast<std::uint64_t>(s)); });
    std::vector<RatioStat> out;
    for (std::size_t k = 0; k < all.front().size(); ++k) {
        RatioStat st{all.front()[k].first, 0, 0, samples, n};
        for (auto& v : all) {
            st.max = std::max(st.max, v[k].second);
            st.mean += v[k].second / samples;
        }
        out.push_back(st);
    }
    return out;
}

}  // namespace mhd
