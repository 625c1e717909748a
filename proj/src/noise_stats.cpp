#include "mhd/noise.hpp"
#include "mhd/renorm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace mhd {

NoiseStats noise_statistics(int paths, double t, double nu, int n, const std::vector<std::array<int, 2>>& modes,
                            std::uint64_t seed, int threads) {
    if (paths < 2) throw std::invalid_argument("noise_statistics: need at least two paths");
    if (!(t > 0)) throw std::invalid_argument("noise_statistics: t must be positive");
    Grid g(n);
    for (auto& m : modes)
        if ((m[0] == 0 && m[1] == 0) || std::abs(m[0]) > g.kmax() || std::abs(m[1]) > g.kmax())
            throw std::invalid_argument("noise_statistics: mode outside the grid");
    const std::size_t nm = modes.size();
    // per path: |F_u|^2, |F_b|^2, Re F_u conj F_b for each mode
    std::vector<std::vector<double>> per(paths, std::vector<double>(3 * nm));
    parallel_for(paths, threads, [&](int p) {
        NoiseState s(g, nu, mix64(seed ^ mix64(std::uint64_t(p) + 1)));
        ou_step(s, t);
        for (std::size_t k = 0; k < nm; ++k) {
            cplx fu = s.fu(g.index(modes[k][0]), g.index(modes[k][1]));
            cplx fb = s.fb(g.index(modes[k][0]), g.index(modes[k][1]));
            per[p][3 * k] = std::norm(fu);
            per[p][3 * k + 1] = std::norm(fb);
            per[p][3 * k + 2] = (fu * std::conj(fb)).real();
        }
    });
    NoiseStats out;
    out.t = t;
    out.nu = nu;
    out.paths = paths;
    out.n = n;
    out.pass = true;
    const char* names[3] = {"u", "b", "cross"};
    for (std::size_t k = 0; k < nm; ++k) {
        double q = double(modes[k][0]) * modes[k][0] + double(modes[k][1]) * modes[k][1];
        for (int c = 0; c < 3; ++c) {
            double s1 = 0, s2 = 0;
            for (const auto& v : per) {
                s1 += v[3 * k + c];
                s2 += v[3 * k + c] * v[3 * k + c];
            }
            ModeStat m;
            m.what = names[c];
            m.k1 = modes[k][0];
            m.k2 = modes[k][1];
            m.mean = s1 / paths;
            m.se = std::sqrt(std::max(0.0, (s2 - paths * m.mean * m.mean) / (paths - 1)) / paths);
            m.target = c < 2 ? ou_increment_variance(nu, q, t) : 0.0;
            m.z = m.se > 0 ? (m.mean - m.target) / m.se : 0.0;
            if (!(std::abs(m.z) < 3)) out.pass = false;
            out.rows.push_back(m);
        }
    }
    return out;
}

std::string NoiseStats::to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& m : rows)
        rs.push_back({{"what", m.what}, {"k1", m.k1}, {"k2", m.k2}, {"mean", m.mean}, {"stderr", m.se},
                      {"target", m.target}, {"z_score", m.z}});
    nlohmann::json j = {{"t", t}, {"nu", nu}, {"paths", paths}, {"n", n}, {"pass", pass}, {"modes", rs}};
    return j.dump(2);
}

}  // namespace mhd
