#include "mhd/renorm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mhd {

Mat4 nabla_spec(const Grid& g, const Vec2& xu, const Vec2& xb) {
    auto su = grad_decompose(g, xu).first;
    auto ab = grad_decompose(g, xb).second;
    Mat4 m = Mat4::zeros(g);
    m.set_block(0, 0, su);
    m.set_block(0, 1, ab);
    m.set_block(1, 0, -1.0 * ab);
    m.set_block(1, 1, -1.0 * su);
    return m;
}

namespace {
// one lattice term of the constant, q = |k|^2
double r_term(double q, double lambda, double t, double nu) {
    double l = low_profile(std::sqrt(q) / lambda);
    if (l == 0) return 0;
    double growth = nu > 0 ? -std::expm1(-2 * nu * q * t) / nu : 2 * q * t;
    return 0.25 * l * l * growth / (0.5 * nu * q + 1);
}

void check_args(double lambda, double t, double nu) {
    if (!(lambda >= 1)) throw std::invalid_argument("r_lambda: lambda must be >= 1");
    if (t < 0) throw std::invalid_argument("r_lambda: negative time");
    if (nu < 0) throw std::invalid_argument("r_lambda: negative diffusivity");
}
}  // namespace

double r_lambda(double lambda, double t, double nu) {
    check_args(lambda, t, nu);
    if (t == 0) return 0;
    // low_profile vanishes for |k| >= lambda; rotations by 90 degrees map the
    // quadrant k1 > 0, k2 >= 0 onto the rest of the punctured lattice
    const int kmax = int(std::ceil(lambda));
    long double s = 0;  // ~lambda^2 terms; a double sum drifts past 1e-14
    for (int a = 1; a <= kmax; ++a)
        for (int b = 0; b <= kmax; ++b) s += r_term(double(a) * a + double(b) * b, lambda, t, nu);
    return double(4 * s);
}

double r_lambda_grid(const Grid& g, double lambda, double t, double nu) {
    check_args(lambda, t, nu);
    if (t == 0) return 0;
    long double s = 0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            if (g.live(i, j) && g.ksq(i, j) > 0) s += r_term(g.ksq(i, j), lambda, t, nu);
    return double(s);
}

Mat4 resolvent(const Grid& g, const Mat4& m, double nu) {
    Real2D sym = 1.0 / (0.5 * nu * g.ksq + 1.0);
    Mat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = multiply_symbol(m(i, j), sym);
    return out;
}

Coeffs resonant_entry(const LPConfig& lp, const Mat4& a, const Mat4& b, int i, int j) {
    Coeffs acc = lp.grid().zeros();
    for (int k = 0; k < 4; ++k) acc += resonant(lp, a(i, k), b(k, j));
    return acc;
}

Mat4 resonant_matrix(const LPConfig& lp, const Mat4& a, const Mat4& b) {
    Mat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = resonant_entry(lp, a, b, i, j);
    return out;
}

std::array<std::array<double, 4>, 4> resonant_means(const Mat4& a, const Mat4& b) {
    std::array<std::array<double, 4>, 4> m{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) m[i][j] += resonant_mean(a(i, k), b(k, j));
    return m;
}

EnhancedNoise enhanced_noise(const LPConfig& lp, const NoiseState& s, double lambda) {
    const Grid& g = lp.grid();
    EnhancedNoise e;
    e.lambda = lambda;
    e.t = s.t;
    e.r_value = r_lambda_grid(g, lambda, s.t, s.nu);
    auto [xu, xb] = noise_fields(s, lambda);
    e.grad_spec = nabla_spec(g, xu, xb);
    e.resolvent = resolvent(g, e.grad_spec, s.nu);
    e.resonant = resonant_matrix(lp, e.grad_spec, e.resolvent);
    for (int i = 0; i < 4; ++i) e.resonant(i, i)(0, 0) -= e.r_value;
    return e;
}

NoiseState sample_noise_at(const Grid& g, double nu, double t, std::uint64_t seed) {
    NoiseState s(g, nu, seed);
    if (t > 0) ou_step(s, t);
    return s;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += threads) fn(i);
        });
    for (auto& th : pool) th.join();
}

namespace {
std::uint64_t sample_seed(std::uint64_t seed, int idx) { return mix64(seed ^ mix64(std::uint64_t(idx) + 1)); }

// renormalized (4,4) entry for one sample
Coeffs entry44(const LPConfig& lp, const NoiseState& s, double lambda) {
    const Grid& g = lp.grid();
    auto [xu, xb] = noise_fields(s, lambda);
    Mat4 gs = nabla_spec(g, xu, xb);
    Mat4 rs = resolvent(g, gs, s.nu);
    Coeffs f = resonant_entry(lp, gs, rs, 3, 3);
    f(0, 0) -= r_lambda_grid(g, lambda, s.t, s.nu);
    return f;
}
}  // namespace

ChaosReport chaos_diagnostics(int samples, double lambda, double t, double nu, int n, std::uint64_t seed,
                              int threads) {
    if (samples < 100) throw std::invalid_argument("chaos_diagnostics: need at least 100 samples");
    Grid g(n);
    std::vector<std::array<std::array<double, 4>, 4>> per(samples);
    parallel_for(samples, threads, [&](int idx) {
        NoiseState s = sample_noise_at(g, nu, t, sample_seed(seed, idx));
        auto [xu, xb] = noise_fields(s, lambda);
        Mat4 gs = nabla_spec(g, xu, xb);
        per[idx] = resonant_means(gs, resolvent(g, gs, nu));
    });
    ChaosReport rep;
    rep.lambda = lambda;
    rep.t = t;
    rep.nu = nu;
    rep.samples = samples;
    rep.n = n;
    rep.r_value = r_lambda_grid(g, lambda, t, nu);
    rep.pass = true;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s1 = 0, s2 = 0;
            for (const auto& p : per) {
                s1 += p[i][j];
                s2 += p[i][j] * p[i][j];
            }
            EntryStat& e = rep.entry[i][j];
            e.mean = s1 / samples;
            double var = std::max(0.0, (s2 - samples * e.mean * e.mean) / (samples - 1));
            e.stderr_ = std::sqrt(var / samples);
            e.target = i == j ? rep.r_value : 0.0;
            double d = e.mean - e.target;
            e.z = e.stderr_ > 0 ? d / e.stderr_ : (std::abs(d) < 1e-12 * (1 + std::abs(e.target)) ? 0.0 : INFINITY);
            if (!(std::abs(e.z) < 5)) rep.pass = false;
        }
    return rep;
}

std::string ChaosReport::to_json() const {
    nlohmann::json j = {{"lambda", lambda}, {"t", t}, {"nu", nu}, {"r", r_value},
                        {"samples", samples}, {"n", n}, {"pass", pass}};
    nlohmann::json rows = nlohmann::json::array();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const EntryStat& e = entry[a][b];
            rows.push_back({{"i", a}, {"j", b}, {"mean", e.mean}, {"stderr", e.stderr_}, {"r_lambda", e.target},
                            {"z_score", std::isfinite(e.z) ? nlohmann::json(e.z) : nlohmann::json("inf")}});
        }
    j["entries"] = rows;
    return j.dump(2);
}

std::vector<double> block_variance_44(int samples, double lambda, double t, double nu, int n, std::uint64_t seed,
                                      int threads) {
    Grid g(n);
    LPConfig lp(g);
    const int nb = lp.nblocks();
    std::vector<std::vector<double>> per(samples, std::vector<double>(nb));
    parallel_for(samples, threads, [&](int idx) {
        NoiseState s = sample_noise_at(g, nu, t, sample_seed(seed, idx));
        Coeffs f = entry44(lp, s, lambda);
        for (int m = -1; m <= lp.j_max(); ++m) {
            Coeffs b = lp_block(lp, f, m);
            per[idx][m + 1] = inner(b, b);
        }
    });
    std::vector<double> out(nb, 0.0);
    for (const auto& p : per)
        for (int k = 0; k < nb; ++k) out[k] += p[k] / samples;
    return out;
}

std::vector<double> cauchy_differences_44(int samples, const std::vector<double>& lambdas, double kappa, double t,
                                          double nu, int n, std::uint64_t seed, int threads) {
    if (lambdas.size() < 2) throw std::invalid_argument("cauchy_differences_44: need two lambdas");
    Grid g(n);
    LPConfig lp(g);
    const std::size_t nd = lambdas.size() - 1;
    std::vector<std::vector<double>> per(samples, std::vector<double>(nd));
    parallel_for(samples, threads, [&](int idx) {
        NoiseState s = sample_noise_at(g, nu, t, sample_seed(seed, idx));
        Coeffs prev = entry44(lp, s, lambdas[0]);
        for (std::size_t l = 0; l < nd; ++l) {
            Coeffs next = entry44(lp, s, lambdas[l + 1]);
            Coeffs d = next - prev;
            double acc = 0;
            for (int m = -1; m <= lp.j_max(); ++m) {
                Coeffs b = lp_block(lp, d, m);
                acc += std::pow(2.0, -2 * kappa * m) * inner(b, b);
            }
            per[idx][l] = acc;
            prev = std::move(next);
        }
    });
    std::vector<double> out(nd, 0.0);
    for (const auto& p : per)
        for (std::size_t k = 0; k < nd; ++k) out[k] += p[k] / samples;
    return out;
}

std::string r_lambda_csv(const std::vector<double>& lambdas, const std::vector<double>& times, double nu) {
    std::ostringstream os;
    os << "lambda,t,r\n";
    char buf[96];
    for (double l : lambdas)
        for (double t : times) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", l, t, r_lambda(l, t, nu));
            os << buf;
        }
    return os.str();
}

}  // namespace mhd
