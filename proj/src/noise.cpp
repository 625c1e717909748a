#include "mhd/noise.hpp"

#include "mhd/lp.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

namespace mhd {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterEngine::CounterEngine(std::uint64_t seed, std::uint64_t stream, std::uint64_t step, std::uint64_t mode)
    : key_(mix64(mix64(mix64(mix64(seed) ^ stream) ^ step) ^ mode)) {}

CounterEngine::result_type CounterEngine::operator()() { return mix64(key_ ^ mix64(ctr_++)); }

NoiseState::NoiseState(const Grid& g, double nu_, std::uint64_t seed_, double cutoff)
    : grid(&g), nu(nu_), seed(seed_), mode_cutoff(cutoff < 0 ? g.kabs.maxCoeff() : cutoff), fu(g.zeros()),
      fb(g.zeros()) {
    if (nu < 0) throw std::invalid_argument("noise: negative diffusivity");
}

bool NoiseState::active(int i, int j) const {
    return grid->live(i, j) && grid->ksq(i, j) > 0 && grid->kabs(i, j) <= mode_cutoff;
}

double ou_increment_variance(double nu, double q, double h) {
    double a = nu * q * h;
    if (a == 0) return h;
    return -std::expm1(-2 * a) / (2 * nu * q);
}

void ou_step(NoiseState& s, double h) {
    if (!(h > 0)) throw std::invalid_argument("ou_step: step must be positive");
    const Grid& g = *s.grid;
    const int n = g.n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int k1 = g.wn(i), k2 = g.wn(j);
            // half lattice: k2 > 0, or k2 = 0 and k1 > 0
            if (!(k2 > 0 || (k2 == 0 && k1 > 0)) || !s.active(i, j)) continue;
            double q = g.ksq(i, j);
            double decay = std::exp(-s.nu * q * h);
            double sd = std::sqrt(0.5 * ou_increment_variance(s.nu, q, h));
            std::uint64_t mode = std::uint64_t(j) * n + i;
            for (int c = 0; c < 2; ++c) {
                CounterEngine eng(s.seed, c, s.steps, mode);
                std::normal_distribution<double> nd;
                double re = nd(eng), im = nd(eng);
                Coeffs& f = c == 0 ? s.fu : s.fb;
                cplx v = decay * f(i, j) + sd * cplx(re, im);
                f(i, j) = v;
                f(g.neg(i), g.neg(j)) = -std::conj(v);
            }
        }
    s.t += h;
    ++s.steps;
}

Vec2 noise_field(const NoiseState& s, Channel c, std::optional<double> lambda) {
    const Grid& g = *s.grid;
    const Coeffs& f = s.coeffs(c);
    Vec2 x = Vec2::zeros(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            if (!s.active(i, j)) continue;
            double r = g.kabs(i, j);
            double w = lambda ? low_profile(r / *lambda) : 1.0;
            if (w == 0) continue;
            // e_m = exp(i m.x) m_perp / |m| with m_perp = (m2, -m1)
            cplx a = f(i, j) * (w / r);
            x[0](i, j) = a * g.k2(i, j);
            x[1](i, j) = -a * g.k1(i, j);
        }
    return x;
}

std::pair<Vec2, Vec2> noise_fields(const NoiseState& s, std::optional<double> lambda) {
    return {noise_field(s, Channel::u, lambda), noise_field(s, Channel::b, lambda)};
}

double phi1(double z) {
    if (std::abs(z) < 1e-5) return 1 + z / 2 + z * z / 6 + z * z * z / 24;
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 1e-3) return 0.5 + z / 6 + z * z / 24 + z * z * z / 120 + z * z * z * z / 720;
    return (std::expm1(z) - z) / (z * z);
}

Vec2 q_step(const Grid& g, const Vec2& q, const Vec2& x0, const Vec2& x1, double h, double nu) {
    if (!(h > 0)) throw std::invalid_argument("q_step: step must be positive");
    Vec2 out;
    for (int c = 0; c < 2; ++c) {
        Coeffs r(g.n, g.n);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                double z = -nu * g.ksq(i, j) * h;
                r(i, j) = std::exp(z) * q[c](i, j) +
                          2 * h * (phi1(z) * x0[c](i, j) + phi2(z) * (x1[c](i, j) - x0[c](i, j)));
            }
        out[c] = r;
    }
    return out;
}

namespace {
Vec2 perturbation(const Grid& g, const PerturbationSpec& p) {
    if (p.kind == "zero") return Vec2::zeros(g);
    if (p.kind == "single") {
        if (p.k1 == 0 && p.k2 == 0) throw std::invalid_argument("perturbation: zero mode has no mean-free part");
        if (std::abs(p.k1) >= g.n / 2 || std::abs(p.k2) >= g.n / 2)
            throw std::invalid_argument("perturbation: mode outside the grid");
        double kdot = p.k1 * p.amp1 + p.k2 * p.amp2;
        if (std::abs(kdot) > 1e-12 * (std::abs(p.amp1) + std::abs(p.amp2)) * std::hypot(p.k1, p.k2))
            throw std::invalid_argument("perturbation: single-mode amplitude is not divergence-free");
        Vec2 v = Vec2::zeros(g);
        int i = g.index(p.k1), j = g.index(p.k2);
        v[0](i, j) += p.amp1;
        v[1](i, j) += p.amp2;
        v[0](g.neg(i), g.neg(j)) += p.amp1;
        v[1](g.neg(i), g.neg(j)) += p.amp2;
        return leray_project(g, v);
    }
    if (p.kind == "random") {
        Vec2 v = random_divfree(g, p.seed, p.band);
        double nrm = norm_l2(v);
        return nrm > 0 ? (p.amplitude / nrm) * v : v;
    }
    throw std::invalid_argument("perturbation: unknown kind '" + p.kind + "'");
}
}  // namespace

std::pair<Vec2, Vec2> perturbation_fields(const Grid& g, const PerturbationSpec& u_spec,
                                          const PerturbationSpec& b_spec) {
    return {perturbation(g, u_spec), perturbation(g, b_spec)};
}

void dump_json_lines(const NoiseState& s, std::ostream& os) {
    const Grid& g = *s.grid;
    for (int c = 0; c < 2; ++c) {
        const Coeffs& f = c == 0 ? s.fu : s.fb;
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                int k1 = g.wn(i), k2 = g.wn(j);
                if (!(k2 > 0 || (k2 == 0 && k1 > 0)) || !s.active(i, j)) continue;
                nlohmann::json rec = {{"t", s.t}, {"field", c == 0 ? "u" : "b"}, {"k1", k1}, {"k2", k2},
                                      {"re", f(i, j).real()}, {"im", f(i, j).imag()}};
                os << rec.dump() << '\n';
            }
    }
}

}  // namespace mhd
