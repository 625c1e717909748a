#include "mhd/spectral.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace mhd {

Grid::Grid(int n_, double pad) : n(n_), padding(pad) {
    if (n < 4 || n % 2) throw std::invalid_argument("grid size must be even and >= 4");
    if (pad < 1.5) throw std::invalid_argument("padding factor must be >= 3/2");
    padded = int(std::ceil(pad * n));
    if (padded % 2) ++padded;
    k1.resize(n, n);
    k2.resize(n, n);
    live.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            k1(i, j) = wn(i);
            k2(i, j) = wn(j);
            live(i, j) = wn(i) != -n / 2 && wn(j) != -n / 2;
        }
    ksq = k1 * k1 + k2 * k2;
    kabs = ksq.sqrt();
}

Mat2 Mat2::zeros(const Grid& g) {
    Mat2 m;
    for (auto& r : m.c)
        for (auto& e : r) e = g.zeros();
    return m;
}

Mat2 Mat2::transpose() const {
    Mat2 t = *this;
    std::swap(t.c[0][1], t.c[1][0]);
    return t;
}

Mat4 Mat4::zeros(const Grid& g) {
    Mat4 m;
    for (auto& r : m.c)
        for (auto& e : r) e = g.zeros();
    return m;
}

Mat2 Mat4::block(int bi, int bj) const {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.c[i][j] = c[2 * bi + i][2 * bj + j];
    return m;
}

void Mat4::set_block(int bi, int bj, const Mat2& m) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[2 * bi + i][2 * bj + j] = m.c[i][j];
}

Vec2 operator+(const Vec2& a, const Vec2& b) { return {{a[0] + b[0], a[1] + b[1]}}; }
Vec2 operator-(const Vec2& a, const Vec2& b) { return {{a[0] - b[0], a[1] - b[1]}}; }
Vec2 operator*(double s, const Vec2& a) { return {{s * a[0], s * a[1]}}; }

Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r = a;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.c[i][j] += b.c[i][j];
    return r;
}
Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r = a;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.c[i][j] -= b.c[i][j];
    return r;
}
Mat2 operator*(double s, const Mat2& a) {
    Mat2 r = a;
    for (auto& row : r.c)
        for (auto& e : row) e *= s;
    return r;
}
Mat4 operator-(const Mat4& a, const Mat4& b) {
    Mat4 r = a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.c[i][j] -= b.c[i][j];
    return r;
}

double max_imag_residual(const Grid& g, const Coeffs& c) {
    double worst = 0, scale = 0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            worst = std::max(worst, std::abs(c(i, j) - std::conj(c(g.neg(i), g.neg(j)))));
            scale = std::max(scale, std::abs(c(i, j)));
        }
    return scale > 0 ? worst / scale : 0.0;
}

Coeffs hermitian_part(const Grid& g, const Coeffs& c) {
    Coeffs r(g.n, g.n);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            r(i, j) = g.live(i, j) ? 0.5 * (c(i, j) + std::conj(c(g.neg(i), g.neg(j)))) : cplx(0, 0);
    return r;
}

Coeffs deriv(const Grid& g, const Coeffs& c, int dir) {
    const Real2D& k = dir == 0 ? g.k1 : g.k2;
    return c * (cplx(0, 1) * k.cast<cplx>());
}

Coeffs laplacian(const Grid& g, const Coeffs& c) { return c * (-g.ksq).cast<cplx>(); }

Vec2 laplacian(const Grid& g, const Vec2& v) { return {{laplacian(g, v[0]), laplacian(g, v[1])}}; }

Coeffs multiply_symbol(const Coeffs& c, const Real2D& sym) { return c * sym.cast<cplx>(); }

Vec2 multiply_symbol(const Vec2& v, const Real2D& sym) {
    return {{multiply_symbol(v[0], sym), multiply_symbol(v[1], sym)}};
}

Coeffs heat_propagate(const Grid& g, const Coeffs& c, double t, double nu) {
    if (t < 0) throw std::invalid_argument("heat_propagate: negative time");
    if (nu < 0) throw std::invalid_argument("heat_propagate: negative diffusivity");
    return multiply_symbol(c, (-nu * t * g.ksq).exp());
}

Vec2 heat_propagate(const Grid& g, const Vec2& v, double t, double nu) {
    return {{heat_propagate(g, v[0], t, nu), heat_propagate(g, v[1], t, nu)}};
}

Coeffs fractional_laplacian(const Grid& g, const Coeffs& c, double alpha) {
    if (alpha < 0 && std::abs(c(0, 0)) > 1e-14 * std::max(1.0, max_abs(c)))
        throw std::invalid_argument("fractional_laplacian: negative power needs a mean-zero field");
    Real2D sym = (g.ksq > 0).select(g.ksq.pow(alpha), 0.0);
    if (alpha == 0) sym(0, 0) = 1.0;
    Coeffs r = multiply_symbol(c, sym);
    if (alpha != 0) r(0, 0) = c(0, 0) * 0.0;
    return r;
}

Vec2 fractional_laplacian(const Grid& g, const Vec2& v, double alpha) {
    return {{fractional_laplacian(g, v[0], alpha), fractional_laplacian(g, v[1], alpha)}};
}

Vec2 leray_project(const Grid& g, const Vec2& f) {
    // coefficient (f.kp / |k|^2) kp with kp = (k2, -k1)
    Vec2 r = Vec2::zeros(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            double q = g.ksq(i, j);
            if (q == 0 || !g.live(i, j)) continue;
            double a = g.k2(i, j), b = -g.k1(i, j);
            cplx s = (f[0](i, j) * a + f[1](i, j) * b) / q;
            r[0](i, j) = s * a;
            r[1](i, j) = s * b;
        }
    return r;
}

Coeffs divergence(const Grid& g, const Vec2& v) { return deriv(g, v[0], 0) + deriv(g, v[1], 1); }

Vec2 divergence_tensor(const Grid& g, const Mat2& t) {
    Vec2 r;
    for (int i = 0; i < 2; ++i) r[i] = deriv(g, t(i, 0), 0) + deriv(g, t(i, 1), 1);
    return r;
}

Mat2 gradient(const Grid& g, const Vec2& phi) {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = deriv(g, phi[j], i);
    return m;
}

std::pair<Mat2, Mat2> grad_decompose(const Grid& g, const Vec2& phi) {
    Mat2 d = gradient(g, phi), dt = d.transpose();
    return {0.5 * (d + dt), 0.5 * (d - dt)};
}

void zero_mean(Coeffs& c) { c(0, 0) = 0.0; }
void zero_mean(Vec2& v) {
    v[0](0, 0) = 0.0;
    v[1](0, 0) = 0.0;
}

Coeffs product(const Grid& g, const Coeffs& a, const Coeffs& b) {
    return to_spectral(g, to_physical(g, a) * to_physical(g, b));
}

Mat2 tensor_product(const Grid& g, const Vec2& u, const Vec2& v, Flavor fl) {
    std::array<Real2D, 2> pu{to_physical(g, u[0]), to_physical(g, u[1])};
    std::array<Real2D, 2> pv{to_physical(g, v[0]), to_physical(g, v[1])};
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Real2D e;
            switch (fl) {
                case Flavor::plain: e = pu[i] * pv[j]; break;
                case Flavor::symm: e = 0.5 * (pu[i] * pv[j] + pv[i] * pu[j]); break;
                case Flavor::anti: e = 0.5 * (pu[i] * pv[j] - pv[i] * pu[j]); break;
            }
            m(i, j) = to_spectral(g, e);
        }
    return m;
}

Vec2 advect(const Grid& g, const Vec2& a, const Vec2& f) {
    Real2D a0 = to_physical(g, a[0]), a1 = to_physical(g, a[1]);
    Vec2 r;
    for (int i = 0; i < 2; ++i) {
        Real2D e = a0 * to_physical(g, deriv(g, f[i], 0)) + a1 * to_physical(g, deriv(g, f[i], 1));
        r[i] = to_spectral(g, e);
    }
    return r;
}

Vec2 matvec(const Grid& g, const Mat2& m, const Vec2& w) {
    Real2D w0 = to_physical(g, w[0]), w1 = to_physical(g, w[1]);
    Vec2 r;
    for (int i = 0; i < 2; ++i)
        r[i] = to_spectral(g, to_physical(g, m(i, 0)) * w0 + to_physical(g, m(i, 1)) * w1);
    return r;
}

double inner(const Coeffs& f, const Coeffs& h) { return (f * h.conjugate()).real().sum(); }
double inner(const Vec2& f, const Vec2& h) { return inner(f[0], h[0]) + inner(f[1], h[1]); }
double inner(const Mat2& f, const Mat2& h) {
    double s = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += inner(f(i, j), h(i, j));
    return s;
}

double norm_l2(const Vec2& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

double norm_hdot(const Grid& g, const Vec2& f, double s) {
    Real2D w = (g.ksq > 0).select(g.ksq.pow(s), 0.0);
    double acc = 0;
    for (int c = 0; c < 2; ++c) acc += (f[c].abs2() * w).sum();
    return std::sqrt(acc);
}

double integral3(const Grid& g, const Coeffs& a, const Coeffs& b, const Coeffs& c) {
    int m = 2 * g.n;
    return (to_physical(g, a, m) * to_physical(g, b, m) * to_physical(g, c, m)).mean();
}

double abs_integral(const Grid&, const Real2D& f) { return f.abs().mean(); }

double relative_residual(double lhs, double rhs, double scale) {
    double den = scale + std::abs(lhs) + std::abs(rhs);
    return den > 0 ? std::abs(lhs - rhs) / den : 0.0;
}

double div_residual(const Grid& g, const Vec2& v) {
    double s = max_abs(v);
    if (s == 0) return 0;
    Coeffs d = v[0] * g.k1.cast<cplx>() + v[1] * g.k2.cast<cplx>();
    return d.abs().maxCoeff() / (s * std::max(1.0, g.kabs.maxCoeff()));
}

double max_abs(const Coeffs& c) { return c.size() ? c.abs().maxCoeff() : 0.0; }
double max_abs(const Vec2& v) { return std::max(max_abs(v[0]), max_abs(v[1])); }
double max_abs(const Mat2& m) {
    double s = 0;
    for (auto& r : m.c)
        for (auto& e : r) s = std::max(s, max_abs(e));
    return s;
}

namespace {
Coeffs random_draw(const Grid& g, std::mt19937_64& eng, double band, double decay) {
    if (band < 0) band = g.n / 3.0;
    std::normal_distribution<double> nd;
    Coeffs c = g.zeros();
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            double a = nd(eng), b = nd(eng);
            if (!g.live(i, j) || g.ksq(i, j) == 0 || g.kabs(i, j) > band) continue;
            c(i, j) = cplx(a, b) * std::pow(1.0 + g.ksq(i, j), -decay);
        }
    return hermitian_part(g, c);
}
}  // namespace

Coeffs random_scalar(const Grid& g, std::uint64_t seed, double band, double decay) {
    std::mt19937_64 eng(seed);
    return random_draw(g, eng, band, decay);
}

Vec2 random_divfree(const Grid& g, std::uint64_t seed, double band, double decay) {
    std::mt19937_64 eng(seed);
    Vec2 v;
    v[0] = random_draw(g, eng, band, decay);
    v[1] = random_draw(g, eng, band, decay);
    return leray_project(g, v);
}

std::string to_json_records(const Grid& g, const std::vector<Coeffs>& comps) {
    nlohmann::json j;
    j["n"] = g.n;
    j["components"] = nlohmann::json::array();
    for (auto& c : comps) {
        nlohmann::json recs = nlohmann::json::array();
        for (int jj = 0; jj < g.n; ++jj)
            for (int i = 0; i < g.n; ++i)
                recs.push_back({g.wn(i), g.wn(jj), c(i, jj).real(), c(i, jj).imag()});
        j["components"].push_back(recs);
    }
    return j.dump();
}

std::vector<Coeffs> from_json_records(const std::string& text, int& n_out) {
    auto j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    n_out = n;
    std::vector<Coeffs> out;
    for (auto& recs : j.at("components")) {
        Coeffs c = Coeffs::Zero(n, n);
        for (auto& r : recs) {
            int a = r[0].get<int>(), b = r[1].get<int>();
            c(a >= 0 ? a : a + n, b >= 0 ? b : b + n) = cplx(r[2].get<double>(), r[3].get<double>());
        }
        out.push_back(c);
    }
    return out;
}

namespace {
template <class T>
void put_le(std::ofstream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<char*>(b), sizeof(T));
}
template <class T>
T get_le(std::ifstream& is) {
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!is) throw std::runtime_error("truncated field file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}
}  // namespace

void write_binary(const std::string& path, const Grid& g, const std::vector<Coeffs>& comps) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    put_le<std::int32_t>(os, g.n);
    put_le<std::int32_t>(os, std::int32_t(comps.size()));
    for (auto& c : comps)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                put_le<std::int32_t>(os, g.wn(i));
                put_le<std::int32_t>(os, g.wn(j));
                put_le<double>(os, c(i, j).real());
                put_le<double>(os, c(i, j).imag());
            }
}

std::vector<Coeffs> read_binary(const std::string& path, int& n_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    int n = get_le<std::int32_t>(is), nc = get_le<std::int32_t>(is);
    n_out = n;
    std::vector<Coeffs> out;
    for (int c = 0; c < nc; ++c) {
        Coeffs m = Coeffs::Zero(n, n);
        for (int r = 0; r < n * n; ++r) {
            int a = get_le<std::int32_t>(is), b = get_le<std::int32_t>(is);
            double re = get_le<double>(is), im = get_le<double>(is);
            m(a >= 0 ? a : a + n, b >= 0 ? b : b + n) = cplx(re, im);
        }
        out.push_back(m);
    }
    return out;
}

}  // namespace mhd
