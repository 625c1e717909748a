#include "mhd/dynamics.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace mhd {

namespace {

struct Phys {
    Real2D c[2];
};

Phys phys(const Grid& g, const Vec2& v) { return {{to_physical(g, v[0]), to_physical(g, v[1])}}; }

Vec2 scaled(const Vec2& v, double s) { return s * v; }

// -P_L div T from physical entries
Vec2 minus_pdiv(const Grid& g, const Real2D& t00, const Real2D& t01, const Real2D& t10, const Real2D& t11) {
    Mat2 t;
    t(0, 0) = to_spectral(g, t00);
    t(0, 1) = to_spectral(g, t01);
    t(1, 0) = to_spectral(g, t10);
    t(1, 1) = to_spectral(g, t11);
    return scaled(leray_project(g, divergence_tensor(g, t)), -1.0);
}

Vec2 minus_pdiv_symm(const Grid& g, const Real2D& t00, const Real2D& t01, const Real2D& t11) {
    Mat2 t;
    t(0, 0) = to_spectral(g, t00);
    t(0, 1) = to_spectral(g, t01);
    t(1, 0) = t(0, 1);
    t(1, 1) = to_spectral(g, t11);
    return scaled(leray_project(g, divergence_tensor(g, t)), -1.0);
}

// antisymmetric tensor with upper entry t01
Vec2 minus_pdiv_anti(const Grid& g, const Real2D& t01) {
    Mat2 t = Mat2::zeros(g);
    t(0, 1) = to_spectral(g, t01);
    t(1, 0) = -t(0, 1);
    return scaled(leray_project(g, divergence_tensor(g, t)), -1.0);
}

// a_i b_j + a_j b_i
Real2D sym2(const Phys& a, const Phys& b, int i, int j) { return a.c[i] * b.c[j] + a.c[j] * b.c[i]; }
// a_0 b_1 - a_1 b_0
Real2D wedge(const Phys& a, const Phys& b) { return a.c[0] * b.c[1] - a.c[1] * b.c[0]; }

struct Etd {
    Real2D e, p1, p2;
};

Etd etd_coeffs(const Grid& g, double nu, double h) {
    Etd k{Real2D(g.n, g.n), Real2D(g.n, g.n), Real2D(g.n, g.n)};
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            double z = -nu * g.ksq(i, j) * h;
            k.e(i, j) = std::exp(z);
            k.p1(i, j) = phi1(z);
            k.p2(i, j) = phi2(z);
        }
    return k;
}

Vec2 etd_predict(const Etd& k, const Vec2& v, const Vec2& n0, double h) {
    Vec2 r;
    for (int c = 0; c < 2; ++c) r[c] = v[c] * k.e.cast<cplx>() + h * n0[c] * k.p1.cast<cplx>();
    return r;
}

Vec2 etd_correct(const Etd& k, const Vec2& a, const Vec2& n0, const Vec2& na, double h) {
    Vec2 r;
    for (int c = 0; c < 2; ++c) r[c] = a[c] + h * (na[c] - n0[c]) * k.p2.cast<cplx>();
    return r;
}

void require_step(double h) {
    if (!(h > 0)) throw std::invalid_argument("step: h must be positive");
}

double combined_l2(const Vec2& a, const Vec2& b) { return std::hypot(norm_l2(a), norm_l2(b)); }

}  // namespace

SolverState::SolverState(const Grid& g, const SolverParams& p, std::uint64_t seed)
    : grid(&g), params(p), wu(Vec2::zeros(g)), wb(wu), yu(wu), yb(wu), qu(wu), qb(wu), zeta_u(wu), zeta_b(wu),
      noise(g, p.nu, seed) {
    if (p.a < 2.75 || p.a > 3.0) throw std::invalid_argument("solver: exponent a outside [11/4, 3]");
    if (p.nu < 0) throw std::invalid_argument("solver: negative viscosity");
}

std::pair<Vec2, Vec2> SolverState::x() const {
    if (!params.noise) return {Vec2::zeros(*grid), Vec2::zeros(*grid)};
    if (params.noise_lambda > 0) return noise_fields(noise, params.noise_lambda);
    return noise_fields(noise);
}

int initial_index(double norm) { return norm >= 1 ? int(std::floor(norm)) : 0; }

double initial_lambda(double norm, double a) { return std::pow(1.0 + std::ceil(norm), a); }

double w_norm_sum(const SolverState& s) { return norm_l2(s.wu) + norm_l2(s.wb); }

void set_initial(SolverState& s, const Vec2& u_in, const Vec2& b_in) {
    const Grid& g = *s.grid;
    s.wu = leray_project(g, u_in);
    s.wb = leray_project(g, b_in);
    double n = w_norm_sum(s);
    s.i0 = initial_index(n);
    s.index = s.i0;
    s.lambda_t = initial_lambda(n, s.params.a);
    s.ledger.clear();
    s.ledger.push_back({s.i0, s.t, n, s.lambda_t});
}

YRhs y_nonlinear(const Grid& g, const Vec2& xu_, const Vec2& xb_, const Vec2& yu_, const Vec2& yb_) {
    Phys xu = phys(g, xu_), xb = phys(g, xb_), yu = phys(g, yu_), yb = phys(g, yb_);
    YRhs r;
    Real2D t[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j)
            t[i][j] = sym2(xu, yu, i, j) + xu.c[i] * xu.c[j] - sym2(xb, yb, i, j) - xb.c[i] * xb.c[j];
    r.u = minus_pdiv_symm(g, t[0][0], t[0][1], t[1][1]);
    // 2 Xb (x)_a Yu + 2 Yb (x)_a Xu + 2 Xb (x)_a Xu
    r.b = minus_pdiv_anti(g, wedge(xb, yu) + wedge(yb, xu) + wedge(xb, xu));
    // the same tensor from the six plain products
    Real2D p[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            p[i][j] = xb.c[i] * yu.c[j] + yb.c[i] * xu.c[j] + xb.c[i] * xu.c[j] - xu.c[i] * yb.c[j] -
                      yu.c[i] * xb.c[j] - xu.c[i] * xb.c[j];
    r.b_alt = minus_pdiv(g, p[0][0], p[0][1], p[1][0], p[1][1]);
    return r;
}

std::pair<Vec2, Vec2> w_nonlinear(const Grid& g, const Vec2& xu_, const Vec2& xb_, const Vec2& yu_,
                                  const Vec2& yb_, const Vec2& wu_, const Vec2& wb_) {
    Phys yu = phys(g, yu_), yb = phys(g, yb_), wu = phys(g, wu_), wb = phys(g, wb_);
    Phys du = phys(g, 2.0 * (xu_ + yu_)), db = phys(g, 2.0 * (xb_ + yb_));
    Real2D t[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j)
            t[i][j] = wu.c[i] * wu.c[j] + 0.5 * sym2(du, wu, i, j) + yu.c[i] * yu.c[j] - wb.c[i] * wb.c[j] -
                      0.5 * sym2(db, wb, i, j) - yb.c[i] * yb.c[j];
    Vec2 nu_ = minus_pdiv_symm(g, t[0][0], t[0][1], t[1][1]);
    Real2D a = wedge(wb, wu) + 0.5 * wedge(wb, du) + wedge(yb, yu) - 0.5 * wedge(wu, db);
    Vec2 nb_ = minus_pdiv_anti(g, a);
    return {nu_, nb_};
}

void y_step(SolverState& s, const Vec2& xu0, const Vec2& xb0, const Vec2& xu1, const Vec2& xb1, double h) {
    require_step(h);
    const Grid& g = *s.grid;
    Etd k = etd_coeffs(g, s.params.nu, h);
    Vec2 fu = leray_project(g, s.zeta_u), fb = leray_project(g, s.zeta_b);
    double gap = 0;
    auto eval = [&](const Vec2& xu, const Vec2& xb, const Vec2& yu, const Vec2& yb) {
        YRhs r = y_nonlinear(g, xu, xb, yu, yb);
        double sc = std::max(max_abs(r.b), max_abs(r.b_alt));
        if (sc > 0) gap = std::max(gap, max_abs(r.b - r.b_alt) / sc);
        return std::make_pair(r.u + fu, r.b + fb);
    };
    auto [n0u, n0b] = eval(xu0, xb0, s.yu, s.yb);
    Vec2 au = etd_predict(k, s.yu, n0u, h), ab = etd_predict(k, s.yb, n0b, h);
    auto [nau, nab] = eval(xu1, xb1, au, ab);
    s.yu = etd_correct(k, au, n0u, nau, h);
    s.yb = etd_correct(k, ab, n0b, nab, h);
    s.form_residual = gap;
    if (!(gap <= s.params.form_tol))
        throw std::runtime_error("y_step: the two forms of the magnetic nonlinearity disagree by " +
                                 std::to_string(gap));
}

void w_step(SolverState& s, const Vec2& xu0, const Vec2& xb0, const Vec2& yu0, const Vec2& yb0, const Vec2& xu1,
            const Vec2& xb1, double h) {
    require_step(h);
    const Grid& g = *s.grid;
    Etd k = etd_coeffs(g, s.params.nu, h);
    auto [n0u, n0b] = w_nonlinear(g, xu0, xb0, yu0, yb0, s.wu, s.wb);
    Vec2 au = etd_predict(k, s.wu, n0u, h), ab = etd_predict(k, s.wb, n0b, h);
    auto [nau, nab] = w_nonlinear(g, xu1, xb1, s.yu, s.yb, au, ab);
    if (s.params.probe) {
        // first-order step of v = w + Y from the undecomposed nonlinearity
        Vec2 vu = s.wu + yu0, vb = s.wb + yb0;
        Phys uu = phys(g, vu + xu0), bb = phys(g, vb + xb0);
        Real2D t00 = uu.c[0] * uu.c[0] - bb.c[0] * bb.c[0];
        Real2D t01 = uu.c[0] * uu.c[1] - bb.c[0] * bb.c[1];
        Real2D t11 = uu.c[1] * uu.c[1] - bb.c[1] * bb.c[1];
        Vec2 fvu = minus_pdiv_symm(g, t00, t01, t11) + leray_project(g, s.zeta_u);
        Vec2 fvb = minus_pdiv_anti(g, wedge(bb, uu)) + leray_project(g, s.zeta_b);
        YRhs y = y_nonlinear(g, xu0, xb0, yu0, yb0);
        Vec2 du = etd_predict(k, vu, fvu, h) -
                  (etd_predict(k, s.wu, n0u, h) + etd_predict(k, yu0, y.u + leray_project(g, s.zeta_u), h));
        Vec2 db = etd_predict(k, vb, fvb, h) -
                  (etd_predict(k, s.wb, n0b, h) + etd_predict(k, yb0, y.b + leray_project(g, s.zeta_b), h));
        double sc = std::max({max_abs(vu), max_abs(vb), 1e-300});
        s.probe_residual = std::max(max_abs(du), max_abs(db)) / sc;
    }
    s.wu = etd_correct(k, au, n0u, nau, h);
    s.wb = etd_correct(k, ab, n0b, nab, h);
}

void update_lambda(SolverState& s) {
    double n = w_norm_sum(s);
    if (n >= s.index + 1) {
        // several thresholds crossed within one step collapse to one entry
        int j = int(std::floor(n));
        s.index = j;
        s.lambda_t = std::pow(1.0 + n, s.params.a);
        s.ledger.push_back({j, s.t, n, s.lambda_t});
    }
}

void check_finite(const SolverState& s) {
    bool ok = true;
    for (const Vec2* f : {&s.wu, &s.wb, &s.yu, &s.yb, &s.qu, &s.qb})
        ok = ok && (*f)[0].allFinite() && (*f)[1].allFinite();
    if (!ok) throw std::runtime_error("non-finite state at t = " + std::to_string(s.t) + "\n" + ledger_dump(s));
}

std::string ledger_dump(const SolverState& s) {
    std::ostringstream os;
    os << "index,time,norm,lambda\n";
    char buf[128];
    for (const auto& e : s.ledger) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", e.index, e.time, e.norm, e.lambda);
        os << buf;
    }
    return os.str();
}

void step(SolverState& s, double h) {
    require_step(h);
    const Grid& g = *s.grid;
    auto [xu0, xb0] = s.x();
    if (s.params.noise) ou_step(s.noise, h);
    auto [xu1, xb1] = s.x();
    Vec2 yu0 = s.yu, yb0 = s.yb;
    y_step(s, xu0, xb0, xu1, xb1, h);
    w_step(s, xu0, xb0, yu0, yb0, xu1, xb1, h);
    s.qu = q_step(g, s.qu, xu0, xu1, h, s.params.nu);
    s.qb = q_step(g, s.qb, xb0, xb1, h, s.params.nu);
    s.t += h;
    ++s.steps;
    check_finite(s);
    update_lambda(s);
    if (!s.cfl_warned) {
        double m = std::max(lp_norm(g, s.wu, 0), lp_norm(g, s.wb, 0));
        if (h * m * g.n > 0.5) {
            s.cfl_warned = true;
            std::cerr << "warning: dt * max|w| * N = " << h * m * g.n << " exceeds 0.5 at t = " << s.t << '\n';
        }
    }
}

void step(SolverState& s) { step(s, s.params.dt); }

HLSplit hl_split(const LPConfig& lp, const Vec2& wu, const Vec2& wb, const Vec2& qu, const Vec2& qb,
                 double lambda) {
    const Grid& g = lp.grid();
    Vec2 hu = freq_project(g, qu, lambda, true), hb = freq_project(g, qb, lambda, true);
    HLSplit r;
    r.u_high = scaled(leray_project(g, divergence_tensor(g, para_lt(lp, wu, hu, Flavor::symm) -
                                                                para_lt(lp, wb, hb, Flavor::symm))),
                      -1.0);
    r.b_high = scaled(leray_project(g, divergence_tensor(g, para_lt(lp, wb, hu, Flavor::anti) -
                                                                para_lt(lp, wu, hb, Flavor::anti))),
                      -1.0);
    r.u_low = wu - r.u_high;
    r.b_low = wb - r.b_high;
    return r;
}

HLSplit hl_split(const LPConfig& lp, const SolverState& s) { return hl_split(lp, s.wu, s.wb, s.qu, s.qb, s.lambda_t); }

Mat2 commutator(const LPConfig& lp, const Vec2& f, const Vec2& gf, Flavor fl, double nu,
                const std::function<Vec2()>& dt_f) {
    if (!dt_f) throw std::invalid_argument("commutator: no time derivative supplied");
    const Grid& g = lp.grid();
    Vec2 heat = dt_f() - nu * laplacian(g, f);
    Mat2 c = para_lt(lp, heat, gf, fl);
    if (nu != 0)
        for (int k = 0; k < 2; ++k) {
            Vec2 df{{deriv(g, f[0], k), deriv(g, f[1], k)}};
            Vec2 dg{{deriv(g, gf[0], k), deriv(g, gf[1], k)}};
            c = c - (2 * nu) * para_lt(lp, df, dg, fl);
        }
    return c;
}

std::pair<Vec2, Vec2> wsharp(const LPConfig& lp, const Vec2& wu, const Vec2& wb, const Vec2& qu, const Vec2& qb) {
    // w_sharp = w - w_high with the full Q in place of its high part;
    // Q is mean free, so the high projection at threshold 1 keeps all of it
    HLSplit h = hl_split(lp, wu, wb, qu, qb, 1.0);
    return {wu - h.u_high, wb - h.b_high};
}

std::pair<Vec2, Vec2> wsharp(const LPConfig& lp, const SolverState& s) { return wsharp(lp, s.wu, s.wb, s.qu, s.qb); }

std::pair<Vec2, Vec2> wsharp_invert(const LPConfig& lp, const Vec2& su, const Vec2& sb, const Vec2& qu,
                                    const Vec2& qb, double tol, int max_iter) {
    Vec2 wu = su, wb = sb;
    double scale = std::max({max_abs(su), max_abs(sb), 1e-300});
    for (int it = 0; it < max_iter; ++it) {
        auto [tu, tb] = wsharp(lp, wu, wb, qu, qb);
        Vec2 ru = su - tu, rb = sb - tb;
        double res = std::max(max_abs(ru), max_abs(rb)) / scale;
        wu = wu + ru;
        wb = wb + rb;
        if (res < tol) return {wu, wb};
    }
    throw std::runtime_error("wsharp_invert: fixed-point iteration did not converge");
}

namespace {
// sum_ij int W_i M_ij W_j on the doubled grid
double quad_form(const Grid& g, const Mat4& m, const Vec2& wu, const Vec2& wb) {
    const int n2 = 2 * g.n;
    Real2D w[4] = {to_physical(g, wu[0], n2), to_physical(g, wu[1], n2), to_physical(g, wb[0], n2),
                   to_physical(g, wb[1], n2)};
    double acc = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += (w[i] * to_physical(g, m(i, j), n2) * w[j]).mean();
    return acc;
}
}  // namespace

EnergyTerms energy_terms(const Grid& g, const Vec2& wul, const Vec2& wbl, const Vec2& xul, const Vec2& xbl,
                         double nu, double r) {
    EnergyTerms e;
    e.r = r;
    Vec2 au = nu * laplacian(g, wul) -
              divergence_tensor(g, 2.0 * tensor_product(g, xul, wul, Flavor::symm) -
                                       2.0 * tensor_product(g, xbl, wbl, Flavor::symm));
    Vec2 ab = nu * laplacian(g, wbl) -
              divergence_tensor(g, 2.0 * tensor_product(g, wbl, xul, Flavor::anti) -
                                       2.0 * tensor_product(g, wul, xbl, Flavor::anti));
    e.i1_direct = 2 * inner(wul, au) + 2 * inner(wbl, ab);

    double h1 = std::pow(norm_hdot(g, wul, 1), 2) + std::pow(norm_hdot(g, wbl, 1), 2);
    double l2 = inner(wul, wul) + inner(wbl, wbl);
    double lap = inner(wul, laplacian(g, wul)) + inner(wbl, laplacian(g, wbl));
    double spec = quad_form(g, nabla_spec(g, xul, xbl), wul, wbl);
    double inner_no_r = 0.5 * nu * lap - spec;
    e.i1_spec = -nu * h1 + 2 * inner_no_r;
    double inner_a = inner_no_r - r * l2;  // <W, A W> with A carrying -r Id
    e.i1_literal = -nu * h1 + 2 * inner_a + r * l2;
    e.i1_twice_r = -nu * h1 + 2 * inner_a + 2 * r * l2;
    double scale = 1e-14 * (nu * h1 + std::abs(spec) + r * l2) + 1e-300;
    e.rel_spec = relative_residual(e.i1_direct, e.i1_spec, scale);
    e.rel_literal = relative_residual(e.i1_direct, e.i1_literal, scale);
    e.rel_twice_r = relative_residual(e.i1_direct, e.i1_twice_r, scale);
    return e;
}

DiagnosticsRow energy_report(const LPConfig& lp, const SolverState& s, double running_sup) {
    const Grid& g = *s.grid;
    const double kappa = s.params.kappa;
    DiagnosticsRow d;
    d.t = s.t;
    d.lambda = s.lambda_t;
    d.index = s.index;
    auto [xu, xb] = s.x();
    d.energy = 0.5 * std::pow(norm_l2(s.wu + s.yu + xu), 2) + 0.5 * std::pow(norm_l2(s.wb + s.yb + xb), 2);
    HLSplit h = hl_split(lp, s);
    d.w_l2 = combined_l2(s.wu, s.wb);
    d.wl_l2 = combined_l2(h.u_low, h.b_low);
    d.wl_h1 = std::hypot(norm_hdot(g, h.u_low, 1), norm_hdot(g, h.b_low, 1));
    double sh = 1 - 3 * kappa;  // 1 - 2 kappa - delta with delta = kappa
    d.wh_hs = std::hypot(besov_norm(lp, h.u_high, sh, 2, 2), besov_norm(lp, h.b_high, sh, 2, 2));
    d.x_besov = std::max(besov_norm(lp, xu, -kappa, 0, 0), besov_norm(lp, xb, -kappa, 0, 0));
    d.y_besov = std::max(besov_norm(lp, s.yu, 1 - 2 * kappa, 0, 0), besov_norm(lp, s.yb, 1 - 2 * kappa, 0, 0));
    Vec2 xul = freq_project(g, xu, s.lambda_t, false), xbl = freq_project(g, xb, s.lambda_t, false);
    Mat4 gs = nabla_spec(g, xul, xbl);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) d.grad_spec_besov = std::max(d.grad_spec_besov, besov_norm(lp, gs(i, j), -1 - kappa, 0, 0));
    d.grad_spec_sup = std::max(running_sup, d.grad_spec_besov);
    d.r = r_lambda_grid(g, std::max(1.0, s.lambda_t), s.t, s.params.nu);
    EnergyTerms e = energy_terms(g, h.u_low, h.b_low, xul, xbl, s.params.nu, d.r);
    d.i1_rel_spec = e.rel_spec;
    d.i1_rel_literal = e.rel_literal;
    d.form_residual = s.form_residual;
    d.div_residual = std::max({div_residual(g, s.wu), div_residual(g, s.wb), div_residual(g, s.yu),
                               div_residual(g, s.yb)});
    return d;
}

std::string diagnostics_csv_header() {
    return "t,lambda,index,energy,w_l2,wl_l2,wl_h1,wh_hs,x_besov,y_besov,grad_spec_besov,grad_spec_sup,r,"
           "i1_rel_spec,i1_rel_literal,form_residual,div_residual\n";
}

std::string diagnostics_csv_row(const DiagnosticsRow& r) {
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6g,%.6g,%.6g,%.6g\n",
                  r.t, r.lambda, r.index, r.energy, r.w_l2, r.wl_l2, r.wl_h1, r.wh_hs, r.x_besov, r.y_besov,
                  r.grad_spec_besov, r.grad_spec_sup, r.r, r.i1_rel_spec, r.i1_rel_literal, r.form_residual,
                  r.div_residual);
    return buf;
}

namespace {
std::vector<Coeffs> state_fields(const SolverState& s) {
    std::vector<Coeffs> v;
    for (const Vec2* f : {&s.wu, &s.wb, &s.yu, &s.yb, &s.qu, &s.qb, &s.zeta_u, &s.zeta_b}) {
        v.push_back((*f)[0]);
        v.push_back((*f)[1]);
    }
    v.push_back(s.noise.fu);
    v.push_back(s.noise.fb);
    return v;
}
}  // namespace

void save_checkpoint(const SolverState& s, const std::string& path) {
    nlohmann::json j;
    j["n"] = s.grid->n;
    j["t"] = s.t;
    j["steps"] = s.steps;
    j["params"] = {{"nu", s.params.nu},         {"a", s.params.a},
                   {"kappa", s.params.kappa},   {"dt", s.params.dt},
                   {"noise", s.params.noise},   {"noise_lambda", s.params.noise_lambda},
                   {"probe", s.params.probe},   {"form_tol", s.params.form_tol}};
    j["lambda_t"] = s.lambda_t;
    j["i0"] = s.i0;
    j["index"] = s.index;
    j["ledger"] = nlohmann::json::array();
    for (const auto& e : s.ledger) j["ledger"].push_back({e.index, e.time, e.norm, e.lambda});
    j["noise"] = {{"seed", s.noise.seed}, {"t", s.noise.t}, {"steps", s.noise.steps}, {"nu", s.noise.nu},
                  {"mode_cutoff", s.noise.mode_cutoff}};
    std::ofstream(path + ".json") << j.dump(2) << '\n';
    write_binary(path + ".bin", *s.grid, state_fields(s));
}

SolverState load_checkpoint(const Grid& g, const std::string& path) {
    std::ifstream in(path + ".json");
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path + ".json");
    nlohmann::json j = nlohmann::json::parse(in);
    if (j["n"].get<int>() != g.n) throw std::invalid_argument("checkpoint: grid size mismatch");
    SolverParams p;
    const auto& jp = j["params"];
    p.nu = jp["nu"];
    p.a = jp["a"];
    p.kappa = jp["kappa"];
    p.dt = jp["dt"];
    p.noise = jp["noise"];
    p.noise_lambda = jp["noise_lambda"];
    p.probe = jp["probe"];
    p.form_tol = jp["form_tol"];
    SolverState s(g, p, j["noise"]["seed"].get<std::uint64_t>());
    s.t = j["t"];
    s.steps = j["steps"];
    s.lambda_t = j["lambda_t"];
    s.i0 = j["i0"];
    s.index = j["index"];
    for (const auto& e : j["ledger"])
        s.ledger.push_back({e[0].get<int>(), e[1].get<double>(), e[2].get<double>(), e[3].get<double>()});
    s.noise.t = j["noise"]["t"];
    s.noise.steps = j["noise"]["steps"];
    s.noise.mode_cutoff = j["noise"]["mode_cutoff"];
    int n = 0;
    auto v = read_binary(path + ".bin", n);
    if (n != g.n || v.size() != 18) throw std::runtime_error("checkpoint: malformed field dump");
    int k = 0;
    for (Vec2* f : {&s.wu, &s.wb, &s.yu, &s.yb, &s.qu, &s.qb, &s.zeta_u, &s.zeta_b}) {
        (*f)[0] = v[k++];
        (*f)[1] = v[k++];
    }
    s.noise.fu = v[k++];
    s.noise.fb = v[k++];
    return s;
}

GalerkinReport galerkin_run(const Grid& g, const SolverParams& p, std::uint64_t seed, const Vec2& u_in,
                            const Vec2& b_in, double t_final, const std::vector<int>& levels) {
    if (levels.size() < 2) throw std::invalid_argument("galerkin: need at least two levels");
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (levels[i + 1] != 2 * levels[i]) throw std::invalid_argument("galerkin: levels must double");
    std::vector<SolverState> runs;
    for (int n : levels) {
        SolverParams q = p;
        q.noise_lambda = n;
        SolverState s(g, q, seed);
        set_initial(s, freq_project(g, u_in, n, false), freq_project(g, b_in, n, false));
        runs.push_back(std::move(s));
    }
    const std::size_t np = levels.size() - 1;
    GalerkinReport rep;
    rep.levels = levels;
    rep.sup_l2.assign(np, 0.0);
    std::vector<double> i0(np, 0.0), ih(np, 0.0);
    const long nsteps = std::lround(t_final / p.dt);
    auto sample = [&](double weight) {
        for (std::size_t k = 0; k < np; ++k) {
            Vec2 du = runs[k].wu - runs[k + 1].wu, db = runs[k].wb - runs[k + 1].wb;
            double l2 = combined_l2(du, db);
            double hh = std::hypot(norm_hdot(g, du, 0.5), norm_hdot(g, db, 0.5));
            rep.sup_l2[k] = std::max(rep.sup_l2[k], l2);
            i0[k] += weight * l2 * l2;
            ih[k] += weight * hh * hh;
        }
    };
    sample(0.5 * p.dt);
    for (long it = 1; it <= nsteps; ++it) {
        for (auto& s : runs) step(s, p.dt);
        sample(it == nsteps ? 0.5 * p.dt : p.dt);
    }
    for (std::size_t k = 0; k < np; ++k) {
        rep.l2_h0.push_back(std::sqrt(i0[k]));
        rep.l2_h_half.push_back(std::sqrt(ih[k]));
    }
    rep.decreasing = true;
    for (std::size_t k = 0; k + 1 < np; ++k)
        if (!(rep.sup_l2[k + 1] < rep.sup_l2[k])) rep.decreasing = false;
    return rep;
}

std::string GalerkinReport::to_csv() const {
    std::ostringstream os;
    os << "n,two_n,sup_l2,l2_h0,l2_h_half\n";
    char buf[160];
    for (std::size_t k = 0; k < sup_l2.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", levels[k], levels[k + 1], sup_l2[k], l2_h0[k],
                      l2_h_half[k]);
        os << buf;
    }
    return os.str();
}

}  // namespace mhd
