// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "mhd/dynamics.hpp"
#include "mhd/identities.hpp"
#include "mhd/ratios.hpp"
#include "mhd/renorm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <thread>

using namespace mhd;

namespace {

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double sec() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

int failures = 0;

void report(int k, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", k, what.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

Vec2 scaled_to(const Vec2& v, double l2) { return (l2 / norm_l2(v)) * v; }

double energy(const SolverState& s) { return std::pow(norm_l2(s.wu), 2) + std::pow(norm_l2(s.wb), 2); }

std::vector<std::uint64_t> seeds_1_to(int n) {
    std::vector<std::uint64_t> v(n);
    std::iota(v.begin(), v.end(), 1);
    return v;
}

// ---------------------------------------------------------------------------

void identities_and_obstruction() {
    Clock c;
    IdentitySuite cfg;
    cfg.n = 64;
    cfg.seeds = seeds_1_to(20);
    auto rows = run_identity_suite(cfg, threads());
    double secs = c.sec();

    int zero_rows = 0, zero_bad = 0;
    double worst = 0;
    std::string worst_id;
    int ob_rows = 0, ob_bad = 0;
    double ob_rel = 0, ob_power = 1e300, ob_flip = 0;
    for (auto& r : rows) {
        if (r.id == "laplacian_obstruction") {
            ++ob_rows;
            ob_bad += !(r.rel < 1e-9 && std::abs(r.lhs) > 1e-3 * r.scale);
            ob_rel = std::max(ob_rel, r.rel);
            ob_power = std::min(ob_power, std::abs(r.lhs) / r.scale);
            ob_flip = std::max(ob_flip, std::abs(r.lhs + r.rhs) / r.scale);
            continue;
        }
        ++zero_rows;
        zero_bad += !(r.rel < 1e-10);
        if (r.rel >= worst) worst = r.rel, worst_id = r.id;
    }
    report(1, zero_bad == 0 && secs < 60,
           fmt("%d identity rows over 20 seeds at N=64, %d above 1e-10, worst rel %.2e (%s), %.1f s", zero_rows, zero_bad,
               worst, worst_id.c_str(), secs));
    report(2, ob_rows == 20 && ob_bad == 0,
           fmt("obstruction equality on %d seeds, %d fail, max rel %.3g, min |lhs|/scale %.3g; |lhs + rhs|/scale <= %.2g",
               ob_rows, ob_bad, ob_rel, ob_power, ob_flip));
}

// full-square lattice sum in long double, no symmetry folding
double r_oracle(double lambda, double t, double nu) {
    int kmax = int(std::ceil(lambda)) + 1;
    long double acc = 0;
    for (int a = -kmax; a <= kmax; ++a)
        for (int b = -kmax; b <= kmax; ++b) {
            if (a == 0 && b == 0) continue;
            long double q = (long double)a * a + (long double)b * b;
            long double l = low_profile(std::sqrt(double(q)) / lambda);
            if (l == 0) continue;
            acc += 0.25L * l * l * (1 - std::exp(-2.0L * nu * q * t)) / nu / (nu * q / 2 + 1);
        }
    return double(acc);
}

void renormalization_constant() {
    Clock c;
    bool exact = r_lambda(8, 0, 1) == 0.0 && r_lambda(64, 0, 0.5) == 0.0 && r_lambda(1, 3, 1) == 0.0 &&
                 r_lambda(1, 0.5, 2) == 0.0;
    double oracle_gap = 0;
    for (double lam : {1.5, 8.0, 16.0, 37.5, 64.0, 200.0})
        for (double t : {0.1, 0.5, 10.0})
            for (double nu : {0.5, 1.0}) {
                double p = r_lambda(lam, t, nu), o = r_oracle(lam, t, nu);
                oracle_gap = std::max(oracle_gap, std::abs(p - o) / std::abs(o));
            }
    std::vector<double> x, y;
    for (double lam : {8, 16, 32, 64, 128, 256, 512}) {
        x.push_back(std::log(lam));
        y.push_back(r_lambda(lam, 10, 1));
    }
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    double r2 = sxy * sxy / (sxx * syy), slope = sxy / sxx;
    double secs = c.sec();
    report(3, exact && oracle_gap < 1e-14 && r2 > 0.999 && secs < 10,
           fmt("zeros exact %s, oracle rel gap %.2e, R^2 %.6f slope %.4f, %.2f s", exact ? "yes" : "no", oracle_gap,
               r2, slope, secs));
}

void ou_statistics() {
    Clock c;
    NoiseStats st = noise_statistics(10000, 0.5, 1.0, 16, {{1, 0}, {2, 0}, {4, 0}}, 2024, threads());
    double zmax = 0;
    for (auto& r : st.rows) zmax = std::max(zmax, std::abs(r.z));
    double secs = c.sec();
    report(4, st.pass && secs < 60,
           fmt("%zu mode moments over 1e4 paths, max |z| %.2f, %.1f s", st.rows.size(), zmax, secs));
}

void chaos_structure() {
    Clock c;
    ChaosReport rep = chaos_diagnostics(2000, 16, 0.5, 1.0, 64, 77, threads());
    double zd = 0, zo = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) (i == j ? zd : zo) = std::max(i == j ? zd : zo, std::abs(rep.entry[i][j].z));
    double secs = c.sec();
    report(5, rep.pass && secs < 600,
           fmt("r = %.5f, diagonal max |z| %.2f, off-diagonal max |z| %.2f, %.0f s", rep.r_value, zd, zo, secs));
}

void uniform_variance() {
    Clock c;
    const int n = 128, samples = 200;
    std::vector<std::vector<double>> v;
    for (double lam : {16.0, 32.0, 64.0}) v.push_back(block_variance_44(samples, lam, 0.5, 1.0, n, 5, threads()));
    double worst = 0;
    int worst_block = -1;
    for (std::size_t m = 0; m < v[0].size(); ++m) {
        double lo = std::min({v[0][m], v[1][m], v[2][m]}), hi = std::max({v[0][m], v[1][m], v[2][m]});
        double ratio = lo > 0 ? hi / lo : (hi > 0 ? INFINITY : 1.0);
        if (ratio > worst) worst = ratio, worst_block = int(m) - 1;
    }
    auto d = cauchy_differences_44(samples, {8, 27, 64, 125}, 0.02, 0.5, 1.0, n, 6, threads());
    bool decreasing = true;
    for (std::size_t i = 1; i < d.size(); ++i) decreasing = decreasing && d[i] < d[i - 1];
    std::string ds;
    for (double x : d) ds += fmt(" %.3g", x);
    report(6, worst < 4 && decreasing,
           fmt("max block variance ratio %.3g (block %d), cauchy differences%s %s, %.0f s", worst, worst_block,
               ds.c_str(), decreasing ? "decreasing" : "not decreasing", c.sec()));
}

void low_energy_decomposition() {
    Grid g(64);
    LPConfig lp(g);
    double lit = 0, spec = 0, twice = 0;
    for (std::uint64_t seed : {11, 12, 13, 14, 15}) {
        SolverParams p;
        SolverState s(g, p, seed);
        set_initial(s, scaled_to(random_divfree(g, seed * 3, 8), 1.2), scaled_to(random_divfree(g, seed * 3 + 1, 8), 0.8));
        for (int k = 0; k < 50; ++k) step(s);
        HLSplit h = hl_split(lp, s);
        auto [xu, xb] = s.x();
        Vec2 xul = freq_project(g, xu, s.lambda_t, false), xbl = freq_project(g, xb, s.lambda_t, false);
        double r = r_lambda_grid(g, s.lambda_t, s.t, p.nu);
        EnergyTerms e = energy_terms(g, h.u_low, h.b_low, xul, xbl, p.nu, r);
        lit = std::max(lit, e.rel_literal);
        spec = std::max(spec, e.rel_spec);
        twice = std::max(twice, e.rel_twice_r);
    }
    report(7, lit < 1e-9,
           fmt("max rel residual %.3g as stated; %.3g with 2r, %.3g against the block-matrix form", lit, twice, spec));
}

void deterministic_limits() {
    Grid g(64);
    SolverParams p;
    p.noise = false;
    p.nu = 0;
    p.dt = 1e-4;
    SolverState s(g, p, 1);
    set_initial(s, scaled_to(random_divfree(g, 81, 4), 0.5), scaled_to(random_divfree(g, 82, 4), 0.3));
    double e0 = energy(s);
    for (int k = 0; k < 1000; ++k) step(s);
    double drift = std::abs(energy(s) - e0) / e0 / s.t;

    p.nu = 1;
    p.dt = 1e-3;
    SolverState d(g, p, 1);
    set_initial(d, scaled_to(random_divfree(g, 83, 8), 1.0), scaled_to(random_divfree(g, 84, 8), 0.6));
    bool monotone = true;
    double prev = energy(d);
    for (int k = 0; k < 300; ++k) {
        step(d);
        double e = energy(d);
        monotone = monotone && e < prev;
        prev = e;
    }

    SolverState z(g, p, 1);
    set_initial(z, scaled_to(random_divfree(g, 85, 8), 1.5), Vec2::zeros(g));
    for (int k = 0; k < 300; ++k) step(z);
    double b_max = std::max(max_abs(z.wb), max_abs(z.yb));
    report(8, drift < 1e-8 && monotone && b_max < 1e-14,
           fmt("inviscid drift %.3g per unit time, viscous decay %s, max |b| %.3g", drift,
               monotone ? "monotone" : "not monotone", b_max));
}

void self_convergence() {
    Grid g(32);
    SolverParams p;
    p.noise = false;
    p.nu = 0.1;
    Vec2 u0 = scaled_to(random_divfree(g, 21, 4), 1.0), b0 = scaled_to(random_divfree(g, 22, 4), 0.7);
    auto run = [&](double h) {
        SolverState s(g, p, 1);
        set_initial(s, u0, b0);
        long n = std::lround(0.2 / h);
        for (long k = 0; k < n; ++k) step(s, h);
        return s;
    };
    SolverState a = run(0.02), b = run(0.01), c = run(0.005);
    double ratio = std::hypot(norm_l2(a.wu - b.wu), norm_l2(a.wb - b.wb)) /
                   std::hypot(norm_l2(b.wu - c.wu), norm_l2(b.wb - c.wb));

    Clock clk;
    Grid gg(128);
    SolverParams q;
    q.dt = 1e-3;
    std::vector<GalerkinReport> reps(5);
    parallel_for(5, threads(), [&](int i) {
        std::uint64_t seed = 100 + i;
        Vec2 u = scaled_to(random_divfree(gg, seed * 7, 6), 1.0), bb = scaled_to(random_divfree(gg, seed * 7 + 1, 6), 0.5);
        reps[i] = galerkin_run(gg, q, seed, u, bb, 0.25, {4, 8, 16, 32});
    });
    bool all_dec = true;
    std::string seq;
    for (auto& r : reps) {
        all_dec = all_dec && r.decreasing;
        seq += " [";
        for (double d : r.sup_l2) seq += fmt(" %.2g", d);
        seq += " ]";
    }
    report(9, std::abs(ratio - 4) < 0.8 && all_dec,
           fmt("halving ratio %.3f; galerkin sup differences%s, %.0f s", ratio, seq.c_str(), clk.sec()));
}

// line through the upper hull edge above the mean abscissa: the lowest line
// lying above every point on average
std::pair<double, double> upper_envelope(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> hull;
    for (auto& p : pts) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull.back();
            double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
            if (cross >= 0) hull.pop_back();
            else break;
        }
        hull.push_back(p);
    }
    double xbar = 0;
    for (auto& p : pts) xbar += p.first / pts.size();
    for (std::size_t i = 1; i < hull.size(); ++i)
        if (hull[i].first >= xbar) {
            auto& a = hull[i - 1];
            auto& b = hull[i];
            double slope = (b.second - a.second) / (b.first - a.first);
            return {a.second - slope * a.first, slope};
        }
    return {hull.back().second, 0.0};
}

struct SmokeRun {
    bool finite = true, ledger_ok = true;
    int entries = 0;
    std::vector<std::pair<double, double>> pts;
};

SmokeRun smoke_run(std::uint64_t seed) {
    Grid g(64);
    LPConfig lp(g);
    SolverParams p;
    p.dt = 2e-4;
    SmokeRun out;
    SolverState s(g, p, seed);
    set_initial(s, scaled_to(random_divfree(g, seed * 5, 6), 1.4), scaled_to(random_divfree(g, seed * 5 + 1, 6), 0.9));

    // head of the ledger from the initial norm
    double n0 = w_norm_sum(s);
    int i0 = n0 < 1 ? 0 : int(std::floor(n0));
    out.ledger_ok = s.i0 == i0 && s.ledger.size() == 1 && s.lambda_t == std::pow(1 + std::ceil(n0), p.a);
    int index = i0;
    double lambda = s.lambda_t;
    std::size_t seen = 1;

    auto low_energy = [&]() {
        HLSplit h = hl_split(lp, s);
        return std::pow(norm_l2(h.u_low), 2) + std::pow(norm_l2(h.b_low), 2);
    };
    const long steps = 5000;
    for (long k = 1; k <= steps; ++k) {
        bool sample = k % 100 == 50;
        double before = sample ? low_energy() : 0;
        double lam_before = s.lambda_t;
        step(s);
        if (!(s.wu[0].allFinite() && s.wu[1].allFinite() && s.wb[0].allFinite() && s.wb[1].allFinite())) {
            out.finite = false;
            break;
        }
        double n = w_norm_sum(s);
        if (n >= index + 1) {
            index = int(std::floor(n));
            lambda = std::pow(1 + n, p.a);
            bool entry = s.ledger.size() == seen + 1 && s.ledger.back().index == index && s.ledger.back().time == s.t &&
                         s.ledger.back().norm == n && s.ledger.back().lambda == lambda;
            out.ledger_ok = out.ledger_ok && entry;
            seen = s.ledger.size();
        }
        out.ledger_ok = out.ledger_ok && s.ledger.size() == seen && s.lambda_t == lambda && s.index == index;
        // the split threshold must not move inside a sampled difference
        if (sample && s.lambda_t == lam_before) {
            double after = low_energy();
            double mid = 0.5 * (before + after);
            out.pts.push_back({std::log(M_E + mid) * mid, (after - before) / p.dt});
        }
    }
    out.entries = int(s.ledger.size());
    return out;
}

void smoke_test() {
    Clock c;
    std::vector<SmokeRun> runs(10);
    parallel_for(10, threads(), [&](int i) { runs[i] = smoke_run(1000 + i); });
    bool finite = true, ledger = true;
    int entries = 0;
    std::vector<std::pair<double, double>> pts;
    for (auto& r : runs) {
        finite = finite && r.finite;
        ledger = ledger && r.ledger_ok;
        entries += r.entries;
        pts.insert(pts.end(), r.pts.begin(), r.pts.end());
    }
    auto [c0, c1] = upper_envelope(pts);
    double ymax = -INFINITY;
    for (auto& p : pts) ymax = std::max(ymax, p.second);
    report(10, finite && ledger && c1 >= 0,
           fmt("10 runs finite %s, ledger exact %s (%d entries), envelope dE/dt <= %.3g + %.3g x "
               "over %zu samples (max dE/dt %.3g), %.0f s",
               finite ? "yes" : "no", ledger ? "yes" : "no", entries, c0, c1, pts.size(), ymax, c.sec()));
}

void inequality_constants() {
    Clock c;
    auto a = inequality_ratios(32, 200, 9, threads());
    auto b = inequality_ratios(64, 200, 9, threads());
    bool ok = a.size() == b.size();
    double worst = 1;
    std::string worst_id;
    for (std::size_t i = 0; ok && i < a.size(); ++i) {
        bool fin = std::isfinite(a[i].max) && std::isfinite(b[i].max) && a[i].max > 0 && b[i].max > 0;
        double ch = fin ? std::max(a[i].max / b[i].max, b[i].max / a[i].max) : INFINITY;
        ok = ok && ch < 2;
        if (ch > worst) worst = ch, worst_id = a[i].id;
    }
    report(11, ok,
           fmt("%zu ratio maxima over 200 samples, largest change 32->64 is %.3fx (%s), %.1f s", a.size(), worst,
               worst_id.c_str(), c.sec()));
}

}  // namespace

int main() {
    std::printf("acceptance on %d threads\n", threads());
    identities_and_obstruction();
    renormalization_constant();
    ou_statistics();
    chaos_structure();
    uniform_variance();
    low_energy_decomposition();
    deterministic_limits();
    self_convergence();
    smoke_test();
    inequality_constants();
    std::printf("%d of 11 criteria failed\n", failures);
    return failures ? 1 : 0;
}
