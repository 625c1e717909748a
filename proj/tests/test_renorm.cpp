#include <doctest.h>

#include "mhd/renorm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

using namespace mhd;

namespace {

// plain double loop over the punctured square lattice
double r_oracle(double lambda, double t, double nu) {
    int kmax = int(std::ceil(lambda)) + 1;
    double s = 0;
    for (int a = -kmax; a <= kmax; ++a)
        for (int b = -kmax; b <= kmax; ++b) {
            if (a == 0 && b == 0) continue;
            double q = a * a + b * b;
            double l = low_profile(std::sqrt(q) / lambda);
            s += 0.25 * l * l * (1 - std::exp(-2 * nu * q * t)) / nu / (nu * q / 2 + 1);
        }
    return s;
}

}  // namespace

TEST_CASE("renormalization constant") {
    CHECK(r_lambda(8, 0, 1) == 0.0);
    CHECK(r_lambda(1, 3, 1) == 0.0);
    double o = r_oracle(8, 10, 1);
    CHECK(std::abs(r_lambda(8, 10, 1) - o) < 1e-14 * o);
    CHECK(std::abs(r_lambda(5.5, 0.3, 0.7) - r_oracle(5.5, 0.3, 0.7)) < 1e-13);
    CHECK_THROWS(r_lambda(0.5, 1, 1));
    double prev = 0;
    for (double lam : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        double r = r_lambda(lam, 1, 1);
        CHECK(r > prev);
        prev = r;
    }
    CHECK(r_lambda(8, 0.2, 1) < r_lambda(8, 0.4, 1));
    // logarithmic growth with slope pi / nu^2 for large t
    double x1 = std::log(128.0), x2 = std::log(1024.0);
    double slope = (r_lambda(1024, 50, 1) - r_lambda(128, 50, 1)) / (x2 - x1);
    MESSAGE("r_lambda log slope " << slope);
    CHECK(std::abs(slope - M_PI) < 0.02 * M_PI);
    // grid sum agrees with the lattice sum while the cutoff fits on the grid
    Grid g(32);
    CHECK(std::abs(r_lambda_grid(g, 16, 0.5, 1) - r_lambda(16, 0.5, 1)) < 1e-13);
    CHECK(r_lambda_grid(g, 64, 0.5, 1) < r_lambda(64, 0.5, 1));
}

TEST_CASE("gradient matrix block structure") {
    Grid g(16);
    Vec2 xu = random_divfree(g, 1), xb = random_divfree(g, 2);
    Mat4 m = nabla_spec(g, xu, xb);
    Mat2 d = gradient(g, xu), e = gradient(g, xb);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(max_abs(m(i, j) - 0.5 * (d(i, j) + d(j, i))) < 1e-15);
            CHECK(max_abs(m(i + 2, j + 2) + 0.5 * (d(i, j) + d(j, i))) < 1e-15);
            CHECK(max_abs(m(i, j + 2) - 0.5 * (e(i, j) - e(j, i))) < 1e-15);
            CHECK(max_abs(m(i + 2, j) + 0.5 * (e(i, j) - e(j, i))) < 1e-15);
        }
    // symmetric part of a divergence-free gradient is trace free
    CHECK(max_abs(m(0, 0) + m(1, 1)) < 1e-14);
}

TEST_CASE("degenerate enhanced noise") {
    Grid g(16);
    LPConfig lp(g);
    NoiseState zero(g, 1.0, 1);
    EnhancedNoise e = enhanced_noise(lp, zero, 8);
    CHECK(e.r_value == 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(max_abs(e.resonant(i, j)) == 0.0);
    NoiseState s = sample_noise_at(g, 1.0, 0.5, 2);
    EnhancedNoise one = enhanced_noise(lp, s, 1.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(max_abs(one.resonant(i, j)) == 0.0);
}

TEST_CASE("resonant matrix means and entries") {
    Grid g(16);
    LPConfig lp(g);
    NoiseState s = sample_noise_at(g, 1.0, 0.5, 3);
    EnhancedNoise e = enhanced_noise(lp, s, 6);
    auto means = resonant_means(e.grad_spec, e.resolvent);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double shift = i == j ? e.r_value : 0.0;
            CHECK(std::abs(e.resonant(i, j)(0, 0).real() + shift - means[i][j]) < 1e-12 * (1 + std::abs(shift)));
        }
    Coeffs direct = resonant(lp, e.grad_spec(3, 0), e.resolvent(0, 3)) +
                    resonant(lp, e.grad_spec(3, 1), e.resolvent(1, 3)) +
                    resonant(lp, e.grad_spec(3, 2), e.resolvent(2, 3)) +
                    resonant(lp, e.grad_spec(3, 3), e.resolvent(3, 3));
    direct(0, 0) -= e.r_value;
    CHECK(max_abs(direct - e.resonant(3, 3)) < 1e-13 * max_abs(direct));
}

TEST_CASE("diagonal means carry r, not 4r") {
    ChaosReport rep = chaos_diagnostics(400, 6, 0.5, 1.0, 16, 11, 2);
    for (int i = 0; i < 4; ++i) {
        MESSAGE("diag " << i << " mean " << rep.entry[i][i].mean << " target " << rep.r_value << " z "
                        << rep.entry[i][i].z);
        CHECK(std::abs(rep.entry[i][i].z) < 5);
        CHECK(std::abs(rep.entry[i][i].mean / rep.r_value - 1) < 0.2);
    }
    CHECK(rep.pass);
    auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j["entries"].size() == 16);
    CHECK(j["samples"] == 400);
    // thread count does not change the result
    ChaosReport rep1 = chaos_diagnostics(100, 6, 0.5, 1.0, 16, 11, 1);
    ChaosReport rep3 = chaos_diagnostics(100, 6, 0.5, 1.0, 16, 11, 3);
    CHECK(rep1.entry[2][3].mean == rep3.entry[2][3].mean);
    CHECK(rep1.entry[0][0].stderr_ == rep3.entry[0][0].stderr_);
    CHECK_THROWS(chaos_diagnostics(99, 6, 0.5, 1.0, 16, 11, 1));
}

TEST_CASE("mean error shrinks like one over root samples") {
    // rms error of the (1,1) mean over independent batches, at two batch sizes
    auto rms = [](int n) {
        double acc = 0;
        const int batches = 24;
        for (int b = 0; b < batches; ++b) {
            ChaosReport r = chaos_diagnostics(n, 4, 0.5, 1.0, 8, 7000 + 31 * b + n, 1);
            double d = r.entry[0][0].mean - r.r_value;
            acc += d * d;
        }
        return std::sqrt(acc / batches);
    };
    double slope = std::log(rms(2000) / rms(200)) / std::log(10.0);
    MESSAGE("log-error slope " << slope);
    CHECK(std::abs(slope + 0.5) < 0.15);
}

TEST_CASE("block energies and cauchy differences run") {
    auto v = block_variance_44(8, 6, 0.5, 1.0, 16, 5, 1);
    CHECK(v.size() == std::size_t(LPConfig(Grid(16)).nblocks()));
    for (double x : v) CHECK(x >= 0);
    auto d = cauchy_differences_44(8, {2, 4, 8}, 0.02, 0.5, 1.0, 16, 5, 1);
    CHECK(d.size() == 2);
    CHECK(d[0] > 0);
}

TEST_CASE("r csv table") {
    std::string csv = r_lambda_csv({1, 8}, {0, 1}, 1);
    CHECK(csv.rfind("lambda,t,r\n", 0) == 0);
    int lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 5);
    CHECK(csv.find("1,0,0\n") != std::string::npos);
}
