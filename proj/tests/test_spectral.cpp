#include <doctest.h>

#include "mhd/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace mhd;

namespace {

double rel(double a, double b) { return std::abs(a - b) / (1e-300 + std::abs(a) + std::abs(b)); }

double maxdiff(const Vec2& a, const Vec2& b) { return max_abs(a - b); }

Coeffs single(const Grid& g, int k1, int k2, cplx v) {
    Coeffs c = g.zeros();
    c(g.index(k1), g.index(k2)) = v;
    c(g.index(-k1), g.index(-k2)) += std::conj(v);
    return c;
}

}  // namespace

TEST_CASE("grid rejects odd or tiny sizes") {
    CHECK_THROWS(Grid(15));
    CHECK_THROWS(Grid(2));
    CHECK_THROWS(Grid(16, 1.2));
    Grid g(16);
    CHECK(g.padded == 24);
    CHECK(g.wn(7) == 7);
    CHECK(g.wn(8) == -8);
    CHECK(g.wn(15) == -1);
}

TEST_CASE("transform round trip and realness") {
    Grid g(32);
    Coeffs c = random_scalar(g, 3);
    Real2D f = to_physical(g, c);
    Coeffs back = to_spectral(g, f);
    CHECK(max_abs(back - c) < 1e-14 * max_abs(c));
    CHECK(max_imag_residual(g, back) < 1e-13);
    // on the unpadded grid too
    Coeffs back2 = to_spectral(g, to_physical(g, c, g.n));
    CHECK(max_abs(back2 - c) < 1e-14 * max_abs(c));
}

TEST_CASE("single mode evaluates to 2cos") {
    Grid g(16);
    Coeffs c = single(g, 1, 2, cplx(1, 0));
    Real2D f = to_physical(g, c, 16);
    double h = 2 * M_PI / 16;
    for (int q = 0; q < 16; q += 3)
        for (int p = 0; p < 16; p += 5) CHECK(std::abs(f(p, q) - 2 * std::cos(h * p + 2 * h * q)) < 1e-13);
}

TEST_CASE("leray single modes") {
    Grid g(16);
    Vec2 f = Vec2::zeros(g);
    f[0](g.index(1), g.index(0)) = 1.0;
    Vec2 p = leray_project(g, f);
    CHECK(std::abs(p[0](g.index(1), 0)) < 1e-15);
    CHECK(std::abs(p[1](g.index(1), 0)) < 1e-15);

    Vec2 h = Vec2::zeros(g);
    h[0](0, g.index(1)) = 1.0;
    Vec2 q = leray_project(g, h);
    CHECK(std::abs(q[0](0, g.index(1)) - 1.0) < 1e-15);
    CHECK(std::abs(q[1](0, g.index(1))) < 1e-15);
}

TEST_CASE("leray annihilates gradients and keeps solenoidal fields") {
    Grid g(32);
    Coeffs phi = random_scalar(g, 11);
    Vec2 grad{{deriv(g, phi, 0), deriv(g, phi, 1)}};
    CHECK(max_abs(leray_project(g, grad)) < 1e-14 * max_abs(grad));
    Vec2 u = random_divfree(g, 5);
    CHECK(maxdiff(leray_project(g, u), u) < 1e-15);
    CHECK(div_residual(g, u) < 1e-15);
}

TEST_CASE("leray idempotent and orthogonal") {
    Grid g(32);
    Vec2 f{{random_scalar(g, 1), random_scalar(g, 2)}};
    Vec2 h{{random_scalar(g, 3), random_scalar(g, 4)}};
    Vec2 pf = leray_project(g, f), ph = leray_project(g, h);
    CHECK(maxdiff(leray_project(g, pf), pf) < 1e-15);
    double o = inner(f - pf, ph);
    CHECK(std::abs(o) < 1e-12 * norm_l2(f) * norm_l2(h));
}

TEST_CASE("tensor flavors split") {
    Grid g(32);
    Vec2 u = random_divfree(g, 7), v = random_divfree(g, 8);
    Mat2 s = tensor_product(g, u, v, Flavor::symm), s2 = tensor_product(g, v, u, Flavor::symm);
    Mat2 a = tensor_product(g, u, v, Flavor::anti), a2 = tensor_product(g, v, u, Flavor::anti);
    Mat2 p = tensor_product(g, u, v);
    double sc = max_abs(p);
    CHECK(max_abs(s - s2) < 1e-15 * sc);
    CHECK(max_abs(a + a2) < 1e-15 * sc);
    CHECK(max_abs(s + a - p) < 1e-15 * sc);
}

TEST_CASE("tensor divergence matches advection") {
    Grid g(32);
    Vec2 u = random_divfree(g, 21), b = random_divfree(g, 22);
    Vec2 d = divergence_tensor(g, tensor_product(g, u, u));
    Vec2 adv = advect(g, u, u);
    CHECK(maxdiff(d, adv) < 1e-12 * max_abs(adv));
    // div(b x u - u x b) = (u.grad) b - (b.grad) u
    Vec2 lhs = divergence_tensor(g, tensor_product(g, b, u) - tensor_product(g, u, b));
    Vec2 rhs = advect(g, u, b) - advect(g, b, u);
    CHECK(maxdiff(lhs, rhs) < 1e-12 * max_abs(rhs));
    Mat2 c = Mat2::zeros(g);
    c(0, 1)(0, 0) = 3.0;
    CHECK(max_abs(divergence_tensor(g, c)) == 0.0);
}

TEST_CASE("gradient split") {
    Grid g(32);
    Coeffs phi = random_scalar(g, 9);
    Vec2 grad{{deriv(g, phi, 0), deriv(g, phi, 1)}};
    auto [sy, an] = grad_decompose(g, grad);
    CHECK(max_abs(an) < 1e-14 * max_abs(sy));
    Vec2 u = random_divfree(g, 10);
    auto [s2, a2] = grad_decompose(g, u);
    CHECK(max_abs(s2 + a2 - gradient(g, u)) <= 1e-15 * max_abs(s2));
    CHECK(max_abs(s2(0, 0) + s2(1, 1)) < 1e-14 * max_abs(s2));
}

TEST_CASE("heat propagation") {
    Grid g(16);
    Coeffs c = single(g, 1, 0, cplx(1, 0));
    CHECK(max_abs(heat_propagate(g, c, 0.0, 1.0) - c) == 0.0);
    Coeffs h = heat_propagate(g, c, std::log(2.0), 1.0);
    CHECK(std::abs(h(1, 0) - 0.5) < 1e-15);
    Coeffs k0 = g.zeros();
    k0(0, 0) = 2.0;
    CHECK(std::abs(heat_propagate(g, k0, 3.0, 1.0)(0, 0) - 2.0) == 0.0);
    CHECK_THROWS(heat_propagate(g, c, -1.0, 1.0));
}

TEST_CASE("parseval and orthogonality") {
    Grid g(16);
    Coeffs c = single(g, 2, 1, cplx(1, 0));
    CHECK(std::abs(inner(c, c) - 2.0) < 1e-15);
    // quadrature of the same field
    Real2D f = to_physical(g, c);
    CHECK(std::abs(f.square().mean() - 2.0) < 1e-13);
    CHECK(inner(c, single(g, 3, 1, cplx(1, 0))) == 0.0);
}

TEST_CASE("fractional laplacian") {
    Grid g(16);
    Coeffs c = single(g, 2, 0, cplx(1, 0.5));
    CHECK(max_abs(fractional_laplacian(g, c, 1.0) - 4.0 * c) < 1e-14);
    CHECK(max_abs(fractional_laplacian(g, c, 0.0) - c) == 0.0);
    Coeffs r = random_scalar(g, 2);
    Coeffs twice = fractional_laplacian(g, fractional_laplacian(g, r, 0.5), 0.5);
    CHECK(max_abs(twice + laplacian(g, r)) < 1e-13 * max_abs(laplacian(g, r)));
    Coeffs m = r;
    m(0, 0) = 1.0;
    CHECK_THROWS(fractional_laplacian(g, m, -0.5));
}

TEST_CASE("dealiased products are exact") {
    Grid g(32);
    Coeffs f = random_scalar(g, 31), a = random_scalar(g, 32), b = random_scalar(g, 33);
    double via_parseval = inner(f, product(g, a, b));
    double via_quad = integral3(g, f, a, b);
    CHECK(rel(via_parseval, via_quad) < 1e-12);
}

TEST_CASE("serialization round trips") {
    Grid g(16);
    Coeffs a = random_scalar(g, 1), b = random_scalar(g, 2);
    int n = 0;
    auto back = from_json_records(to_json_records(g, {a, b}), n);
    CHECK(n == 16);
    REQUIRE(back.size() == 2);
    CHECK(max_abs(back[1] - b) == 0.0);
    auto path = std::filesystem::temp_directory_path() / "mhd_field_test.bin";
    write_binary(path.string(), g, {a, b});
    auto bin = read_binary(path.string(), n);
    CHECK(max_abs(bin[0] - a) == 0.0);
    std::filesystem::remove(path);
}
