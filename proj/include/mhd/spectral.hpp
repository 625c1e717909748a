// Fourier representation of fields on the 2-torus and the basic operators.
//
// Coefficients live in an N x N Eigen array in FFT index order: entry (i,j)
// holds the mode (k1,k2) = (wn(i), wn(j)) with wn(i) = i for i < N/2 and
// i - N otherwise. The Nyquist row/column (k = -N/2) is kept at zero.
// A field is f(x) = sum_k c(k) exp(i k.x) on [0,2pi)^2; integrals are means.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace mhd {

using cplx = std::complex<double>;
using Coeffs = Eigen::ArrayXXcd;
using Real2D = Eigen::ArrayXXd;

class Grid {
public:
    explicit Grid(int n, double padding = 1.5);

    int n = 0;
    int padded = 0;     // grid used for quadratic products
    double padding = 1.5;
    Real2D k1, k2, ksq, kabs;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> live;  // false on Nyquist lines

    int wn(int idx) const { return idx < n / 2 ? idx : idx - n; }
    int index(int k) const { return k >= 0 ? k : k + n; }
    int neg(int idx) const { return (n - idx) % n; }
    int kmax() const { return n / 2 - 1; }

    Coeffs zeros() const { return Coeffs::Zero(n, n); }
    bool same(const Grid& o) const { return n == o.n; }
};

struct Vec2 {
    std::array<Coeffs, 2> c;
    Coeffs& operator[](int i) { return c[i]; }
    const Coeffs& operator[](int i) const { return c[i]; }
    static Vec2 zeros(const Grid& g) { return {{g.zeros(), g.zeros()}}; }
};

struct Mat2 {
    std::array<std::array<Coeffs, 2>, 2> c;
    Coeffs& operator()(int i, int j) { return c[i][j]; }
    const Coeffs& operator()(int i, int j) const { return c[i][j]; }
    static Mat2 zeros(const Grid& g);
    Mat2 transpose() const;
};

struct Mat4 {
    std::array<std::array<Coeffs, 4>, 4> c;
    Coeffs& operator()(int i, int j) { return c[i][j]; }
    const Coeffs& operator()(int i, int j) const { return c[i][j]; }
    static Mat4 zeros(const Grid& g);
    Mat2 block(int bi, int bj) const;
    void set_block(int bi, int bj, const Mat2& m);
};

Vec2 operator+(const Vec2& a, const Vec2& b);
Vec2 operator-(const Vec2& a, const Vec2& b);
Vec2 operator*(double s, const Vec2& a);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(double s, const Mat2& a);
Mat4 operator-(const Mat4& a, const Mat4& b);

// transforms ---------------------------------------------------------------
// m is the physical grid size (m >= n, m even).
Real2D to_physical(const Grid& g, const Coeffs& c, int m);
Real2D to_physical(const Grid& g, const Coeffs& c);  // on g.padded
Coeffs to_spectral(const Grid& g, const Real2D& f);  // size read from f
double max_imag_residual(const Grid& g, const Coeffs& c);  // realness probe
Coeffs hermitian_part(const Grid& g, const Coeffs& c);

// operators ----------------------------------------------------------------
Coeffs deriv(const Grid& g, const Coeffs& c, int dir);
Coeffs laplacian(const Grid& g, const Coeffs& c);
Coeffs heat_propagate(const Grid& g, const Coeffs& c, double t, double nu);
Vec2 heat_propagate(const Grid& g, const Vec2& v, double t, double nu);
Coeffs fractional_laplacian(const Grid& g, const Coeffs& c, double alpha);
Vec2 fractional_laplacian(const Grid& g, const Vec2& v, double alpha);
Coeffs multiply_symbol(const Coeffs& c, const Real2D& sym);
Vec2 multiply_symbol(const Vec2& v, const Real2D& sym);
Vec2 laplacian(const Grid& g, const Vec2& v);
Vec2 leray_project(const Grid& g, const Vec2& f);
Coeffs divergence(const Grid& g, const Vec2& v);
Vec2 divergence_tensor(const Grid& g, const Mat2& t);
Mat2 gradient(const Grid& g, const Vec2& phi);  // (grad phi)_ij = d_i phi_j
std::pair<Mat2, Mat2> grad_decompose(const Grid& g, const Vec2& phi);
void zero_mean(Coeffs& c);
void zero_mean(Vec2& v);

// dealiased products -------------------------------------------------------
enum class Flavor { plain, symm, anti };

Coeffs product(const Grid& g, const Coeffs& a, const Coeffs& b);
Mat2 tensor_product(const Grid& g, const Vec2& u, const Vec2& v, Flavor fl = Flavor::plain);
Vec2 advect(const Grid& g, const Vec2& a, const Vec2& f);  // (a.grad) f
Vec2 matvec(const Grid& g, const Mat2& m, const Vec2& w);   // ([M]w)_i = sum_j M_ij w_j

// integrals ----------------------------------------------------------------
double inner(const Coeffs& f, const Coeffs& h);
double inner(const Vec2& f, const Vec2& h);
double inner(const Mat2& f, const Mat2& h);
double norm_l2(const Vec2& f);
double norm_hdot(const Grid& g, const Vec2& f, double s);  // homogeneous H^s
double integral3(const Grid& g, const Coeffs& a, const Coeffs& b, const Coeffs& c);
double abs_integral(const Grid& g, const Real2D& f);       // mean |f|
// |lhs - rhs| / (scale + |lhs| + |rhs|); scale is a floor for identities whose sides vanish
double relative_residual(double lhs, double rhs, double scale);

// diagnostics --------------------------------------------------------------
double div_residual(const Grid& g, const Vec2& v);  // max |k.v(k)| / max|v|
double max_abs(const Coeffs& c);
double max_abs(const Vec2& v);
double max_abs(const Mat2& m);

// random band-limited divergence-free field with std ~ (1+|k|^2)^(-1)
Vec2 random_divfree(const Grid& g, std::uint64_t seed, double band = -1.0, double decay = 1.0);
Coeffs random_scalar(const Grid& g, std::uint64_t seed, double band = -1.0, double decay = 1.0);

// serialization: records (k1, k2, re, im); binary is little-endian
// int32 N, int32 ncomp, then per component N*N records of int32,int32,f64,f64.
std::string to_json_records(const Grid& g, const std::vector<Coeffs>& comps);
void write_binary(const std::string& path, const Grid& g, const std::vector<Coeffs>& comps);
std::vector<Coeffs> read_binary(const std::string& path, int& n_out);
std::vector<Coeffs> from_json_records(const std::string& text, int& n_out);

}  // namespace mhd
