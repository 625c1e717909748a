// FFTW-backed transforms between coefficient arrays and physical grids.
#include "mhd/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace mhd {
namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;  // r2c
    fftw_plan bwd = nullptr;  // c2r
};

std::mutex plan_mutex;
std::map<int, PlanPair> plans;

// Plans are created once per size against scratch buffers and then executed
// on per-call arrays through the new-array interface.
const PlanPair& plan_for(int m) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = plans.find(m);
    if (it != plans.end()) return it->second;
    int h = m / 2 + 1;
    double* r = fftw_alloc_real(std::size_t(m) * m);
    fftw_complex* c = fftw_alloc_complex(std::size_t(m) * h);
    PlanPair p;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.fwd = fftw_plan_dft_r2c_2d(m, m, r, c, flags);
    p.bwd = fftw_plan_dft_c2r_2d(m, m, c, r, flags);
    fftw_free(r);
    fftw_free(c);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan failed");
    return plans.emplace(m, p).first->second;
}

}  // namespace

// Physical array f(p,q) sits at p + m*q (Eigen column-major). FFTW sees it as
// a row-major [q][p] array, so its last (halved) dimension is p, i.e. k1.
Real2D to_physical(const Grid& g, const Coeffs& c, int m) {
    if (m < g.n || m % 2) throw std::invalid_argument("bad physical size");
    const int n = g.n, h = m / 2 + 1, half = n / 2;
    std::vector<cplx> buf(std::size_t(m) * h, cplx(0, 0));
    for (int j = 0; j < n; ++j) {
        int k2 = g.wn(j);
        if (k2 == -half) continue;
        int q = k2 >= 0 ? k2 : k2 + m;
        for (int k1 = 0; k1 < half; ++k1) buf[std::size_t(q) * h + k1] = c(k1, j);
    }
    Real2D out(m, m);
    fftw_execute_dft_c2r(plan_for(m).bwd, reinterpret_cast<fftw_complex*>(buf.data()), out.data());
    return out;
}

Real2D to_physical(const Grid& g, const Coeffs& c) { return to_physical(g, c, g.padded); }

Coeffs to_spectral(const Grid& g, const Real2D& f) {
    const int m = int(f.rows());
    if (f.cols() != m || m < g.n) throw std::invalid_argument("bad physical array");
    const int n = g.n, h = m / 2 + 1, half = n / 2;
    std::vector<cplx> buf(std::size_t(m) * h);
    Real2D in = f;  // r2c may not preserve input for all plans
    fftw_execute_dft_r2c(plan_for(m).fwd, in.data(), reinterpret_cast<fftw_complex*>(buf.data()));
    const double scale = 1.0 / (double(m) * m);
    Coeffs c = Coeffs::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        int k2 = g.wn(j);
        if (k2 == -half) continue;
        int q = k2 >= 0 ? k2 : k2 + m;
        for (int k1 = 0; k1 < half; ++k1) {
            cplx v = buf[std::size_t(q) * h + k1] * scale;
            c(k1, j) = v;
            if (k1 > 0) c(g.neg(k1), g.neg(j)) = std::conj(v);
        }
    }
    // k1 = 0 column: enforce exact symmetry between k2 and -k2
    for (int j = 1; j < half; ++j) {
        cplx a = c(0, j), b = c(0, g.neg(j));
        cplx s = 0.5 * (a + std::conj(b));
        c(0, j) = s;
        c(0, g.neg(j)) = std::conj(s);
    }
    c(0, 0) = cplx(c(0, 0).real(), 0.0);
    return c;
}

}  // namespace mhd
