// Time stepping of the split system: stochastic convolutions X (OU modes),
// the Y equations driven by X, the remainder w, and the auxiliary Q fields.
// Also the adaptive threshold ledger, the high/low split of w, commutators,
// the sharp remainder and the low-frequency energy bookkeeping.
#pragma once

#include "mhd/lp.hpp"
#include "mhd/noise.hpp"
#include "mhd/renorm.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mhd {

struct SolverParams {
    double nu = 1.0;
    double a = 3.0;       // threshold exponent
    double kappa = 0.02;
    double dt = 1e-3;
    bool noise = true;    // false freezes X = 0
    double noise_lambda = -1;  // > 0 mollifies X by low_profile(|k| / noise_lambda)
    bool probe = false;   // compare against an undecomposed first-order step
    double form_tol = 1e-12;
};

struct LedgerEntry {
    int index = 0;      // i of T_i
    double time = 0;    // T_i
    double norm = 0;    // ||w_u|| + ||w_b|| at T_i
    double lambda = 0;  // (1 + norm)^a
};

struct SolverState {
    SolverState(const Grid& g, const SolverParams& p, std::uint64_t seed);

    const Grid* grid;
    SolverParams params;
    double t = 0;
    Vec2 wu, wb, yu, yb, qu, qb;
    Vec2 zeta_u, zeta_b;  // time-independent forcing of the Y equations
    NoiseState noise;
    double lambda_t = 1;
    int i0 = 0;
    int index = 0;  // current stopping-time index
    std::vector<LedgerEntry> ledger;
    long steps = 0;

    double form_residual = 0;   // last y_step gap between the two b-forms
    double probe_residual = 0;  // last undecomposed-step gap (when params.probe)
    bool cfl_warned = false;

    std::pair<Vec2, Vec2> x() const;  // current (possibly mollified) X_u, X_b
};

// w(0) = (u_in, b_in) since X(0) = Y(0) = 0; sets i0, lambda_0 and the ledger head
void set_initial(SolverState& s, const Vec2& u_in, const Vec2& b_in);
double w_norm_sum(const SolverState& s);  // ||w_u|| + ||w_b||
int initial_index(double norm);           // max{i : i <= norm}, 0 when norm < 1
double initial_lambda(double norm, double a);  // (1 + ceil(norm))^a

// Y right-hand side without the linear part; b-part in both algebraic forms
struct YRhs {
    Vec2 u, b, b_alt;
};
YRhs y_nonlinear(const Grid& g, const Vec2& xu, const Vec2& xb, const Vec2& yu, const Vec2& yb);
std::pair<Vec2, Vec2> w_nonlinear(const Grid& g, const Vec2& xu, const Vec2& xb, const Vec2& yu, const Vec2& yb,
                                  const Vec2& wu, const Vec2& wb);

// individual pieces of one time step; step() runs them in order and advances t
void y_step(SolverState& s, const Vec2& xu0, const Vec2& xb0, const Vec2& xu1, const Vec2& xb1, double h);
void w_step(SolverState& s, const Vec2& xu0, const Vec2& xb0, const Vec2& yu0, const Vec2& yb0,
            const Vec2& xu1, const Vec2& xb1, double h);
void update_lambda(SolverState& s);
void step(SolverState& s, double h);
void step(SolverState& s);

struct HLSplit {
    Vec2 u_low, u_high, b_low, b_high;
};
HLSplit hl_split(const LPConfig& lp, const SolverState& s);
HLSplit hl_split(const LPConfig& lp, const Vec2& wu, const Vec2& wb, const Vec2& qu, const Vec2& qb, double lambda);

// ((d_t - nu Lap) f) < g - 2 nu sum_k d_k f < d_k g; dt_f supplies d_t f
Mat2 commutator(const LPConfig& lp, const Vec2& f, const Vec2& g, Flavor fl, double nu,
                const std::function<Vec2()>& dt_f);

std::pair<Vec2, Vec2> wsharp(const LPConfig& lp, const Vec2& wu, const Vec2& wb, const Vec2& qu, const Vec2& qb);
std::pair<Vec2, Vec2> wsharp(const LPConfig& lp, const SolverState& s);
// recover w from w_sharp by fixed-point iteration; throws if it stalls
std::pair<Vec2, Vec2> wsharp_invert(const LPConfig& lp, const Vec2& su, const Vec2& sb, const Vec2& qu,
                                    const Vec2& qb, double tol = 1e-13, int max_iter = 200);

struct EnergyTerms {
    double i1_direct = 0;   // from the two pairings with the div-form tensors
    double i1_spec = 0;     // -nu |W|_H1^2 + 2 <W, (nu/2 Lap - grad_spec) W>
    double i1_literal = 0;  // -nu |W|_H1^2 + 2 <W, A W> + r |W|^2, A carrying -r Id
    double i1_twice_r = 0;  // the same with 2r in place of r
    double r = 0;
    double rel_spec = 0, rel_literal = 0, rel_twice_r = 0;
};
EnergyTerms energy_terms(const Grid& g, const Vec2& wul, const Vec2& wbl, const Vec2& xu_low, const Vec2& xb_low,
                         double nu, double r);

struct DiagnosticsRow {
    double t = 0, lambda = 0, energy = 0;
    double w_l2 = 0, wl_l2 = 0, wl_h1 = 0, wh_hs = 0;
    double x_besov = 0, y_besov = 0, grad_spec_besov = 0, grad_spec_sup = 0;
    double r = 0;
    double i1_rel_spec = 0, i1_rel_literal = 0;
    double form_residual = 0, div_residual = 0;
    int index = 0;
};
DiagnosticsRow energy_report(const LPConfig& lp, const SolverState& s, double running_sup = 0);
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRow& r);

// throws std::runtime_error with a ledger dump if any field is non-finite
void check_finite(const SolverState& s);
std::string ledger_dump(const SolverState& s);

// checkpoint: <path>.json header plus <path>.bin field dump
void save_checkpoint(const SolverState& s, const std::string& path);
SolverState load_checkpoint(const Grid& g, const std::string& path);

// mollified runs on a shared noise realization
struct GalerkinReport {
    std::vector<int> levels;
    std::vector<double> sup_l2;     // sup_t ||w^n - w^2n||_L2 per consecutive pair
    std::vector<double> l2_h0;      // (int_0^T ||.||_L2^2)^{1/2}
    std::vector<double> l2_h_half;  // (int_0^T ||.||_H^{1/2}^2)^{1/2}
    bool decreasing = false;
    std::string to_csv() const;
};
GalerkinReport galerkin_run(const Grid& g, const SolverParams& p, std::uint64_t seed, const Vec2& u_in,
                            const Vec2& b_in, double t_final, const std::vector<int>& levels);

}  // namespace mhd
