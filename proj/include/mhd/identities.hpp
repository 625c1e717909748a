// Exact cancellation and rewriting identities checked on random band-limited
// divergence-free fields. Scalar identities pair three fields and are
// evaluated on a 2N grid; field identities compare dealiased products.
#pragma once

#include "mhd/lp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mhd {

struct IdentityReport {
    std::string id;
    double lhs = 0, rhs = 0;
    double scale = 0;  // magnitude of the integrand (or of the summed terms)
    double rel = 0;    // |lhs - rhs| / (scale + |lhs| + |rhs|)
    bool equality = false;  // both sides expected nonzero
    double tol = 1e-10;
    std::uint64_t seed = 0;
    int n = 0;
    // equality identities also need |lhs| > 1e-3 scale, else the check has no power
    bool pass() const;
};

// fields for identity checks: coefficients ~ |k|^-2, band-limited to N/3
Vec2 identity_field(const Grid& g, std::uint64_t seed);

// throws std::invalid_argument naming the field
void require_divfree(const Grid& g, const Vec2& v, const char* name);

std::vector<IdentityReport> energy_identities(const Grid& g, const Vec2& u, const Vec2& b);
std::vector<IdentityReport> divfree_tensor_identities(const Grid& g, const Vec2& xu, const Vec2& xb, const Vec2& wu,
                                                      const Vec2& wb, double lambda);
std::vector<IdentityReport> transport_pair_identities(const Grid& g, const Vec2& b, const Vec2& f, const Vec2& h,
                                                      double eps);
std::vector<IdentityReport> paraproduct_algebra_identities(const LPConfig& lp, const Vec2& f, const Vec2& h,
                                                           double lambda);

struct IdentitySuite {
    int n = 64;
    std::vector<std::uint64_t> seeds;
    double lambda = 8;
    double eps = 0.3;
};
// every identity for every seed, ordered by seed then identity
std::vector<IdentityReport> run_identity_suite(const IdentitySuite& cfg, int threads = 1);

std::string identity_csv_header();
std::string identity_csv(const std::vector<IdentityReport>& rows);

}  // namespace mhd
