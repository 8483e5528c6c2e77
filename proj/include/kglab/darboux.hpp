// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "kglab/numerics.hpp"
#include "kglab/report.hpp"
#include "kglab/spectral.hpp"

namespace kglab {

/**
 * First-order factors D_l = d/dx + (l/2) tanh(x/2) = Z_l d/dx Z_l^{-1},
 * Z_l = sech^l(x/2), and the coefficients of the expanded composite
 *   D1 D2 D3 f = f''' + (k1 f)'' + (k2 f)' + k3 f.
 */
struct DarbouxFactors {
    Grid1D grid;
    GridFn T;                 // tanh(x/2)
    GridFn Z1, Z2, Z3;
    GridFn logZ1, logZ2, logZ3;
    GridFn k1, k2, k3;
    GridFn rho;               // sech^2(x/20)

    const GridFn& Z(int l) const;
    const GridFn& logZ(int l) const;
};

DarbouxFactors build_factors(const Grid1D& grid);

GridFn D(int l, const GridFn& f, const DarbouxFactors& F);
GridFn D_adjoint(int l, const GridFn& f, const DarbouxFactors& F);
GridFn D123(const GridFn& f, const DarbouxFactors& F);
GridFn D123_via_coeffs(const GridFn& f, const DarbouxFactors& F);

struct ConjugationResult {
    double residual = 0.0;
    /// false when f carries more than 1e-10 of its norm outside |x| <= R/2.
    bool decaying = true;
};

/// || D123 L f - (-d^2 + 1) D123 f || / ||f||.
ConjugationResult conjugation_residual(const GridFn& f, const DarbouxFactors& F, const SpectralBasis& basis);

/// Z_l(x) int_0^x Z_l^{-1} f, evaluated with log-space weights.
GridFn R(int l, const GridFn& f, const DarbouxFactors& F);
/// R3 R2 R1.
GridFn R_composite(const GridFn& f, const DarbouxFactors& F);

/// X_eps D1 D2 D3 f.
GridFn S_eps(const GridFn& f, double eps, const DarbouxFactors& F);

/// Integration-by-parts identities for R_l[v'], R[v''] and R[v''''].
Report appendix_identities(const GridFn& v, const DarbouxFactors& F, double tolerance = 1e-6);

/// (||rho u||, ||rho S_eps u|| + ||rho (S_eps u)'||); u must be even with P_c u = u.
std::pair<double, double> transfer_bound_probe(const GridFn& u, double eps, const DarbouxFactors& F,
                                               const SpectralBasis& basis);

/// ||rho R_l[rho^{-1} f]|| / ||f||.
double schur_probe(int l, const GridFn& f, const DarbouxFactors& F);

/// ||sigma S_eps u|| eps^{3/2} / ||sigma u||.
double seps_weighted_constant(const GridFn& u, double eps, const GridFn& sigma, const DarbouxFactors& F);

/// Structural identities of the factors (kernels, log-derivatives, coefficient decay).
Report factor_checks(const DarbouxFactors& F, const SpectralBasis& basis);

/// Twenty fixed decaying test functions of mixed parity.
std::vector<GridFn> canned_suite(const Grid1D& grid);

/**
 * Exact identities over the canned suite: conjugation, right inverses,
 * D123 R = id, appendix identities, P_c transfer, plus factor_checks.
 */
Report darboux_identity_suite(const DarbouxFactors& F, const SpectralBasis& basis);

/// Refinement ratios of the leading suite residuals on the coarse pair (h = 8 and 4 h_default).
Report darboux_convergence(const Grid1D& grid);

/// Gaussian bump with random centre and width, symmetrised to the requested parity.
GridFn random_bump(const Grid1D& grid, std::uint64_t& state, Parity parity);

/// Measured constants of the inequality-type lemmas (reported, not asserted).
struct DarbouxProbes {
    std::vector<double> eps;
    std::vector<double> transfer_ratio;  // max ||rho u|| / (||rho S u|| + ||rho (S u)'||)
    std::vector<double> seps_constant;   // max ||sigma S u|| eps^{3/2} / ||sigma u||
    std::array<double, 3> schur{};       // max ||rho R_l rho^{-1} f|| / ||f||
};

DarbouxProbes darboux_probes(const DarbouxFactors& F, const SpectralBasis& basis, const GridFn& sigma,
                             std::uint64_t seed, const std::vector<double>& eps = {0.01, 0.05, 0.2},
                             int n_transfer = 50, int n_schur = 20);

}  // namespace kglab
