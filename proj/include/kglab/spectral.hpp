// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "kglab/numerics.hpp"
#include "kglab/report.hpp"

namespace kglab {

inline double sech(double x) { return 1.0 / std::cosh(x); }

/**
 * Soliton Q = (3/2) sech^2(x/2), the eigenfunctions of
 * L = -d^2 - 2Q + 1 and the radiation profile g with L g = 3 g.
 *
 *   L Y0 = -nu^2 Y0,  L Y1 = 0,  L Y2 = mu^2 Y2,  L Y3 = Y3 (bounded, odd).
 */
struct SpectralBasis {
    static constexpr double nu2 = 1.25;
    static constexpr double mu2 = 0.75;
    static const double nu;
    static const double mu;
    static const double c0;
    static const double c1;
    static const double c2;

    Grid1D grid;
    GridFn Q, Y0, Y1, Y2, Y3, g;
    double Gamma;
};

/// (243/32) pi cosech(sqrt(2) pi).
double fgr_closed_form();

SpectralBasis build_basis(const Grid1D& grid);

/// -f'' - 2 Q f + f.
GridFn apply_L(const GridFn& f, const SpectralBasis& basis);

/// f - <Y0,f> Y0 - <Y1,f> Y1 - <Y2,f> Y2.
GridFn project_continuous(const GridFn& f, const SpectralBasis& basis);

/// (1/2) int Y2^2 g.
double fgr_constant_by_quadrature(const SpectralBasis& basis);

/// Darboux image H of Y2^2 against its closed forms; see fgr.cpp.
Report fgr_H_identities(const SpectralBasis& basis);

/// Orthonormality, eigen-residuals and g-orthogonality on one grid.
Report eigen_checks(const SpectralBasis& basis);

/// Residual ratios between the coarse grid (h = 8 h_default) and its refinement.
Report eigen_convergence(const Grid1D& grid);

/// Interior half width R - 2W, W the sponge width (R/6 when the sponge is off).
double interior_limit(const Grid1D& grid);
double interior_max_abs(const GridFn& f);

/// Max over k <= kmax of sup |f^(k)| / rho^3, rho = sech^2(x/20), on |x| <= limit.
double decay_domination(const GridFn& f, int kmax, double limit);

struct VirialWeights {
    static constexpr double B = 100.0;
    double A;
    double eps;
    GridFn chi;      // chi(x)
    GridFn chi_A;    // chi(x / A)
    GridFn zeta_A;   // exp(-(1 - chi)|x|/A)
    GridFn Phi_A;    // int_0^x zeta_A^2
    GridFn sigma_A;  // sech(2x/A)
    GridFn rho;      // sech^2(x/20)
    GridFn zeta_B;   // sech(x/B)
    GridFn Phi_B;    // B tanh(x/B)
    GridFn Psi;      // chi_A^2 Phi_B
};

/// Smooth even cutoff: 1 on |x| <= 1, 0 on |x| >= 2, non-increasing in |x|.
double cutoff_chi(double x);

VirialWeights build_weights(const Grid1D& grid, double A = 20.0, double eps = 0.05);

Report weight_checks(const VirialWeights& w);

}  // namespace kglab
