// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "kglab/darboux.hpp"
#include "kglab/dynamics.hpp"
#include "kglab/report.hpp"
#include "kglab/spectral.hpp"

namespace kglab {

/// One sample of every traced quantity. Field order is the CSV column order.
struct TraceRecord {
    double t = 0.0;
    double a1 = 0.0, a2 = 0.0, z1 = 0.0, z2 = 0.0, bplus = 0.0, bminus = 0.0;
    double alpha = 0.0, beta = 0.0;
    double rho_u1 = 0.0, sigma_u1 = 0.0, sigma_du1 = 0.0, sigma_u2 = 0.0, rho_Su1 = 0.0, rho_dSu1 = 0.0;
    double I = 0.0, Hfun = 0.0, J = 0.0, Zfun = 0.0, Bfun = 0.0, K = 0.0;
    double M = 0.0, E = 0.0;
    double localE_2 = 0.0, localE_5 = 0.0, localE_10 = 0.0;
    double N0 = 0.0, N2 = 0.0;
    double dI_rhs = 0.0, dJ_rhs = 0.0, dZ_rhs = 0.0, dK_rhs = 0.0;

    double modz2() const { return z1 * z1 + z2 * z2; }
};

inline constexpr std::size_t kTraceColumns = 32;

const std::array<const char*, kTraceColumns>& trace_columns();
std::array<double, kTraceColumns> to_row(const TraceRecord& r);
TraceRecord from_row(const std::array<double, kTraceColumns>& row);

/// z1^2 - z2^2 and 2 z1 z2.
inline double alpha_of(double z1, double z2) { return z1 * z1 - z2 * z2; }
inline double beta_of(double z1, double z2) { return 2.0 * z1 * z2; }

/// |d u1|_sigma^2 + |u1|_sigma^2 + |u2|_sigma^2 + |z|^4 + b+^2 + b-^2 from the record's parts.
double composite_M(const TraceRecord& r);

/// int (Phi_A u1' + Phi_A' u1 / 2) u2.
double virial_I(const GridFn& u1, const GridFn& u2, const VirialWeights& w);
double virial_I(const ModeCoords& m, const VirialWeights& w);
/// Same functional after moving the derivative onto Phi_A u2.
double virial_I_by_parts(const GridFn& u1, const GridFn& u2, const VirialWeights& w);

/// int sigma_A^2 u1 u2.
double virial_H(const GridFn& u1, const GridFn& u2, const VirialWeights& w);
double virial_H(const ModeCoords& m, const VirialWeights& w);

/// alpha int u2 g chi_A - 2 mu beta int u1 g chi_A + (Gamma / 2mu) beta |z|^2.
double virial_J(const ModeCoords& m, const VirialWeights& w, const SpectralBasis& basis);
/// (Gamma / 4mu) alpha beta.
double virial_Zfun(const ModeCoords& m, const SpectralBasis& basis);

/// int (Psi v1' + Psi' v1 / 2) v2 for odd v1, v2.
double virial_K(const GridFn& v1, const GridFn& v2, const VirialWeights& w);
double virial_K_by_parts(const GridFn& v1, const GridFn& v2, const VirialWeights& w);

/// (int f'^2, (2/B^2) int sech^2(x/B) f^2) for odd f.
std::pair<double, double> coercivity_probe(const GridFn& f, const VirialWeights& w);

/// ||(phi1 - Q, phi2)||_{H^1(I) x L^2(I)} on I = [lo, hi].
double local_energy(const FieldState& s, const SpectralBasis& basis, double lo, double hi);

/**
 * Evaluates a TraceRecord from a full state. The exact right-hand sides of
 * the virial identities use G = N_perp - (gamma phi2)_perp for the u-equation
 * and S_eps G for the transformed variables.
 */
class TraceBuilder {
public:
    TraceBuilder(const SpectralBasis& basis, const VirialWeights& weights, const DarbouxFactors& factors,
                 bool sponge);

    TraceRecord operator()(const FieldState& s) const;

    const SpectralBasis& basis() const { return basis_; }
    const VirialWeights& weights() const { return weights_; }

private:
    const SpectralBasis& basis_;
    const VirialWeights& weights_;
    const DarbouxFactors& factors_;
    GridFn gamma_;
    GridFn dPhiA_, d3PhiA_;
    GridFn dPsi_, d3Psi_;
    GridFn dP_;
    GridFn g_chi_;
};

enum class Identity { I, JZ, B, K, modz2 };

const char* to_string(Identity which);

struct IdentityResult {
    std::string name;
    double mismatch = 0.0;             // max |D_dt f - rhs|, centered differences
    double coarse_mismatch = 0.0;      // same with stride 2
    double richardson_mismatch = 0.0;  // (4 D_dt - D_2dt)/3 against rhs
    double tolerance = 0.0;            // 2 C_fd dt^2 + 1e-6
    double worst_time = 0.0;
    bool pass = false;
};

/// Centered-difference replay of one exact identity along a trace recorded every step.
IdentityResult virial_identity_check(const std::vector<TraceRecord>& trace, Identity which);

/// Row identities: alpha, beta, B = b+^2 - b-^2, M recomposed, alpha^2 + beta^2 = |z|^4.
Report trace_row_checks(const std::vector<TraceRecord>& trace);

/// Long-time summary of a trajectory.
struct DampingSummary {
    double M_start = 0.0, M_end = 0.0;
    double localE5_start = 0.0, localE5_end = 0.0;
    double intM_first_quarter = 0.0, intM_last_quarter = 0.0;
    double intM_total = 0.0;
    /// Smallest C with |I| <= C A M over the run.
    double I_constant = 0.0;
    /// max |H| / (|sigma u1| |sigma u2|); at most 1.
    double H_constant = 0.0;
};

DampingSummary damping_summary(const std::vector<TraceRecord>& trace, double A);

/// Mean of |z|^2 over records with t in [t0, t0 + width].
double windowed_modz2(const std::vector<TraceRecord>& trace, double t0, double width);

}  // namespace kglab
