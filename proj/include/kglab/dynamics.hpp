// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kglab/numerics.hpp"
#include "kglab/spectral.hpp"

namespace kglab {

/// (phi1, phi2) = (phi, d_t phi) at one time. For linearized runs the pair
/// holds the perturbation of (Q, 0).
struct FieldState {
    GridFn phi1;
    GridFn phi2;
    double time = 0.0;
};

struct ModeCoords {
    double a1 = 0.0, a2 = 0.0, z1 = 0.0, z2 = 0.0, bplus = 0.0, bminus = 0.0;
    GridFn u1;
    GridFn u2;

    double modz2() const { return z1 * z1 + z2 * z2; }
};

enum class EvolveMode { nonlinear, linearized };

struct EvolveConfig {
    double dt = 0.01;
    double t_end = 0.0;
    bool sponge = true;
    EvolveMode mode = EvolveMode::nonlinear;
    std::size_t record_every = 1;
};

/// Throws ConfigError unless 0 < dt <= 0.4 h, t_end >= 0 and record_every >= 1.
void validate(const EvolveConfig& cfg, const Grid1D& grid);

/// gamma(x) = ((|x| - (R - W)) / W)_+^2, W the sponge width; zero when W = 0.
GridFn sponge_profile(const Grid1D& grid);

/// d_t (phi1, phi2) = (phi2, phi1'' - phi1 + phi1^2 - gamma phi2).
/// Evaluated as w'' - w + 2 Q w + w^2 with w = phi1 - Q, using Q'' = Q - Q^2.
FieldState rhs_full(const FieldState& s, const SpectralBasis& basis, bool sponge);

/// d_t (p1, p2) = (p2, -L p1 - gamma p2).
FieldState rhs_linearized(const FieldState& s, const SpectralBasis& basis, bool sponge);

/**
 * Classical RK4 on the semi-discrete system. Works on the perturbation
 * w = phi1 - Q in place; the second difference uses zero values beyond the
 * boundary (symmetric, so the scheme is stable for dt <= 0.4 h).
 */
class Integrator {
public:
    Integrator(const SpectralBasis& basis, const EvolveConfig& cfg);

    void load(const FieldState& s);
    FieldState state() const;
    double time() const { return t_; }

    /// One RK4 step; throws BlowUpError on a non-finite or runaway state.
    void step();

    /// b+ = (<Y0, w> + <Y0, phi2> / nu) / 2 from the internal buffers.
    double bplus() const;

    std::span<const double> w() const { return w_; }
    std::span<const double> v() const { return v_; }

    /// Adds c (Y0, nu Y0) to the state (a pure shift of b+).
    void shift_unstable(double c);

private:
    void rhs(const std::vector<double>& w, const std::vector<double>& v, std::vector<double>& dw,
             std::vector<double>& dv);

    const SpectralBasis& basis_;
    EvolveConfig cfg_;
    std::vector<double> gamma_;
    std::vector<double> q2_;  // 2Q
    std::vector<double> w_, v_;
    std::vector<double> kw_[4], kv_[4], tw_, tv_, d2_;
    Parity parity_ = Parity::none;
    double t0_ = 0.0;
    long steps_ = 0;
    double t_ = 0.0;
};

FieldState step(const FieldState& s, const EvolveConfig& cfg, const SpectralBasis& basis);

/// Called with the current state every record_every steps (and at t = 0);
/// returning false stops the run.
using Observer = std::function<bool(const FieldState&)>;

struct EvolveResult {
    FieldState final;
    bool blew_up = false;
    double blowup_time = 0.0;
    bool stopped = false;
};

EvolveResult evolve(const FieldState& init, const EvolveConfig& cfg, const SpectralBasis& basis,
                    const Observer& observer = {});

/// Spectral coordinates of an even state (phi1 full field).
ModeCoords decompose(const FieldState& s, const SpectralBasis& basis);
FieldState reconstruct(const ModeCoords& m, const SpectralBasis& basis, double time = 0.0);

struct Nonlinearity {
    GridFn N;
    double N0 = 0.0;
    double N2 = 0.0;
    GridFn Nperp;
};

/// N = (a1 Y0 + z1 Y2 + u1)^2 and its projections.
Nonlinearity nonlinearity_terms(const ModeCoords& m, const SpectralBasis& basis);

/// E = int ( phi1'^2/2 + phi2^2/2 + phi1^2/2 - phi1^3/3 ).
double energy(const FieldState& s);

/// ||(f1, f2)||_{H^1 x L^2}.
double h1l2_norm(const GridFn& f1, const GridFn& f2);

struct ShootConfig {
    double t_horizon = 0.0;  // 0 selects max(200, 20/nu log(1/||eps||))
    double tol = 1e-12;
    double theta_exit = 0.05;
    double max_norm = 0.15;
};

struct ShootResult {
    double h = 0.0;
    double lo = 0.0, hi = 0.0;
    double eps_norm = 0.0;
    double t_horizon = 0.0;
    int probes = 0;
    FieldState eps;  // projected perturbation
};

/// +1 for an up-exit, -1 for a down-exit, judged by b+ against theta.
int classify_exit(Integrator& integ, double t_max, double theta);

/// Bisection for h with Q + eps + h Y+ on the centre-stable manifold.
ShootResult shoot_manifold(const FieldState& eps_pert, const SpectralBasis& basis, const ShootConfig& cfg,
                           const EvolveConfig& evolve_cfg);

struct TrackConfig {
    double segment = 10.0;
    double bracket = 1e-7;
    double tol = 1e-14;
    double probe_horizon = 60.0;
    double theta_exit = 0.05;
};

struct TrackResult {
    FieldState final;
    std::vector<double> corrections;  // b+ shift applied at each segment start
    int probes = 0;
};

/**
 * Follows the manifold from an accepted shot: every `segment` time units the
 * b+ component is re-shot by bisection on a small bracket so that roundoff
 * excited along Y+ does not grow as e^{nu t}.
 */
TrackResult track_manifold(const FieldState& start, double t_end, const SpectralBasis& basis,
                           const EvolveConfig& evolve_cfg, const TrackConfig& tcfg, const Observer& observer = {});

}  // namespace kglab
