// SPDX-License-Identifier: Apache-2.0
#include "kglab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kglab {

namespace {

constexpr double kRunaway = 1e6;

FieldState make_state(const Grid1D& grid, std::vector<double> a, std::vector<double> b, Parity p, double t) {
    return FieldState{GridFn(grid, std::move(a), p), GridFn(grid, std::move(b), p), t};
}

Parity state_parity(const FieldState& s) {
    return s.phi1.parity() == s.phi2.parity() ? s.phi1.parity() : Parity::none;
}

FieldState rhs_impl(const FieldState& s, const SpectralBasis& basis, bool sponge, bool nonlinear) {
    require_same_grid(s.phi1, basis.Q);
    require_same_grid(s.phi2, basis.Q);
    const Grid1D& grid = s.phi1.grid();
    const std::size_t n = grid.size();
    std::vector<double> w(n), d2(n), dv(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = nonlinear ? s.phi1[j] - basis.Q[j] : s.phi1[j];
    d2_dirichlet(w, d2, grid.spacing());
    const auto gamma = sponge_profile(grid);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = d2[j] - w[j] + 2.0 * basis.Q[j] * w[j];
        if (nonlinear) acc += w[j] * w[j];
        if (sponge) acc -= gamma[j] * s.phi2[j];
        dv[j] = acc;
    }
    const Parity p = state_parity(s);
    std::vector<double> dw(s.phi2.values().begin(), s.phi2.values().end());
    return make_state(grid, std::move(dw), std::move(dv), p, s.time);
}

}  // namespace

void validate(const EvolveConfig& cfg, const Grid1D& grid) {
    if (!(cfg.dt > 0.0)) throw ConfigError("time step must be positive");
    if (cfg.dt > 0.4 * grid.spacing() * (1.0 + 1e-12))
        throw ConfigError("time step " + std::to_string(cfg.dt) + " exceeds 0.4 h = " +
                          std::to_string(0.4 * grid.spacing()));
    if (!(cfg.t_end >= 0.0)) throw ConfigError("end time must be non-negative");
    if (cfg.record_every < 1) throw ConfigError("record_every must be at least 1");
}

GridFn sponge_profile(const Grid1D& grid) {
    const double W = grid.sponge_width();
    const double R = grid.half_width();
    if (W <= 0.0) return GridFn::zeros(grid);
    return GridFn::sample(
        grid,
        [&](double x) {
            const double s = (std::abs(x) - (R - W)) / W;
            return s > 0.0 ? s * s : 0.0;
        },
        Parity::even);
}

FieldState rhs_full(const FieldState& s, const SpectralBasis& basis, bool sponge) {
    return rhs_impl(s, basis, sponge, true);
}

FieldState rhs_linearized(const FieldState& s, const SpectralBasis& basis, bool sponge) {
    return rhs_impl(s, basis, sponge, false);
}

// ---------------------------------------------------------------- Integrator

Integrator::Integrator(const SpectralBasis& basis, const EvolveConfig& cfg) : basis_(basis), cfg_(cfg) {
    validate(cfg, basis.grid);
    const std::size_t n = basis.grid.size();
    const auto g = sponge_profile(basis.grid);
    gamma_.assign(g.values().begin(), g.values().end());
    if (!cfg.sponge) std::fill(gamma_.begin(), gamma_.end(), 0.0);
    q2_.resize(n);
    for (std::size_t j = 0; j < n; ++j) q2_[j] = 2.0 * basis.Q[j];
    w_.assign(n, 0.0);
    v_.assign(n, 0.0);
    for (auto& k : kw_) k.assign(n, 0.0);
    for (auto& k : kv_) k.assign(n, 0.0);
    tw_.assign(n, 0.0);
    tv_.assign(n, 0.0);
    d2_.assign(n, 0.0);
}

void Integrator::load(const FieldState& s) {
    require_same_grid(s.phi1, basis_.Q);
    require_same_grid(s.phi2, basis_.Q);
    const bool nonlinear = cfg_.mode == EvolveMode::nonlinear;
    for (std::size_t j = 0; j < w_.size(); ++j) {
        w_[j] = nonlinear ? s.phi1[j] - basis_.Q[j] : s.phi1[j];
        v_[j] = s.phi2[j];
    }
    parity_ = state_parity(s);
    t0_ = s.time;
    steps_ = 0;
    t_ = s.time;
}

FieldState Integrator::state() const {
    const bool nonlinear = cfg_.mode == EvolveMode::nonlinear;
    std::vector<double> a(w_.size());
    for (std::size_t j = 0; j < w_.size(); ++j) a[j] = nonlinear ? basis_.Q[j] + w_[j] : w_[j];
    return make_state(basis_.grid, std::move(a), v_, parity_, t_);
}

void Integrator::rhs(const std::vector<double>& w, const std::vector<double>& v, std::vector<double>& dw,
                     std::vector<double>& dv) {
    d2_dirichlet(w, d2_, basis_.grid.spacing());
    const std::size_t n = w.size();
    const double nl = cfg_.mode == EvolveMode::nonlinear ? 1.0 : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        dw[j] = v[j];
        dv[j] = d2_[j] - w[j] + q2_[j] * w[j] + nl * w[j] * w[j] - gamma_[j] * v[j];
    }
}

void Integrator::step() {
    const std::size_t n = w_.size();
    const double dt = cfg_.dt;
    const double half = 0.5 * dt;
    rhs(w_, v_, kw_[0], kv_[0]);
    for (std::size_t j = 0; j < n; ++j) {
        tw_[j] = w_[j] + half * kw_[0][j];
        tv_[j] = v_[j] + half * kv_[0][j];
    }
    rhs(tw_, tv_, kw_[1], kv_[1]);
    for (std::size_t j = 0; j < n; ++j) {
        tw_[j] = w_[j] + half * kw_[1][j];
        tv_[j] = v_[j] + half * kv_[1][j];
    }
    rhs(tw_, tv_, kw_[2], kv_[2]);
    for (std::size_t j = 0; j < n; ++j) {
        tw_[j] = w_[j] + dt * kw_[2][j];
        tv_[j] = v_[j] + dt * kv_[2][j];
    }
    rhs(tw_, tv_, kw_[3], kv_[3]);
    const double sixth = dt / 6.0;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        tw_[j] = w_[j] + sixth * (kw_[0][j] + 2.0 * kw_[1][j] + 2.0 * kw_[2][j] + kw_[3][j]);
        tv_[j] = v_[j] + sixth * (kv_[0][j] + 2.0 * kv_[1][j] + 2.0 * kv_[2][j] + kv_[3][j]);
        worst = std::max({worst, std::abs(tw_[j]), std::abs(tv_[j])});
    }
    if (!std::isfinite(worst) || worst > kRunaway)
        throw BlowUpError(t_, "solution left the representable range after t = " + std::to_string(t_));
    w_.swap(tw_);
    v_.swap(tv_);
    ++steps_;
    t_ = t0_ + static_cast<double>(steps_) * dt;
}

double Integrator::bplus() const {
    const auto& y0 = basis_.Y0;
    double a1 = 0.0, a2 = 0.0;
    for (std::size_t j = 0; j < w_.size(); ++j) {
        a1 += y0[j] * w_[j];
        a2 += y0[j] * v_[j];
    }
    const double h = basis_.grid.spacing();
    return 0.5 * h * (a1 + a2 / SpectralBasis::nu);
}

void Integrator::shift_unstable(double c) {
    for (std::size_t j = 0; j < w_.size(); ++j) {
        w_[j] += c * basis_.Y0[j];
        v_[j] += c * SpectralBasis::nu * basis_.Y0[j];
    }
}

FieldState step(const FieldState& s, const EvolveConfig& cfg, const SpectralBasis& basis) {
    Integrator integ(basis, cfg);
    integ.load(s);
    integ.step();
    return integ.state();
}

EvolveResult evolve(const FieldState& init, const EvolveConfig& cfg, const SpectralBasis& basis,
                    const Observer& observer) {
    Integrator integ(basis, cfg);
    integ.load(init);
    EvolveResult out;
    const long total = std::lround(cfg.t_end / cfg.dt);
    if (observer && !observer(integ.state())) {
        out.stopped = true;
        out.final = integ.state();
        return out;
    }
    try {
        for (long k = 1; k <= total; ++k) {
            integ.step();
            if (observer && k % static_cast<long>(cfg.record_every) == 0 && !observer(integ.state())) {
                out.stopped = true;
                break;
            }
        }
    } catch (const BlowUpError& e) {
        out.blew_up = true;
        out.blowup_time = e.last_valid_time;
    }
    out.final = integ.state();
    return out;
}

// ---------------------------------------------------------------- modes

ModeCoords decompose(const FieldState& s, const SpectralBasis& basis) {
    require_same_grid(s.phi1, basis.Q);
    require_same_grid(s.phi2, basis.Q);
    if (s.phi1.parity() == Parity::odd || s.phi2.parity() == Parity::odd)
        throw PreconditionError("spectral decomposition is defined for even perturbations");
    if (s.phi1.parity() == Parity::none && (s.phi1 - basis.Q).with_parity(Parity::even).parity_defect() > 1e-10)
        throw PreconditionError("spectral decomposition is defined for even perturbations");
    const double nu = SpectralBasis::nu, mu = SpectralBasis::mu;
    const GridFn w = (s.phi1 - basis.Q).with_parity(Parity::even);
    const GridFn v = s.phi2.with_parity(Parity::even);
    ModeCoords m;
    m.a1 = inner(basis.Y0, w);
    m.a2 = inner(basis.Y0, v) / nu;
    m.z1 = inner(basis.Y2, w);
    m.z2 = inner(basis.Y2, v) / mu;
    m.bplus = 0.5 * (m.a1 + m.a2);
    m.bminus = 0.5 * (m.a1 - m.a2);
    m.u1 = w - m.a1 * basis.Y0 - m.z1 * basis.Y2;
    m.u2 = v - (nu * m.a2) * basis.Y0 - (mu * m.z2) * basis.Y2;
    return m;
}

FieldState reconstruct(const ModeCoords& m, const SpectralBasis& basis, double time) {
    const double nu = SpectralBasis::nu, mu = SpectralBasis::mu;
    GridFn phi1 = basis.Q + m.a1 * basis.Y0 + m.z1 * basis.Y2 + m.u1;
    GridFn phi2 = (nu * m.a2) * basis.Y0 + (mu * m.z2) * basis.Y2 + m.u2;
    return FieldState{phi1.with_parity(Parity::even), phi2.with_parity(Parity::even), time};
}

Nonlinearity nonlinearity_terms(const ModeCoords& m, const SpectralBasis& basis) {
    const GridFn base = m.a1 * basis.Y0 + m.z1 * basis.Y2 + m.u1;
    Nonlinearity out{base * base, 0.0, 0.0, GridFn::zeros(basis.grid)};
    out.N0 = inner(basis.Y0, out.N);
    out.N2 = inner(basis.Y2, out.N);
    out.Nperp = out.N - out.N0 * basis.Y0 - out.N2 * basis.Y2;
    return out;
}

double energy(const FieldState& s) {
    const auto d = diff(s.phi1, 1);
    std::vector<double> e(s.phi1.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
        const double p = s.phi1[j];
        e[j] = 0.5 * d[j] * d[j] + 0.5 * s.phi2[j] * s.phi2[j] + 0.5 * p * p - p * p * p / 3.0;
    }
    return quad(GridFn(s.phi1.grid(), std::move(e), Parity::even));
}

double h1l2_norm(const GridFn& f1, const GridFn& f2) {
    const auto d = diff(f1, 1);
    return std::sqrt(inner(d, d) + inner(f1, f1) + inner(f2, f2));
}

// ---------------------------------------------------------------- shooting

int classify_exit(Integrator& integ, double t_max, double theta) {
    const double t_stop = integ.time() + t_max;
    try {
        while (integ.time() < t_stop - 1e-9) {
            integ.step();
            const double b = integ.bplus();
            if (b > theta) return +1;
            if (b < -theta) return -1;
        }
    } catch (const BlowUpError&) {
        // state is left at the last valid step
    }
    return integ.bplus() >= 0.0 ? +1 : -1;
}

ShootResult shoot_manifold(const FieldState& eps_pert, const SpectralBasis& basis, const ShootConfig& cfg,
                           const EvolveConfig& evolve_cfg) {
    const double nu = SpectralBasis::nu;
    if (eps_pert.phi1.parity() == Parity::odd || eps_pert.phi2.parity() == Parity::odd)
        throw PreconditionError("shooting requires an even perturbation");
    if (!(cfg.tol > 0.0) || !(cfg.theta_exit > 0.0)) throw ConfigError("shooting tolerance and threshold must be positive");
    EvolveConfig ecfg = evolve_cfg;
    ecfg.mode = EvolveMode::nonlinear;

    ShootResult out;
    // Remove the Z+ component: adding c Y+ shifts <., Z+> by 2c.
    const double c = 0.5 * (inner(eps_pert.phi1, basis.Y0) + inner(eps_pert.phi2, basis.Y0) / nu);
    GridFn e1 = (eps_pert.phi1 - c * basis.Y0).with_parity(Parity::even);
    GridFn e2 = (eps_pert.phi2 - (c * nu) * basis.Y0).with_parity(Parity::even);
    out.eps = FieldState{e1, e2, 0.0};
    out.eps_norm = h1l2_norm(e1, e2);
    if (out.eps_norm > cfg.max_norm)
        throw PreconditionError("perturbation norm " + std::to_string(out.eps_norm) + " exceeds " +
                                std::to_string(cfg.max_norm));
    out.t_horizon = cfg.t_horizon > 0.0
                        ? cfg.t_horizon
                        : std::max(200.0, 20.0 / nu * std::log(1.0 / std::max(out.eps_norm, 1e-300)));
    if (out.eps_norm == 0.0) return out;

    Integrator base(basis, ecfg);
    base.load(FieldState{(basis.Q + e1).with_parity(Parity::even), e2, 0.0});
    auto probe = [&](double h) {
        Integrator it = base;
        it.shift_unstable(h);
        ++out.probes;
        return classify_exit(it, out.t_horizon, cfg.theta_exit);
    };
    double lo = -out.eps_norm, hi = out.eps_norm;
    const int s_lo = probe(lo);
    const int s_hi = probe(hi);
    if (s_lo == s_hi)
        throw BracketError("no exit-sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "]; widen the bracket");
    while (hi - lo > cfg.tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (probe(mid) == s_lo)
            lo = mid;
        else
            hi = mid;
    }
    out.lo = lo;
    out.hi = hi;
    out.h = 0.5 * (lo + hi);
    return out;
}

TrackResult track_manifold(const FieldState& start, double t_end, const SpectralBasis& basis,
                           const EvolveConfig& evolve_cfg, const TrackConfig& tcfg, const Observer& observer) {
    EvolveConfig ecfg = evolve_cfg;
    ecfg.mode = EvolveMode::nonlinear;
    Integrator integ(basis, ecfg);
    integ.load(start);
    TrackResult out;
    if (observer) observer(integ.state());
    const long total = std::lround((t_end - start.time) / ecfg.dt);
    const long per_segment = std::max(1L, std::lround(tcfg.segment / ecfg.dt));
    long done = 0;
    while (done < total) {
        double width = tcfg.bracket;
        auto probe = [&](double c) {
            Integrator it = integ;
            it.shift_unstable(c);
            ++out.probes;
            return classify_exit(it, tcfg.probe_horizon, tcfg.theta_exit);
        };
        int s_lo = probe(-width), s_hi = probe(width);
        while (s_lo == s_hi) {
            width *= 100.0;
            if (width > 1e-2) throw BracketError("manifold tracking lost the bracket at t = " + std::to_string(integ.time()));
            s_lo = probe(-width);
            s_hi = probe(width);
        }
        double lo = -width, hi = width;
        while (hi - lo > tcfg.tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (probe(mid) == s_lo)
                lo = mid;
            else
                hi = mid;
        }
        const double c = 0.5 * (lo + hi);
        integ.shift_unstable(c);
        out.corrections.push_back(c);
        const long steps = std::min(per_segment, total - done);
        for (long k = 1; k <= steps; ++k) {
            integ.step();
            if (observer && (done + k) % static_cast<long>(ecfg.record_every) == 0) observer(integ.state());
        }
        done += steps;
    }
    out.final = integ.state();
    return out;
}

}  // namespace kglab
