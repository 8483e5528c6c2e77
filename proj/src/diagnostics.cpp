// SPDX-License-Identifier: Apache-2.0
#include "kglab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "kglab/errors.hpp"

namespace kglab {

namespace {

constexpr std::array<double TraceRecord::*, kTraceColumns> kFields = {
    &TraceRecord::t,        &TraceRecord::a1,        &TraceRecord::a2,        &TraceRecord::z1,
    &TraceRecord::z2,       &TraceRecord::bplus,     &TraceRecord::bminus,    &TraceRecord::alpha,
    &TraceRecord::beta,     &TraceRecord::rho_u1,    &TraceRecord::sigma_u1,  &TraceRecord::sigma_du1,
    &TraceRecord::sigma_u2, &TraceRecord::rho_Su1,   &TraceRecord::rho_dSu1,  &TraceRecord::I,
    &TraceRecord::Hfun,     &TraceRecord::J,         &TraceRecord::Zfun,      &TraceRecord::Bfun,
    &TraceRecord::K,        &TraceRecord::M,         &TraceRecord::E,         &TraceRecord::localE_2,
    &TraceRecord::localE_5, &TraceRecord::localE_10, &TraceRecord::N0,        &TraceRecord::N2,
    &TraceRecord::dI_rhs,   &TraceRecord::dJ_rhs,    &TraceRecord::dZ_rhs,    &TraceRecord::dK_rhs,
};

void require_odd(const GridFn& f, const char* what) {
    if (f.parity() == Parity::odd) return;
    if (f.parity() == Parity::none && f.with_parity(Parity::odd).parity_defect() <= 1e-12) return;
    throw PreconditionError(std::string(what) + " requires odd input");
}

// (Phi w1' + Phi' w1 / 2) w2
double weighted_virial(const GridFn& Phi, const GridFn& dPhi, const GridFn& w1, const GridFn& w2) {
    return inner(Phi * diff(w1, 1) + 0.5 * dPhi * w1, w2);
}

// -int (Phi w2)' w1 + int Phi' w1 w2 / 2
double weighted_virial_by_parts(const GridFn& Phi, const GridFn& dPhi, const GridFn& w1, const GridFn& w2) {
    return -inner(diff(Phi * w2, 1), w1) + 0.5 * inner(dPhi * w1, w2);
}

GridFn dPhi_A(const VirialWeights& w) { return w.zeta_A * w.zeta_A; }

// (zeta_A^2)'' evaluated on the refined grid and decimated; the cutoff
// transition on 1 < |x| < 2 is under-resolved at the base spacing.
GridFn d3Phi_A(const VirialWeights& w) {
    const Grid1D& grid = w.chi.grid();
    const Grid1D fine(grid.half_width(), 4 * (grid.size() - 1) + 1, grid.sponge_width());
    const double A = w.A;
    const auto z2 = GridFn::sample(
        fine,
        [&](double x) {
            const double z = std::exp(-(1.0 - cutoff_chi(x)) * std::abs(x) / A);
            return z * z;
        },
        Parity::even);
    const auto d2 = diff(z2, 2);
    std::vector<double> out(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) out[j] = d2[4 * j];
    return GridFn(grid, std::move(out), Parity::even);
}

GridFn strip_modes(const GridFn& f, const SpectralBasis& basis) {
    return f - inner(basis.Y0, f) * basis.Y0 - inner(basis.Y2, f) * basis.Y2;
}

}  // namespace

const std::array<const char*, kTraceColumns>& trace_columns() {
    static const std::array<const char*, kTraceColumns> names = {
        "t",        "a1",        "a2",      "z1",       "z2",        "bplus",    "bminus",   "alpha",
        "beta",     "rho_u1",    "sigma_u1", "sigma_du1", "sigma_u2", "rho_Su1",  "rho_dSu1", "I",
        "Hfun",     "J",         "Zfun",    "Bfun",     "K",         "M",        "E",        "localE_2",
        "localE_5", "localE_10", "N0",      "N2",       "dI_rhs",    "dJ_rhs",   "dZ_rhs",   "dK_rhs",
    };
    return names;
}

std::array<double, kTraceColumns> to_row(const TraceRecord& r) {
    std::array<double, kTraceColumns> row{};
    for (std::size_t k = 0; k < kTraceColumns; ++k) row[k] = r.*kFields[k];
    return row;
}

TraceRecord from_row(const std::array<double, kTraceColumns>& row) {
    TraceRecord r;
    for (std::size_t k = 0; k < kTraceColumns; ++k) r.*kFields[k] = row[k];
    return r;
}

double composite_M(const TraceRecord& r) {
    const double z2 = r.modz2();
    return r.sigma_du1 * r.sigma_du1 + r.sigma_u1 * r.sigma_u1 + r.sigma_u2 * r.sigma_u2 + z2 * z2 +
           r.bplus * r.bplus + r.bminus * r.bminus;
}

double virial_I(const GridFn& u1, const GridFn& u2, const VirialWeights& w) {
    return weighted_virial(w.Phi_A, dPhi_A(w), u1, u2);
}

double virial_I(const ModeCoords& m, const VirialWeights& w) { return virial_I(m.u1, m.u2, w); }

double virial_I_by_parts(const GridFn& u1, const GridFn& u2, const VirialWeights& w) {
    return weighted_virial_by_parts(w.Phi_A, dPhi_A(w), u1, u2);
}

double virial_H(const GridFn& u1, const GridFn& u2, const VirialWeights& w) {
    return inner(w.sigma_A * w.sigma_A * u1, u2);
}

double virial_H(const ModeCoords& m, const VirialWeights& w) { return virial_H(m.u1, m.u2, w); }

double virial_J(const ModeCoords& m, const VirialWeights& w, const SpectralBasis& basis) {
    const double mu = SpectralBasis::mu;
    const double a = alpha_of(m.z1, m.z2), b = beta_of(m.z1, m.z2);
    const auto gchi = basis.g * w.chi_A;
    return a * inner(m.u2, gchi) - 2.0 * mu * b * inner(m.u1, gchi) + basis.Gamma / (2.0 * mu) * b * m.modz2();
}

double virial_Zfun(const ModeCoords& m, const SpectralBasis& basis) {
    return basis.Gamma / (4.0 * SpectralBasis::mu) * alpha_of(m.z1, m.z2) * beta_of(m.z1, m.z2);
}

double virial_K(const GridFn& v1, const GridFn& v2, const VirialWeights& w) {
    require_odd(v1, "virial_K");
    require_odd(v2, "virial_K");
    return weighted_virial(w.Psi, diff(w.Psi, 1), v1, v2);
}

double virial_K_by_parts(const GridFn& v1, const GridFn& v2, const VirialWeights& w) {
    require_odd(v1, "virial_K");
    require_odd(v2, "virial_K");
    return weighted_virial_by_parts(w.Psi, diff(w.Psi, 1), v1, v2);
}

std::pair<double, double> coercivity_probe(const GridFn& f, const VirialWeights& w) {
    require_odd(f, "coercivity_probe");
    const double B = VirialWeights::B;
    const auto df = diff(f, 1);
    const auto s2 = (2.0 / (B * B)) * w.zeta_B * w.zeta_B;
    return {inner(df, df), inner(s2 * f, f)};
}

double local_energy(const FieldState& s, const SpectralBasis& basis, double lo, double hi) {
    if (!(lo < hi)) throw PreconditionError("local energy interval must satisfy lo < hi");
    const auto w = s.phi1 - basis.Q;
    const auto dw = diff(w, 1);
    const double v = quad_interval(dw * dw + w * w + s.phi2 * s.phi2, lo, hi);
    return std::sqrt(std::max(v, 0.0));
}

// ---------------------------------------------------------------- trace

TraceBuilder::TraceBuilder(const SpectralBasis& basis, const VirialWeights& weights, const DarbouxFactors& factors,
                           bool sponge)
    : basis_(basis),
      weights_(weights),
      factors_(factors),
      gamma_(sponge ? sponge_profile(basis.grid) : GridFn::zeros(basis.grid)),
      dPhiA_(dPhi_A(weights)),
      d3PhiA_(d3Phi_A(weights)),
      dPsi_(diff(weights.Psi, 1)),
      d3Psi_(diff(diff(weights.Psi, 2), 1)),
      dP_(-2.0 * diff(basis.Q, 1)),
      g_chi_(basis.g * weights.chi_A) {
    if (!(basis.grid == weights.chi.grid()) || !(basis.grid == factors.grid)) throw GridMismatch();
}

TraceRecord TraceBuilder::operator()(const FieldState& s) const {
    const double mu = SpectralBasis::mu;
    const auto m = decompose(s, basis_);
    const auto nl = nonlinearity_terms(m, basis_);
    const auto G = nl.Nperp - strip_modes(gamma_ * s.phi2, basis_);
    const auto& w = weights_;

    TraceRecord r;
    r.t = s.time;
    r.a1 = m.a1;
    r.a2 = m.a2;
    r.z1 = m.z1;
    r.z2 = m.z2;
    r.bplus = m.bplus;
    r.bminus = m.bminus;
    r.alpha = alpha_of(m.z1, m.z2);
    r.beta = beta_of(m.z1, m.z2);

    const auto du1 = diff(m.u1, 1);
    const auto v1 = S_eps(m.u1, w.eps, factors_);
    const auto v2 = S_eps(m.u2, w.eps, factors_);
    const auto SG = S_eps(G, w.eps, factors_);
    const auto dv1 = diff(v1, 1);
    r.rho_u1 = norm(w.rho * m.u1);
    r.sigma_u1 = norm(w.sigma_A * m.u1);
    r.sigma_du1 = norm(w.sigma_A * du1);
    r.sigma_u2 = norm(w.sigma_A * m.u2);
    r.rho_Su1 = norm(w.rho * v1);
    r.rho_dSu1 = norm(w.rho * dv1);

    r.I = inner(w.Phi_A * du1 + 0.5 * dPhiA_ * m.u1, m.u2);
    r.Hfun = virial_H(m, w);
    const double X = inner(m.u1, g_chi_), Y = inner(m.u2, g_chi_);
    const double z2sq = m.modz2();
    r.J = r.alpha * Y - 2.0 * mu * r.beta * X + basis_.Gamma / (2.0 * mu) * r.beta * z2sq;
    r.Zfun = virial_Zfun(m, basis_);
    r.Bfun = m.bplus * m.bplus - m.bminus * m.bminus;
    r.K = inner(w.Psi * dv1 + 0.5 * dPsi_ * v1, v2);
    r.M = composite_M(r);
    r.E = energy(s);
    r.localE_2 = local_energy(s, basis_, -2.0, 2.0);
    r.localE_5 = local_energy(s, basis_, -5.0, 5.0);
    r.localE_10 = local_energy(s, basis_, -10.0, 10.0);
    r.N0 = nl.N0;
    r.N2 = nl.N2;

    r.dI_rhs = -inner(dPhiA_ * du1, du1) + 0.25 * inner(d3PhiA_ * m.u1, m.u1) +
               0.5 * inner(w.Phi_A * dP_ * m.u1, m.u1) + inner(G, w.Phi_A * du1 + 0.5 * dPhiA_ * m.u1);

    const double L3 = inner(apply_L(m.u1, basis_) - 3.0 * m.u1, g_chi_);
    const double J1 = -r.alpha * L3;
    const double J2 = -r.alpha * (basis_.Gamma * z2sq - inner(G, g_chi_));
    const double J3 = -2.0 / mu * nl.N2 * (m.z2 * Y + 2.0 * mu * m.z1 * X);
    const double J4 = basis_.Gamma / (mu * mu) * nl.N2 * (m.z1 * z2sq + m.z2 * r.beta);
    r.dJ_rhs = J1 + J2 + J3 + J4;
    r.dZ_rhs = 0.5 * basis_.Gamma * (r.beta * r.beta - r.alpha * r.alpha) +
               basis_.Gamma / (2.0 * mu * mu) * nl.N2 * (r.alpha * m.z1 - r.beta * m.z2);

    r.dK_rhs = -inner(dPsi_ * dv1, dv1) + 0.25 * inner(d3Psi_ * v1, v1) + inner(SG, w.Psi * dv1 + 0.5 * dPsi_ * v1);
    return r;
}

// ---------------------------------------------------------------- identities

const char* to_string(Identity which) {
    switch (which) {
        case Identity::I: return "I";
        case Identity::JZ: return "J+Z";
        case Identity::B: return "B";
        case Identity::K: return "K";
        case Identity::modz2: return "modz2";
    }
    return "?";
}

IdentityResult virial_identity_check(const std::vector<TraceRecord>& trace, Identity which) {
    const std::size_t n = trace.size();
    if (n < 7) throw PreconditionError("trace too sparse: at least 7 records are needed");
    const double dt = trace[1].t - trace[0].t;
    if (!(dt > 0.0) || dt > 0.05) throw PreconditionError("trace too sparse: record spacing must be at most 0.05");
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs((trace[i].t - trace[i - 1].t) - dt) > 1e-9 * std::max(1.0, std::abs(trace[i].t)))
            throw PreconditionError("trace records are not uniformly spaced in time");

    const double nu = SpectralBasis::nu, mu = SpectralBasis::mu;
    std::vector<double> f(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = trace[i];
        switch (which) {
            case Identity::I:
                f[i] = r.I;
                rhs[i] = r.dI_rhs;
                break;
            case Identity::JZ:
                f[i] = r.J + r.Zfun;
                rhs[i] = r.dJ_rhs + r.dZ_rhs;
                break;
            case Identity::B:
                f[i] = r.Bfun;
                rhs[i] = 2.0 * nu * (r.bplus * r.bplus + r.bminus * r.bminus) + r.N0 / nu * (r.bplus + r.bminus);
                break;
            case Identity::K:
                f[i] = r.K;
                rhs[i] = r.dK_rhs;
                break;
            case Identity::modz2:
                f[i] = r.modz2();
                rhs[i] = 2.0 / mu * r.z2 * r.N2;
                break;
        }
    }

    double c_fd = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        c_fd = std::max(c_fd, std::abs(rhs[i + 1] - 2.0 * rhs[i] + rhs[i - 1]) / (dt * dt) / 6.0);

    IdentityResult out;
    out.name = to_string(which);
    out.tolerance = 2.0 * c_fd * dt * dt + 1e-6;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double d1 = (f[i + 1] - f[i - 1]) / (2.0 * dt);
        const double d2 = (f[i + 2] - f[i - 2]) / (4.0 * dt);
        const double e1 = std::abs(d1 - rhs[i]);
        if (!(e1 <= out.mismatch)) {
            out.mismatch = std::isnan(e1) ? HUGE_VAL : e1;
            out.worst_time = trace[i].t;
        }
        out.coarse_mismatch = std::max(out.coarse_mismatch, std::abs(d2 - rhs[i]));
        out.richardson_mismatch = std::max(out.richardson_mismatch, std::abs((4.0 * d1 - d2) / 3.0 - rhs[i]));
    }
    out.pass = out.mismatch <= out.tolerance && out.richardson_mismatch <= out.tolerance;
    return out;
}

Report trace_row_checks(const std::vector<TraceRecord>& trace) {
    double da = 0.0, db = 0.0, dB = 0.0, dM = 0.0, dz = 0.0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
    for (const auto& r : trace) {
        const double a = alpha_of(r.z1, r.z2), b = beta_of(r.z1, r.z2);
        da = std::max(da, std::abs(r.alpha - a) / std::max(r.modz2(), 1e-300));
        db = std::max(db, std::abs(r.beta - b) / std::max(r.modz2(), 1e-300));
        dB = std::max(dB, std::abs(r.Bfun - (r.bplus * r.bplus - r.bminus * r.bminus)) /
                              std::max(r.bplus * r.bplus + r.bminus * r.bminus, 1e-300));
        dM = std::max(dM, rel(r.M, composite_M(r)));
        const double z4 = r.modz2() * r.modz2();
        dz = std::max(dz, std::abs(r.alpha * r.alpha + r.beta * r.beta - z4) / std::max(z4, 1e-300));
    }
    const double tol = 1e-13;
    return {make_check("row_alpha", da, tol), make_check("row_beta", db, tol), make_check("row_B", dB, tol),
            make_check("row_M", dM, tol), make_check("row_alpha2_beta2_modz4", dz, tol)};
}

// ---------------------------------------------------------------- summaries

double windowed_modz2(const std::vector<TraceRecord>& trace, double t0, double width) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : trace)
        if (r.t >= t0 - 1e-9 && r.t <= t0 + width + 1e-9) {
            sum += r.modz2();
            ++count;
        }
    if (count == 0) throw PreconditionError("window contains no trace records");
    return sum / static_cast<double>(count);
}

DampingSummary damping_summary(const std::vector<TraceRecord>& trace, double A) {
    if (trace.size() < 2) throw PreconditionError("damping summary needs at least two records");
    DampingSummary s;
    s.M_start = trace.front().M;
    s.M_end = trace.back().M;
    s.localE5_start = trace.front().localE_5;
    s.localE5_end = trace.back().localE_5;
    const double t0 = trace.front().t, t1 = trace.back().t;
    const double q1 = t0 + 0.25 * (t1 - t0), q3 = t0 + 0.75 * (t1 - t0);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const auto& a = trace[i - 1];
        const auto& b = trace[i];
        const double piece = 0.5 * (a.M + b.M) * (b.t - a.t);
        s.intM_total += piece;
        const double mid = 0.5 * (a.t + b.t);
        if (mid <= q1) s.intM_first_quarter += piece;
        if (mid >= q3) s.intM_last_quarter += piece;
    }
    for (const auto& r : trace) {
        if (r.M > 0.0) s.I_constant = std::max(s.I_constant, std::abs(r.I) / (A * r.M));
        const double cs = r.sigma_u1 * r.sigma_u2;
        if (cs > 0.0) s.H_constant = std::max(s.H_constant, std::abs(r.Hfun) / cs);
    }
    return s;
}

}  // namespace kglab
