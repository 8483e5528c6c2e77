// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "kglab/darboux.hpp"

namespace kglab {

namespace {

double interior_dev(const GridFn& a, const GridFn& b, double limit) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (std::abs(a.grid().x(j)) <= limit) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

double gauss(double x, double c, double w) { return std::exp(-(x - c) * (x - c) / (2.0 * w * w)); }

struct SuiteResiduals {
    double conjugation = 0.0;
    double right_inverse = 0.0;  // D_l R_l f - f
    double left_inverse = 0.0;   // R_l D_l f - (f - f(0) Z_l)
    double composite = 0.0;      // D123 R f - f
    double transfer = 0.0;       // P_c R D123 f - P_c f
    double appendix = 0.0;
    bool decaying = true;
};

SuiteResiduals suite_residuals(const DarbouxFactors& F, const SpectralBasis& basis,
                               const std::vector<GridFn>& suite) {
    const Grid1D& grid = F.grid;
    const double half = 0.5 * grid.half_width();
    SuiteResiduals s;
    for (const auto& f : suite) {
        const double scale = f.max_abs();
        const auto c = conjugation_residual(f, F, basis);
        s.conjugation = std::max(s.conjugation, c.residual);
        s.decaying = s.decaying && c.decaying;
        for (int l = 1; l <= 3; ++l) {
            s.right_inverse = std::max(s.right_inverse, interior_dev(D(l, R(l, f, F), F), f, half) / scale);
            const auto expect = f - f.at_origin() * F.Z(l);
            s.left_inverse = std::max(s.left_inverse, interior_dev(R(l, D(l, f, F), F), expect, half) / scale);
        }
        s.composite = std::max(s.composite, interior_dev(D123(R_composite(f, F), F), f, half) / scale);
        if (f.parity() == Parity::even) {
            const auto lhs = project_continuous(R_composite(D123(f, F), F), basis);
            const auto rhs = project_continuous(f, basis);
            s.transfer = std::max(s.transfer, (lhs - rhs).max_abs() / scale);
        }
    }
    const auto ve = GridFn::sample(grid, [](double x) { return sech(x / 2); }, Parity::even);
    const auto vo = GridFn::sample(grid, [](double x) { return std::tanh(x) * gauss(x, 0.0, 2.0); }, Parity::odd);
    for (const auto* v : {&ve, &vo})
        for (const auto& chk : appendix_identities(*v, F, 1e-6)) s.appendix = std::max(s.appendix, chk.residual);
    return s;
}

double uniform(std::uint64_t& state) {
    std::mt19937_64 gen(state);
    state = gen();
    return static_cast<double>(state >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<GridFn> canned_suite(const Grid1D& grid) {
    using P = Parity;
    auto s = [&](auto f, P p) { return GridFn::sample(grid, f, p); };
    std::vector<GridFn> out;
    out.push_back(s([](double x) { return gauss(x, 0.0, 1.0); }, P::even));
    out.push_back(s([](double x) { return gauss(x, 0.0, 2.0); }, P::even));
    out.push_back(s([](double x) { return sech(x); }, P::even));
    out.push_back(s([](double x) { return std::pow(sech(x), 2); }, P::even));
    out.push_back(s([](double x) { return x * x * gauss(x, 0.0, 1.0); }, P::even));
    out.push_back(s([](double x) { return std::pow(sech(x / 2), 3); }, P::even));
    out.push_back(s([](double x) { return std::pow(sech(x / 2), 5) * (1.0 - 4.0 * std::pow(std::sinh(x / 2), 2)); },
                    P::even));
    out.push_back(s([](double x) { return gauss(x, 1.0, 0.7) + gauss(x, -1.0, 0.7); }, P::even));
    out.push_back(s([](double x) { return std::cos(2.0 * x) * gauss(x, 0.0, 1.5); }, P::even));
    out.push_back(s([](double x) { return std::pow(sech(x / 2), 4); }, P::even));
    out.push_back(s([](double x) { return x * gauss(x, 0.0, 1.0); }, P::odd));
    out.push_back(s([](double x) { return std::tanh(x) * gauss(x, 0.0, 2.0); }, P::odd));
    out.push_back(s([](double x) { return std::pow(sech(x / 2), 2) * std::tanh(x / 2); }, P::odd));
    out.push_back(s([](double x) { return sech(x) * std::tanh(x); }, P::odd));
    out.push_back(s([](double x) { return x * x * x * gauss(x, 0.0, 1.4); }, P::odd));
    out.push_back(s([](double x) { return std::sin(2.0 * x) * gauss(x, 0.0, 1.5); }, P::odd));
    out.push_back(s([](double x) { return gauss(x, 1.0, 0.7) - gauss(x, -1.0, 0.7); }, P::odd));
    out.push_back(s([](double x) { return gauss(x, 1.0, 1.0); }, P::none));
    out.push_back(s([](double x) { return gauss(x, -0.5, 0.7); }, P::none));
    out.push_back(s([](double x) { return (1.0 + x) * gauss(x, 0.0, 1.2); }, P::none));
    return out;
}

Report darboux_identity_suite(const DarbouxFactors& F, const SpectralBasis& basis) {
    const auto r = suite_residuals(F, basis, canned_suite(F.grid));
    Report rep;
    rep.push_back(make_check("conjugation_identity_suite", r.conjugation, 1e-6));
    rep.push_back(make_check("suite_decays_inside_half_domain", r.decaying ? 0.0 : 1.0, 0.0));
    rep.push_back(make_check("R_l_right_inverse", r.right_inverse, 1e-7));
    rep.push_back(make_check("R_l_of_D_l_equals_f_minus_f0_Z_l", r.left_inverse, 1e-7));
    rep.push_back(make_check("D123_R_composite_identity", r.composite, 1e-6));
    rep.push_back(make_check("Pc_R_D123_equals_Pc", r.transfer, 1e-7));
    rep.push_back(make_check("appendix_identities_relative", r.appendix, 1e-6));
    append(rep, factor_checks(F, basis));
    return rep;
}

Report darboux_convergence(const Grid1D& grid) {
    const std::size_t half_intervals = std::max<std::size_t>(8, (grid.size() - 1) / 16);
    const Grid1D coarse(grid.half_width(), 2 * half_intervals + 1, grid.sponge_width());
    auto residuals = [](const Grid1D& g) {
        const auto basis = build_basis(g);
        const auto F = build_factors(g);
        std::vector<GridFn> suite;
        suite.push_back(GridFn::sample(g, [](double x) { return gauss(x, 1.0, 1.0); }));
        suite.push_back(GridFn::sample(g, [](double x) { return gauss(x, 0.0, 1.5); }, Parity::even));
        return suite_residuals(F, basis, suite);
    };
    const auto a = residuals(coarse);
    const auto b = residuals(coarse.refined());
    constexpr double kMin = 64.0;
    Report r;
    r.push_back(make_floor_check("conjugation_refinement_ratio", a.conjugation / b.conjugation, kMin));
    r.push_back(make_floor_check("R_l_right_inverse_refinement_ratio", a.right_inverse / b.right_inverse, kMin));
    r.push_back(make_floor_check("R_l_left_inverse_refinement_ratio", a.left_inverse / b.left_inverse, kMin));
    r.push_back(make_floor_check("D123_R_refinement_ratio", a.composite / b.composite, kMin));
    r.push_back(make_floor_check("Pc_transfer_refinement_ratio", a.transfer / b.transfer, kMin));
    r.push_back(make_floor_check("appendix_refinement_ratio", a.appendix / b.appendix, kMin));
    return r;
}

GridFn random_bump(const Grid1D& grid, std::uint64_t& state, Parity parity) {
    const double c = -4.0 + 8.0 * uniform(state);
    const double w = 0.5 + 2.0 * uniform(state);
    const double a = 0.5 + uniform(state);
    switch (parity) {
        case Parity::even:
            return GridFn::sample(grid, [&](double x) { return a * (gauss(x, c, w) + gauss(x, -c, w)); }, parity);
        case Parity::odd:
            return GridFn::sample(grid, [&](double x) { return a * (gauss(x, c, w) - gauss(x, -c, w)); }, parity);
        case Parity::none:
            break;
    }
    return GridFn::sample(grid, [&](double x) { return a * gauss(x, c, w); });
}

DarbouxProbes darboux_probes(const DarbouxFactors& F, const SpectralBasis& basis, const GridFn& sigma,
                             std::uint64_t seed, const std::vector<double>& eps, int n_transfer, int n_schur) {
    DarbouxProbes p;
    p.eps = eps;
    std::uint64_t state = seed;
    std::vector<GridFn> even;
    for (int k = 0; k < n_transfer; ++k) {
        auto u = project_continuous(random_bump(F.grid, state, Parity::even), basis);
        if (u.max_abs() > 0.0) even.push_back(std::move(u));
    }
    for (double e : eps) {
        double tr = 0.0, sc = 0.0;
        for (const auto& u : even) {
            const auto [lhs, rhs] = transfer_bound_probe(u, e, F, basis);
            if (rhs > 0.0) tr = std::max(tr, lhs / rhs);
            sc = std::max(sc, seps_weighted_constant(u, e, sigma, F));
        }
        p.transfer_ratio.push_back(tr);
        p.seps_constant.push_back(sc);
    }
    for (int k = 0; k < n_schur; ++k) {
        const auto parity = k % 2 == 0 ? Parity::even : Parity::odd;
        auto f = random_bump(F.grid, state, parity);
        f = (1.0 / norm(f)) * f;
        for (int l = 1; l <= 3; ++l)
            p.schur[static_cast<std::size_t>(l - 1)] = std::max(p.schur[static_cast<std::size_t>(l - 1)],
                                                                schur_probe(l, f, F));
    }
    return p;
}

}  // namespace kglab
