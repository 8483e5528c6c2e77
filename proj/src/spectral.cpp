// SPDX-License-Identifier: Apache-2.0
#include "kglab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kglab {

const double SpectralBasis::nu = std::sqrt(1.25);
const double SpectralBasis::mu = std::sqrt(0.75);
const double SpectralBasis::c0 = std::sqrt(15.0 / 32.0);
const double SpectralBasis::c1 = std::sqrt(15.0 / 8.0);
const double SpectralBasis::c2 = std::sqrt(3.0 / 32.0);

double fgr_closed_form() {
    const double a = std::numbers::sqrt2 * std::numbers::pi;
    return 243.0 / 32.0 * std::numbers::pi / std::sinh(a);
}

SpectralBasis build_basis(const Grid1D& grid) {
    using P = Parity;
    const double c0 = SpectralBasis::c0, c1 = SpectralBasis::c1, c2 = SpectralBasis::c2;
    const double r2 = std::numbers::sqrt2;
    auto Q = GridFn::sample(grid, [](double x) { return 1.5 * std::pow(sech(x / 2), 2); }, P::even);
    auto Y0 = GridFn::sample(grid, [&](double x) { return c0 * std::pow(sech(x / 2), 3); }, P::even);
    auto Y1 = GridFn::sample(
        grid, [&](double x) { return c1 * std::pow(sech(x / 2), 2) * std::tanh(x / 2); }, P::odd);
    auto Y2 = GridFn::sample(
        grid,
        [&](double x) {
            const double s = std::sinh(x / 2);
            return c2 * std::pow(sech(x / 2), 3) * (1.0 - 4.0 * s * s);
        },
        P::even);
    auto Y3 = GridFn::sample(
        grid,
        [](double x) {
            const double t = std::tanh(x / 2);
            return t - 2.5 * std::pow(sech(x / 2), 2) * t;
        },
        P::odd);
    auto g = GridFn::sample(
        grid,
        [&](double x) {
            const double s2 = std::pow(sech(x / 2), 2);
            const double t = std::tanh(x / 2);
            return std::cos(r2 * x) * (-3.0 / (2.0 * r2) + 15.0 / (2.0 * r2) * s2) +
                   std::sin(r2 * x) * (-57.0 / 8.0 * t + 15.0 / 8.0 * t * t * t);
        },
        P::even);
    return SpectralBasis{grid, std::move(Q), std::move(Y0), std::move(Y1), std::move(Y2), std::move(Y3),
                         std::move(g), fgr_closed_form()};
}

GridFn apply_L(const GridFn& f, const SpectralBasis& basis) {
    require_same_grid(f, basis.Q);
    const auto d2 = diff(f, 2);
    std::vector<double> out(f.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = -d2[j] - 2.0 * basis.Q[j] * f[j] + f[j];
    return GridFn(f.grid(), std::move(out), f.parity());
}

GridFn project_continuous(const GridFn& f, const SpectralBasis& basis) {
    require_same_grid(f, basis.Q);
    GridFn out = f - inner(basis.Y0, f) * basis.Y0 - inner(basis.Y2, f) * basis.Y2;
    if (f.parity() != Parity::even) out = out - inner(basis.Y1, f) * basis.Y1;
    return out.with_parity(f.parity());
}

double fgr_constant_by_quadrature(const SpectralBasis& basis) {
    return 0.5 * quad(basis.Y2 * basis.Y2 * basis.g);
}

double interior_limit(const Grid1D& grid) {
    const double w = grid.sponge_width() > 0.0 ? grid.sponge_width() : grid.half_width() / 6.0;
    return grid.half_width() - 2.0 * w;
}

double interior_max_abs(const GridFn& f) {
    const double lim = interior_limit(f.grid());
    double m = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        if (std::abs(f.grid().x(j)) <= lim) m = std::max(m, std::abs(f[j]));
    return m;
}

double decay_domination(const GridFn& f, int kmax, double limit) {
    double worst = 0.0;
    GridFn d = f;
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) d = diff(d, 1);
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double x = f.grid().x(j);
            if (std::abs(x) > limit) continue;
            worst = std::max(worst, std::abs(d[j]) / std::pow(sech(x / 20.0), 6));
        }
    }
    return worst;
}

namespace {

struct EigenResiduals {
    double y0, y1, y2, y3, g;
};

EigenResiduals eigen_residuals(const SpectralBasis& b) {
    auto rel = [&](const GridFn& y, double lambda) { return norm(apply_L(y, b) - lambda * y) / norm(y); };
    return {rel(b.Y0, -SpectralBasis::nu2), rel(b.Y1, 0.0), rel(b.Y2, SpectralBasis::mu2),
            interior_max_abs(apply_L(b.Y3, b) - b.Y3), interior_max_abs(apply_L(b.g, b) - 3.0 * b.g)};
}

}  // namespace

Report eigen_checks(const SpectralBasis& b) {
    Report r;
    const auto res = eigen_residuals(b);
    r.push_back(make_check("L_Y0_eigen_residual", res.y0, 1e-7));
    r.push_back(make_check("L_Y1_eigen_residual", res.y1, 1e-7));
    r.push_back(make_check("L_Y2_eigen_residual", res.y2, 1e-7));
    r.push_back(make_check("L_Y3_interior_residual", res.y3, 1e-7));
    r.push_back(make_check("L_g_interior_residual", res.g, 1e-7));

    const GridFn* ys[] = {&b.Y0, &b.Y1, &b.Y2};
    double ortho = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            ortho = std::max(ortho, std::abs(inner(*ys[i], *ys[j]) - (i == j ? 1.0 : 0.0)));
    r.push_back(make_check("orthonormality_Y0_Y1_Y2", ortho, 1e-10));
    r.push_back(make_check("Y0_g_orthogonality", std::abs(inner(b.Y0, b.g)), 1e-9));
    r.push_back(make_check("Y2_g_orthogonality", std::abs(inner(b.Y2, b.g)), 1e-9));

    const double lim = interior_limit(b.grid);
    double parity = std::max({b.Q.parity_defect(), b.Y0.parity_defect(), b.Y1.parity_defect(),
                              b.Y2.parity_defect(), b.Y3.parity_defect(), b.g.parity_defect()});
    r.push_back(make_check("basis_parity_defect", parity, 1e-13));
    double decay = 0.0;
    for (const GridFn* f : {&b.Q, &b.Y0, &b.Y1, &b.Y2}) decay = std::max(decay, decay_domination(*f, 4, lim));
    r.push_back(make_check("decay_domination_k_le_4", decay, 1e3));
    return r;
}

Report eigen_convergence(const Grid1D& grid) {
    const std::size_t half_intervals = std::max<std::size_t>(8, (grid.size() - 1) / 16);
    const Grid1D coarse(grid.half_width(), 2 * half_intervals + 1, grid.sponge_width());
    const auto a = eigen_residuals(build_basis(coarse));
    const auto b = eigen_residuals(build_basis(coarse.refined()));
    constexpr double kMin = 64.0;
    Report r;
    r.push_back(make_floor_check("L_Y0_refinement_ratio", a.y0 / b.y0, kMin));
    r.push_back(make_floor_check("L_Y1_refinement_ratio", a.y1 / b.y1, kMin));
    r.push_back(make_floor_check("L_Y2_refinement_ratio", a.y2 / b.y2, kMin));
    r.push_back(make_floor_check("L_Y3_refinement_ratio", a.y3 / b.y3, kMin));
    r.push_back(make_floor_check("L_g_refinement_ratio", a.g / b.g, kMin));
    return r;
}

double cutoff_chi(double x) {
    const double ax = std::abs(x);
    if (ax <= 1.0) return 1.0;
    if (ax >= 2.0) return 0.0;
    const double a = std::exp(-1.0 / (2.0 - ax));
    const double b = std::exp(-1.0 / (ax - 1.0));
    return a / (a + b);
}

namespace {

double zeta_A_squared(double x, double A) {
    const double z = std::exp(-(1.0 - cutoff_chi(x)) * std::abs(x) / A);
    return z * z;
}

// int_0^x zeta_A^2 by adaptive quadrature on |x| <= 2 and the closed form beyond.
double reference_Phi_A(double x, double A) {
    using boost::math::quadrature::gauss_kronrod;
    const double ax = std::abs(x);
    auto f = [&](double y) { return zeta_A_squared(y, A); };
    double v = ax <= 1.0 ? ax : 1.0 + gauss_kronrod<double, 31>::integrate(f, 1.0, std::min(ax, 2.0), 8, 1e-13);
    if (ax > 2.0) v += 0.5 * A * (std::exp(-4.0 / A) - std::exp(-2.0 * ax / A));
    return x < 0.0 ? -v : v;
}

double phi_stencil_residual(const VirialWeights& w) {
    const auto dPhi = diff(w.Phi_A, 1);
    const auto z2 = w.zeta_A * w.zeta_A;
    double dev = 0.0;
    for (std::size_t j = 0; j < z2.size(); ++j) dev = std::max(dev, std::abs(dPhi[j] - z2[j]));
    return dev;
}

}  // namespace

VirialWeights build_weights(const Grid1D& grid, double A, double eps) {
    using P = Parity;
    if (!(A >= 10.0)) throw ConfigError("virial scale A must be at least 10");
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("smoothing parameter eps must lie in (0, 1]");
    if (2.0 * A > grid.half_width()) throw ConfigError("virial scale A does not fit in the grid (2A > R)");
    constexpr double B = VirialWeights::B;
    auto chi = GridFn::sample(grid, cutoff_chi, P::even);
    auto chi_A = GridFn::sample(grid, [&](double x) { return cutoff_chi(x / A); }, P::even);
    auto zeta_A = GridFn::sample(
        grid, [&](double x) { return std::exp(-(1.0 - cutoff_chi(x)) * std::abs(x) / A); }, P::even);
    // The cutoff transition on 1 < |x| < 2 is steep on the default grid; the
    // primitive is accumulated at a quarter of the spacing and decimated.
    const Grid1D fine(grid.half_width(), 4 * (grid.size() - 1) + 1, grid.sponge_width());
    const auto fine_primitive =
        cumint(GridFn::sample(fine, [&](double x) { return zeta_A_squared(x, A); }, P::even));
    std::vector<double> phi(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) phi[j] = fine_primitive[4 * j];
    GridFn Phi_A(grid, std::move(phi), P::odd);
    auto sigma_A = GridFn::sample(grid, [&](double x) { return sech(2.0 * x / A); }, P::even);
    auto rho = GridFn::sample(grid, [](double x) { return std::pow(sech(x / 20.0), 2); }, P::even);
    auto zeta_B = GridFn::sample(grid, [&](double x) { return sech(x / B); }, P::even);
    auto Phi_B = GridFn::sample(grid, [&](double x) { return B * std::tanh(x / B); }, P::odd);
    auto Psi = chi_A * chi_A * Phi_B;
    return VirialWeights{A,      eps,  std::move(chi), std::move(chi_A), std::move(zeta_A), std::move(Phi_A),
                         std::move(sigma_A), std::move(rho), std::move(zeta_B), std::move(Phi_B), std::move(Psi)};
}

Report weight_checks(const VirialWeights& w) {
    Report r;
    const Grid1D& grid = w.chi.grid();
    const auto z2 = w.zeta_A * w.zeta_A;
    double prim = 0.0, monotone = -HUGE_VAL, bound = 0.0, ratio = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double x = grid.x(j);
        if (j >= grid.center()) prim = std::max(prim, std::abs(w.Phi_A[j] - reference_Phi_A(x, w.A)));
        if (j > 0) monotone = std::max(monotone, w.Phi_A[j - 1] - w.Phi_A[j]);
        bound = std::max({bound, std::abs(w.Phi_A[j]) - std::abs(x), z2[j] - 1.0});
        ratio = std::max({ratio, z2[j] / w.sigma_A[j], w.sigma_A[j] / z2[j]});
    }
    r.push_back(make_check("Phi_A_primitive_of_zeta_A_squared", prim, 1e-10));
    // Pointwise Phi_A' = zeta_A^2 through the stencil, tracked by its refinement ratio.
    const auto fine = build_weights(grid.refined(), w.A, w.eps);
    const double coarse_res = phi_stencil_residual(w);
    r.push_back(make_floor_check("Phi_A_derivative_refinement_ratio", coarse_res / phi_stencil_residual(fine), 64.0));
    r.push_back(make_check("Phi_A_max_decrement", monotone, 0.0));
    r.push_back(make_check("Phi_A_bounds", bound, 1e-10));
    r.push_back(make_check("zeta_A_sigma_A_equivalence_constant", ratio, 10.0));
    r.push_back(make_check("Phi_A_parity_defect", w.Phi_A.parity_defect(), 1e-13));
    return r;
}

}  // namespace kglab
