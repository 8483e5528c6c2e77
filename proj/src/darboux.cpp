// SPDX-License-Identifier: Apache-2.0
#include "kglab/darboux.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kglab {

namespace {

void require_index(int l) {
    if (l < 1 || l > 3) throw PreconditionError("Darboux index must be 1, 2 or 3, got " + std::to_string(l));
}

// log cosh(u) without overflow.
double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double rel_norm(const GridFn& lhs, const GridFn& rhs) {
    const double scale = std::max(norm(lhs), norm(rhs));
    return scale == 0.0 ? 0.0 : norm(lhs - rhs) / scale;
}

double interior_sup(const GridFn& f, double limit) {
    double m = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        if (std::abs(f.grid().x(j)) <= limit) m = std::max(m, std::abs(f[j]));
    return m;
}

}  // namespace

const GridFn& DarbouxFactors::Z(int l) const {
    require_index(l);
    return l == 1 ? Z1 : (l == 2 ? Z2 : Z3);
}

const GridFn& DarbouxFactors::logZ(int l) const {
    require_index(l);
    return l == 1 ? logZ1 : (l == 2 ? logZ2 : logZ3);
}

DarbouxFactors build_factors(const Grid1D& grid) {
    using P = Parity;
    auto T = GridFn::sample(grid, [](double x) { return std::tanh(x / 2); }, P::odd);
    auto zl = [&](int l) {
        return GridFn::sample(grid, [l](double x) { return std::pow(sech(x / 2), l); }, P::even);
    };
    auto lzl = [&](int l) {
        return GridFn::sample(grid, [l](double x) { return -l * log_cosh(x / 2); }, P::even);
    };
    auto k1 = GridFn::sample(grid, [](double x) { return 3.0 * std::tanh(x / 2); }, P::odd);
    auto k2 = GridFn::sample(
        grid,
        [](double x) {
            const double t = std::tanh(x / 2);
            return (15.0 * t * t - 4.0) / 4.0;
        },
        P::even);
    auto k3 = GridFn::sample(
        grid,
        [](double x) {
            const double t = std::tanh(x / 2);
            return 3.0 * t * (5.0 * t * t - 3.0) / 8.0;
        },
        P::odd);
    auto rho = GridFn::sample(grid, [](double x) { return std::pow(sech(x / 20.0), 2); }, P::even);
    return DarbouxFactors{grid,    std::move(T),  zl(1),         zl(2),         zl(3),
                          lzl(1),  lzl(2),        lzl(3),        std::move(k1), std::move(k2),
                          std::move(k3), std::move(rho)};
}

GridFn D(int l, const GridFn& f, const DarbouxFactors& F) {
    require_index(l);
    return diff(f, 1) + (0.5 * l) * (F.T * f);
}

GridFn D_adjoint(int l, const GridFn& f, const DarbouxFactors& F) {
    require_index(l);
    return (0.5 * l) * (F.T * f) - diff(f, 1);
}

GridFn D123(const GridFn& f, const DarbouxFactors& F) {
    return D(1, D(2, D(3, f, F), F), F);
}

GridFn D123_via_coeffs(const GridFn& f, const DarbouxFactors& F) {
    return diff(diff(f, 2), 1) + diff(F.k1 * f, 2) + diff(F.k2 * f, 1) + F.k3 * f;
}

ConjugationResult conjugation_residual(const GridFn& f, const DarbouxFactors& F, const SpectralBasis& basis) {
    ConjugationResult out;
    const double nf = norm(f);
    if (nf == 0.0) return out;
    const double half = 0.5 * f.grid().half_width();
    double tail = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        if (std::abs(f.grid().x(j)) > half) tail += f[j] * f[j];
    out.decaying = std::sqrt(tail * f.grid().spacing()) <= 1e-10 * nf;
    const auto lhs = D123(apply_L(f, basis), F);
    const auto g = D123(f, F);
    const auto rhs = g - diff(g, 2);
    out.residual = norm(lhs - rhs) / nf;
    return out;
}

GridFn R(int l, const GridFn& f, const DarbouxFactors& F) {
    require_index(l);
    return cumint_weighted(f, F.logZ(l));
}

GridFn R_composite(const GridFn& f, const DarbouxFactors& F) {
    return R(3, R(2, R(1, f, F), F), F);
}

GridFn S_eps(const GridFn& f, double eps, const DarbouxFactors& F) {
    if (!(eps >= 0.0)) throw PreconditionError("smoothing parameter must be non-negative");
    return smooth_inverse(D123(f, F), eps);
}

Report appendix_identities(const GridFn& v, const DarbouxFactors& F, double tolerance) {
    const Grid1D& grid = v.grid();
    // Z_l^{-1} Z_l' = -(l/2) tanh(x/2); Z2 (Z2^{-1} Z3^{-1} Z3')' = -3/2 + (3/4) sech^2(x/2).
    auto logd = [&](int l) { return (-0.5 * l) * F.T; };
    const auto c32 = GridFn::sample(grid, [](double x) { return -1.5 + 0.75 * std::pow(sech(x / 2), 2); },
                                    Parity::even);
    const auto v1 = diff(v, 1);
    const auto v2 = diff(v, 2);
    const double v0 = v.at_origin(), d1 = v1.at_origin(), d2 = v2.at_origin(), d3 = diff(v2, 1).at_origin();
    const auto R3Z2 = R(3, F.Z2, F);
    const auto R3R2Z1 = R(3, R(2, F.Z1, F), F);
    const auto Rv = R_composite(v, F);
    const auto R3v = R(3, v, F);
    const auto R3R2dv = R(3, R(2, logd(3) * v, F), F);

    Report r;
    for (int l = 1; l <= 3; ++l) {
        const auto lhs = R(l, v1, F);
        const auto rhs = v - v0 * F.Z(l) + R(l, logd(l) * v, F);
        r.push_back(make_check("R" + std::to_string(l) + "_of_derivative", rel_norm(lhs, rhs), tolerance));
    }
    {
        const auto lhs = R_composite(v2, F);
        const auto rhs = R3v + R3R2dv + 0.25 * Rv - v0 * R3Z2 - d1 * R3R2Z1;
        r.push_back(make_check("R_of_second_derivative", rel_norm(lhs, rhs), tolerance));
    }
    {
        const auto lhs = R_composite(diff(v2, 2), F);
        const auto rhs = v1 + 0.25 * R3v + 2.0 * R(3, logd(3) * v1, F) + 0.25 * R3R2dv -
                         R(3, R(2, c32 * v1, F), F) + 0.0625 * Rv - d1 * F.Z3 - (d2 + 0.25 * v0) * R3Z2 -
                         (d3 + 0.25 * d1) * R3R2Z1;
        r.push_back(make_check("R_of_fourth_derivative", rel_norm(lhs, rhs), tolerance));
    }
    return r;
}

std::pair<double, double> transfer_bound_probe(const GridFn& u, double eps, const DarbouxFactors& F,
                                               const SpectralBasis& basis) {
    if (u.parity() == Parity::odd) throw PreconditionError("transfer probe needs an even function");
    const double off = norm(project_continuous(u, basis) - u);
    if (off > 1e-8 * std::max(1.0, norm(u)))
        throw PreconditionError("transfer probe input is not in the continuous spectral subspace");
    const auto s = S_eps(u, eps, F);
    return {norm(F.rho * u), norm(F.rho * s) + norm(F.rho * diff(s, 1))};
}

double schur_probe(int l, const GridFn& f, const DarbouxFactors& F) {
    const double nf = norm(f);
    if (nf == 0.0) return 0.0;
    std::vector<double> lifted(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) lifted[j] = f[j] / F.rho[j];
    const GridFn g(f.grid(), std::move(lifted), f.parity());
    return norm(F.rho * R(l, g, F)) / nf;
}

double seps_weighted_constant(const GridFn& u, double eps, const GridFn& sigma, const DarbouxFactors& F) {
    const double nu = norm(sigma * u);
    if (nu == 0.0) return 0.0;
    return norm(sigma * S_eps(u, eps, F)) * std::pow(eps, 1.5) / nu;
}

Report factor_checks(const DarbouxFactors& F, const SpectralBasis& basis) {
    const Grid1D& grid = F.grid;
    const double half = 0.5 * grid.half_width();
    Report r;
    for (int l = 1; l <= 3; ++l) {
        const auto& z = F.Z(l);
        r.push_back(make_check("D" + std::to_string(l) + "_annihilates_Z" + std::to_string(l),
                               norm(D(l, z, F)) / norm(diff(z, 1)), 1e-8));
    }
    auto log_derivative = [&](int l) {
        const auto dz = diff(F.Z(l), 1);
        std::vector<double> v(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) v[j] = dz[j] / F.Z(l)[j];
        return GridFn(grid, std::move(v), Parity::odd);
    };
    const auto logsum = log_derivative(1) + log_derivative(2) - log_derivative(3);
    r.push_back(make_check("log_derivative_sum_Z1_Z2_Z3", logsum.max_abs(), 1e-12));

    const auto z1p = diff(F.Z1, 1);
    std::vector<double> q(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) q[j] = z1p[j] / (F.Z1[j] * F.Z1[j]);
    const auto inner_term = F.Z1 * diff(GridFn(grid, std::move(q), Parity::odd), 1);
    r.push_back(make_check("Z1_log_identity_minus_quarter",
                           interior_sup(inner_term + GridFn::constant(grid, 0.25), half), 1e-10));

    double kdecay = 0.0;
    for (const GridFn* k : {&F.k1, &F.k2, &F.k3}) {
        const auto dk = diff(*k, 1);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double x = grid.x(j);
            if (std::abs(x) <= interior_limit(grid))
                kdecay = std::max(kdecay, std::abs(dk[j]) / std::pow(F.rho[j], 3));
        }
    }
    r.push_back(make_check("k_coefficient_derivative_decay_constant", kdecay, 1e3));

    const auto R3Z2 = R(3, F.Z2, F);
    const auto R3R2Z1 = R(3, R(2, F.Z1, F), F);
    r.push_back(make_check("D123_kernel_Z3", D123(F.Z3, F).max_abs(), 1e-7));
    r.push_back(make_check("D123_kernel_R3_Z2", D123(R3Z2, F).max_abs(), 1e-7));
    r.push_back(make_check("D123_kernel_R3_R2_Z1", D123(R3R2Z1, F).max_abs(), 1e-7));
    r.push_back(make_check("R3_Z2_equals_2_over_c1_Y1",
                           (R3Z2 - (2.0 / SpectralBasis::c1) * basis.Y1).max_abs(), 1e-7));
    const auto y_comb = (0.5 / SpectralBasis::c0) * basis.Y0 - (0.5 / SpectralBasis::c2) * basis.Y2;
    const auto closed = GridFn::sample(
        grid, [](double x) { return 2.0 * sech(x / 2) * std::pow(std::tanh(x / 2), 2); }, Parity::even);
    r.push_back(make_check("R3_R2_Z1_equals_Y0_Y2_combination", (R3R2Z1 - y_comb).max_abs(), 1e-9));
    r.push_back(make_check("R3_R2_Z1_closed_form", (R3R2Z1 - closed).max_abs(), 1e-9));

    const auto f = GridFn::sample(grid, [](double x) { return std::exp(-(x - 0.3) * (x - 0.3)); });
    const double lhs0 = D(2, D(3, f, F), F).at_origin();
    const double rhs0 = diff(f, 2).at_origin() + 0.75 * f.at_origin();
    r.push_back(make_check("D2_D3_value_at_origin", std::abs(lhs0 - rhs0), 1e-8));
    return r;
}

}  // namespace kglab
