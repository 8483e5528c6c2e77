// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include "kglab/darboux.hpp"
#include "kglab/spectral.hpp"

namespace kglab {

namespace {

// Polynomials p(T) in T = tanh(x/2); d/dx p(T) = p'(T) (1 - T^2) / 2.
using TanhPoly = std::vector<double>;

TanhPoly tanh_derivative(const TanhPoly& p) {
    TanhPoly out(p.size() + 1, 0.0);
    for (std::size_t k = 1; k < p.size(); ++k) {
        const double c = 0.5 * static_cast<double>(k) * p[k];
        out[k - 1] += c;
        out[k + 1] -= c;
    }
    return out;
}

double evaluate(const TanhPoly& p, double t) {
    double acc = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) acc = acc * t + p[k];
    return acc;
}

// (1/256)(28 d + 17 d^3 - 70 d^5 + 25 d^7) sech^2(x/2) as a polynomial in T.
TanhPoly h_operator_form() {
    TanhPoly d = {1.0, 0.0, -1.0};
    TanhPoly out(16, 0.0);
    const double coef[8] = {0.0, 28.0, 0.0, 17.0, 0.0, -70.0, 0.0, 25.0};
    for (int order = 1; order <= 7; ++order) {
        d = tanh_derivative(d);
        for (std::size_t k = 0; k < d.size(); ++k) out[k] += coef[order] * d[k] / 256.0;
    }
    return out;
}

double h_closed_form(double x) {
    const double s2 = std::pow(sech(x / 2), 2);
    const double s4 = s2 * s2;
    return 9.0 / 256.0 * (875.0 * s4 * s4 - 700.0 * s4 * s2 + 64.0 * s4) * std::tanh(x / 2);
}

}  // namespace

Report fgr_H_identities(const SpectralBasis& basis) {
    const Grid1D& grid = basis.grid;
    const auto F = build_factors(grid);
    const auto H = D123(basis.Y2 * basis.Y2, F);

    const auto closed = GridFn::sample(grid, h_closed_form, Parity::odd);
    const auto poly = h_operator_form();
    const auto op_form = GridFn::sample(grid, [&](double x) { return evaluate(poly, std::tanh(x / 2)); },
                                        Parity::odd);

    Report r;
    r.push_back(make_check("H_closed_form_sech_powers", (H - closed).max_abs(), 1e-7));
    r.push_back(make_check("H_operator_form_on_sech2", (H - op_form).max_abs(), 1e-7));
    r.push_back(make_check("H_closed_forms_agree", (closed - op_form).max_abs(), 1e-12));
    r.push_back(make_check("H_is_odd", H.parity() == Parity::odd ? H.parity_defect() : 1.0, 1e-13));

    // i sqrt(pi/2) Hhat(xi) = (pi/128) P(xi^2) xi^2 cosech(pi xi), P(s) = -28 + 17 s + 70 s^2 + 25 s^3.
    const double xi = std::numbers::sqrt2;
    const double s = xi * xi;
    const double P = -28.0 + 17.0 * s + 70.0 * s * s + 25.0 * s * s * s;
    const double hat = std::numbers::pi / 128.0 * P * s / std::sinh(std::numbers::pi * xi);
    r.push_back(make_check("Hhat_polynomial_prefactor", std::abs(P * s / 128.0 - 243.0 / 32.0), 1e-14));
    r.push_back(make_check("Hhat_at_sqrt2_equals_Gamma", std::abs(hat - basis.Gamma) / basis.Gamma, 1e-12));

    const auto sine = GridFn::sample(grid, [&](double x) { return std::sin(xi * x); }, Parity::odd);
    const double gamma_h = 0.5 * quad(H * sine);
    r.push_back(make_check("half_integral_H_sine_equals_Gamma", std::abs(gamma_h - basis.Gamma) / basis.Gamma, 1e-9));
    return r;
}

}  // namespace kglab
