// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>

#include "kglab/darboux.hpp"
#include "oracles/sech_tanh.hpp"

using namespace kglab;
using Catch::Matchers::WithinAbs;
using oracle::SechTanh;

namespace {

// D_l f = f' + (l/2) T f.
SechTanh D_sym(int l, const SechTanh& f) {
    return f.derivative() + (0.5L * l) * (f * SechTanh::tanh_pow(1));
}

SechTanh D123_sym(const SechTanh& f) { return D_sym(1, D_sym(2, D_sym(3, f))); }

long double sup_on_line(const SechTanh& f) {
    long double m = 0.0L;
    for (long double x = -25.0L; x <= 25.0L; x += 0.25L) m = std::max(m, std::abs(f(x)));
    return m;
}

const Grid1D& grid() {
    static const Grid1D g;
    return g;
}

const DarbouxFactors& factors() {
    static const DarbouxFactors F = build_factors(grid());
    return F;
}

const SpectralBasis& basis() {
    static const SpectralBasis b = build_basis(grid());
    return b;
}

double interior_dev(const GridFn& a, const GridFn& b, double limit) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (std::abs(a.grid().x(j)) <= limit) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

}  // namespace

TEST_CASE("composite factor annihilates the bound states") {
    REQUIRE(sup_on_line(D123_sym(SechTanh::sech_pow(3))) < 1e-17L);
    REQUIRE(sup_on_line(D123_sym(SechTanh::sech_pow(2) * SechTanh::tanh_pow(1))) < 1e-17L);
    REQUIRE(sup_on_line(D123_sym(SechTanh{1, {1.0L, 0.0L, -5.0L}})) < 1e-17L);
}

TEST_CASE("composite factor conjugates L to the free operator symbolically") {
    // D123 (-f'' - 3 S^2 f + f) = -(D123 f)'' + D123 f for generic f.
    for (const SechTanh& f : {SechTanh::sech_pow(5), SechTanh{4, {0.3L, 1.0L, -2.0L}}, SechTanh{7, {0.0L, 1.0L}}}) {
        const SechTanh Lf = f - f.derivative(2) - 3.0L * (SechTanh::sech_pow(2) * f);
        const SechTanh d = D123_sym(f);
        REQUIRE(sup_on_line(D123_sym(Lf) - (d - d.derivative(2))) < 1e-15L);
    }
}

TEST_CASE("grid factors match the symbolic action") {
    const auto& F = factors();
    const SechTanh f = SechTanh::sech_pow(5);
    const auto fg = GridFn::sample(grid(), [&](double x) { return f.at(x); }, Parity::even);
    const SechTanh d = D123_sym(f);
    const auto expected = GridFn::sample(grid(), [&](double x) { return d.at(x); }, Parity::odd);
    REQUIRE(interior_dev(D123(fg, F), expected, 30.0) < 1e-9);
    REQUIRE(interior_dev(D123_via_coeffs(fg, F), expected, 30.0) < 1e-9);
    for (int l = 1; l <= 3; ++l) {
        const SechTanh dl = D_sym(l, f);
        const auto e = GridFn::sample(grid(), [&](double x) { return dl.at(x); }, Parity::odd);
        REQUIRE(interior_dev(D(l, fg, F), e, 30.0) < 1e-11);
    }
}

TEST_CASE("D123 parity flips") {
    const auto& F = factors();
    const auto e = GridFn::sample(grid(), [](double x) { return std::exp(-x * x); }, Parity::even);
    const auto o = GridFn::sample(grid(), [](double x) { return x * std::exp(-x * x); }, Parity::odd);
    REQUIRE(D123(e, F).parity() == Parity::odd);
    REQUIRE(D123(o, F).parity() == Parity::even);
}

TEST_CASE("right inverses on random bumps") {
    const auto& F = factors();
    std::uint64_t state = 7;
    for (int k = 0; k < 12; ++k) {
        const auto f = random_bump(grid(), state, k % 2 ? Parity::odd : Parity::even);
        for (int l = 1; l <= 3; ++l) REQUIRE(interior_dev(D(l, R(l, f, F), F), f, 40.0) < 1e-7 * f.max_abs());
        REQUIRE(interior_dev(D123(R_composite(f, F), F), f, 40.0) < 1e-6 * f.max_abs());
    }
}

TEST_CASE("random bumps are reproducible and parity tagged") {
    std::uint64_t s1 = 123, s2 = 123;
    const auto a = random_bump(grid(), s1, Parity::odd);
    const auto b = random_bump(grid(), s2, Parity::odd);
    REQUIRE(s1 == s2);
    REQUIRE(interior_dev(a, b, 60.0) == 0.0);
    REQUIRE(a.parity() == Parity::odd);
    REQUIRE(a.parity_defect() == 0.0);
    const auto c = random_bump(grid(), s1, Parity::odd);
    REQUIRE(interior_dev(a, c, 60.0) > 0.0);
}

TEST_CASE("canned suite composition") {
    const auto suite = canned_suite(grid());
    REQUIRE(suite.size() == 20);
    int even = 0, odd = 0, none = 0;
    for (const auto& f : suite) {
        even += f.parity() == Parity::even;
        odd += f.parity() == Parity::odd;
        none += f.parity() == Parity::none;
    }
    REQUIRE(even == 10);
    REQUIRE(odd == 7);
    REQUIRE(none == 3);
}

TEST_CASE("identity suite passes on the default grid") {
    const Report r = darboux_identity_suite(factors(), basis());
    REQUIRE(r.size() >= 7);
    for (const auto& c : r) {
        INFO(c.check_name << " " << c.residual << " > " << c.tolerance);
        CHECK(c.pass);
    }
}

TEST_CASE("identity residuals converge under refinement") {
    for (const auto& c : darboux_convergence(grid())) {
        INFO(c.check_name << " " << c.residual);
        CHECK(c.pass);
    }
}

TEST_CASE("transfer ratio and Schur probes stay bounded") {
    const auto w = build_weights(grid(), 20.0, 0.05);
    const auto p = darboux_probes(factors(), basis(), w.sigma_A, 42, {0.05}, 10, 5);
    REQUIRE(p.eps.size() == 1);
    REQUIRE(std::isfinite(p.transfer_ratio[0]));
    REQUIRE(p.transfer_ratio[0] > 0.0);
    REQUIRE(std::isfinite(p.seps_constant[0]));
    for (double s : p.schur) {
        REQUIRE(s > 0.0);
        REQUIRE(s < 50.0);
    }
}

TEST_CASE("S_eps of the bound states is small") {
    const auto& F = factors();
    const auto& b = basis();
    for (const GridFn* y : {&b.Y0, &b.Y1, &b.Y2}) REQUIRE(interior_dev(S_eps(*y, 0.05, F), 0.0 * *y, 40.0) < 1e-6);
}
