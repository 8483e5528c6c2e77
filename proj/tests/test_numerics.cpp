// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kglab/numerics.hpp"
#include "oracles/fourier.hpp"
#include "oracles/sech_tanh.hpp"

using namespace kglab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

double interior_max_dev(const GridFn& a, const GridFn& b, std::size_t margin) {
    double m = 0.0;
    for (std::size_t j = margin; j + margin < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

}  // namespace

TEST_CASE("grid nodes are symmetric about zero") {
    Grid1D g;
    REQUIRE(g.size() == 4801);
    REQUIRE(g.spacing() == 0.025);
    REQUIRE(g.x(g.center()) == 0.0);
    REQUIRE(g.sponge_width() == 10.0);
    for (std::size_t j = 0; j < g.size(); ++j) REQUIRE(g.x(j) == -g.x(g.mirror(j)));
    REQUIRE_THAT(g.x(0), WithinAbs(-60.0, 1e-12));
    REQUIRE(g.refined().size() == 9601);
}

TEST_CASE("grid rejects bad sizes") {
    REQUIRE_THROWS_AS(Grid1D(10.0, 7), ConfigError);
    REQUIRE_THROWS_AS(Grid1D(10.0, 100), ConfigError);
    REQUIRE_THROWS_AS(Grid1D(-1.0, 101), ConfigError);
    REQUIRE_NOTHROW(Grid1D(10.0, 9));
}

TEST_CASE("tagged sampling is exactly symmetric") {
    Grid1D g;
    auto e = GridFn::sample(g, [](double x) { return std::exp(-x * x) + 0.1 * x * x * x * x; }, Parity::even);
    auto o = GridFn::sample(g, [](double x) { return std::sin(x) * sech(x); }, Parity::odd);
    REQUIRE(e.parity_defect() == 0.0);
    REQUIRE(o.parity_defect() == 0.0);
    REQUIRE(o.at_origin() == 0.0);
}

TEST_CASE("arithmetic requires matching grids") {
    auto a = GridFn::constant(Grid1D(10.0, 101), 1.0);
    auto b = GridFn::constant(Grid1D(10.0, 201), 1.0);
    REQUIRE_THROWS_AS(a + b, GridMismatch);
    REQUIRE_THROWS_AS(inner(a, b), GridMismatch);
}

TEST_CASE("derivative of a constant vanishes") {
    Grid1D g;
    auto one = GridFn::constant(g, 1.0);
    REQUIRE(diff(one, 1).max_abs() < 1e-12);
    REQUIRE(diff(one, 2).max_abs() < 1e-8);
}

TEST_CASE("second derivative of sech^2 at the origin") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return std::pow(sech(x / 2), 2); }, Parity::even);
    const auto exact = oracle::SechTanh::sech_pow(2).derivative(2);
    REQUIRE_THAT(static_cast<double>(exact(0.0L)), WithinAbs(-0.5, 1e-18));
    REQUIRE_THAT(diff(f, 2).at_origin(), WithinAbs(-0.5, 1e-8));
}

TEST_CASE("derivative parity tags") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return sech(x / 2); }, Parity::even);
    REQUIRE(diff(f, 1).parity() == Parity::odd);
    REQUIRE(diff(f, 2).parity() == Parity::even);
    REQUIRE(diff(f, 1).parity_defect() == 0.0);
    REQUIRE(diff(f, 2).parity_defect() == 0.0);
    REQUIRE(diff(diff(f, 1), 1).parity() == Parity::even);
}

TEST_CASE("derivatives match the symbolic oracle") {
    Grid1D g;
    const auto sym = oracle::SechTanh::sech_pow(3) * oracle::SechTanh::tanh_pow(1);
    auto f = GridFn::sample(g, [&](double x) { return sym.at(x); }, Parity::odd);
    const auto d1 = sym.derivative(1), d2 = sym.derivative(2);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        e1 = std::max(e1, std::abs(diff(f, 1)[j] - d1.at(g.x(j))));
        e2 = std::max(e2, std::abs(diff(f, 2)[j] - d2.at(g.x(j))));
    }
    REQUIRE(e1 < 1e-9);
    REQUIRE(e2 < 1e-8);
}

TEST_CASE("one-sided closures are eighth order") {
    // Polynomial of degree 8 is differentiated exactly by every stencil.
    Grid1D g(2.0, 41);
    auto p = GridFn::sample(g, [](double x) { return std::pow(x - 0.3, 8) - 2.0 * x * x * x; });
    auto dp = GridFn::sample(g, [](double x) { return 8.0 * std::pow(x - 0.3, 7) - 6.0 * x * x; });
    auto d2p = GridFn::sample(g, [](double x) { return 56.0 * std::pow(x - 0.3, 6) - 12.0 * x; });
    for (std::size_t j = 0; j < g.size(); ++j) {
        REQUIRE_THAT(diff(p, 1)[j], WithinAbs(dp[j], 1e-8));
        REQUIRE_THAT(diff(p, 2)[j], WithinAbs(d2p[j], 1e-6));
    }
}

TEST_CASE("repeated first derivative agrees with the second derivative") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return sech(x / 2); }, Parity::even);
    REQUIRE(interior_max_dev(diff(diff(f, 1), 1), diff(f, 2), 8) < 1e-8);
}

TEST_CASE("quadrature of Q squared") {
    Grid1D g;
    auto q = GridFn::sample(g, [](double x) { return 1.5 * std::pow(sech(x / 2), 2); }, Parity::even);
    // int sech^4(x/2) = 8/3, so int Q^2 = (9/4)(8/3) = 6.
    REQUIRE_THAT(quad(q * q), WithinRel(6.0, 1e-10));
}

TEST_CASE("quadrature of odd functions vanishes") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return x * std::exp(-0.1 * x * x); }, Parity::odd);
    REQUIRE(std::abs(quad(f)) <= 1e-14 * norm(f));
}

TEST_CASE("quadrature is mirror invariant") {
    Grid1D g(20.0, 801);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::vector<double> v(g.size()), w(g.size());
    for (auto& x : v) x = nd(rng);
    for (std::size_t j = 0; j < g.size(); ++j) w[j] = v[g.mirror(j)];
    REQUIRE(quad(GridFn(g, v)) == quad(GridFn(g, w)));
}

TEST_CASE("restricted quadrature") {
    Grid1D g;
    auto one = GridFn::constant(g, 1.0);
    REQUIRE_THAT(quad_interval(one, -5.0, 5.0), WithinAbs(10.0, 1e-12));
    REQUIRE_THROWS_AS(quad_interval(one, -70.0, 5.0), PreconditionError);
}

TEST_CASE("cumulative integral of zero") {
    Grid1D g;
    REQUIRE(cumint(GridFn::zeros(g)).max_abs() == 0.0);
}

TEST_CASE("cumulative integral of sech^2") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return std::pow(sech(x / 2), 2); }, Parity::even);
    auto big = cumint(f);
    REQUIRE(big.parity() == Parity::odd);
    REQUIRE(big.at_origin() == 0.0);
    REQUIRE(big.parity_defect() == 0.0);
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(big[j] - 2.0 * std::tanh(g.x(j) / 2)));
    REQUIRE(err < 1e-9);
}

TEST_CASE("cumulative integral of an odd function is even") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return x * std::exp(-x * x); }, Parity::odd);
    auto big = cumint(f);
    REQUIRE(big.parity() == Parity::even);
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        err = std::max(err, std::abs(big[j] - 0.5 * (1.0 - std::exp(-g.x(j) * g.x(j)))));
    REQUIRE(err < 1e-10);
}

TEST_CASE("differentiating the cumulative integral returns the integrand") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return std::exp(-0.3 * x * x) * std::cos(x); }, Parity::even);
    REQUIRE(interior_max_dev(diff(cumint(f), 1), f, 4) < 1e-8);
}

TEST_CASE("weighted cumulative integral stays finite") {
    Grid1D g;
    // exp(w) int_0^x exp(-w) f with w = -3 log cosh(x/2): grows like e^{3|x|/2} inside.
    auto lw = GridFn::sample(g, [](double x) { return -3.0 * std::log(std::cosh(x / 2)); }, Parity::even);
    auto f = GridFn::sample(g, [](double x) { return std::pow(sech(x / 2), 2); }, Parity::even);
    auto r = cumint_weighted(f, lw);
    for (double v : r.values()) REQUIRE(std::isfinite(v));
    // Exact: sech^3 * int_0^x cosh(y/2) = 2 sech^3 sinh = 2 sech^2 tanh.
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.x(j);
        err = std::max(err, std::abs(r[j] - 2.0 * std::pow(sech(x / 2), 2) * std::tanh(x / 2)));
    }
    REQUIRE(err < 1e-9);
}

TEST_CASE("smoothing with eps zero is the identity") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return sech(x / 2); }, Parity::even);
    auto s = smooth_inverse(f, 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) REQUIRE(s[j] == f[j]);
    REQUIRE_THROWS_AS(smooth_inverse(f, -1.0), PreconditionError);
}

TEST_CASE("smoothing matches the Fourier multiplier") {
    Grid1D g;
    const double eps = 0.01;
    auto fn = [](double x) { return sech(x / 2); };
    auto f = GridFn::sample(g, fn, Parity::even);
    auto s = smooth_inverse(f, eps);
    REQUIRE(s.parity() == Parity::even);
    REQUIRE(s.parity_defect() == 0.0);

    // Periodic oracle on [-2R, 2R) at spacing h/2; node x_j sits at index 2j + N - 1.
    const std::size_t m = 4 * (g.size() - 1);
    const auto ref = oracle::fourier_smooth_inverse(fn, 2.0 * g.half_width(), m, eps);
    std::vector<double> sampled(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) sampled[j] = ref[2 * j + g.size() - 1];
    const GridFn exact(g, sampled);
    REQUIRE(norm(s - exact) <= 1e-6 * norm(exact));
    REQUIRE(norm(s - f) <= 2.0 * eps * norm(diff(f, 2)) + 1e-3);
}

TEST_CASE("smoothing is self-adjoint") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return std::exp(-0.2 * (x - 3) * (x - 3)); });
    auto h = GridFn::sample(g, [](double x) { return sech(x) * std::cos(2 * x); });
    const double eps = 0.05;
    const double lhs = inner(smooth_inverse(f, eps), h);
    const double rhs = inner(f, smooth_inverse(h, eps));
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * norm(f) * norm(h));
}

TEST_CASE("smoothing preserves odd parity") {
    Grid1D g;
    auto f = GridFn::sample(g, [](double x) { return std::tanh(x) * sech(x); }, Parity::odd);
    auto s = smooth_inverse(f, 0.05);
    REQUIRE(s.parity() == Parity::odd);
    REQUIRE(s.parity_defect() == 0.0);
}

TEST_CASE("Dirichlet second difference is symmetric") {
    Grid1D g(5.0, 41);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> a(g.size()), b(g.size()), da(g.size()), db(g.size());
    for (auto& x : a) x = nd(rng);
    for (auto& x : b) x = nd(rng);
    d2_dirichlet(a, da, g.spacing());
    d2_dirichlet(b, db, g.spacing());
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        s1 += da[j] * b[j];
        s2 += a[j] * db[j];
    }
    REQUIRE_THAT(s1, WithinAbs(s2, 1e-9 * std::abs(s1)));
}
