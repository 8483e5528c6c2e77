// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "kglab/dynamics.hpp"
#include "kglab/errors.hpp"

using namespace kglab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SpectralBasis& basis() {
    static const SpectralBasis b = build_basis(Grid1D());
    return b;
}

EvolveConfig linear_cfg(double t_end) {
    EvolveConfig c;
    c.t_end = t_end;
    c.mode = EvolveMode::linearized;
    return c;
}

double max_dev(const GridFn& a, const GridFn& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

}  // namespace

TEST_CASE("soliton is an exact fixed point of the scheme") {
    const auto& b = basis();
    EvolveConfig c;
    c.t_end = 5.0;
    const auto r = evolve(FieldState{b.Q, GridFn::zeros(b.grid), 0.0}, c, b);
    REQUIRE_FALSE(r.blew_up);
    REQUIRE_THAT(r.final.time, WithinAbs(5.0, 1e-12));
    REQUIRE(max_dev(r.final.phi1, b.Q) == 0.0);
    REQUIRE(r.final.phi2.max_abs() == 0.0);
}

TEST_CASE("unstable mode grows at rate nu") {
    const auto& b = basis();
    const double a = 1e-3, nu = SpectralBasis::nu;
    Integrator integ(b, linear_cfg(2.0));
    integ.load(FieldState{a * b.Y0, (a * nu) * b.Y0, 0.0});
    for (int k = 0; k < 200; ++k) integ.step();
    REQUIRE_THAT(integ.time(), WithinAbs(2.0, 1e-13));
    REQUIRE_THAT(integ.bplus(), WithinRel(a * std::exp(2.0 * nu), 1e-9));
}

TEST_CASE("stable direction of the unstable pair decays at rate nu") {
    const auto& b = basis();
    const double a = 1e-3, nu = SpectralBasis::nu;
    const auto r = evolve(FieldState{a * b.Y0, (-a * nu) * b.Y0, 0.0}, linear_cfg(3.0), b);
    const FieldState full{b.Q + r.final.phi1, r.final.phi2, r.final.time};
    const auto m = decompose(full, b);
    REQUIRE_THAT(m.bminus, WithinRel(a * std::exp(-3.0 * nu), 1e-8));
    REQUIRE(std::abs(m.bplus) < 1e-12);
}

TEST_CASE("internal mode oscillates at frequency mu") {
    const auto& b = basis();
    const double a = 1e-3, mu = SpectralBasis::mu;
    const double T = std::numbers::pi / mu;
    auto cfg = linear_cfg(std::round(T / 0.01) * 0.01);
    const auto r = evolve(FieldState{a * b.Y2, GridFn::zeros(b.grid), 0.0}, cfg, b);
    const auto m = decompose(FieldState{b.Q + r.final.phi1, r.final.phi2, r.final.time}, b);
    REQUIRE_THAT(m.z1, WithinAbs(a * std::cos(mu * cfg.t_end), 1e-10));
    REQUIRE_THAT(m.z2, WithinAbs(-a * std::sin(mu * cfg.t_end), 1e-10));
}

TEST_CASE("decompose and reconstruct are inverse") {
    const auto& b = basis();
    const auto bump = GridFn::sample(b.grid, [](double x) { return 1e-3 * std::exp(-x * x / 4); }, Parity::even);
    const FieldState s{b.Q + 0.01 * b.Y2 + 2e-4 * b.Y0 + bump, 0.003 * b.Y2 - 1e-4 * b.Y0, 1.5};
    const auto m = decompose(s, b);
    const auto back = reconstruct(m, b, 1.5);
    REQUIRE(max_dev(back.phi1, s.phi1) < 1e-14);
    REQUIRE(max_dev(back.phi2, s.phi2) < 1e-14);
    REQUIRE(back.time == 1.5);
    REQUIRE_THAT(m.modz2(), WithinRel(m.z1 * m.z1 + m.z2 * m.z2, 1e-15));
    REQUIRE(std::abs(inner(m.u1, b.Y2)) < 1e-14);
}

TEST_CASE("decompose rejects odd states") {
    const auto& b = basis();
    const FieldState s{b.Q + 1e-3 * b.Y1, GridFn::zeros(b.grid), 0.0};
    REQUIRE_THROWS_AS(decompose(s, b), PreconditionError);
}

TEST_CASE("energy is conserved without the sponge") {
    const auto& b = basis();
    EvolveConfig c;
    c.t_end = 5.0;
    c.sponge = false;
    const FieldState s{b.Q + 0.02 * b.Y2, GridFn::zeros(b.grid), 0.0};
    const double E0 = energy(s);
    REQUIRE_THAT(E0, WithinAbs(1.2 + 0.5 * 0.75 * 0.02 * 0.02, 1e-6));
    const auto r = evolve(s, c, b);
    REQUIRE_THAT(energy(r.final), WithinRel(E0, 1e-9));
}

TEST_CASE("soliton energy") {
    const auto& b = basis();
    REQUIRE_THAT(energy(FieldState{b.Q, GridFn::zeros(b.grid), 0.0}), WithinAbs(1.2, 1e-12));
}

TEST_CASE("even data stay exactly even") {
    const auto& b = basis();
    EvolveConfig c;
    c.t_end = 3.0;
    const auto sym = GridFn::sample(b.grid, [](double x) { return 0.05 * std::exp(-(x - 3) * (x - 3)) +
                                                                   0.05 * std::exp(-(x + 3) * (x + 3)); }, Parity::even);
    const auto r = evolve(FieldState{b.Q + sym, GridFn::zeros(b.grid), 0.0}, c, b);
    for (std::size_t j = 0; j < b.grid.size(); ++j) REQUIRE(r.final.phi1[j] == r.final.phi1[b.grid.mirror(j)]);
}

TEST_CASE("sponge profile") {
    const Grid1D g;
    const auto s = sponge_profile(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = std::abs(g.x(j));
        const double expected = x <= 50.0 ? 0.0 : std::pow((x - 50.0) / 10.0, 2);
        REQUIRE_THAT(s[j], WithinAbs(expected, 1e-12));
    }
    REQUIRE(sponge_profile(Grid1D(60.0, 4801, 0.0)).max_abs() == 0.0);
}

TEST_CASE("time step must respect the stability limit") {
    const Grid1D g;
    EvolveConfig c;
    REQUIRE_NOTHROW(validate(c, g));
    c.dt = 0.011;
    REQUIRE_THROWS_AS(validate(c, g), ConfigError);
    c.dt = 0.0;
    REQUIRE_THROWS_AS(validate(c, g), ConfigError);
}

TEST_CASE("positive unstable kick blows up") {
    const auto& b = basis();
    EvolveConfig c;
    c.t_end = 30.0;
    const double a = 0.01, nu = SpectralBasis::nu;
    const auto r = evolve(FieldState{b.Q + a * b.Y0, (a * nu) * b.Y0, 0.0}, c, b);
    REQUIRE(r.blew_up);
    REQUIRE(r.blowup_time > 3.0);
    REQUIRE(r.blowup_time < 10.0);
}

TEST_CASE("exit classification follows the unstable sign") {
    const auto& b = basis();
    EvolveConfig c;
    for (double sgn : {1.0, -1.0}) {
        Integrator integ(b, c);
        integ.load(FieldState{b.Q + (sgn * 1e-3) * b.Y0, (sgn * 1e-3 * SpectralBasis::nu) * b.Y0, 0.0});
        REQUIRE(classify_exit(integ, 50.0, 0.05) == static_cast<int>(sgn));
    }
}

TEST_CASE("observer can stop the run") {
    const auto& b = basis();
    EvolveConfig c;
    c.t_end = 10.0;
    c.record_every = 10;
    int calls = 0;
    const auto r = evolve(FieldState{b.Q, GridFn::zeros(b.grid), 0.0}, c, b, [&](const FieldState&) {
        return ++calls < 5;
    });
    REQUIRE(calls == 5);
    REQUIRE(r.stopped);
    REQUIRE_THAT(r.final.time, WithinAbs(0.4, 1e-12));
}

TEST_CASE("shooting correction scales quadratically") {
    const auto& b = basis();
    ShootConfig sc;
    EvolveConfig ec;
    const auto r1 = shoot_manifold(FieldState{0.01 * b.Y2, GridFn::zeros(b.grid), 0.0}, b, sc, ec);
    const auto r2 = shoot_manifold(FieldState{0.005 * b.Y2, GridFn::zeros(b.grid), 0.0}, b, sc, ec);
    REQUIRE(r1.h < 0.0);
    REQUIRE(r2.h < 0.0);
    REQUIRE(r1.hi - r1.lo <= 2 * sc.tol);
    const double p = std::log(r1.h / r2.h) / std::log(r1.eps_norm / r2.eps_norm);
    REQUIRE_THAT(p, WithinAbs(2.0, 0.05));
}

TEST_CASE("shooting rejects large or odd perturbations") {
    const auto& b = basis();
    REQUIRE_THROWS_AS(shoot_manifold(FieldState{0.5 * b.Y2, GridFn::zeros(b.grid), 0.0}, b, ShootConfig{}, EvolveConfig{}),
                      PreconditionError);
    REQUIRE_THROWS_AS(shoot_manifold(FieldState{0.01 * b.Y1, GridFn::zeros(b.grid, Parity::odd), 0.0}, b,
                                     ShootConfig{}, EvolveConfig{}),
                      PreconditionError);
}

TEST_CASE("nonlinearity projections") {
    const auto& b = basis();
    const FieldState s{b.Q + 0.01 * b.Y2 + 1e-3 * b.Y0, GridFn::zeros(b.grid), 0.0};
    const auto m = decompose(s, b);
    const auto n = nonlinearity_terms(m, b);
    const auto w = s.phi1 - b.Q;
    REQUIRE(max_dev(n.N, w * w) < 1e-15);
    REQUIRE_THAT(n.N0, WithinAbs(inner(w * w, b.Y0), 1e-15));
    REQUIRE_THAT(n.N2, WithinAbs(inner(w * w, b.Y2), 1e-15));
    REQUIRE(std::abs(inner(n.Nperp, b.Y2)) < 1e-15);
}
