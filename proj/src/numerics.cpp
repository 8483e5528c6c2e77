// SPDX-License-Identifier: Apache-2.0
#include "kglab/numerics.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace kglab {

namespace {

// Central eighth-order weights, offsets 1..4.
constexpr std::array<double, 4> kD1 = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
constexpr double kD2Center = -205.0 / 72.0;
constexpr std::array<double, 4> kD2 = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
constexpr std::size_t kHalf = 4;

// Fornberg's recursion for finite-difference weights of derivative `order`
// at z on the given nodes.
std::vector<double> fornberg(long double z, const std::vector<long double>& nodes, int order) {
    const std::size_t n = nodes.size();
    std::vector<std::vector<long double>> c(n, std::vector<long double>(order + 1, 0.0L));
    long double c1 = 1.0L;
    long double c4 = nodes[0] - z;
    c[0][0] = 1.0L;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), order);
        long double c2 = 1.0L;
        const long double c5 = c4;
        c4 = nodes[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const long double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(c[i][order]);
    return w;
}

// One-sided closure weights for rows 0..3, nodes 0..width-1 (unit spacing).
struct BoundaryStencils {
    std::array<std::vector<double>, kHalf> rows;
};

BoundaryStencils make_boundary(int order, std::size_t width) {
    BoundaryStencils b;
    std::vector<long double> nodes(width);
    for (std::size_t i = 0; i < width; ++i) nodes[i] = static_cast<long double>(i);
    for (std::size_t r = 0; r < kHalf; ++r) b.rows[r] = fornberg(static_cast<long double>(r), nodes, order);
    return b;
}

const BoundaryStencils& boundary_stencils(int order, std::size_t width) {
    // Widths are 9 (order 1) and 10 (order 2) except on the smallest grids.
    static const BoundaryStencils d1_9 = make_boundary(1, 9);
    static const BoundaryStencils d2_10 = make_boundary(2, 10);
    static const BoundaryStencils d2_9 = make_boundary(2, 9);
    if (order == 1) return d1_9;
    return width >= 10 ? d2_10 : d2_9;
}

// Weights w_m with int_0^1 p = sum_m w_m p(m0 + m) for polynomials of degree 7.
std::array<double, 8> interval_weights(int m0) {
    std::array<double, 8> w{};
    for (int i = 0; i < 8; ++i) {
        // Lagrange basis polynomial for node i, built coefficient by coefficient.
        std::array<long double, 9> poly{};
        poly[0] = 1.0L;
        int degree = 0;
        long double denom = 1.0L;
        for (int j = 0; j < 8; ++j) {
            if (j == i) continue;
            const long double nj = m0 + j;
            for (int k = degree + 1; k >= 1; --k) poly[k] = poly[k - 1] - nj * poly[k];
            poly[0] = -nj * poly[0];
            ++degree;
            denom *= static_cast<long double>(i - j);
        }
        long double integral = 0.0L;
        for (int k = 0; k <= degree; ++k) integral += poly[k] / (k + 1);
        w[i] = static_cast<double>(integral / denom);
    }
    return w;
}

const std::array<double, 8>& window_weights(int m0) {
    static const std::array<std::array<double, 8>, 4> table = {
        interval_weights(-3), interval_weights(-4), interval_weights(-5), interval_weights(-6)};
    return table[static_cast<std::size_t>(-3 - m0)];
}

Parity integrated_parity(Parity p) {
    return parity_flip(p);
}

// Shared outward recurrence for cumint / cumint_weighted. `lw` may be empty.
std::vector<double> outward_integral(const Grid1D& grid, std::span<const double> f,
                                     std::span<const double> lw) {
    const std::size_t n = grid.size();
    const std::size_t c = grid.center();
    const double h = grid.spacing();
    const bool weighted = !lw.empty();
    std::vector<double> out(n, 0.0);

    auto step = [&](std::size_t a, int dir) {
        const long target = static_cast<long>(a) + dir;
        const long room = dir > 0 ? static_cast<long>(n) - 1 - static_cast<long>(a)
                                  : static_cast<long>(a);
        const int m0 = static_cast<int>(std::min<long>(-3, room - 7));
        const auto& w = window_weights(m0);
        double acc = 0.0;
        for (int m = 0; m < 8; ++m) {
            const long node = static_cast<long>(a) + dir * (m0 + m);
            double v = f[static_cast<std::size_t>(node)];
            if (weighted) v *= std::exp(lw[static_cast<std::size_t>(target)] - lw[static_cast<std::size_t>(node)]);
            acc += w[static_cast<std::size_t>(m)] * v;
        }
        double prev = out[a];
        if (weighted) prev *= std::exp(lw[static_cast<std::size_t>(target)] - lw[a]);
        out[static_cast<std::size_t>(target)] = prev + dir * h * acc;
    };

    for (std::size_t k = 1; k <= c; ++k) {
        step(c + k - 1, +1);
        step(c - k + 1, -1);
    }
    return out;
}

}  // namespace

const char* to_string(Parity p) {
    switch (p) {
        case Parity::even: return "even";
        case Parity::odd: return "odd";
        default: return "none";
    }
}

Parity parity_product(Parity a, Parity b) {
    if (a == Parity::none || b == Parity::none) return Parity::none;
    return a == b ? Parity::even : Parity::odd;
}

Parity parity_sum(Parity a, Parity b) {
    return a == b ? a : Parity::none;
}

Parity parity_flip(Parity p) {
    if (p == Parity::even) return Parity::odd;
    if (p == Parity::odd) return Parity::even;
    return Parity::none;
}

// ---------------------------------------------------------------- Grid1D

Grid1D::Grid1D() : Grid1D(kDefaultHalfWidth, kDefaultPoints) {}

Grid1D::Grid1D(double half_width, std::size_t n_points, double sponge_width)
    : half_width_(half_width), n_(n_points) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ConfigError("grid half width must be positive, got " + std::to_string(half_width));
    if (n_points < 9) throw ConfigError("grid needs at least 9 points, got " + std::to_string(n_points));
    if (n_points % 2 == 0) throw ConfigError("grid point count must be odd so that x = 0 is a node");
    center_ = (n_ - 1) / 2;
    h_ = 2.0 * half_width / static_cast<double>(n_ - 1);
    sponge_width_ = sponge_width < 0.0 ? half_width / 6.0 : sponge_width;
    if (sponge_width_ > half_width / 2.0)
        throw ConfigError("sponge width must not exceed half the domain half width");
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> v(n_);
    for (std::size_t j = 0; j < n_; ++j) v[j] = x(j);
    return v;
}

Grid1D Grid1D::refined() const {
    return Grid1D(half_width_, 2 * (n_ - 1) + 1, sponge_width_);
}

// ---------------------------------------------------------------- GridFn

GridFn::GridFn(Grid1D grid, std::vector<double> values, Parity parity)
    : grid_(grid), values_(std::move(values)), parity_(parity) {
    if (values_.size() != grid_.size())
        throw ConfigError("sample count " + std::to_string(values_.size()) + " does not match grid size " +
                          std::to_string(grid_.size()));
}

GridFn GridFn::zeros(const Grid1D& grid, Parity parity) {
    return GridFn(grid, std::vector<double>(grid.size(), 0.0), parity);
}

GridFn GridFn::constant(const Grid1D& grid, double value) {
    return GridFn(grid, std::vector<double>(grid.size(), value), Parity::even);
}

double GridFn::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFn::parity_defect() const {
    if (parity_ == Parity::none) return 0.0;
    const double scale = max_abs();
    if (scale == 0.0) return 0.0;
    const double sign = parity_ == Parity::even ? 1.0 : -1.0;
    double worst = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j)
        worst = std::max(worst, std::abs(values_[j] - sign * values_[grid_.mirror(j)]));
    return worst / scale;
}

GridFn GridFn::with_parity(Parity p) const {
    return GridFn(grid_, values_, p);
}

void require_same_grid(const GridFn& a, const GridFn& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch();
}

GridFn operator+(const GridFn& a, const GridFn& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a.values_[j] + b.values_[j];
    return GridFn(a.grid_, std::move(v), parity_sum(a.parity_, b.parity_));
}

GridFn operator-(const GridFn& a, const GridFn& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a.values_[j] - b.values_[j];
    return GridFn(a.grid_, std::move(v), parity_sum(a.parity_, b.parity_));
}

GridFn operator*(const GridFn& a, const GridFn& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a.values_[j] * b.values_[j];
    return GridFn(a.grid_, std::move(v), parity_product(a.parity_, b.parity_));
}

GridFn operator*(double s, const GridFn& a) {
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = s * a.values_[j];
    return GridFn(a.grid_, std::move(v), a.parity_);
}

// ---------------------------------------------------------------- operators

GridFn diff(const GridFn& f, int order) {
    if (order != 1 && order != 2) throw ConfigError("diff order must be 1 or 2");
    const Grid1D& grid = f.grid();
    const std::size_t n = grid.size();
    if (n < 9) throw ConfigError("grid too small for eighth-order stencils");
    const double h = grid.spacing();
    const auto v = f.values();
    std::vector<double> out(n, 0.0);

    if (order == 1) {
        const double inv = 1.0 / h;
        for (std::size_t j = kHalf; j + kHalf < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 1; k <= kHalf; ++k) acc += kD1[k - 1] * (v[j + k] - v[j - k]);
            out[j] = acc * inv;
        }
    } else {
        const double inv = 1.0 / (h * h);
        for (std::size_t j = kHalf; j + kHalf < n; ++j) {
            double acc = kD2Center * v[j];
            for (std::size_t k = 1; k <= kHalf; ++k) acc += kD2[k - 1] * (v[j + k] + v[j - k]);
            out[j] = acc * inv;
        }
    }

    const std::size_t width = std::min<std::size_t>(n, order == 1 ? 9 : 10);
    const auto& stencils = boundary_stencils(order, width);
    const double scale = order == 1 ? 1.0 / h : 1.0 / (h * h);
    const double right_sign = order == 1 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < kHalf; ++r) {
        const auto& w = stencils.rows[r];
        double left = 0.0, right = 0.0;
        for (std::size_t m = 0; m < w.size(); ++m) {
            left += w[m] * v[m];
            right += w[m] * v[n - 1 - m];
        }
        out[r] = left * scale;
        out[n - 1 - r] = right_sign * right * scale;
    }
    const Parity p = order == 1 ? parity_flip(f.parity()) : f.parity();
    return GridFn(grid, std::move(out), p);
}

double quad(const GridFn& f) {
    const auto v = f.values();
    const std::size_t n = v.size();
    const std::size_t c = f.grid().center();
    double acc = 0.5 * (v[0] + v[n - 1]);
    for (std::size_t k = c - 1; k >= 1; --k) acc += v[c - k] + v[c + k];
    acc += v[c];
    return acc * f.grid().spacing();
}

double inner(const GridFn& f, const GridFn& g) {
    return quad(f * g);
}

double norm(const GridFn& f) {
    return std::sqrt(inner(f, f));
}

double quad_interval(const GridFn& f, double lo, double hi) {
    const Grid1D& grid = f.grid();
    const double h = grid.spacing();
    const double tol = 1e-9 * h;
    if (!(lo < hi) || lo < grid.x(0) - tol || hi > grid.x(grid.size() - 1) + tol)
        throw PreconditionError("interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                "] is not inside the grid");
    const auto first = static_cast<std::size_t>(std::ceil((lo - grid.x(0) - tol) / h));
    const auto last = static_cast<std::size_t>(std::floor((hi - grid.x(0) + tol) / h));
    if (last <= first) return 0.0;
    const auto v = f.values();
    double acc = 0.5 * (v[first] + v[last]);
    for (std::size_t j = first + 1; j < last; ++j) acc += v[j];
    return acc * h;
}

GridFn cumint(const GridFn& f) {
    return GridFn(f.grid(), outward_integral(f.grid(), f.values(), {}), integrated_parity(f.parity()));
}

GridFn cumint_weighted(const GridFn& f, const GridFn& log_weight) {
    require_same_grid(f, log_weight);
    return GridFn(f.grid(), outward_integral(f.grid(), f.values(), log_weight.values()),
                  integrated_parity(f.parity()));
}

GridFn smooth_inverse(const GridFn& f, double eps) {
    if (!(eps >= 0.0)) throw PreconditionError("smoothing parameter must be non-negative");
    if (eps == 0.0) return f;
    const Grid1D& grid = f.grid();
    const lapack_int n = static_cast<lapack_int>(grid.size());
    const lapack_int kd = static_cast<lapack_int>(kHalf);
    const lapack_int ldab = kd + 1;
    const double s = eps / (grid.spacing() * grid.spacing());

    // Upper band storage, column major: ab[kd + i - j + j*ldab] = A(i, j).
    // The factor of the most recent (n, h, eps) is kept per thread.
    struct Factor {
        lapack_int n = 0;
        double h = 0.0, eps = 0.0;
        std::vector<double> ab;
    };
    thread_local Factor cache;
    if (cache.n != n || cache.h != grid.spacing() || cache.eps != eps) {
        std::vector<double> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n), 0.0);
        for (lapack_int j = 0; j < n; ++j) {
            ab[static_cast<std::size_t>(kd + j * ldab)] = 1.0 - s * kD2Center;
            for (lapack_int k = 1; k <= kd && k <= j; ++k)
                ab[static_cast<std::size_t>(kd - k + j * ldab)] = -s * kD2[static_cast<std::size_t>(k - 1)];
        }
        const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', n, kd, ab.data(), ldab);
        if (info != 0) throw InternalError("smoothing operator factorisation failed, info=" + std::to_string(info));
        cache = Factor{n, grid.spacing(), eps, std::move(ab)};
    }
    const std::vector<double>& ab = cache.ab;

    std::vector<double> rhs(f.values().begin(), f.values().end());
    for (int pass = 0; pass < 2; ++pass) {
        const lapack_int info = LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', n, kd, 1, ab.data(), ldab, rhs.data(), n);
        if (info != 0) throw InternalError("smoothing solve failed, info=" + std::to_string(info));
    }

    // The continuum operator commutes with reflection; remove the rounding
    // asymmetry of the triangular sweeps.
    if (f.parity() != Parity::none) {
        const double sign = f.parity() == Parity::even ? 1.0 : -1.0;
        const std::size_t c = grid.center();
        for (std::size_t j = 0; j < c; ++j) {
            const std::size_t m = grid.mirror(j);
            const double sym = 0.5 * (rhs[j] + sign * rhs[m]);
            rhs[j] = sym;
            rhs[m] = sign * sym;
        }
        if (f.parity() == Parity::odd) rhs[c] = 0.0;
    }
    return GridFn(grid, std::move(rhs), f.parity());
}

void d2_dirichlet(std::span<const double> f, std::span<double> out, double h) {
    const std::size_t n = f.size();
    const double inv = 1.0 / (h * h);
    auto at = [&](long j) { return (j < 0 || j >= static_cast<long>(n)) ? 0.0 : f[static_cast<std::size_t>(j)]; };
    auto edge = [&](std::size_t j) {
        double acc = kD2Center * f[j];
        for (std::size_t k = 1; k <= kHalf; ++k)
            acc += kD2[k - 1] * (at(static_cast<long>(j + k)) + at(static_cast<long>(j) - static_cast<long>(k)));
        out[j] = acc * inv;
    };
    const std::size_t lo = std::min(kHalf, n);
    for (std::size_t j = 0; j < lo; ++j) edge(j);
    for (std::size_t j = kHalf; j + kHalf < n; ++j) {
        out[j] = (kD2Center * f[j] + kD2[0] * (f[j + 1] + f[j - 1]) + kD2[1] * (f[j + 2] + f[j - 2]) +
                  kD2[2] * (f[j + 3] + f[j - 3]) + kD2[3] * (f[j + 4] + f[j - 4])) *
                 inv;
    }
    for (std::size_t j = std::max(n - kHalf, lo); j < n; ++j) edge(j);
}

GridFn d2_dirichlet(const GridFn& f) {
    std::vector<double> out(f.size());
    d2_dirichlet(f.values(), out, f.grid().spacing());
    return GridFn(f.grid(), std::move(out), f.parity());
}

}  // namespace kglab
