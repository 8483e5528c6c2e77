// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kglab/errors.hpp"

namespace kglab {

enum class Parity { even, odd, none };

const char* to_string(Parity p);

/// Parity of a product / sum of tagged functions.
Parity parity_product(Parity a, Parity b);
Parity parity_sum(Parity a, Parity b);
/// Parity after one x-derivative.
Parity parity_flip(Parity p);

/**
 * Uniform symmetric grid on [-R, R].
 *
 * Nodes are x_j = (j - c) h with c = (N-1)/2, so x_c = 0 exactly and
 * x_j = -x_{N-1-j} bit for bit. N must be odd and at least 9 (the
 * width of the eighth-order stencils).
 */
class Grid1D {
public:
    static constexpr double kDefaultHalfWidth = 60.0;
    static constexpr std::size_t kDefaultPoints = 4801;

    Grid1D();
    /// sponge_width < 0 selects the default R/6; 0 disables the sponge.
    Grid1D(double half_width, std::size_t n_points, double sponge_width = -1.0);

    double half_width() const { return half_width_; }
    std::size_t size() const { return n_; }
    double spacing() const { return h_; }
    double sponge_width() const { return sponge_width_; }
    std::size_t center() const { return center_; }
    double x(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(center_)) * h_; }
    std::size_t mirror(std::size_t j) const { return n_ - 1 - j; }
    std::vector<double> nodes() const;

    /// Same grid with N' = 2(N-1)+1 (spacing halved).
    Grid1D refined() const;

    bool operator==(const Grid1D& other) const = default;

private:
    double half_width_;
    std::size_t n_;
    double h_;
    double sponge_width_;
    std::size_t center_;
};

/**
 * Real function sampled on a Grid1D, tagged with its parity.
 *
 * Values are fixed at construction. Arithmetic returns new objects and
 * propagates the parity tag; sampling a closed form with an even/odd tag
 * evaluates only x >= 0 and mirrors, so tagged closed forms are exactly
 * symmetric.
 */
class GridFn {
public:
    /// Empty placeholder (no values); only assignment is meaningful.
    GridFn() : parity_(Parity::none) {}
    GridFn(Grid1D grid, std::vector<double> values, Parity parity = Parity::none);

    static GridFn zeros(const Grid1D& grid, Parity parity = Parity::even);
    static GridFn constant(const Grid1D& grid, double value);

    template <class F>
    static GridFn sample(const Grid1D& grid, F&& f, Parity parity = Parity::none) {
        const std::size_t n = grid.size();
        const std::size_t c = grid.center();
        std::vector<double> v(n);
        if (parity == Parity::none) {
            for (std::size_t j = 0; j < n; ++j) v[j] = f(grid.x(j));
        } else {
            const double sign = parity == Parity::even ? 1.0 : -1.0;
            for (std::size_t j = c; j < n; ++j) v[j] = f(grid.x(j));
            if (parity == Parity::odd) v[c] = 0.0;
            for (std::size_t j = 0; j < c; ++j) v[j] = sign * v[n - 1 - j];
        }
        return GridFn(grid, std::move(v), parity);
    }

    const Grid1D& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t j) const { return values_[j]; }
    Parity parity() const { return parity_; }
    double at_origin() const { return values_[grid_.center()]; }
    double max_abs() const;

    /// max_j |f_j -/+ f_{N-1-j}| / max|f| for the tagged parity (0 for none).
    double parity_defect() const;
    /// Relabels the parity; does not touch the values.
    GridFn with_parity(Parity p) const;

    std::vector<double> take_values() && { return std::move(values_); }

    friend GridFn operator+(const GridFn& a, const GridFn& b);
    friend GridFn operator-(const GridFn& a, const GridFn& b);
    friend GridFn operator*(const GridFn& a, const GridFn& b);
    friend GridFn operator*(double s, const GridFn& a);
    friend GridFn operator*(const GridFn& a, double s) { return s * a; }
    friend GridFn operator-(const GridFn& a) { return -1.0 * a; }

private:
    Grid1D grid_;
    std::vector<double> values_;
    Parity parity_;
};

void require_same_grid(const GridFn& a, const GridFn& b);

/// Eighth-order finite differences; one-sided eighth-order closures at the
/// boundary. order must be 1 or 2.
GridFn diff(const GridFn& f, int order);

/// Trapezoid rule. Summed pairwise from the outside in, so the result is
/// invariant under mirroring the samples.
double quad(const GridFn& f);
double inner(const GridFn& f, const GridFn& g);
double norm(const GridFn& f);

/// Trapezoid rule restricted to the nodes inside [lo, hi].
double quad_interval(const GridFn& f, double lo, double hi);

/// F(x) = int_0^x f, eighth-order accurate, F(0) = 0.
GridFn cumint(const GridFn& f);

/**
 * F(x) = exp(w(x)) int_0^x exp(-w(y)) f(y) dy.
 *
 * Evaluated by the outward recurrence
 *   F_{j+1} = exp(w_{j+1} - w_j) F_j + int_{x_j}^{x_{j+1}} exp(w_{j+1} - w(y)) f(y) dy,
 * so only differences of w between nearby nodes are exponentiated. The
 * result parity assumes w is even.
 */
GridFn cumint_weighted(const GridFn& f, const GridFn& log_weight);

/// (1 - eps D2)^{-2} f with D2 the eighth-order second difference and zero
/// values outside the grid. eps = 0 returns f.
GridFn smooth_inverse(const GridFn& f, double eps);

/// Eighth-order second difference with zero values beyond the boundary.
/// out[j] = (D2 f)[j]; symmetric in the plain l2 sense.
void d2_dirichlet(std::span<const double> f, std::span<double> out, double h);
GridFn d2_dirichlet(const GridFn& f);

}  // namespace kglab
