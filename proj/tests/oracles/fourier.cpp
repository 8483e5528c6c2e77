// SPDX-License-Identifier: Apache-2.0
#include "oracles/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

namespace oracle {

std::vector<double> fourier_smooth_inverse(const std::function<double(double)>& f, double half_period,
                                           std::size_t m, double eps) {
    const double dx = 2.0 * half_period / static_cast<double>(m);
    std::vector<double> in(m);
    for (std::size_t k = 0; k < m; ++k) in[k] = f(-half_period + static_cast<double>(k) * dx);

    const std::size_t mc = m / 2 + 1;
    fftw_complex* spec = fftw_alloc_complex(mc);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(), spec, FFTW_ESTIMATE);
    fftw_execute(fwd);
    const double dk = std::numbers::pi / half_period;
    for (std::size_t k = 0; k < mc; ++k) {
        const double xi = dk * static_cast<double>(k);
        const double mult = 1.0 / ((1.0 + eps * xi * xi) * (1.0 + eps * xi * xi) * static_cast<double>(m));
        spec[k][0] *= mult;
        spec[k][1] *= mult;
    }
    std::vector<double> out(m);
    fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, out.data(), FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(spec);
    return out;
}

}  // namespace oracle
