// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kglab/dynamics.hpp"
#include "kglab/numerics.hpp"

namespace kglab {

struct RunConfig {
    struct GridSection {
        double R = 60.0;
        std::size_t N = 4801;
        double sponge_width = -1.0;  // negative selects R/6
    } grid;
    struct WeightsSection {
        double A = 20.0;
        double eps = 0.05;
    } weights;
    struct EvolveSection {
        double dt = 0.01;
        double t_end = 100.0;
        std::size_t record_every = 1;
        EvolveMode mode = EvolveMode::nonlinear;
        bool sponge = true;
    } evolve;
    struct InitialSection {
        std::string preset = "soliton";
        double amplitude = 1e-3;
        double bump_center = 0.0;
        double bump_width = 1.0;
        std::string file;
    } initial;
    struct ShootSection {
        double t_horizon = 0.0;
        double tol = 1e-12;
        double theta_exit = 0.05;
        double max_norm = 0.15;
        std::vector<double> amplitudes{0.04, 0.02, 0.01, 0.005};
        double bound_horizon = 200.0;
        double trace_amplitude = 0.1;
        double trace_t_end = 400.0;
    } shoot;
    std::uint64_t seed = 20240501;
    std::string output_dir = "kglab_out";

    Grid1D make_grid() const;
    EvolveConfig evolve_config() const;
    ShootConfig shoot_config() const;
};

/// Parses an INI-style file ([section] key = value). Unknown sections or keys,
/// malformed numbers and out-of-range values raise ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Range checks shared by the parser and programmatic callers.
void validate(const RunConfig& cfg);

/// Writes every key with its current value in the parser's format.
void print_config(std::ostream& out, const RunConfig& cfg);

}  // namespace kglab
