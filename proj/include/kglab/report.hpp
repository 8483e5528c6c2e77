// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace kglab {

/// One named residual compared against its tolerance.
struct Check {
    std::string check_name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Residual-vs-tolerance check; NaN never passes.
inline Check make_check(std::string name, double residual, double tolerance) {
    return Check{std::move(name), residual, tolerance, residual <= tolerance};
}

/// Lower-bound check (value must be at least `bound`).
inline Check make_floor_check(std::string name, double value, double bound) {
    return Check{std::move(name), value, bound, value >= bound};
}

using Report = std::vector<Check>;

inline bool all_pass(const Report& r) {
    for (const auto& c : r)
        if (!c.pass) return false;
    return true;
}

inline void append(Report& dst, const Report& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace kglab
