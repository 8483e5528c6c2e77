// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kglab/diagnostics.hpp"
#include "kglab/dynamics.hpp"

namespace kglab {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// CSV trace: one header row naming every TraceRecord field, then one row per
/// record. Footer metadata lines start with '#'.
class TraceWriter {
public:
    explicit TraceWriter(std::ostream& out);
    void write(const TraceRecord& r);
    void footer(const std::string& key, const std::string& value);

private:
    std::ostream& out_;
};

struct TraceFile {
    std::vector<TraceRecord> records;
    std::vector<std::pair<std::string, std::string>> meta;
};

/// Throws SchemaError on a missing or wrong header, a short row or a bad number.
TraceFile read_trace_csv(std::istream& in);
TraceFile read_trace_csv(const std::string& path);

/**
 * Checkpoint layout:
 *   # kglab-checkpoint v1 t=<time> R=<half width> N=<points>
 *   x,phi1,phi2
 *   <one row per node>
 */
void write_checkpoint(std::ostream& out, const FieldState& s);
FieldState read_checkpoint(std::istream& in, const Grid1D& grid);
FieldState read_checkpoint(const std::string& path, const Grid1D& grid);

}  // namespace kglab
