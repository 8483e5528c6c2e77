// SPDX-License-Identifier: Apache-2.0
#include "kglab/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "kglab/errors.hpp"

namespace kglab {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    double v = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec == std::errc() && ptr == e) return v;
    // from_chars rejects "nan"/"inf" spellings produced by printf on some platforms.
    if (cell == "nan" || cell == "-nan") return std::nan("");
    if (cell == "inf") return HUGE_VAL;
    if (cell == "-inf") return -HUGE_VAL;
    throw SchemaError("line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

TraceWriter::TraceWriter(std::ostream& out) : out_(out) {
    const auto& cols = trace_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out_ << (k ? "," : "") << cols[k];
    out_ << '\n';
}

void TraceWriter::write(const TraceRecord& r) {
    const auto row = to_row(r);
    for (std::size_t k = 0; k < row.size(); ++k) out_ << (k ? "," : "") << format_double(row[k]);
    out_ << '\n';
}

void TraceWriter::footer(const std::string& key, const std::string& value) {
    out_ << "# " << key << '=' << value << '\n';
}

TraceFile read_trace_csv(std::istream& in) {
    TraceFile out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto body = line.substr(line.find_first_not_of("# "));
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                out.meta.emplace_back(body, "");
            else
                out.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        const auto cells = split(line, ',');
        if (!header) {
            const auto& cols = trace_columns();
            if (cells.size() != cols.size()) throw SchemaError("trace header has " + std::to_string(cells.size()) +
                                                               " columns, expected " + std::to_string(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k)
                if (cells[k] != cols[k])
                    throw SchemaError("trace header column " + std::to_string(k) + " is '" + cells[k] +
                                      "', expected '" + cols[k] + "'");
            header = true;
            continue;
        }
        if (cells.size() != kTraceColumns)
            throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(kTraceColumns) +
                              " fields, found " + std::to_string(cells.size()));
        std::array<double, kTraceColumns> row{};
        for (std::size_t k = 0; k < kTraceColumns; ++k) row[k] = parse_cell(cells[k], line_no);
        out.records.push_back(from_row(row));
    }
    if (!header) throw SchemaError("trace has no header row");
    return out;
}

TraceFile read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file '" + path + "'");
    return read_trace_csv(in);
}

void write_checkpoint(std::ostream& out, const FieldState& s) {
    const Grid1D& grid = s.phi1.grid();
    out << "# kglab-checkpoint v1 t=" << format_double(s.time) << " R=" << format_double(grid.half_width())
        << " N=" << grid.size() << '\n';
    out << "x,phi1,phi2\n";
    for (std::size_t j = 0; j < grid.size(); ++j)
        out << format_double(grid.x(j)) << ',' << format_double(s.phi1[j]) << ',' << format_double(s.phi2[j]) << '\n';
}

FieldState read_checkpoint(std::istream& in, const Grid1D& grid) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("checkpoint is empty");
    strip_cr(line);
    const std::string magic = "# kglab-checkpoint v1 ";
    if (line.rfind(magic, 0) != 0) throw SchemaError("checkpoint magic line missing");
    double t = 0.0, R = 0.0;
    std::size_t N = 0;
    for (const auto& tok : split(line.substr(magic.size()), ' ')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "t") t = parse_cell(val, 1);
        if (key == "R") R = parse_cell(val, 1);
        if (key == "N") N = static_cast<std::size_t>(parse_cell(val, 1));
    }
    if (N != grid.size() || std::abs(R - grid.half_width()) > 1e-12 * grid.half_width())
        throw SchemaError("checkpoint grid (R=" + format_double(R) + ", N=" + std::to_string(N) +
                          ") does not match the configured grid");
    if (!std::getline(in, line)) throw SchemaError("checkpoint header row missing");
    strip_cr(line);
    if (line != "x,phi1,phi2") throw SchemaError("checkpoint header row must be 'x,phi1,phi2'");
    std::vector<double> p1, p2;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 3) throw SchemaError("line " + std::to_string(line_no) + ": expected 3 fields");
        const std::size_t j = p1.size();
        if (j >= grid.size()) throw SchemaError("checkpoint has more rows than grid points");
        const double x = parse_cell(cells[0], line_no);
        if (std::abs(x - grid.x(j)) > 1e-9) throw SchemaError("line " + std::to_string(line_no) + ": node mismatch");
        p1.push_back(parse_cell(cells[1], line_no));
        p2.push_back(parse_cell(cells[2], line_no));
    }
    if (p1.size() != grid.size()) throw SchemaError("checkpoint has fewer rows than grid points");
    return FieldState{GridFn(grid, std::move(p1)), GridFn(grid, std::move(p2)), t};
}

FieldState read_checkpoint(const std::string& path, const Grid1D& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint '" + path + "'");
    return read_checkpoint(in, grid);
}

}  // namespace kglab
