// SPDX-License-Identifier: Apache-2.0
#include "kglab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "kglab/errors.hpp"

namespace kglab {

namespace {

namespace pt = boost::property_tree;

const std::vector<std::string> kPresets = {"soliton", "soliton+Y0", "soliton+Y2", "soliton+bump", "custom"};

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("'" + key + "': expected a non-negative integer, got '" + text + "'");
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "': integer out of range");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "off" || text == "no") return false;
    throw ConfigError("'" + key + "': expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError("'" + key + "': empty list entry");
        out.push_back(parse_double(key, item.substr(b, e - b + 1)));
    }
    return out;
}

// Shortest round-trip representation.
std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
    Setter set;
    Getter get;
};

// Ordered "section.key" table; drives parsing, unknown-key rejection and print-config.
const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        auto num = [&t](const std::string& k, auto member) {
            t.push_back({k, Field{[k, member](RunConfig& c, const std::string& s) { member(c) = parse_double(k, s); },
                                  [member](const RunConfig& c) {
                                      RunConfig copy = c;
                                      return fmt(member(copy));
                                  }}});
        };
        num("grid.R", [](RunConfig& c) -> double& { return c.grid.R; });
        t.push_back({"grid.N", Field{[](RunConfig& c, const std::string& s) { c.grid.N = parse_uint("grid.N", s); },
                                    [](const RunConfig& c) { return std::to_string(c.grid.N); }}});
        num("grid.sponge_width", [](RunConfig& c) -> double& { return c.grid.sponge_width; });
        num("weights.A", [](RunConfig& c) -> double& { return c.weights.A; });
        num("weights.eps", [](RunConfig& c) -> double& { return c.weights.eps; });
        num("evolve.dt", [](RunConfig& c) -> double& { return c.evolve.dt; });
        num("evolve.t_end", [](RunConfig& c) -> double& { return c.evolve.t_end; });
        t.push_back({"evolve.record_every",
                     Field{[](RunConfig& c, const std::string& s) {
                               c.evolve.record_every = parse_uint("evolve.record_every", s);
                           },
                           [](const RunConfig& c) { return std::to_string(c.evolve.record_every); }}});
        t.push_back({"evolve.mode", Field{[](RunConfig& c, const std::string& s) {
                                              if (s == "nonlinear")
                                                  c.evolve.mode = EvolveMode::nonlinear;
                                              else if (s == "linearized")
                                                  c.evolve.mode = EvolveMode::linearized;
                                              else
                                                  throw ConfigError("'evolve.mode': expected nonlinear or linearized");
                                          },
                                          [](const RunConfig& c) {
                                              return std::string(c.evolve.mode == EvolveMode::nonlinear ? "nonlinear"
                                                                                                        : "linearized");
                                          }}});
        t.push_back({"evolve.sponge",
                     Field{[](RunConfig& c, const std::string& s) { c.evolve.sponge = parse_bool("evolve.sponge", s); },
                           [](const RunConfig& c) { return std::string(c.evolve.sponge ? "true" : "false"); }}});
        t.push_back({"initial.preset", Field{[](RunConfig& c, const std::string& s) { c.initial.preset = s; },
                                             [](const RunConfig& c) { return c.initial.preset; }}});
        num("initial.amplitude", [](RunConfig& c) -> double& { return c.initial.amplitude; });
        num("initial.bump_center", [](RunConfig& c) -> double& { return c.initial.bump_center; });
        num("initial.bump_width", [](RunConfig& c) -> double& { return c.initial.bump_width; });
        t.push_back({"initial.file", Field{[](RunConfig& c, const std::string& s) { c.initial.file = s; },
                                           [](const RunConfig& c) { return c.initial.file; }}});
        num("shoot.t_horizon", [](RunConfig& c) -> double& { return c.shoot.t_horizon; });
        num("shoot.tol", [](RunConfig& c) -> double& { return c.shoot.tol; });
        num("shoot.theta_exit", [](RunConfig& c) -> double& { return c.shoot.theta_exit; });
        num("shoot.max_norm", [](RunConfig& c) -> double& { return c.shoot.max_norm; });
        t.push_back({"shoot.amplitudes",
                     Field{[](RunConfig& c, const std::string& s) { c.shoot.amplitudes = parse_list("shoot.amplitudes", s); },
                           [](const RunConfig& c) { return fmt_list(c.shoot.amplitudes); }}});
        num("shoot.bound_horizon", [](RunConfig& c) -> double& { return c.shoot.bound_horizon; });
        num("shoot.trace_amplitude", [](RunConfig& c) -> double& { return c.shoot.trace_amplitude; });
        num("shoot.trace_t_end", [](RunConfig& c) -> double& { return c.shoot.trace_t_end; });
        t.push_back({"run.seed", Field{[](RunConfig& c, const std::string& s) { c.seed = parse_uint("run.seed", s); },
                                       [](const RunConfig& c) { return std::to_string(c.seed); }}});
        t.push_back({"run.output_dir", Field{[](RunConfig& c, const std::string& s) { c.output_dir = s; },
                                             [](const RunConfig& c) { return c.output_dir; }}});
        return t;
    }();
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& [k, f] : fields())
        if (k == key) return &f;
    return nullptr;
}

}  // namespace

Grid1D RunConfig::make_grid() const {
    try {
        return Grid1D(grid.R, grid.N, grid.sponge_width);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

EvolveConfig RunConfig::evolve_config() const {
    EvolveConfig c;
    c.dt = evolve.dt;
    c.t_end = evolve.t_end;
    c.record_every = evolve.record_every;
    c.mode = evolve.mode;
    c.sponge = evolve.sponge;
    return c;
}

ShootConfig RunConfig::shoot_config() const {
    ShootConfig c;
    c.t_horizon = shoot.t_horizon;
    c.tol = shoot.tol;
    c.theta_exit = shoot.theta_exit;
    c.max_norm = shoot.max_norm;
    return c;
}

void validate(const RunConfig& cfg) {
    const Grid1D grid = cfg.make_grid();
    validate(cfg.evolve_config(), grid);
    if (cfg.weights.A < 10.0) throw ConfigError("weights.A must be at least 10");
    if (!(cfg.weights.eps > 0.0 && cfg.weights.eps <= 1.0)) throw ConfigError("weights.eps must lie in (0, 1]");
    if (2.0 * cfg.weights.A > cfg.grid.R) throw ConfigError("weights.A must satisfy 2A <= R");
    if (std::find(kPresets.begin(), kPresets.end(), cfg.initial.preset) == kPresets.end())
        throw ConfigError("initial.preset must be one of soliton, soliton+Y0, soliton+Y2, soliton+bump, custom");
    if (cfg.initial.preset == "custom" && cfg.initial.file.empty())
        throw ConfigError("initial.preset = custom requires initial.file");
    if (!(cfg.initial.bump_width > 0.0)) throw ConfigError("initial.bump_width must be positive");
    if (cfg.shoot.t_horizon < 0.0) throw ConfigError("shoot.t_horizon must be non-negative (0 selects automatic)");
    if (!(cfg.shoot.tol > 0.0)) throw ConfigError("shoot.tol must be positive");
    if (!(cfg.shoot.theta_exit > 0.0)) throw ConfigError("shoot.theta_exit must be positive");
    if (!(cfg.shoot.max_norm > 0.0)) throw ConfigError("shoot.max_norm must be positive");
    if (cfg.shoot.amplitudes.empty()) throw ConfigError("shoot.amplitudes must not be empty");
    for (double a : cfg.shoot.amplitudes)
        if (a < 0.0) throw ConfigError("shoot.amplitudes must be non-negative");
    if (cfg.shoot.bound_horizon < 0.0 || cfg.shoot.trace_t_end < 0.0)
        throw ConfigError("shoot horizons must be non-negative");
    if (cfg.output_dir.empty()) throw ConfigError("run.output_dir must not be empty");
}

RunConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside of a [section]");
        const bool known = std::any_of(fields().begin(), fields().end(),
                                       [&](const auto& f) { return f.first.rfind(section + ".", 0) == 0; });
        if (!known) throw ConfigError("unknown config section '[" + section + "]'");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            const Field* f = find_field(full);
            if (!f) throw ConfigError("unknown config key '" + full + "'");
            f->set(cfg, value.get_value<std::string>());
        }
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

void print_config(std::ostream& out, const RunConfig& cfg) {
    std::string current;
    for (const auto& [key, field] : fields()) {
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        if (section != current) {
            if (!current.empty()) out << '\n';
            out << '[' << section << "]\n";
            current = section;
        }
        out << key.substr(dot + 1) << " = " << field.get(cfg) << '\n';
    }
}

}  // namespace kglab
