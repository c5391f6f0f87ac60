#pragma once

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "susy.hpp"

namespace susyq {

inline constexpr const char* schema_id = "susyq/1";

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"spectrum", "partner", "propagate", "shaking-opt",
                                              "interfere", "sweep",   "gauge2d"};
  return names;
}

/// A collection of schema violations, each prefixed with its key path.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> issues) : ConfigError(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& i : v) s += (s.empty() ? "" : "\n") + i;
    return s;
  }
  std::vector<std::string> issues_;
};

struct GridSection {
  double x_min = -16.0;
  double x_max = 16.0;
  std::uint64_t n = 1024;
  friend bool operator==(const GridSection&, const GridSection&) = default;
};

struct SpectrumSection {
  std::uint64_t levels = 9;
  std::uint64_t paired = 8;
  double eta_min = -3.0;
  double eta_max = 3.0;
  double eta_step = 0.05;
  bool richardson = true;
  friend bool operator==(const SpectrumSection&, const SpectrumSection&) = default;
};

struct PartnerSection {
  std::uint64_t levels = 8;
  double tol = 1e-4;
  bool box = false;
  std::uint64_t box_n = 2048;
  std::string units = "oscillator";
  bool richardson = true;
  friend bool operator==(const PartnerSection&, const PartnerSection&) = default;
};

struct PropagateSection {
  std::string initial = "bdag_displaced_ground";
  double eta = 1.0;
  std::uint64_t snapshot_every = 64;
  std::uint64_t x_stride = 8;
  friend bool operator==(const PropagateSection&, const PropagateSection&) = default;
};

struct PulseSection {
  /// formula | optimize | fixed
  std::string source = "formula";
  double dx_sigma_t_periods = 0.0;
  double phi_pi = 1.0;
  double sigma_t_periods = 2.0;
  friend bool operator==(const PulseSection&, const PulseSection&) = default;
};

struct ProtocolSection {
  double xbar = -5.0;
  double t_r_periods = 4.0;
  double ramp_up_periods = 3.0;
  double ramp_down_periods = 3.0;
  double eta = 1.0;
  std::string mode = "exact_Bdag";
  PulseSection pulse_pre{"formula", 0.0, 1.0, 2.0};
  PulseSection pulse_post{"optimize", 0.0, 0.0, 2.0};
  friend bool operator==(const ProtocolSection&, const ProtocolSection&) = default;
};

struct SweepSection {
  double eta_min = -3.0;
  double eta_max = 3.0;
  double eta_step = 0.05;
  double t_r_min_periods = 0.0;
  double t_r_max_periods = 10.0;
  double t_r_step_periods = 0.25;
  friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct ShakingSection {
  std::uint64_t n_max = 3;
  std::uint64_t coarse_points = 41;
  std::uint64_t coarse_n = 128;
  std::uint64_t coarse_steps_per_period = 64;
  double product_max_periods = 0.1;
  double tolerance = 1e-4;
  friend bool operator==(const ShakingSection&, const ShakingSection&) = default;
};

struct InterfereSection {
  double fringe_k = 2.0 * std::numbers::pi / 0.5;
  double y_min = -1.0;
  double y_max = 1.0;
  std::uint64_t samples = 20001;
  friend bool operator==(const InterfereSection&, const InterfereSection&) = default;
};

struct Gauge2dSection {
  double L = 10.0;
  std::uint64_t n = 256;
  double B = 1.0;
  double g = 2.0;
  double eta_min = -2.0;
  double eta_max = 2.0;
  double eta_step = 0.1;
  std::uint64_t levels = 5;
  std::uint64_t samples = 10;
  friend bool operator==(const Gauge2dSection&, const Gauge2dSection&) = default;
};

struct RunConfig {
  std::string schema = schema_id;
  std::string scenario = "spectrum";
  std::uint64_t seed = 1;
  std::uint64_t workers = 1;
  /// Empty means "not set here".
  std::string output;
  GridSection grid;
  std::uint64_t steps_per_period = 1024;
  Superpotential::Kind superpotential = HarmonicGaussian{std::sqrt(26.0), 0.5};
  SpectrumSection spectrum;
  PartnerSection partner;
  PropagateSection propagate;
  ProtocolSection protocol;
  SweepSection sweep;
  ShakingSection shaking;
  InterfereSection interfere;
  Gauge2dSection gauge2d;

  double dt() const { return 2.0 * std::numbers::pi / static_cast<double>(steps_per_period); }
  Grid1D grid1d() const { return {grid.x_min, grid.x_max, static_cast<std::size_t>(grid.n)}; }
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

class ConfigReader {
 public:
  std::vector<std::string> issues;

  /// Reports keys of `node` outside `allowed`; a non-map node is itself an issue.
  bool check_map(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node) return false;
    if (!node.IsMap()) {
      issues.push_back(path + ": expected a mapping");
      return false;
    }
    for (const auto& kv : node) {
      auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) issues.push_back(join(path, key) + ": unknown key");
    }
    return true;
  }

  template <class T>
  void read(const YAML::Node& parent, const std::string& path, const std::string& key, T& out) {
    auto node = parent[key];
    if (!node) return;
    const auto where = join(path, key);
    if (!node.IsScalar()) {
      issues.push_back(where + ": expected a scalar");
      return;
    }
    const auto text = node.Scalar();
    try {
      if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (text.find_first_not_of("0123456789") != std::string::npos || text.empty()) throw YAML::Exception({}, "");
        out = node.as<std::uint64_t>();
      } else if constexpr (std::is_same_v<T, double>) {
        out = node.as<double>();
        if (!std::isfinite(out)) throw YAML::Exception({}, "");
      } else {
        out = node.as<T>();
      }
    } catch (const YAML::Exception&) {
      issues.push_back(where + ": expected " + type_name<T>() + ", got '" + text + "'");
    }
  }

  void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) issues.push_back(path + ": " + what);
  }

  static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

 private:
  template <class T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, std::uint64_t>) return "a non-negative integer";
    else if constexpr (std::is_same_v<T, double>) return "a finite number";
    else if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else return "a string";
  }
};

inline void read_pulse(ConfigReader& r, const YAML::Node& node, const std::string& path, PulseSection& p) {
  if (!r.check_map(node, path, {"source", "dx_sigma_t_periods", "phi_pi", "sigma_t_periods"})) return;
  r.read(node, path, "source", p.source);
  r.read(node, path, "dx_sigma_t_periods", p.dx_sigma_t_periods);
  r.read(node, path, "phi_pi", p.phi_pi);
  r.read(node, path, "sigma_t_periods", p.sigma_t_periods);
}

inline void read_superpotential(ConfigReader& r, const YAML::Node& node, Superpotential::Kind& out) {
  const std::string path = "superpotential";
  if (!node) return;
  if (!node.IsMap()) {
    r.issues.push_back(path + ": expected a mapping");
    return;
  }
  std::string kind = "harmonic_gaussian";
  r.read(node, path, "kind", kind);
  if (kind == "harmonic_gaussian") {
    HarmonicGaussian k{std::sqrt(26.0), 0.5};
    r.check_map(node, path, {"kind", "A", "sigma"});
    r.read(node, path, "A", k.A);
    r.read(node, path, "sigma", k.sigma);
    r.require(k.sigma > 0, path + ".sigma", "must be positive");
    out = k;
  } else if (kind == "monomial") {
    Monomial k;
    std::uint64_t n = 1;
    r.check_map(node, path, {"kind", "c", "n"});
    r.read(node, path, "c", k.c);
    r.read(node, path, "n", n);
    r.require(n >= 1 && n <= 9, path + ".n", "must lie in [1, 9]");
    r.require(k.c != 0.0, path + ".c", "must be nonzero");
    k.n = static_cast<int>(n);
    out = k;
  } else if (kind == "tanh_quadratic") {
    TanhQuadratic k;
    r.check_map(node, path, {"kind", "x1", "x2", "c"});
    r.read(node, path, "x1", k.x1);
    r.read(node, path, "x2", k.x2);
    r.read(node, path, "c", k.c);
    r.require(k.x1 > 0 && k.x2 > 0, path, "x1 and x2 must be positive");
    out = k;
  } else {
    r.issues.push_back(path + ".kind: unknown kind '" + kind + "' (harmonic_gaussian, monomial, tanh_quadratic)");
  }
}

inline bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return true;
  return false;
}

inline void validate(ConfigReader& r, const RunConfig& c) {
  bool known = false;
  for (const auto& s : scenario_names()) known = known || s == c.scenario;
  r.require(known, "scenario", "unknown scenario '" + c.scenario + "'");
  r.require(c.workers >= 1 && c.workers <= 1024, "workers", "must lie in [1, 1024]");
  r.require(c.grid.n >= 16 && c.grid.n <= (1u << 20) && std::has_single_bit(c.grid.n), "grid.n",
            "must be a power of two in [16, 2^20]");
  r.require(c.grid.x_max > c.grid.x_min, "grid", "x_max must exceed x_min");
  r.require(c.steps_per_period >= 64, "steps_per_period", "must be at least 64");

  const auto& s = c.spectrum;
  r.require(s.levels >= 1 && s.levels <= 64, "spectrum.levels", "must lie in [1, 64]");
  r.require(s.paired >= 1 && s.paired + 1 <= s.levels, "spectrum.paired", "must satisfy 1 <= paired < levels");
  r.require(s.eta_min >= -3.0 && s.eta_max <= 3.0 && s.eta_max >= s.eta_min, "spectrum", "eta range must lie in [-3, 3]");
  r.require(s.eta_step > 0, "spectrum.eta_step", "must be positive");

  const auto& p = c.partner;
  r.require(p.levels >= 1 && p.levels <= 64, "partner.levels", "must lie in [1, 64]");
  r.require(p.tol > 0, "partner.tol", "must be positive");
  r.require(p.box_n >= 64 && std::has_single_bit(p.box_n), "partner.box_n", "must be a power of two >= 64");
  r.require(one_of(p.units, {"oscillator", "unit_kinetic"}), "partner.units", "must be oscillator or unit_kinetic");

  r.require(one_of(c.propagate.initial, {"displaced_ground", "bdag_displaced_ground"}), "propagate.initial",
            "must be displaced_ground or bdag_displaced_ground");
  r.require(c.propagate.eta >= -3.0 && c.propagate.eta <= 3.0, "propagate.eta", "must lie in [-3, 3]");
  r.require(c.propagate.snapshot_every >= 1, "propagate.snapshot_every", "must be positive");
  r.require(c.propagate.x_stride >= 1, "propagate.x_stride", "must be positive");

  const auto& pr = c.protocol;
  r.require(std::abs(pr.xbar) > 1.0, "protocol.xbar", "|xbar| must exceed 1");
  r.require(pr.t_r_periods >= 0 && pr.ramp_up_periods >= 0 && pr.ramp_down_periods >= 0, "protocol",
            "times must be non-negative");
  r.require(one_of(pr.mode, {"exact_Bdag", "exact_x", "shaking"}), "protocol.mode",
            "must be exact_Bdag, exact_x or shaking");
  for (const auto* ps : {&pr.pulse_pre, &pr.pulse_post}) {
    std::string path = ps == &pr.pulse_pre ? "protocol.pulse_pre" : "protocol.pulse_post";
    r.require(one_of(ps->source, {"formula", "optimize", "fixed"}), path + ".source",
              "must be formula, optimize or fixed");
    r.require(ps->sigma_t_periods > 0, path + ".sigma_t_periods", "must be positive");
    r.require(ps->dx_sigma_t_periods >= 0, path + ".dx_sigma_t_periods", "must be non-negative");
  }
  r.require(pr.pulse_post.source != "formula", "protocol.pulse_post.source",
            "no closed form exists for the second pulse; use optimize or fixed");

  const auto& sw = c.sweep;
  r.require(sw.eta_step > 0 && sw.t_r_step_periods > 0, "sweep", "steps must be positive");
  r.require(sw.eta_max >= sw.eta_min && sw.t_r_max_periods >= sw.t_r_min_periods && sw.t_r_min_periods >= 0, "sweep",
            "ranges must be ascending and t_r non-negative");

  const auto& sh = c.shaking;
  r.require(sh.n_max <= 30, "shaking.n_max", "must lie in [0, 30]");
  r.require(sh.coarse_points >= 3, "shaking.coarse_points", "must be at least 3");
  r.require(sh.coarse_n >= 16 && std::has_single_bit(sh.coarse_n) && sh.coarse_n <= c.grid.n, "shaking.coarse_n",
            "must be a power of two in [16, grid.n]");
  r.require(sh.coarse_steps_per_period >= 64, "shaking.coarse_steps_per_period", "must be at least 64");
  r.require(sh.product_max_periods > 0, "shaking.product_max_periods", "must be positive");
  r.require(sh.tolerance > 0, "shaking.tolerance", "must be positive");

  const auto& in = c.interfere;
  r.require(in.fringe_k > 0, "interfere.fringe_k", "must be positive");
  r.require(in.y_max > in.y_min, "interfere", "y_max must exceed y_min");
  r.require(in.samples >= 2, "interfere.samples", "must be at least 2");

  const auto& g = c.gauge2d;
  r.require(g.n >= 16 && std::has_single_bit(g.n) && g.n <= 1024, "gauge2d.n", "must be a power of two in [16, 1024]");
  r.require(g.B > 0, "gauge2d.B", "must be positive");
  r.require(g.B > 0 && g.L >= 8.0 / std::sqrt(g.B), "gauge2d.L", "must be at least 8 magnetic lengths");
  r.require(g.levels >= 2, "gauge2d.levels", "must be at least 2");
  r.require(g.samples >= 1, "gauge2d.samples", "must be positive");
  r.require(g.eta_step > 0 && g.eta_max >= g.eta_min, "gauge2d", "eta range must be ascending with positive step");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigErrors({std::string("syntax: ") + e.what()});
  }
  if (!root || root.IsNull()) throw ConfigErrors({"document: empty"});
  if (!root.IsMap()) throw ConfigErrors({"document: expected a mapping at top level"});

  detail::ConfigReader r;
  RunConfig c;
  r.read(root, "", "schema", c.schema);
  if (!root["schema"]) throw ConfigErrors({"schema: missing (expected '" + std::string(schema_id) + "')"});
  if (c.schema != schema_id)
    throw ConfigErrors({"schema: version mismatch, got '" + c.schema + "', expected '" + schema_id + "'"});

  r.check_map(root, "",
              {"schema", "scenario", "seed", "workers", "output", "grid", "steps_per_period", "superpotential",
               "spectrum", "partner", "propagate", "protocol", "sweep", "shaking", "interfere", "gauge2d"});
  r.read(root, "", "scenario", c.scenario);
  r.read(root, "", "seed", c.seed);
  r.read(root, "", "workers", c.workers);
  r.read(root, "", "output", c.output);
  r.read(root, "", "steps_per_period", c.steps_per_period);

  if (auto n = root["grid"]; r.check_map(n, "grid", {"x_min", "x_max", "n"})) {
    r.read(n, "grid", "x_min", c.grid.x_min);
    r.read(n, "grid", "x_max", c.grid.x_max);
    r.read(n, "grid", "n", c.grid.n);
  }
  detail::read_superpotential(r, root["superpotential"], c.superpotential);

  if (auto n = root["spectrum"]; r.check_map(n, "spectrum", {"levels", "paired", "eta_min", "eta_max", "eta_step", "richardson"})) {
    auto& s = c.spectrum;
    r.read(n, "spectrum", "levels", s.levels);
    r.read(n, "spectrum", "paired", s.paired);
    r.read(n, "spectrum", "eta_min", s.eta_min);
    r.read(n, "spectrum", "eta_max", s.eta_max);
    r.read(n, "spectrum", "eta_step", s.eta_step);
    r.read(n, "spectrum", "richardson", s.richardson);
  }
  if (auto n = root["partner"]; r.check_map(n, "partner", {"levels", "tol", "box", "box_n", "units", "richardson"})) {
    auto& s = c.partner;
    r.read(n, "partner", "levels", s.levels);
    r.read(n, "partner", "tol", s.tol);
    r.read(n, "partner", "box", s.box);
    r.read(n, "partner", "box_n", s.box_n);
    r.read(n, "partner", "units", s.units);
    r.read(n, "partner", "richardson", s.richardson);
  }
  if (auto n = root["propagate"]; r.check_map(n, "propagate", {"initial", "eta", "snapshot_every", "x_stride"})) {
    auto& s = c.propagate;
    r.read(n, "propagate", "initial", s.initial);
    r.read(n, "propagate", "eta", s.eta);
    r.read(n, "propagate", "snapshot_every", s.snapshot_every);
    r.read(n, "propagate", "x_stride", s.x_stride);
  }
  if (auto n = root["protocol"]; r.check_map(n, "protocol", {"xbar", "t_r_periods", "ramp_up_periods", "ramp_down_periods",
                                                              "eta", "mode", "pulse_pre", "pulse_post"})) {
    auto& s = c.protocol;
    r.read(n, "protocol", "xbar", s.xbar);
    r.read(n, "protocol", "t_r_periods", s.t_r_periods);
    r.read(n, "protocol", "ramp_up_periods", s.ramp_up_periods);
    r.read(n, "protocol", "ramp_down_periods", s.ramp_down_periods);
    r.read(n, "protocol", "eta", s.eta);
    r.read(n, "protocol", "mode", s.mode);
    detail::read_pulse(r, n["pulse_pre"], "protocol.pulse_pre", s.pulse_pre);
    detail::read_pulse(r, n["pulse_post"], "protocol.pulse_post", s.pulse_post);
  }
  if (auto n = root["sweep"]; r.check_map(n, "sweep", {"eta_min", "eta_max", "eta_step", "t_r_min_periods",
                                                        "t_r_max_periods", "t_r_step_periods"})) {
    auto& s = c.sweep;
    r.read(n, "sweep", "eta_min", s.eta_min);
    r.read(n, "sweep", "eta_max", s.eta_max);
    r.read(n, "sweep", "eta_step", s.eta_step);
    r.read(n, "sweep", "t_r_min_periods", s.t_r_min_periods);
    r.read(n, "sweep", "t_r_max_periods", s.t_r_max_periods);
    r.read(n, "sweep", "t_r_step_periods", s.t_r_step_periods);
  }
  if (auto n = root["shaking"]; r.check_map(n, "shaking", {"n_max", "coarse_points", "coarse_n", "coarse_steps_per_period",
                                                            "product_max_periods", "tolerance"})) {
    auto& s = c.shaking;
    r.read(n, "shaking", "n_max", s.n_max);
    r.read(n, "shaking", "coarse_points", s.coarse_points);
    r.read(n, "shaking", "coarse_n", s.coarse_n);
    r.read(n, "shaking", "coarse_steps_per_period", s.coarse_steps_per_period);
    r.read(n, "shaking", "product_max_periods", s.product_max_periods);
    r.read(n, "shaking", "tolerance", s.tolerance);
  }
  if (auto n = root["interfere"]; r.check_map(n, "interfere", {"fringe_k", "y_min", "y_max", "samples"})) {
    auto& s = c.interfere;
    r.read(n, "interfere", "fringe_k", s.fringe_k);
    r.read(n, "interfere", "y_min", s.y_min);
    r.read(n, "interfere", "y_max", s.y_max);
    r.read(n, "interfere", "samples", s.samples);
  }
  if (auto n = root["gauge2d"]; r.check_map(n, "gauge2d", {"L", "n", "B", "g", "eta_min", "eta_max", "eta_step", "levels",
                                                            "samples"})) {
    auto& s = c.gauge2d;
    r.read(n, "gauge2d", "L", s.L);
    r.read(n, "gauge2d", "n", s.n);
    r.read(n, "gauge2d", "B", s.B);
    r.read(n, "gauge2d", "g", s.g);
    r.read(n, "gauge2d", "eta_min", s.eta_min);
    r.read(n, "gauge2d", "eta_max", s.eta_max);
    r.read(n, "gauge2d", "eta_step", s.eta_step);
    r.read(n, "gauge2d", "levels", s.levels);
    r.read(n, "gauge2d", "samples", s.samples);
  }
  if (r.issues.empty()) detail::validate(r, c);
  if (!r.issues.empty()) throw ConfigErrors(r.issues);
  return c;
}

/// Canonical YAML: every key, fixed order, shortest round-trip number formatting.
inline std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  auto d = [](double v) { return format_double(v); };
  auto q = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
    return out + "\"";
  };
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "schema: " << q(c.schema) << "\n";
  os << "scenario: " << q(c.scenario) << "\n";
  os << "seed: " << c.seed << "\n";
  os << "workers: " << c.workers << "\n";
  os << "output: " << q(c.output) << "\n";
  os << "grid: {x_min: " << d(c.grid.x_min) << ", x_max: " << d(c.grid.x_max) << ", n: " << c.grid.n << "}\n";
  os << "steps_per_period: " << c.steps_per_period << "\n";
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, HarmonicGaussian>)
          os << "superpotential: {kind: harmonic_gaussian, A: " << d(k.A) << ", sigma: " << d(k.sigma) << "}\n";
        else if constexpr (std::is_same_v<T, Monomial>)
          os << "superpotential: {kind: monomial, c: " << d(k.c) << ", n: " << k.n << "}\n";
        else if constexpr (std::is_same_v<T, TanhQuadratic>)
          os << "superpotential: {kind: tanh_quadratic, x1: " << d(k.x1) << ", x2: " << d(k.x2) << ", c: " << d(k.c)
             << "}\n";
        else
          throw ConfigError("emit_config: tabulated superpotentials have no config form");
      },
      c.superpotential);
  const auto& s = c.spectrum;
  os << "spectrum: {levels: " << s.levels << ", paired: " << s.paired << ", eta_min: " << d(s.eta_min)
     << ", eta_max: " << d(s.eta_max) << ", eta_step: " << d(s.eta_step) << ", richardson: " << b(s.richardson) << "}\n";
  const auto& p = c.partner;
  os << "partner: {levels: " << p.levels << ", tol: " << d(p.tol) << ", box: " << b(p.box) << ", box_n: " << p.box_n
     << ", units: " << q(p.units) << ", richardson: " << b(p.richardson) << "}\n";
  const auto& pg = c.propagate;
  os << "propagate: {initial: " << q(pg.initial) << ", eta: " << d(pg.eta) << ", snapshot_every: " << pg.snapshot_every
     << ", x_stride: " << pg.x_stride << "}\n";
  const auto& pr = c.protocol;
  auto pulse = [&](const PulseSection& ps) {
    std::ostringstream o;
    o << "{source: " << q(ps.source) << ", dx_sigma_t_periods: " << d(ps.dx_sigma_t_periods)
      << ", phi_pi: " << d(ps.phi_pi) << ", sigma_t_periods: " << d(ps.sigma_t_periods) << "}";
    return o.str();
  };
  os << "protocol:\n  xbar: " << d(pr.xbar) << "\n  t_r_periods: " << d(pr.t_r_periods)
     << "\n  ramp_up_periods: " << d(pr.ramp_up_periods) << "\n  ramp_down_periods: " << d(pr.ramp_down_periods)
     << "\n  eta: " << d(pr.eta) << "\n  mode: " << q(pr.mode) << "\n  pulse_pre: " << pulse(pr.pulse_pre)
     << "\n  pulse_post: " << pulse(pr.pulse_post) << "\n";
  const auto& sw = c.sweep;
  os << "sweep: {eta_min: " << d(sw.eta_min) << ", eta_max: " << d(sw.eta_max) << ", eta_step: " << d(sw.eta_step)
     << ", t_r_min_periods: " << d(sw.t_r_min_periods) << ", t_r_max_periods: " << d(sw.t_r_max_periods)
     << ", t_r_step_periods: " << d(sw.t_r_step_periods) << "}\n";
  const auto& sh = c.shaking;
  os << "shaking: {n_max: " << sh.n_max << ", coarse_points: " << sh.coarse_points << ", coarse_n: " << sh.coarse_n
     << ", coarse_steps_per_period: " << sh.coarse_steps_per_period
     << ", product_max_periods: " << d(sh.product_max_periods) << ", tolerance: " << d(sh.tolerance) << "}\n";
  const auto& in = c.interfere;
  os << "interfere: {fringe_k: " << d(in.fringe_k) << ", y_min: " << d(in.y_min) << ", y_max: " << d(in.y_max)
     << ", samples: " << in.samples << "}\n";
  const auto& g = c.gauge2d;
  os << "gauge2d: {L: " << d(g.L) << ", n: " << g.n << ", B: " << d(g.B) << ", g: " << d(g.g)
     << ", eta_min: " << d(g.eta_min) << ", eta_max: " << d(g.eta_max) << ", eta_step: " << d(g.eta_step)
     << ", levels: " << g.levels << ", samples: " << g.samples << "}\n";
  return os.str();
}

}  // namespace susyq
