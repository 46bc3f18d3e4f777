#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "elasticflow/curves.hpp"
#include "elasticflow/diagnostics.hpp"
#include "elasticflow/flow.hpp"
#include "elasticflow/types.hpp"

namespace elasticflow {

inline constexpr const char* kVersion = "elasticflow 1.0.0";

namespace io_detail {

inline std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::size_t> to_size(std::string_view s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

/// 17 significant digits round-trip any double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] inline void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace io_detail

/// Write `text` to `path` through a temporary file and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoError, "cannot open " + tmp.string());
    f << text;
    if (!f.flush()) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---- curve files ----

inline std::string serialize_curve(const DiscreteCurve& curve) {
  std::string out = "# elastic-curve v1 N=" + std::to_string(curve.intervals()) + "\n";
  for (const auto& p : curve.nodes()) out += io_detail::fmt(p.x) + " " + io_detail::fmt(p.y) + "\n";
  return out;
}

inline DiscreteCurve parse_curve(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) io_detail::parse_error(1, "empty curve file");
  constexpr std::string_view head = "# elastic-curve v1 N=";
  const std::string first = io_detail::trim(line);
  if (first.rfind(head, 0) != 0) io_detail::parse_error(1, "expected '# elastic-curve v1 N=<n>'");
  const auto n = io_detail::to_size(std::string_view(first).substr(head.size()));
  if (!n) io_detail::parse_error(1, "bad node count");
  std::vector<Point> nodes;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = io_detail::trim(line);
    if (t.empty()) continue;
    const auto sp = t.find_first_of(" \t");
    if (sp == std::string::npos) io_detail::parse_error(lineno, "expected 'x y'");
    const auto x = io_detail::to_double(t.substr(0, sp));
    const auto y = io_detail::to_double(io_detail::trim(t.substr(sp)));
    if (!x || !y) io_detail::parse_error(lineno, "bad number");
    nodes.push_back({*x, *y});
  }
  if (nodes.size() != *n + 1)
    io_detail::parse_error(lineno, "expected " + std::to_string(*n + 1) + " nodes, found " + std::to_string(nodes.size()));
  return DiscreteCurve(std::move(nodes));
}

inline void write_curve(const std::filesystem::path& path, const DiscreteCurve& curve) {
  write_atomic(path, serialize_curve(curve));
}

inline DiscreteCurve read_curve(const std::filesystem::path& path) { return parse_curve(read_file(path)); }

// ---- initial curve ----

/// "file:PATH" or "builtin:NAME(args)" with NAME one of
///   segment(L)            on the axis; fails non-degeneracy and third-order
///   semicircle(r)         from (r, 0) to (-r, 0); fails curvature and non-degeneracy at the right end
///   sine_arch(A, periods) (x, A sin(2 pi periods x)); needs prepare_initial, then passes all but
///                         third- and fourth-order
struct InitialSpec {
  std::string text = "builtin:sine_arch(0.1,1)";

  bool is_file() const { return text.rfind("file:", 0) == 0; }
};

struct BuiltinCall {
  std::string name;
  std::vector<double> args;
};

inline BuiltinCall parse_builtin(std::string_view spec) {
  constexpr std::string_view pre = "builtin:";
  if (spec.substr(0, pre.size()) != pre) throw Error(ErrorKind::ParseError, "initial spec must start with builtin: or file:");
  const std::string body = io_detail::trim(spec.substr(pre.size()));
  const auto open = body.find('(');
  BuiltinCall call;
  call.name = io_detail::trim(body.substr(0, open));
  if (open != std::string::npos) {
    if (body.back() != ')') throw Error(ErrorKind::ParseError, "unbalanced parentheses in " + body);
    const auto inner = body.substr(open + 1, body.size() - open - 2);
    if (!io_detail::trim(inner).empty())
      for (const auto& a : io_detail::split(inner, ',')) {
        const auto v = io_detail::to_double(a);
        if (!v) throw Error(ErrorKind::ParseError, "bad builtin argument '" + a + "'");
        call.args.push_back(*v);
      }
  }
  return call;
}

inline DiscreteCurve make_initial(const InitialSpec& spec, std::size_t n) {
  if (spec.is_file()) return read_curve(spec.text.substr(5));
  const auto call = parse_builtin(spec.text);
  auto arg = [&](std::size_t i, double fallback) { return i < call.args.size() ? call.args[i] : fallback; };
  auto arity = [&](std::size_t k) {
    if (call.args.size() > k) throw Error(ErrorKind::ParseError, call.name + " takes at most " + std::to_string(k) + " arguments");
  };
  if (call.name == "segment") {
    arity(1);
    return segment_curve(arg(0, 1.0), n);
  }
  if (call.name == "semicircle") {
    arity(1);
    return semicircle_curve(arg(0, 1.0), n);
  }
  if (call.name == "sine_arch") {
    arity(2);
    return sine_arch_curve(arg(0, 0.1), arg(1, 1.0), n);
  }
  throw Error(ErrorKind::ParseError, "unknown builtin '" + call.name + "'");
}

// ---- configuration ----

struct RunConfig {
  FlowConfig flow;
  InitialSpec initial;
  // run prepare_initial on the initial curve before the flow
  bool prepare = false;
};

namespace io_detail {

inline std::optional<bool> to_bool(std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  return std::nullopt;
}

inline void assign(RunConfig& rc, const std::string& key, const std::string& value, std::size_t line) {
  auto& c = rc.flow;
  auto num = [&] {
    const auto v = to_double(value);
    if (!v) parse_error(line, "bad number for " + key);
    return *v;
  };
  auto count = [&] {
    const auto v = to_size(value);
    if (!v) parse_error(line, "bad integer for " + key);
    return *v;
  };
  auto flag = [&] {
    const auto v = to_bool(value);
    if (!v) parse_error(line, "bad flag for " + key);
    return *v;
  };
  if (key == "mu") c.mu = num();
  else if (key == "n_grid") c.n_grid = count();
  else if (key == "dt") c.dt = num();
  else if (key == "t_max") c.t_max = num();
  else if (key == "rho_min") c.rho_min = num();
  else if (key == "length_min") c.length_min = num();
  else if (key == "el_tol") c.el_tol = num();
  else if (key == "bc_tol") c.bc_tol = num();
  else if (key == "record_every") c.record_every = count();
  else if (key == "c_stab") c.c_stab = num();
  else if (key == "override_admissibility") c.override_admissibility = flag();
  else if (key == "with_ds6") c.with_ds6 = flag();
  else if (key == "restart_on_speed_drift") c.restart_on_speed_drift = flag();
  else if (key == "prepare") rc.prepare = flag();
  else if (key == "initial") rc.initial.text = value;
  else if (key == "scheme") {
    if (value == "semi_implicit") c.scheme = Scheme::SemiImplicit;
    else if (value == "explicit") c.scheme = Scheme::Explicit;
    else parse_error(line, "scheme must be semi_implicit or explicit");
  } else if (key == "velocity_mode") {
    if (value == "deturck") c.velocity_mode = VelocityMode::DeTurck;
    else if (value == "interpolated_lambda") c.velocity_mode = VelocityMode::InterpolatedLambda;
    else parse_error(line, "velocity_mode must be deturck or interpolated_lambda");
  } else {
    parse_error(line, "unknown key '" + key + "'");
  }
}

}  // namespace io_detail

/// key = value lines; '#' starts a comment. Unknown keys and malformed values
/// are ParseError with the line number; FlowConfig::validate reports
/// out-of-range values as InvalidValue naming the key.
inline RunConfig parse_config_text(std::string_view text) {
  RunConfig rc;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto t = io_detail::trim(std::string_view(line).substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) io_detail::parse_error(lineno, "expected 'key = value'");
    io_detail::assign(rc, io_detail::trim(t.substr(0, eq)), io_detail::trim(t.substr(eq + 1)), lineno);
  }
  rc.flow.validate();
  return rc;
}

inline RunConfig parse_config(const std::filesystem::path& path) { return parse_config_text(read_file(path)); }

/// Canonical key = value form; parse_config_text(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& rc) {
  const auto& c = rc.flow;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  using io_detail::fmt;
  std::string out;
  out += "mu = " + fmt(c.mu) + "\n";
  out += "n_grid = " + std::to_string(c.n_grid) + "\n";
  out += "dt = " + fmt(c.dt) + "\n";
  out += "scheme = " + std::string(to_string(c.scheme)) + "\n";
  out += "t_max = " + fmt(c.t_max) + "\n";
  out += "velocity_mode = " + std::string(to_string(c.velocity_mode)) + "\n";
  out += "rho_min = " + fmt(c.rho_min) + "\n";
  out += "length_min = " + fmt(c.length_min) + "\n";
  out += "el_tol = " + fmt(c.el_tol) + "\n";
  out += "bc_tol = " + fmt(c.bc_tol) + "\n";
  out += "record_every = " + std::to_string(c.record_every) + "\n";
  out += "c_stab = " + fmt(c.c_stab) + "\n";
  out += "override_admissibility = " + b(c.override_admissibility) + "\n";
  out += "with_ds6 = " + b(c.with_ds6) + "\n";
  out += "restart_on_speed_drift = " + b(c.restart_on_speed_drift) + "\n";
  out += "initial = " + rc.initial.text + "\n";
  out += "prepare = " + b(rc.prepare) + "\n";
  return out;
}

// ---- trajectory ----

inline constexpr const char* kTrajectoryHeader =
    "time,energy,bending,length,dissipation,tau2_0,tau2_1,norm_k,norm_ds2k,v_sup";

/// One row per record; a trailing norm_ds6k column is added when any record has it.
inline std::string serialize_trajectory(const std::vector<DiagnosticsRecord>& records) {
  bool ds6 = false;
  for (const auto& r : records) ds6 = ds6 || r.norm_ds6k.has_value();
  std::string out = kTrajectoryHeader;
  if (ds6) out += ",norm_ds6k";
  out += "\n";
  using io_detail::fmt;
  for (const auto& r : records) {
    out += fmt(r.time) + "," + fmt(r.energy.total) + "," + fmt(r.energy.bending) + "," + fmt(r.length) + "," +
           fmt(r.dissipation) + "," + fmt(r.boundary_tau2[0]) + "," + fmt(r.boundary_tau2[1]) + "," +
           fmt(r.norm_k) + "," + fmt(r.norm_ds2k) + "," + fmt(r.v_sup);
    if (ds6) out += "," + (r.norm_ds6k ? fmt(*r.norm_ds6k) : std::string("nan"));
    out += "\n";
  }
  return out;
}

/// Records back from a trajectory file; boundary residuals and step are not
/// stored there and come back zero.
inline std::vector<DiagnosticsRecord> parse_trajectory(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || io_detail::trim(line).rfind(kTrajectoryHeader, 0) != 0)
    io_detail::parse_error(1, "missing trajectory header");
  const bool ds6 = io_detail::trim(line).size() > std::string_view(kTrajectoryHeader).size();
  std::vector<DiagnosticsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (io_detail::trim(line).empty()) continue;
    const auto f = io_detail::split(line, ',');
    if (f.size() != (ds6 ? 11u : 10u)) io_detail::parse_error(lineno, "wrong column count");
    std::vector<double> v;
    for (std::size_t i = 0; i < 10; ++i) {
      const auto d = io_detail::to_double(f[i]);
      if (!d) io_detail::parse_error(lineno, "bad number in column " + std::to_string(i + 1));
      v.push_back(*d);
    }
    DiagnosticsRecord r;
    r.time = v[0];
    r.energy.total = v[1];
    r.energy.bending = v[2];
    r.length = v[3];
    r.energy.length = v[3];
    r.dissipation = v[4];
    r.boundary_tau2 = {v[5], v[6]};
    r.norm_k = v[7];
    r.norm_ds2k = v[8];
    r.v_sup = v[9];
    if (ds6 && f[10] != "nan") r.norm_ds6k = io_detail::to_double(f[10]);
    out.push_back(r);
  }
  return out;
}

inline std::string snapshot_name(std::size_t step) { return "snapshot_" + std::to_string(step) + ".curve"; }

// ---- manifest ----

struct RunManifest {
  std::string config;   // serialize_config output
  std::string initial;  // initial spec
  std::string version = kVersion;
  std::string reason;
  std::string detail;
  std::size_t restarts = 0;
  std::vector<std::size_t> snapshots;
  double wall_time = 0.0;
};

inline constexpr const char* kManifestName = "manifest.txt";

/// "[run]" key = value lines followed by "[config]" and the config echo.
inline std::string serialize_manifest(const RunManifest& m) {
  std::string out = "[run]\n";
  out += "version = " + m.version + "\n";
  out += "initial = " + m.initial + "\n";
  out += "reason = " + m.reason + "\n";
  out += "detail = " + m.detail + "\n";
  out += "restarts = " + std::to_string(m.restarts) + "\n";
  out += "snapshots =";
  for (std::size_t i = 0; i < m.snapshots.size(); ++i) out += (i ? "," : " ") + std::to_string(m.snapshots[i]);
  out += "\n";
  out += "wall_time = " + io_detail::fmt(m.wall_time) + "\n";
  out += "[config]\n";
  out += m.config;
  return out;
}

inline RunManifest parse_manifest(std::string_view text) {
  RunManifest m;
  const auto cfg = text.find("[config]\n");
  if (text.rfind("[run]\n", 0) != 0 || cfg == std::string_view::npos)
    io_detail::parse_error(1, "manifest must have [run] and [config] sections");
  m.config = std::string(text.substr(cfg + 9));
  std::istringstream in{std::string(text.substr(6, cfg - 6))};
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto eq = line.find('=');
    if (eq == std::string::npos) io_detail::parse_error(lineno, "expected 'key = value'");
    const auto key = io_detail::trim(std::string_view(line).substr(0, eq));
    const auto value = io_detail::trim(std::string_view(line).substr(eq + 1));
    if (key == "version") m.version = value;
    else if (key == "initial") m.initial = value;
    else if (key == "reason") m.reason = value;
    else if (key == "detail") m.detail = value;
    else if (key == "restarts") m.restarts = io_detail::to_size(value).value_or(0);
    else if (key == "wall_time") m.wall_time = io_detail::to_double(value).value_or(0.0);
    else if (key == "snapshots") {
      if (!value.empty())
        for (const auto& s : io_detail::split(value, ',')) {
          const auto v = io_detail::to_size(s);
          if (!v) io_detail::parse_error(lineno, "bad snapshot step");
          m.snapshots.push_back(*v);
        }
    } else io_detail::parse_error(lineno, "unknown manifest key '" + key + "'");
  }
  return m;
}

}  // namespace elasticflow
