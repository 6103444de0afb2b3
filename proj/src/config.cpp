#include "curvedq/config.hpp"

#include "curvedq/errors.hpp"
#include "curvedq/expression.hpp"
#include "curvedq/output.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace curvedq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

/// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::string t;
  for (char c : text) {
    if (c != '_') t += c;
  }
  if (t == "inf" || t == "+inf" || t == "-inf" || t == "nan") return std::nullopt;
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + t.size()) return std::nullopt;
  return v;
}

std::string render(const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
  const auto& xs = std::get<std::vector<double>>(v);
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_double(xs[i]);
  return out + "]";
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source) {
  ConfigDocument doc;
  doc.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  auto fail_at = [&](const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_at("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) fail_at("invalid section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail_at("expected 'key = value'");
    const std::string local = trim(line.substr(0, eq));
    if (!valid_key(local)) fail_at("invalid key '" + local + "'");
    const std::string key = section.empty() ? local : section + "." + local;
    const std::string rhs = trim(line.substr(eq + 1));
    if (rhs.empty()) fail_at("missing value for '" + key + "'");

    ConfigValue value;
    if (rhs.front() == '"' || rhs.front() == '\'') {
      const char q = rhs.front();
      std::string s;
      std::size_t i = 1;
      bool closed = false;
      for (; i < rhs.size(); ++i) {
        const char c = rhs[i];
        if (q == '"' && c == '\\' && i + 1 < rhs.size()) {
          const char n = rhs[++i];
          s += n == 'n' ? '\n' : n == 't' ? '\t' : n;
        } else if (c == q) {
          closed = true;
          break;
        } else {
          s += c;
        }
      }
      if (!closed) fail_at("unterminated string for '" + key + "'");
      if (!trim(rhs.substr(i + 1)).empty()) fail_at("trailing characters after string");
      value = s;
    } else if (rhs == "true" || rhs == "false") {
      value = rhs == "true";
    } else if (rhs.front() == '[') {
      if (rhs.back() != ']') fail_at("arrays must close on the same line");
      std::vector<double> xs;
      std::istringstream items(rhs.substr(1, rhs.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto v = parse_number(item);
        if (!v) fail_at("array '" + key + "' holds a non-number '" + item + "'");
        xs.push_back(*v);
      }
      value = xs;
    } else if (const auto v = parse_number(rhs)) {
      value = *v;
    } else {
      fail_at("cannot parse value '" + rhs + "' for '" + key + "' (quote strings)");
    }
    if (doc.entries_.count(key)) fail_at("duplicate key '" + key + "'");
    doc.entries_[key] = Entry{value, line_no};
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void ConfigDocument::set(const std::string& key, ConfigValue value) {
  entries_[key] = Entry{std::move(value), 0};
}

const ConfigDocument::Entry* ConfigDocument::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void ConfigDocument::fail(const std::string& key, const std::string& what) const {
  const Entry* e = find(key);
  const std::string where = e && e->line > 0 ? source_ + ":" + std::to_string(e->line) : source_;
  throw ConfigError(where + ": key '" + key + "': " + what);
}

double ConfigDocument::number(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (const auto* d = std::get_if<double>(&e->value)) return *d;
  fail(key, "expected a number");
}

int ConfigDocument::integer(const std::string& key, int fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  const auto* d = std::get_if<double>(&e->value);
  if (!d || std::floor(*d) != *d || std::abs(*d) > 2e9) fail(key, "expected an integer");
  return static_cast<int>(*d);
}

bool ConfigDocument::boolean(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (const auto* b = std::get_if<bool>(&e->value)) return *b;
  fail(key, "expected true or false");
}

std::string ConfigDocument::string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (const auto* s = std::get_if<std::string>(&e->value)) return *s;
  fail(key, "expected a quoted string");
}

std::vector<double> ConfigDocument::numbers(const std::string& key,
                                            const std::vector<double>& fallback,
                                            std::size_t expected_size) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  const auto* xs = std::get_if<std::vector<double>>(&e->value);
  if (!xs) fail(key, "expected an array of numbers");
  if (expected_size && xs->size() != expected_size) {
    fail(key, "expected " + std::to_string(expected_size) + " entries");
  }
  return *xs;
}

std::string ConfigDocument::expression(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (const auto* d = std::get_if<double>(&e->value)) return format_double(*d);
  if (const auto* s = std::get_if<std::string>(&e->value)) return *s;
  fail(key, "expected a number or an expression string");
}

void ConfigDocument::reject_unknown(const std::vector<std::string>& known) const {
  for (const auto& [key, entry] : entries_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(key, "unknown key");
  }
}

std::string ConfigDocument::canonical(const std::vector<std::string>& exclude) const {
  std::string out;
  for (const auto& [key, entry] : entries_) {
    if (std::find(exclude.begin(), exclude.end(), key) != exclude.end()) continue;
    out += key + "=" + render(entry.value) + "\n";
  }
  return out;
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::geometry:
      return "geometry";
    case TaskKind::spectrum:
      return "spectrum";
    case TaskKind::evolve:
      return "evolve";
    case TaskKind::validate:
      return "validate";
  }
  return "unknown";
}

namespace {

const std::vector<std::string> kKnownKeys{
    "surface.name",   "surface.r",          "surface.R",          "surface.L",
    "surface.bend_radius", "surface.q1",    "surface.q2",         "surface.x",
    "surface.y",      "surface.z",          "surface.periodic_q1", "surface.periodic_q2",
    "grid.n",         "grid.bc_q1",         "grid.bc_q2",         "grid.scheme",
    "field.B",        "field.gauge",        "field.E",            "field.V",
    "physics.units",  "physics.m",          "physics.Q",          "physics.hbar",
    "physics.length_scale", "task.kind",    "task.k",             "task.dt",
    "task.steps",     "task.stride",        "task.initial",       "task.center",
    "task.width",     "task.momentum",      "task.suite",         "output.dir",
    "output.format",  "output.seed",        "output.wavefunctions", "output.verbose",
};

const std::vector<std::string> kSurfaces{"sphere", "cylinder", "torus", "plane", "bent-sheet",
                                          "custom"};

Vec3 vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

}  // namespace

RunConfig interpret_config(const ConfigDocument& doc) {
  doc.reject_unknown(kKnownKeys);
  RunConfig c;
  auto fail = [&](const std::string& key, const std::string& what) -> void {
    throw ConfigError(doc.source() + ": key '" + key + "': " + what);
  };

  if (!doc.has("task.kind")) throw ConfigError(doc.source() + ": missing required key 'task.kind'");
  const std::string task = doc.string("task.kind", "");
  if (task == "geometry") {
    c.task = TaskKind::geometry;
  } else if (task == "spectrum") {
    c.task = TaskKind::spectrum;
  } else if (task == "evolve") {
    c.task = TaskKind::evolve;
  } else if (task == "validate") {
    c.task = TaskKind::validate;
  } else {
    fail("task.kind", "unknown task '" + task + "'");
  }
  if (c.task != TaskKind::validate && !doc.has("surface.name")) {
    throw ConfigError(doc.source() + ": missing required key 'surface.name'");
  }

  c.surface = doc.string("surface.name", "sphere");
  if (std::find(kSurfaces.begin(), kSurfaces.end(), c.surface) == kSurfaces.end()) {
    fail("surface.name", "unknown surface '" + c.surface + "'");
  }
  c.r = doc.number("surface.r", 1.0);
  c.R = doc.number("surface.R", 2.0);
  c.L = doc.number("surface.L", 10.0);
  c.bend_radius = doc.number("surface.bend_radius", 1.0);
  const auto q1 = doc.numbers("surface.q1", {0.0, 1.0}, 2);
  const auto q2 = doc.numbers("surface.q2", {0.0, 1.0}, 2);
  c.q1 = {q1[0], q1[1]};
  c.q2 = {q2[0], q2[1]};
  c.custom_xyz = {doc.expression("surface.x", "q1"), doc.expression("surface.y", "q2"),
                  doc.expression("surface.z", "0")};
  c.custom_periodic = {doc.boolean("surface.periodic_q1", false),
                       doc.boolean("surface.periodic_q2", false)};
  if (!(c.r > 0.0)) fail("surface.r", "must be positive");
  if (!(c.L > 0.0)) fail("surface.L", "must be positive");
  if (c.surface == "torus" && !(c.R > c.r)) fail("surface.R", "torus requires R > r");
  if (!(c.bend_radius > 0.0)) fail("surface.bend_radius", "must be positive");
  if (!(c.q1.span() > 0.0)) fail("surface.q1", "interval must have max > min");
  if (!(c.q2.span() > 0.0)) fail("surface.q2", "interval must have max > min");
  if (c.surface == "custom") {
    for (const auto* key : {"surface.x", "surface.y", "surface.z"}) {
      Expression::parse(doc.expression(key, "0"), {"q1", "q2"});
    }
  }

  const auto n = doc.numbers("grid.n", {64.0, 64.0}, 2);
  c.n1 = static_cast<int>(n[0]);
  c.n2 = static_cast<int>(n[1]);
  if (c.n1 != n[0] || c.n2 != n[1] || c.n1 < 4 || c.n2 < 4) {
    fail("grid.n", "needs two integers >= 4");
  }
  for (int a = 0; a < 2; ++a) {
    const std::string key = a == 0 ? "grid.bc_q1" : "grid.bc_q2";
    const std::string bc = doc.string(key, "auto");
    if (bc != "auto") c.bc[a] = boundary_from_string(bc);
  }
  c.scheme = magnetic_scheme_from_string(doc.string("grid.scheme", "central"));

  const std::string units = doc.string("physics.units", "dimensionless");
  if (units != "dimensionless" && units != "si") fail("physics.units", "expected dimensionless or si");
  c.units.si = units == "si";
  if (c.units.si) {
    const double hbar = doc.number("physics.hbar", 1.054571817e-34);
    const double m = doc.number("physics.m", 9.1093837015e-31);
    const double Q = doc.number("physics.Q", 1.602176634e-19);
    if (!(hbar > 0.0) || !(m > 0.0) || Q == 0.0) fail("physics", "hbar, m must be positive and Q nonzero");
    double ell_default = 1e-9;
    if (c.surface == "sphere" || c.surface == "cylinder" || c.surface == "torus") ell_default = c.r;
    if (c.surface == "bent-sheet") ell_default = c.bend_radius;
    const double ell = doc.number("physics.length_scale", ell_default);
    if (!(ell > 0.0)) fail("physics.length_scale", "must be positive");
    c.units.length = ell;
    c.units.energy = hbar * hbar / (m * ell * ell);
    c.units.time = hbar / c.units.energy;
    c.units.field = hbar / (std::abs(Q) * ell * ell);
    c.units.potential = c.units.energy / std::abs(Q);
    c.params = PhysicalParams{1.0, Q > 0 ? 1.0 : -1.0, 1.0};
    c.r /= ell;
    c.R /= ell;
    c.L /= ell;
    c.bend_radius /= ell;
    if (c.surface == "plane" || c.surface == "bent-sheet") {
      c.q1 = {c.q1.min / ell, c.q1.max / ell};
      c.q2 = {c.q2.min / ell, c.q2.max / ell};
    }
  } else {
    c.params.mass = doc.number("physics.m", 1.0);
    c.params.charge = doc.number("physics.Q", 1.0);
    c.params.hbar = doc.number("physics.hbar", 1.0);
    if (doc.has("physics.length_scale")) fail("physics.length_scale", "only used with units = \"si\"");
    if (!(c.params.mass > 0.0)) fail("physics.m", "must be positive");
    if (!(c.params.hbar > 0.0)) fail("physics.hbar", "must be positive");
  }

  c.B = vec3(doc.numbers("field.B", {0.0, 0.0, 0.0}, 3));
  c.E = vec3(doc.numbers("field.E", {0.0, 0.0, 0.0}, 3));
  c.gauge = doc.string("field.gauge", "symmetric");
  gauge_from_string(c.gauge);
  c.V = doc.expression("field.V", "0");
  Expression::parse(c.V, {"x", "y", "z", "q1", "q2"});
  if (c.units.si) {
    c.B /= c.units.field;
    // E in V/m; internal unit energy / (|Q| length)
    c.E *= std::abs(doc.number("physics.Q", 1.602176634e-19)) * c.units.length / c.units.energy;
  }

  c.k = doc.integer("task.k", 10);
  c.dt = doc.number("task.dt", 0.01);
  c.steps = doc.integer("task.steps", 100);
  c.stride = doc.integer("task.stride", 1);
  c.initial = doc.string("task.initial", "ground");
  const auto center = doc.numbers("task.center", {0.0, 0.0}, 2);
  c.center = {center[0], center[1]};
  c.width = doc.number("task.width", 0.25);
  const auto momentum = doc.numbers("task.momentum", {0.0, 0.0}, 2);
  c.momentum = {momentum[0], momentum[1]};
  c.suite = doc.string("task.suite", "all");
  if (c.k < 1) fail("task.k", "must be at least 1");
  if (!(c.dt > 0.0)) fail("task.dt", "must be positive");
  if (c.steps < 0) fail("task.steps", "must be non-negative");
  if (c.stride < 1) fail("task.stride", "must be at least 1");
  if (!(c.width > 0.0)) fail("task.width", "must be positive");
  if (c.initial != "ground" && c.initial != "gaussian" && c.initial.rfind("eigenstate:", 0) != 0) {
    fail("task.initial", "expected ground, gaussian or eigenstate:<j>");
  }
  if (c.units.si) c.dt /= c.units.time;

  c.output_dir = doc.string("output.dir", "curvedq-out");
  c.format = doc.string("output.format", "json");
  if (c.format != "json" && c.format != "csv" && c.format != "both") {
    fail("output.format", "expected json, csv or both");
  }
  const double seed = doc.number("output.seed", 7.0);
  if (seed < 0 || std::floor(seed) != seed) fail("output.seed", "expected a non-negative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  c.wavefunctions = doc.integer("output.wavefunctions", 1);
  if (c.wavefunctions < 0) fail("output.wavefunctions", "must be non-negative");
  c.verbose = doc.boolean("output.verbose", false);

  // Where the results go does not change what they are.
  c.config_hash = fnv1a_hex(doc.canonical({"output.dir", "output.verbose"}));
  return c;
}

RunConfig load_run_config(const std::string& path) {
  return interpret_config(ConfigDocument::load(path));
}

}  // namespace curvedq
