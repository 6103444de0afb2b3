#pragma once

// Run configuration: a TOML subset (sections, dotted keys, numbers, strings,
// booleans, flat numeric arrays, # comments) and its typed interpretation.

#include "curvedq/discretization.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace curvedq {

using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text, const std::string& source = "<config>");
  static ConfigDocument load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  void set(const std::string& key, ConfigValue value);

  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback,
                              std::size_t expected_size = 0) const;
  /// A string, or a number rendered as an expression string.
  std::string expression(const std::string& key, const std::string& fallback) const;

  /// Throws ConfigError naming the first key not in `known`.
  void reject_unknown(const std::vector<std::string>& known) const;

  /// Sorted key=value lines; the input of the config hash.
  std::string canonical(const std::vector<std::string>& exclude = {}) const;

  const std::string& source() const { return source_; }

 private:
  struct Entry {
    ConfigValue value;
    int line = 0;
  };
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  const Entry* find(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

enum class TaskKind { geometry, spectrum, evolve, validate };

std::string to_string(TaskKind kind);

/// Conversion between SI input and the internal hbar = m = Q = 1 units.
struct UnitScale {
  bool si = false;
  double length = 1.0;  // m
  double energy = 1.0;  // J
  double time = 1.0;    // s
  double field = 1.0;   // T
  double potential = 1.0;  // V
};

struct RunConfig {
  // surface
  std::string surface = "sphere";
  double r = 1.0;
  double R = 2.0;
  double L = 10.0;
  double bend_radius = 1.0;
  Interval q1{0.0, 1.0};
  Interval q2{0.0, 1.0};
  std::array<std::string, 3> custom_xyz{"q1", "q2", "0"};
  std::array<bool, 2> custom_periodic{false, false};

  // grid
  int n1 = 64;
  int n2 = 64;
  std::array<std::optional<Boundary>, 2> bc;
  MagneticScheme scheme = MagneticScheme::symmetrized_central;

  // field, in internal units
  Vec3 B = Vec3::Zero();
  Vec3 E = Vec3::Zero();
  std::string gauge = "symmetric";
  std::string V = "0";

  // physics
  PhysicalParams params;
  UnitScale units;

  // task
  TaskKind task = TaskKind::spectrum;
  int k = 10;
  double dt = 0.01;
  int steps = 100;
  int stride = 1;
  std::string initial = "ground";
  std::array<double, 2> center{0.0, 0.0};
  double width = 0.25;
  std::array<double, 2> momentum{0.0, 0.0};
  std::string suite = "all";

  // output
  std::string output_dir = "curvedq-out";
  std::string format = "json";
  std::uint64_t seed = 7;
  int wavefunctions = 1;
  bool verbose = false;

  std::string config_hash;
};

/// Typed view of a document; validates ranges and names.
RunConfig interpret_config(const ConfigDocument& doc);

RunConfig load_run_config(const std::string& path);

}  // namespace curvedq
