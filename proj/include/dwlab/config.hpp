#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dwlab/coefficients.hpp"

namespace dwlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal TOML-compatible value: scalars, arrays, and inline tables (used by
// profile.bumps = [{target="g", center=5.0, width=1.0, height=0.1}]).
struct TomlItem {
  enum class Kind { Bool, Int, Float, Str, Array, Table };
  Kind kind = Kind::Bool;
  bool b = false;
  long long i = 0;
  double f = 0.0;
  std::string s;
  std::vector<TomlItem> arr;
  std::map<std::string, TomlItem> table;

  double as_number() const;
  static TomlItem of(bool v) { TomlItem t; t.kind = Kind::Bool; t.b = v; return t; }
  static TomlItem of(long long v) { TomlItem t; t.kind = Kind::Int; t.i = v; return t; }
  static TomlItem of(double v) { TomlItem t; t.kind = Kind::Float; t.f = v; return t; }
  static TomlItem of(const std::string& v) { TomlItem t; t.kind = Kind::Str; t.s = v; return t; }
  static TomlItem of(const std::vector<double>& v);
  std::string serialize() const;
};

using TomlSection = std::map<std::string, TomlItem>;

// [section] / key = value / # comments; errors carry line numbers and keys
std::map<std::string, TomlSection> parse_toml(const std::string& text);
std::map<std::string, TomlSection> parse_toml_file(const std::string& path);

struct RunOptions {
  std::string out_dir = "runs";
  bool plots = false;
  int jobs = 1;
  std::uint64_t seed = 0x5eed1ab5ull;
};

struct GridOptions {
  int n = 4096;
  double r_max = 120.0;
  int ell_max = 2;
};

struct ExperimentConfig {
  ProfileConfig profile;
  GridOptions grid;
  std::string suite;
  TomlSection suite_params; // resolved against the suite schema
  RunOptions run;

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_text(const std::string& text);

  // every default that influenced a number, serialized deterministically
  std::string resolved_toml() const;
  std::string experiment_id() const; // fnv1a-64 of resolved_toml, hex

  double param_num(const std::string& key) const;
  long long param_int(const std::string& key) const;
  bool param_bool(const std::string& key) const;
  std::string param_str(const std::string& key) const;
  std::vector<double> param_list(const std::string& key) const;
};

// parameter schema declared per suite (used for validation + resolution)
struct ParamSpec {
  std::string key;
  TomlItem def;
  std::string help;
};
const std::vector<std::string>& suite_names();
const std::vector<ParamSpec>& suite_schema(const std::string& suite);

std::uint64_t fnv1a64(const std::string& data);

} // namespace dwlab
