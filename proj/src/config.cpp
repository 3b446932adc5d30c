#include "dwlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dwlab {

double TomlItem::as_number() const {
  if (kind == Kind::Int) return static_cast<double>(i);
  if (kind == Kind::Float) return f;
  throw ConfigError("expected a number");
}

TomlItem TomlItem::of(const std::vector<double>& v) {
  TomlItem t;
  t.kind = Kind::Array;
  for (double x : v) t.arr.push_back(TomlItem::of(x));
  return t;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  if (v == std::floor(v) && std::abs(v) < 1e15)
    std::snprintf(buf, sizeof(buf), "%.1f", v);
  else
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char get() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config parse error at line " + std::to_string(line) +
                      ": " + msg);
  }
};

TomlItem parse_value(Cursor& c);

std::string parse_bare_key(Cursor& c) {
  std::string k;
  while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                      c.peek() == '_' || c.peek() == '-'))
    k += c.get();
  if (k.empty()) c.fail("expected a key");
  return k;
}

TomlItem parse_string(Cursor& c) {
  c.get(); // opening quote
  std::string s;
  while (!c.eof() && c.peek() != '"') {
    char ch = c.get();
    if (ch == '\\' && !c.eof()) {
      char e = c.get();
      switch (e) {
        case 'n': s += '\n'; break;
        case 't': s += '\t'; break;
        case '"': s += '"'; break;
        case '\\': s += '\\'; break;
        default: c.fail("unsupported escape");
      }
    } else {
      s += ch;
    }
  }
  if (c.eof()) c.fail("unterminated string");
  c.get();
  return TomlItem::of(s);
}

TomlItem parse_number_or_bool(Cursor& c) {
  std::string tok;
  while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                      c.peek() == '+' || c.peek() == '-' || c.peek() == '.' ||
                      c.peek() == '_'))
    tok += c.get();
  if (tok == "true") return TomlItem::of(true);
  if (tok == "false") return TomlItem::of(false);
  tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
  const bool floaty = tok.find_first_of(".eE") != std::string::npos ||
                      tok == "inf" || tok == "-inf" || tok == "nan";
  try {
    if (floaty) return TomlItem::of(std::stod(tok));
    std::size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) return TomlItem::of(std::stod(tok));
    return TomlItem::of(v);
  } catch (const std::exception&) {
    c.fail("cannot parse value '" + tok + "'");
  }
}

TomlItem parse_array(Cursor& c) {
  c.get(); // [
  TomlItem t;
  t.kind = TomlItem::Kind::Array;
  for (;;) {
    // arrays may span lines
    while (!c.eof() && (c.peek() == ' ' || c.peek() == '\t' || c.peek() == '\n' ||
                        c.peek() == '\r'))
      c.get();
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == '#') {
      while (!c.eof() && c.peek() != '\n') c.get();
      continue;
    }
    if (c.peek() == ']') {
      c.get();
      break;
    }
    t.arr.push_back(parse_value(c));
    while (!c.eof() && (c.peek() == ' ' || c.peek() == '\t' || c.peek() == '\n' ||
                        c.peek() == '\r'))
      c.get();
    if (!c.eof() && c.peek() == ',') c.get();
  }
  return t;
}

TomlItem parse_inline_table(Cursor& c) {
  c.get(); // {
  TomlItem t;
  t.kind = TomlItem::Kind::Table;
  for (;;) {
    c.skip_ws_inline();
    if (c.eof()) c.fail("unterminated inline table");
    if (c.peek() == '}') {
      c.get();
      break;
    }
    std::string key = parse_bare_key(c);
    c.skip_ws_inline();
    if (c.eof() || c.get() != '=') c.fail("expected '=' in inline table");
    c.skip_ws_inline();
    t.table[key] = parse_value(c);
    c.skip_ws_inline();
    if (!c.eof() && c.peek() == ',') c.get();
  }
  return t;
}

TomlItem parse_value(Cursor& c) {
  if (c.eof()) c.fail("expected a value");
  const char ch = c.peek();
  if (ch == '"') return parse_string(c);
  if (ch == '[') return parse_array(c);
  if (ch == '{') return parse_inline_table(c);
  return parse_number_or_bool(c);
}

} // namespace

std::map<std::string, TomlSection> parse_toml(const std::string& text) {
  std::map<std::string, TomlSection> doc;
  Cursor c{text};
  std::string section;
  while (!c.eof()) {
    c.skip_ws_inline();
    if (c.eof()) break;
    const char ch = c.peek();
    if (ch == '\n' || ch == '\r') {
      c.get();
      continue;
    }
    if (ch == '#') {
      while (!c.eof() && c.peek() != '\n') c.get();
      continue;
    }
    if (ch == '[') {
      c.get();
      section.clear();
      while (!c.eof() && c.peek() != ']') section += c.get();
      if (c.eof()) c.fail("unterminated section header");
      c.get();
      continue;
    }
    std::string key = parse_bare_key(c);
    c.skip_ws_inline();
    if (c.eof() || c.get() != '=') c.fail("expected '=' after key '" + key + "'");
    c.skip_ws_inline();
    doc[section][key] = parse_value(c);
    c.skip_ws_inline();
    if (!c.eof() && c.peek() == '#')
      while (!c.eof() && c.peek() != '\n') c.get();
  }
  return doc;
}

std::map<std::string, TomlSection> parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str());
}

std::string TomlItem::serialize() const {
  switch (kind) {
    case Kind::Bool: return b ? "true" : "false";
    case Kind::Int: return std::to_string(i);
    case Kind::Float: return fmt_double(f);
    case Kind::Str: return "\"" + s + "\"";
    case Kind::Array: {
      std::string out = "[";
      for (std::size_t k = 0; k < arr.size(); ++k) {
        if (k) out += ", ";
        out += arr[k].serialize();
      }
      return out + "]";
    }
    case Kind::Table: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, v] : table) {
        if (!first) out += ", ";
        first = false;
        out += k + " = " + v.serialize();
      }
      return out + "}";
    }
  }
  return "";
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

double get_num(const TomlSection& sec, const std::string& key, double def) {
  auto it = sec.find(key);
  return it == sec.end() ? def : it->second.as_number();
}

void check_known_keys(const std::string& section, const TomlSection& sec,
                      const std::vector<std::string>& known) {
  for (const auto& [key, val] : sec) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  }
}

} // namespace

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  auto doc = parse_toml(text);
  ExperimentConfig cfg;

  if (auto it = doc.find("profile"); it != doc.end()) {
    const auto& sec = it->second;
    check_known_keys("profile", sec,
                     {"d", "rho0", "g_amp", "w_amp", "a_amp", "bumps"});
    cfg.profile.d = static_cast<int>(get_num(sec, "d", 3));
    cfg.profile.rho0 = get_num(sec, "rho0", 1.0);
    cfg.profile.g_amp = get_num(sec, "g_amp", 0.0);
    cfg.profile.w_amp = get_num(sec, "w_amp", 0.0);
    cfg.profile.a_amp = get_num(sec, "a_amp", 0.0);
    if (auto bit = sec.find("bumps"); bit != sec.end()) {
      if (bit->second.kind != TomlItem::Kind::Array)
        throw ConfigError("profile.bumps must be an array of tables");
      for (const auto& tb : bit->second.arr) {
        if (tb.kind != TomlItem::Kind::Table)
          throw ConfigError("profile.bumps entries must be inline tables");
        Bump b;
        for (const auto& [k, v] : tb.table) {
          if (k == "target") b.target = v.s.empty() ? 'g' : v.s[0];
          else if (k == "center") b.center = v.as_number();
          else if (k == "width") b.width = v.as_number();
          else if (k == "height") b.height = v.as_number();
          else throw ConfigError("unknown bump key '" + k + "'");
        }
        cfg.profile.bumps.push_back(b);
      }
    }
  }

  if (auto it = doc.find("grid"); it != doc.end()) {
    const auto& sec = it->second;
    check_known_keys("grid", sec, {"n", "r_max", "ell_max"});
    cfg.grid.n = static_cast<int>(get_num(sec, "n", 4096));
    cfg.grid.r_max = get_num(sec, "r_max", 120.0);
    cfg.grid.ell_max = static_cast<int>(get_num(sec, "ell_max", 2));
  }

  auto sit = doc.find("suite");
  if (sit == doc.end() || !sit->second.count("name"))
    throw ConfigError("missing [suite] section with a 'name' key");
  cfg.suite = sit->second.at("name").s;
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), cfg.suite) == names.end())
    throw ConfigError("unknown suite '" + cfg.suite + "'");

  // resolve suite params against the schema: unknown keys rejected, missing
  // keys take their defaults (and appear in the resolved copy)
  const auto& schema = suite_schema(cfg.suite);
  for (const auto& [key, val] : sit->second) {
    if (key == "name") continue;
    const auto spec =
        std::find_if(schema.begin(), schema.end(),
                     [&](const ParamSpec& p) { return p.key == key; });
    if (spec == schema.end())
      throw ConfigError("unknown key '" + key + "' for suite '" + cfg.suite + "'");
    cfg.suite_params[key] = val;
  }
  for (const auto& p : schema)
    if (!cfg.suite_params.count(p.key)) cfg.suite_params[p.key] = p.def;

  if (auto it = doc.find("run"); it != doc.end()) {
    const auto& sec = it->second;
    check_known_keys("run", sec, {"out_dir", "plots", "jobs", "seed"});
    if (sec.count("out_dir")) cfg.run.out_dir = sec.at("out_dir").s;
    if (sec.count("plots")) cfg.run.plots = sec.at("plots").b;
    if (sec.count("jobs")) cfg.run.jobs = static_cast<int>(sec.at("jobs").i);
    if (sec.count("seed"))
      cfg.run.seed = static_cast<std::uint64_t>(sec.at("seed").i);
  }

  // validate the profile (throws ProfileError on bad hypotheses)
  CoefficientProfile::build(cfg.profile);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

std::string ExperimentConfig::resolved_toml() const {
  std::ostringstream out;
  out << "[profile]\n";
  out << "d = " << profile.d << "\n";
  out << "rho0 = " << fmt_double(profile.rho0) << "\n";
  out << "g_amp = " << fmt_double(profile.g_amp) << "\n";
  out << "w_amp = " << fmt_double(profile.w_amp) << "\n";
  out << "a_amp = " << fmt_double(profile.a_amp) << "\n";
  if (!profile.bumps.empty()) {
    out << "bumps = [";
    for (std::size_t i = 0; i < profile.bumps.size(); ++i) {
      const auto& b = profile.bumps[i];
      if (i) out << ", ";
      out << "{target = \"" << b.target << "\", center = " << fmt_double(b.center)
          << ", width = " << fmt_double(b.width)
          << ", height = " << fmt_double(b.height) << "}";
    }
    out << "]\n";
  }
  out << "\n[grid]\n";
  out << "n = " << grid.n << "\n";
  out << "r_max = " << fmt_double(grid.r_max) << "\n";
  out << "ell_max = " << grid.ell_max << "\n";
  out << "\n[suite]\n";
  out << "name = \"" << suite << "\"\n";
  for (const auto& [k, v] : suite_params) out << k << " = " << v.serialize() << "\n";
  out << "\n[run]\n";
  out << "out_dir = \"" << run.out_dir << "\"\n";
  out << "plots = " << (run.plots ? "true" : "false") << "\n";
  out << "jobs = " << run.jobs << "\n";
  out << "seed = " << run.seed << "\n";
  return out.str();
}

std::string ExperimentConfig::experiment_id() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(resolved_toml())));
  return buf;
}

double ExperimentConfig::param_num(const std::string& key) const {
  auto it = suite_params.find(key);
  if (it == suite_params.end())
    throw ConfigError("missing suite parameter '" + key + "'");
  return it->second.as_number();
}

long long ExperimentConfig::param_int(const std::string& key) const {
  auto it = suite_params.find(key);
  if (it == suite_params.end())
    throw ConfigError("missing suite parameter '" + key + "'");
  if (it->second.kind == TomlItem::Kind::Int) return it->second.i;
  return static_cast<long long>(it->second.as_number());
}

bool ExperimentConfig::param_bool(const std::string& key) const {
  auto it = suite_params.find(key);
  if (it == suite_params.end())
    throw ConfigError("missing suite parameter '" + key + "'");
  return it->second.b;
}

std::string ExperimentConfig::param_str(const std::string& key) const {
  auto it = suite_params.find(key);
  if (it == suite_params.end())
    throw ConfigError("missing suite parameter '" + key + "'");
  return it->second.s;
}

std::vector<double> ExperimentConfig::param_list(const std::string& key) const {
  auto it = suite_params.find(key);
  if (it == suite_params.end())
    throw ConfigError("missing suite parameter '" + key + "'");
  if (it->second.kind != TomlItem::Kind::Array)
    throw ConfigError("suite parameter '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : it->second.arr) out.push_back(v.as_number());
  return out;
}

} // namespace dwlab
