#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "tollnet/errors.hpp"
#include "tollnet/scenario.hpp"

namespace tollnet {

// Scenario files are YAML (or JSON, by .json extension) with sections
// network, compliance, demand, solver, simulation and a top-level toll.
// Every omitted field takes its default; unknown keys are rejected.

using Json = nlohmann::json;

/// Malformed input text; carries the 1-based line of the failure.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line)
      : ValidationError(fmt::format("parse error at line {}: {}", line, what)), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      Json arr = Json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      Json obj = Json::object();
      for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (obj.contains(key)) throw ParseError("duplicate key '" + key + "'", kv.first.Mark().line + 1);
        obj[key] = yaml_to_json(kv.second);
      }
      return obj;
    }
    case YAML::NodeType::Scalar:
      break;
  }
  const std::string& s = node.Scalar();
  if (node.Tag() == "!") return s;  // quoted
  if (s == "true" || s == "false") return s == "true";
  if (s == "null" || s == "~") return nullptr;
  // Numbers: let nlohmann decide integer vs float so JSON and YAML agree.
  double value = 0.0;
  try {
    std::size_t pos = 0;
    value = std::stod(s, &pos);
    if (pos != s.size()) return s;
  } catch (const std::exception&) {
    return s;
  }
  try {
    return Json::parse(s[0] == '+' ? s.substr(1) : s);
  } catch (const Json::exception&) {
    return value;  // forms like ".5" that JSON does not accept
  }
}

inline int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) line += text[i] == '\n';
  return line;
}

class Reader {
 public:
  Reader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_null() && !obj_.is_object()) throw ValidationError(path_ + ": expected a section (mapping)");
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (obj_.is_null()) return;
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj_.items())
      if (!ok.count(k)) throw ValidationError(fmt::format("unknown key '{}' in {}", k, path_.empty() ? "<root>" : path_));
  }

  Reader section(const char* key) const {
    static const Json null_json = nullptr;
    const Json& sub = has(key) ? obj_.at(key) : null_json;
    return Reader(sub, path_.empty() ? std::string(key) : path_ + "." + key);
  }

  void number(const char* key, double& out) const {
    if (!has(key)) return;
    const Json& v = obj_.at(key);
    if (!v.is_number()) throw ValidationError(name(key) + " must be a number");
    out = v.get<double>();
  }

  template <typename Int>
  void integer(const char* key, Int& out) const {
    if (!has(key)) return;
    const Json& v = obj_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw ValidationError(name(key) + " must be a non-negative integer");
    out = static_cast<Int>(v.get<std::uint64_t>());
  }

  void string(const char* key, std::string& out) const {
    if (!has(key)) return;
    const Json& v = obj_.at(key);
    if (!v.is_string()) throw ValidationError(name(key) + " must be a string");
    out = v.get<std::string>();
  }

  bool has(const char* key) const { return obj_.is_object() && obj_.contains(key) && !obj_.at(key).is_null(); }

 private:
  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  const Json& obj_;
  std::string path_;
};

inline void read_link(const Reader& r, LinkSpec& link, bool routed) {
  if (routed)
    r.allow({"length", "v", "Q", "R", "w"});
  else
    r.allow({"length", "v", "Q"});
  r.number("length", link.length);
  r.number("v", link.sending.v);
  r.number("Q", link.sending.Q);
  if (routed) {
    link.receiving.value().Q = link.sending.Q;
    r.number("R", link.receiving->R);
    r.number("w", link.receiving->w);
  }
}

inline void read_logistic(const Reader& r, LogisticCompliance& c) {
  r.allow({"beta0", "beta1", "beta2", "beta3", "eps"});
  r.number("beta0", c.beta0);
  r.number("beta1", c.beta1);
  r.number("beta2", c.beta2);
  r.number("beta3", c.beta3);
  r.number("eps", c.eps);
}

}  // namespace detail

inline const char* to_string(SliceDomain d) { return d == SliceDomain::free_flow ? "free_flow" : "full"; }

/// Builds a validated scenario from a parsed tree; returns non-fatal
/// warnings (compliance sign conventions) through `warnings`.
inline Scenario scenario_from_json(const Json& root, std::vector<std::string>* warnings = nullptr) {
  using detail::Reader;
  Scenario sc;
  const Reader top(root, "");
  top.allow({"network", "compliance", "demand", "toll", "solver", "simulation"});

  const Reader net = top.section("network");
  net.allow({"e0", "e1", "e2", "alpha", "dt"});
  detail::read_link(net.section("e0"), sc.network.e0, false);
  detail::read_link(net.section("e1"), sc.network.e1, true);
  detail::read_link(net.section("e2"), sc.network.e2, true);
  sc.network.alpha = capacity_ratio(sc.network);
  net.number("alpha", sc.network.alpha);
  net.number("dt", sc.network.dt);

  const Reader comp = top.section("compliance");
  comp.allow({"e1", "e2"});
  detail::read_logistic(comp.section("e1"), sc.compliance.e1);
  detail::read_logistic(comp.section("e2"), sc.compliance.e2);

  const Reader dem = top.section("demand");
  dem.allow({"d_min", "d_max"});
  dem.number("d_min", sc.demand.d_min);
  dem.number("d_max", sc.demand.d_max);

  top.number("toll", sc.toll);

  const Reader sol = top.section("solver");
  sol.allow({"resolution", "bisection_tol", "slice"});
  sol.integer("resolution", sc.solver.resolution);
  sol.number("bisection_tol", sc.solver.bisection_tol);
  std::string slice = to_string(sc.solver.slice);
  sol.string("slice", slice);
  if (slice == "free_flow")
    sc.solver.slice = SliceDomain::free_flow;
  else if (slice == "full")
    sc.solver.slice = SliceDomain::full_jam;
  else
    throw ValidationError("solver.slice must be 'free_flow' or 'full'");

  const Reader sim = top.section("simulation");
  sim.allow({"horizon", "seeds", "seed", "threshold", "slope_tolerance"});
  sim.integer("horizon", sc.simulation.horizon);
  sim.integer("seeds", sc.simulation.seeds);
  sim.integer("seed", sc.simulation.seed);
  sim.number("threshold", sc.simulation.threshold);
  sim.number("slope_tolerance", sc.simulation.slope_tolerance);

  validate(sc.network);
  auto warn = validate(sc.compliance);
  validate(sc.demand);
  if (!(sc.toll >= 0.0)) throw ValidationError("toll must be >= 0");
  if (sc.solver.resolution < 2) throw ValidationError("solver.resolution must be >= 2");
  if (!(sc.solver.bisection_tol > 0.0)) throw ValidationError("solver.bisection_tol must be positive");
  if (sc.simulation.horizon < 2) throw ValidationError("simulation.horizon must be >= 2");
  if (sc.simulation.seeds < 1) throw ValidationError("simulation.seeds must be >= 1");
  if (!(sc.simulation.threshold > 0.0)) throw ValidationError("simulation.threshold must be positive");
  if (!(sc.simulation.slope_tolerance >= 0.0)) throw ValidationError("simulation.slope_tolerance must be >= 0");
  if (warnings) *warnings = std::move(warn);
  return sc;
}

/// Parses scenario text; `json` selects the JSON reader, YAML otherwise.
inline Scenario parse_scenario(const std::string& text, bool json, std::vector<std::string>* warnings = nullptr) {
  Json root;
  if (json) {
    try {
      root = text.find_first_not_of(" \t\r\n") == std::string::npos ? Json(nullptr) : Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(e.what(), detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1));
    }
  } else {
    try {
      root = detail::yaml_to_json(YAML::Load(text));
    } catch (const YAML::ParserException& e) {
      throw ParseError(e.msg, e.mark.line + 1);
    }
  }
  return scenario_from_json(root, warnings);
}

inline Scenario load_scenario(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.extension() == ".json", warnings);
}

/// Fully populated tree of a scenario (every field explicit).
inline Json to_json(const Scenario& sc) {
  auto routed = [](const LinkSpec& l) {
    return Json{{"length", l.length}, {"v", l.sending.v}, {"Q", l.sending.Q}, {"R", l.receiving->R}, {"w", l.receiving->w}};
  };
  auto logistic = [](const LogisticCompliance& c) {
    return Json{{"beta0", c.beta0}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"beta3", c.beta3}, {"eps", c.eps}};
  };
  const auto& n = sc.network;
  return Json{
      {"network",
       {{"e0", {{"length", n.e0.length}, {"v", n.e0.sending.v}, {"Q", n.e0.sending.Q}}},
        {"e1", routed(n.e1)},
        {"e2", routed(n.e2)},
        {"alpha", n.alpha},
        {"dt", n.dt}}},
      {"compliance", {{"e1", logistic(sc.compliance.e1)}, {"e2", logistic(sc.compliance.e2)}}},
      {"demand", {{"d_min", sc.demand.d_min}, {"d_max", sc.demand.d_max}}},
      {"toll", sc.toll},
      {"solver",
       {{"resolution", sc.solver.resolution}, {"bisection_tol", sc.solver.bisection_tol}, {"slice", to_string(sc.solver.slice)}}},
      {"simulation",
       {{"horizon", sc.simulation.horizon},
        {"seeds", sc.simulation.seeds},
        {"seed", sc.simulation.seed},
        {"threshold", sc.simulation.threshold},
        {"slope_tolerance", sc.simulation.slope_tolerance}}}};
}

namespace detail {

inline void emit_yaml(std::ostream& os, const Json& node, int indent) {
  for (const auto& [key, value] : node.items()) {
    os << std::string(indent, ' ') << key << ':';
    if (value.is_object()) {
      os << '\n';
      emit_yaml(os, value, indent + 2);
    } else if (value.is_number_float()) {
      // Keep a decimal point so the value reads back as a float.
      std::string s = fmt::format("{}", value.get<double>());
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      os << ' ' << s << '\n';
    } else {
      os << ' ' << value.dump() << '\n';
    }
  }
}

}  // namespace detail

/// Normalized YAML dump; parse_scenario(dump_scenario(sc)) reproduces sc.
inline std::string dump_scenario(const Scenario& sc) {
  std::ostringstream os;
  detail::emit_yaml(os, to_json(sc), 0);
  return os.str();
}

}  // namespace tollnet
