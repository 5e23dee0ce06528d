#include "spinlink/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "spinlink/errors.hpp"

namespace spinlink {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

const std::set<std::string>& control_keys() {
  static const std::set<std::string> keys{
      "preset",       "command",          "out",          "format",
      "seed",         "trials",           "threads",      "attempt_cap",
      "rate_estimator", "fidelity_constraints", "sweep", "false_herald_correction",
      "success_time_model"};
  return keys;
}

const std::set<std::string>& commands() {
  static const std::set<std::string> names{"fidelity", "rate", "sweep", "montecarlo", "diagnose"};
  return names;
}

const std::set<std::string>& sweep_kinds() {
  static const std::set<std::string> kinds{"pdr", "cooperativity", "coupling", "rate-vs-loss",
                                           "custom"};
  return kinds;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

double number(const json& v, const std::string& key) {
  require(v.is_number(), "'" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& key) {
  require(v.is_number_integer() || (v.is_number() && std::floor(v.get<double>()) == v.get<double>()),
          "'" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& v, const std::string& key) {
  require(v.is_string(), "'" + key + "' must be a string");
  return v.get<std::string>();
}

json parse_value(const std::string& raw) {
  try {
    return json::parse(raw);
  } catch (const json::parse_error&) {
    return raw;
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, "override '" + assignment + "' must be key=value");
  const std::string key = assignment.substr(0, eq);
  const json value = parse_value(assignment.substr(eq + 1));

  json* node = &doc;
  std::stringstream path(key);
  std::string segment;
  std::vector<std::string> segments;
  while (std::getline(path, segment, '.')) segments.push_back(segment);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& s = segments[i];
    const bool last = i + 1 == segments.size();
    if (node->is_array()) {
      require(!s.empty() && s.find_first_not_of("0123456789") == std::string::npos,
              "override '" + key + "': '" + s + "' is not an array index");
      const std::size_t idx = std::stoul(s);
      while (node->size() <= idx) node->push_back(json::object());
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      require(node->is_object(), "override '" + key + "' descends into a non-object");
      if (!last && !node->contains(s)) {
        const std::string& next = segments[i + 1];
        const bool index = next.find_first_not_of("0123456789") == std::string::npos;
        (*node)[s] = index ? json::array() : json::object();
      }
      node = &(*node)[s];
    }
    if (last) *node = value;
  }
}

Axis axis_from_json(const json& j) {
  require(j.is_object(), "sweep axis must be an object");
  Axis a;
  for (const auto& [k, v] : j.items()) {
    if (k == "parameter") a.parameter = text(v, "sweep.axes.parameter");
    else if (k == "min") a.min = number(v, "sweep.axes.min");
    else if (k == "max") a.max = number(v, "sweep.axes.max");
    else if (k == "points") a.points = integer(v, "sweep.axes.points");
    else if (k == "spacing") a.spacing = parse_spacing(text(v, "sweep.axes.spacing"));
    else throw ValidationError("unknown key 'sweep.axes." + k + "'");
  }
  return a;
}

json axis_to_json(const Axis& a) {
  return {{"parameter", a.parameter}, {"min", a.min}, {"max", a.max}, {"points", a.points},
          {"spacing", spacing_name(a.spacing)}};
}

SweepConfig sweep_from_json(const json& j) {
  require(j.is_object(), "'sweep' must be an object");
  SweepConfig s;
  for (const auto& [k, v] : j.items()) {
    if (k == "kind") s.kind = text(v, "sweep.kind");
    else if (k == "quantity") s.quantity = text(v, "sweep.quantity");
    else if (k == "monte_carlo") {
      require(v.is_boolean(), "'sweep.monte_carlo' must be true or false");
      s.monte_carlo = v.get<bool>();
    } else if (k == "axes") {
      require(v.is_array(), "'sweep.axes' must be an array");
      for (const auto& a : v) s.axes.push_back(axis_from_json(a));
    } else {
      throw ValidationError("unknown key 'sweep." + k + "'");
    }
  }
  return s;
}

std::string success_model_name(SuccessTimeModel m) {
  return m == SuccessTimeModel::Unnormalized ? "unnormalized" : "conditional";
}

}  // namespace

void SweepConfig::validate() const {
  require(sweep_kinds().count(kind) != 0,
          "unknown sweep kind '" + kind + "' (expected pdr, cooperativity, coupling, rate-vs-loss or custom)");
  parse_quantity(quantity);
  for (const auto& a : axes) a.validate();
  if (kind == "custom") require(!axes.empty(), "custom sweep needs at least one axis");
  if (kind == "rate-vs-loss") require(axes.size() <= 1, "rate-vs-loss takes a single loss axis");
  require(!monte_carlo || kind == "rate-vs-loss", "sweep.monte_carlo applies to rate-vs-loss only");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"paper-design", "mirror-h", "effective-pulse-4x"};
  return names;
}

ModelParameters preset_parameters(const std::string& name) {
  ModelParameters p;  // carries the published device constants
  if (name == "paper-design") {
    p.h_reflection_re = -std::sqrt(p.r_cav_H);
  } else if (name == "mirror-h") {
    p.h_reflection_re = -1.0;
  } else if (name == "effective-pulse-4x") {
    p.h_reflection_re = -std::sqrt(p.r_cav_H);
    p.pulse_multiplier = 4.0;
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  return p;
}

std::string format_name(TableFormat f) { return f == TableFormat::Json ? "json" : "csv"; }

TableFormat parse_format(const std::string& name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "json") return TableFormat::Json;
  throw ValidationError("unknown format '" + name + "' (expected csv or json)");
}

json RunConfig::resolved() const {
  json j;
  j["preset"] = preset;
  j["command"] = command;
  j["format"] = format_name(format);
  for (const auto& name : ModelParameters::numeric_names()) {
    if (name == "loss_db") continue;
    j[name] = params.get(name);
  }
  j["false_herald_correction"] = params.false_herald_correction;
  j["success_time_model"] = success_model_name(params.success_time);
  j["seed"] = mc.seed;
  j["trials"] = mc.trials;
  j["threads"] = mc.threads;
  j["attempt_cap"] = mc.attempt_cap;
  j["rate_estimator"] = mc.estimator == RateEstimator::Arithmetic ? "arithmetic" : "harmonic";
  j["fidelity_constraints"] = fidelity_constraints;
  json axes = json::array();
  for (const auto& a : sweep.axes) axes.push_back(axis_to_json(a));
  j["sweep"] = {{"kind", sweep.kind}, {"quantity", sweep.quantity}, {"axes", axes},
                {"monte_carlo", sweep.monte_carlo}};
  return j;
}

std::string RunConfig::hash() const {
  const std::string s = resolved().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec s;
  if (sweep.kind == "pdr") s = pdr_fidelity_spec();
  else if (sweep.kind == "cooperativity") s = cooperativity_fidelity_spec();
  else if (sweep.kind == "coupling") s = coupling_fidelity_spec();
  else if (sweep.kind == "rate-vs-loss") {
    s.axes = {default_loss_axis()};
    s.quantity = Quantity::Rate;
  } else {
    s.quantity = parse_quantity(sweep.quantity);
  }
  if (!sweep.axes.empty()) s.axes = sweep.axes;
  s.f_target = params.f_target;
  s.threads = mc.threads;
  return s;
}

void RunConfig::validate() const {
  require(commands().count(command) != 0,
          "unknown command '" + command + "' (expected fidelity, rate, sweep, montecarlo or diagnose)");
  params.validate();
  mc.validate();
  sweep.validate();
  require(!fidelity_constraints.empty(), "fidelity_constraints must not be empty");
  for (double f : fidelity_constraints) {
    require(f >= 0.0 && f <= 1.0, "fidelity constraints must lie in [0, 1]");
  }
}

RunConfig config_from_json(json doc, const std::vector<std::string>& overrides,
                           const std::string& preset) {
  if (doc.is_null()) doc = json::object();
  require(doc.is_object(), "config root must be a JSON object");
  for (const auto& o : overrides) apply_override(doc, o);

  RunConfig cfg;
  if (!preset.empty()) cfg.preset = preset;
  else if (doc.contains("preset")) cfg.preset = text(doc["preset"], "preset");
  cfg.params = preset_parameters(cfg.preset);

  require(!(doc.contains("eta_link") && doc.contains("loss_db")),
          "'eta_link' and 'loss_db' are mutually exclusive");

  for (const auto& [k, v] : doc.items()) {
    if (ModelParameters::is_numeric_name(k)) {
      if (k == "xi" && v.is_null()) {
        cfg.params.xi.reset();
        continue;
      }
      cfg.params.set(k, number(v, k));
      continue;
    }
    require(control_keys().count(k) != 0, "unknown key '" + k + "'");
    if (k == "preset") continue;
    if (k == "command") cfg.command = text(v, k);
    else if (k == "out") cfg.out = text(v, k);
    else if (k == "format") cfg.format = parse_format(text(v, k));
    else if (k == "seed") {
      require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
              "'seed' must be a non-negative integer");
      cfg.mc.seed = v.get<std::uint64_t>();
    } else if (k == "trials") cfg.mc.trials = integer(v, k);
    else if (k == "threads") {
      const auto t = integer(v, k);
      require(t >= 0, "'threads' must be >= 0");
      cfg.mc.threads = static_cast<unsigned>(t);
    } else if (k == "attempt_cap") cfg.mc.attempt_cap = integer(v, k);
    else if (k == "rate_estimator") {
      const std::string e = text(v, k);
      require(e == "harmonic" || e == "arithmetic",
              "'rate_estimator' must be harmonic or arithmetic");
      cfg.mc.estimator = e == "arithmetic" ? RateEstimator::Arithmetic : RateEstimator::Harmonic;
    } else if (k == "fidelity_constraints") {
      require(v.is_array(), "'fidelity_constraints' must be an array of numbers");
      cfg.fidelity_constraints.clear();
      for (const auto& f : v) cfg.fidelity_constraints.push_back(number(f, k));
    } else if (k == "sweep") cfg.sweep = sweep_from_json(v);
    else if (k == "false_herald_correction") {
      require(v.is_boolean(), "'false_herald_correction' must be true or false");
      cfg.params.false_herald_correction = v.get<bool>();
    } else if (k == "success_time_model") {
      const std::string m = text(v, k);
      require(m == "conditional" || m == "unnormalized",
              "'success_time_model' must be conditional or unnormalized");
      cfg.params.success_time = m == "unnormalized" ? SuccessTimeModel::Unnormalized : SuccessTimeModel::Conditional;
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      const std::string& preset) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    if (content.find_first_not_of(" \t\r\n") != std::string::npos) {
      try {
        doc = json::parse(content);
      } catch (const json::parse_error& e) {
        throw ValidationError("parse error in '" + path + "' at " + line_column(content, e.byte) +
                              ": " + e.what());
      }
    }
  }
  return config_from_json(std::move(doc), overrides, preset);
}

}  // namespace spinlink
