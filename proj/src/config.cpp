#include "vcausal/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "vcausal/errors.hpp"

namespace vcausal::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(where + ": unknown field \"" + key + "\"");
    }
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing field \"" + key + "\"");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& where,
              std::optional<double> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw ValidationError(where + ": missing field \"" + key + "\"");
  }
  if (!it->is_number()) throw ValidationError(where + "." + key + ": expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ValidationError(where + "." + key + ": must be finite");
  return v;
}

std::uint64_t count(const json& obj, const std::string& key, const std::string& where,
                    std::optional<std::uint64_t> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw ValidationError(where + ": missing field \"" + key + "\"");
  }
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
    throw ValidationError(where + "." + key + ": expected a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

std::string text(const json& obj, const std::string& key, const std::string& where,
                 std::optional<std::string> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw ValidationError(where + ": missing field \"" + key + "\"");
  }
  if (!it->is_string()) throw ValidationError(where + "." + key + ": expected a string");
  return it->get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& where,
                            std::vector<double> fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  std::vector<double> out;
  if (it->is_number()) {
    out.push_back(it->get<double>());
  } else if (it->is_array()) {
    for (const auto& e : *it) {
      if (!e.is_number()) throw ValidationError(where + "." + key + ": expected numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ValidationError(where + "." + key + ": expected a number or an array of numbers");
  }
  if (out.empty()) throw ValidationError(where + "." + key + ": must not be empty");
  for (double d : out) {
    if (!std::isfinite(d)) throw ValidationError(where + "." + key + ": must be finite");
  }
  return out;
}

// Speeds and positions arrive in caller units when c is given.
struct Units {
  double c = 1;
  double speed(double s) const { return s / c; }
  double length(double x) const { return x / c; }
};

void check_frame_speed(double v) {
  if (!(std::abs(v) < 1)) throw ValidationError("frame speed must satisfy |v| < 1");
}

void check_signal_speed(double ubar) {
  if (!(ubar > 1)) throw ValidationError("superluminal signal speed must satisfy ubar > 1");
}

kinematics::Regime regime_of(const std::string& s, const std::string& where) {
  if (s == "sr") return kinematics::Regime::SpecialRelativity;
  if (s == "preferred") return kinematics::Regime::PreferredFrame;
  throw ValidationError(where + ".regime: expected \"sr\" or \"preferred\", got \"" + s + "\"");
}

KinematicsScan parse_scan(const json& j, const Units& u) {
  const std::string w = "experiment.kinematics_scan";
  check_keys(j, {"ubar", "x1", "v_start", "v_stop", "v_step", "regime"}, w);
  KinematicsScan s;
  s.ubar = u.speed(number(j, "ubar", w));
  s.x1 = u.length(number(j, "x1", w, u.c * 1.0));
  s.v_start = u.speed(number(j, "v_start", w, u.c * 0.05));
  s.v_stop = u.speed(number(j, "v_stop", w, u.c * 0.95));
  s.v_step = u.speed(number(j, "v_step", w, u.c * 0.05));
  s.regime = regime_of(text(j, "regime", w, "sr"), w);
  check_signal_speed(s.ubar);
  check_frame_speed(s.v_start);
  check_frame_speed(s.v_stop);
  if (!(s.x1 > 0)) throw ValidationError("target position x1 must be > 0");
  if (!(s.v_start > 0)) throw ValidationError("scan must start at v > 0");
  if (!(s.v_stop >= s.v_start)) throw ValidationError("scan requires v_stop >= v_start");
  if (!(s.v_step > 0)) throw ValidationError("scan step must be > 0");
  if ((s.v_stop - s.v_start) / s.v_step > 1e8) throw ValidationError("scan grid exceeds 1e8 points");
  return s;
}

RoundTrip parse_round_trip(const json& j, const Units& u) {
  const std::string w = "experiment.round_trip";
  check_keys(j, {"x1", "v", "ubar", "regime"}, w);
  RoundTrip r;
  r.x1 = u.length(number(j, "x1", w));
  r.v = u.speed(number(j, "v", w));
  r.ubar = u.speed(number(j, "ubar", w));
  const std::string regime = text(j, "regime", w, "sr");
  if (regime == "both") {
    r.regimes = {kinematics::Regime::SpecialRelativity, kinematics::Regime::PreferredFrame};
  } else {
    r.regimes = {regime_of(regime, w)};
  }
  if (!(r.x1 > 0)) throw ValidationError("target position x1 must be > 0");
  check_frame_speed(r.v);
  if (!(r.v > 0)) throw ValidationError("round trip requires frame speed v > 0");
  check_signal_speed(r.ubar);
  return r;
}

optics::PairSource parse_pair_source(const json& obj, const std::string& w) {
  auto it = obj.find("source");
  if (it == obj.end()) return optics::PairSource::entangled();
  if (it->is_string()) {
    if (*it == "entangled") return optics::PairSource::entangled();
    if (*it == "mixture") return optics::PairSource::mixture(optics::PolarizationAngle{});
    throw ValidationError(w + ".source: expected \"entangled\", \"mixture\" or {\"mixture\": {...}}");
  }
  check_keys(*it, {"mixture"}, w + ".source");
  const json& m = require(*it, "mixture", w + ".source");
  check_keys(m, {"axis_deg"}, w + ".source.mixture");
  return optics::PairSource::mixture(
      optics::PolarizationAngle::degrees(number(m, "axis_deg", w + ".source.mixture", 0.0)));
}

MalusRun parse_malus(const json& j) {
  const std::string w = "experiment.malus_run";
  check_keys(j, {"source", "alpha_deg", "beta_deg", "trials"}, w);
  MalusRun m;
  m.source = parse_pair_source(j, w);
  m.alpha_deg = numbers(j, "alpha_deg", w, {0});
  m.beta_deg = numbers(j, "beta_deg", w, {0});
  m.trials = count(j, "trials", w, 100000);
  if (m.trials < 1) throw ValidationError("malus_run requires trials >= 1");
  return m;
}

ChshRun parse_chsh(const json& j) {
  const std::string w = "experiment.chsh_run";
  check_keys(j, {"source", "settings_deg", "trials"}, w);
  ChshRun c;
  c.source = parse_pair_source(j, w);
  auto it = j.find("settings_deg");
  if (it != j.end() && it->is_string()) {
    if (*it != "optimal") throw ValidationError(w + ".settings_deg: unknown preset");
  } else {
    c.settings_deg = numbers(j, "settings_deg", w, c.settings_deg);
    if (c.settings_deg.size() != 4) {
      throw ValidationError(w + ".settings_deg: expected four angles (a, a', b, b')");
    }
    using optics::PolarizationAngle;
    c.settings = {PolarizationAngle::degrees(c.settings_deg[0]),
                  PolarizationAngle::degrees(c.settings_deg[1]),
                  PolarizationAngle::degrees(c.settings_deg[2]),
                  PolarizationAngle::degrees(c.settings_deg[3])};
  }
  c.trials = count(j, "trials", w, 1000000);
  if (c.trials < optics::kMinChshTrials) throw ValidationError("chsh_run requires trials >= 1000");
  return c;
}

protocol::InfluenceModel model_of(const std::string& s, const std::string& w) {
  if (s == "finite_speed") return protocol::InfluenceModel::FiniteSpeedVCausal;
  if (s == "agreement") return protocol::InfluenceModel::AgreementVariant;
  if (s == "local_only") return protocol::InfluenceModel::LocalOnly;
  throw ValidationError(w + ".model: expected \"finite_speed\", \"agreement\" or \"local_only\"");
}

GhzSignaling parse_ghz(const json& j, std::uint64_t seed) {
  const std::string w = "experiment.ghz_signaling";
  check_keys(j, {"l", "t_a", "t_l", "ubar", "trials", "p", "model", "blocks", "decisions",
                 "threshold"},
             w);
  GhzSignaling g;
  g.protocol.l = number(j, "l", w);
  g.protocol.t_a = number(j, "t_a", w, 0.0);
  g.protocol.t_l = number(j, "t_l", w);
  g.protocol.ubar = number(j, "ubar", w);
  g.protocol.trials = count(j, "trials", w, 1000);
  g.source.p = number(j, "p", w, 1.0);
  g.model = model_of(text(j, "model", w, "finite_speed"), w);
  g.threshold = number(j, "threshold", w, protocol::kDefaultThreshold);

  if (!(g.protocol.l > 0)) throw ValidationError("distance l must be > 0");
  if (!(g.protocol.t_l > g.protocol.t_a)) throw ValidationError("measurement instants must satisfy t_l > t_a");
  check_signal_speed(g.protocol.ubar);
  if (g.protocol.trials < 1) throw ValidationError("trials per block must be >= 1");
  if (!(g.source.p >= 0 && g.source.p <= 1)) throw ValidationError("GHZ fraction p must lie in [0, 1]");
  if (g.model == protocol::InfluenceModel::LocalOnly && g.source.p > 0) {
    throw ValidationError("model local_only requires p = 0");
  }
  if (!(g.threshold > 0.5 && g.threshold <= 1)) {
    throw ValidationError("threshold must lie in (0.5, 1]");
  }

  const bool has_blocks = j.contains("blocks");
  const std::uint64_t blocks = count(j, "blocks", w, 20);
  const json decisions = j.value("decisions", json("alternating"));
  if (decisions.is_array()) {
    for (const auto& d : decisions) {
      if (!d.is_boolean()) throw ValidationError(w + ".decisions: expected booleans");
      g.decisions.push_back(d.get<bool>());
    }
    if (has_blocks && blocks != g.decisions.size()) {
      throw ValidationError(w + ": blocks must equal the number of decisions");
    }
  } else if (decisions == "alternating") {
    for (std::uint64_t i = 0; i < blocks; ++i) g.decisions.push_back(i % 2 == 0);
  } else if (decisions == "random") {
    Stream rng = derive_substream(seed, kDecisionStreamIndex);
    for (std::uint64_t i = 0; i < blocks; ++i) g.decisions.push_back(fair_bit(rng));
  } else {
    throw ValidationError(w + ".decisions: expected \"alternating\", \"random\" or an array");
  }
  if (g.decisions.empty()) throw ValidationError(w + ": at least one block is required");
  return g;
}

}  // namespace

std::vector<double> KinematicsScan::grid() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((v_stop - v_start) / v_step + 1e-9)) + 1;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(v_start + static_cast<double>(i) * v_step);
  return out;
}

ExperimentConfig config_from_json(const json& doc) {
  check_keys(doc, {"seed", "c", "experiment", "output"}, "config");
  ExperimentConfig cfg;
  cfg.seed = count(doc, "seed", "config", 0);
  Units units;
  if (doc.contains("c")) {
    cfg.c = number(doc, "c", "config");
    if (!(*cfg.c > 0)) throw ValidationError("config.c: speed of light must be > 0");
    units.c = *cfg.c;
  }

  const json& exp = require(doc, "experiment", "config");
  if (!exp.is_object() || exp.size() != 1) {
    throw ValidationError("config.experiment: exactly one experiment variant is required");
  }
  const std::string name = exp.begin().key();
  const json& body = exp.begin().value();
  if (name == "kinematics_scan") {
    cfg.experiment = parse_scan(body, units);
  } else if (name == "round_trip") {
    cfg.experiment = parse_round_trip(body, units);
  } else if (name == "malus_run") {
    cfg.experiment = parse_malus(body);
  } else if (name == "chsh_run") {
    cfg.experiment = parse_chsh(body);
  } else if (name == "ghz_signaling") {
    cfg.experiment = parse_ghz(body, cfg.seed);
  } else {
    throw ValidationError("config.experiment: unknown variant \"" + name + "\"");
  }

  if (auto it = doc.find("output"); it != doc.end()) {
    check_keys(*it, {"format", "path"}, "config.output");
    const std::string fmt = text(*it, "format", "config.output", "json");
    if (fmt == "json") {
      cfg.output.format = OutputFormat::Json;
    } else if (fmt == "csv") {
      cfg.output.format = OutputFormat::Csv;
    } else {
      throw ValidationError("config.output.format: expected \"csv\" or \"json\"");
    }
    if (it->contains("path")) cfg.output.path = text(*it, "path", "config.output");
  }
  return cfg;
}

ExperimentConfig parse_config(std::string_view source, std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, source.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (source[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("config parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": " + e.what());
  }
  if (seed_override && doc.is_object()) doc["seed"] = *seed_override;
  try {
    return config_from_json(doc);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

}  // namespace vcausal::cli
