#include "vcausal/runner.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "vcausal/errors.hpp"

namespace vcausal::cli {

using ojson = nlohmann::ordered_json;

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return {buf.data(), ptr};
}

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& field(const std::string& s) {
    sep();
    os_ << s;
    return *this;
  }
  CsvWriter& field(const char* s) { return field(std::string(s)); }
  CsvWriter& field(double d) { return field(format_double(d)); }
  CsvWriter& field(bool b) { return field(b ? "true" : "false"); }
  CsvWriter& field(std::uint64_t n) { return field(std::to_string(n)); }
  void end_row() {
    os_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }
  std::ostream& os_;
  bool first_ = true;
};

struct Scale {
  double c = 1;
};

ojson report_json(const kinematics::RoundTripScenario<double>& s,
                  const kinematics::ParadoxReport<double>& r, const Scale& u) {
  ojson j;
  j["regime"] = kinematics::to_string(s.regime);
  j["x1"] = s.x1 * u.c;
  j["v"] = s.v * u.c;
  j["ubar"] = s.ubar * u.c;
  j["t1"] = r.t1;
  j["t1_prime"] = r.t1_prime;
  j["x1_prime"] = r.x1_prime * u.c;
  j["return_speed"] = r.return_speed * u.c;
  j["delta_t_prime"] = r.delta_t_prime;
  j["total"] = r.total;
  j["paradox"] = r.paradox;
  return j;
}

ojson header(const char* experiment, const ExperimentConfig& cfg) {
  ojson j;
  j["version"] = kVersion;
  j["experiment"] = experiment;
  j["seed"] = cfg.seed;
  if (cfg.c) j["c"] = *cfg.c;
  return j;
}

std::string emit(const ojson& j) { return j.dump(2) + "\n"; }

std::string run_scan(const ExperimentConfig& cfg, const KinematicsScan& scan) {
  const Scale u{cfg.c.value_or(1)};
  const double threshold = kinematics::paradox_threshold(scan.ubar);
  std::vector<std::pair<double, kinematics::ParadoxReport<double>>> rows;
  for (double v : scan.grid()) {
    rows.emplace_back(v, kinematics::run_round_trip<double>({scan.x1, v, scan.ubar, scan.regime}));
  }

  if (cfg.output.format == OutputFormat::Csv) {
    std::ostringstream os;
    CsvWriter csv(os);
    csv.field("v").field("t1_prime").field("delta_t_prime").field("total").field("paradox");
    csv.end_row();
    for (const auto& [v, r] : rows) {
      csv.field(v * u.c).field(r.t1_prime).field(r.delta_t_prime).field(r.total).field(r.paradox);
      csv.end_row();
    }
    return os.str();
  }

  ojson j = header("kinematics_scan", cfg);
  j["regime"] = kinematics::to_string(scan.regime);
  j["ubar"] = scan.ubar * u.c;
  j["x1"] = scan.x1 * u.c;
  j["paradox_threshold"] = threshold * u.c;
  ojson first = nullptr;
  ojson out = ojson::array();
  for (const auto& [v, r] : rows) {
    if (r.paradox && first.is_null()) first = v * u.c;
    out.push_back({{"v", v * u.c},
                   {"t1_prime", r.t1_prime},
                   {"delta_t_prime", r.delta_t_prime},
                   {"total", r.total},
                   {"paradox", r.paradox}});
  }
  j["first_paradox_v"] = first;
  j["rows"] = std::move(out);
  return emit(j);
}

std::string run_round_trip_experiment(const ExperimentConfig& cfg, const RoundTrip& rt) {
  const Scale u{cfg.c.value_or(1)};
  ojson reports = ojson::array();
  for (auto regime : rt.regimes) {
    const kinematics::RoundTripScenario<double> s{rt.x1, rt.v, rt.ubar, regime};
    reports.push_back(report_json(s, kinematics::run_round_trip(s), u));
  }

  if (cfg.output.format == OutputFormat::Csv) {
    std::ostringstream os;
    CsvWriter csv(os);
    const std::array<const char*, 11> cols{"regime", "x1", "v", "ubar", "t1", "t1_prime",
                                           "x1_prime", "return_speed", "delta_t_prime", "total",
                                           "paradox"};
    for (const char* c : cols) csv.field(c);
    csv.end_row();
    for (const auto& r : reports) {
      csv.field(r["regime"].get<std::string>());
      for (std::size_t i = 1; i + 1 < cols.size(); ++i) csv.field(r[cols[i]].get<double>());
      csv.field(r["paradox"].get<bool>());
      csv.end_row();
    }
    return os.str();
  }

  ojson j = header("round_trip", cfg);
  j["reports"] = std::move(reports);
  return emit(j);
}

ojson source_json(const optics::PairSource& s) {
  if (s.kind == optics::PairSource::Kind::Entangled) return "entangled";
  return {{"mixture", {{"axis_deg", s.axis.degrees()}}}};
}

std::string run_malus(const ExperimentConfig& cfg, const MalusRun& m) {
  struct Row {
    double alpha_deg, beta_deg, expected;
    optics::MalusTally tally;
  };
  std::vector<Row> rows;
  std::uint64_t index = 0;
  for (double a : m.alpha_deg) {
    for (double b : m.beta_deg) {
      Stream rng = derive_substream(cfg.seed, index++);
      const auto alpha = optics::PolarizationAngle::degrees(a);
      const auto beta = optics::PolarizationAngle::degrees(b);
      // P(nu2 T | nu1 T) from the closed-form joint distribution.
      const double p_first = optics::joint_probability(alpha, beta, optics::Channel::Transmitted,
                                                       optics::Channel::Transmitted, m.source) +
                             optics::joint_probability(alpha, beta, optics::Channel::Transmitted,
                                                       optics::Channel::Reflected, m.source);
      const double expected =
          optics::joint_probability(alpha, beta, optics::Channel::Transmitted,
                                    optics::Channel::Transmitted, m.source) / p_first;
      rows.push_back({a, b, expected, optics::malus_run(m.source, alpha, beta, m.trials, rng)});
    }
  }
  auto cond_se = [](const Row& r) {
    const double n = static_cast<double>(r.tally.first_transmitted);
    return n > 0 ? std::sqrt(r.expected * (1 - r.expected) / n) : 0.0;
  };
  auto marg_se = [](const Row& r) { return std::sqrt(0.25 / static_cast<double>(r.tally.trials)); };

  if (cfg.output.format == OutputFormat::Csv) {
    std::ostringstream os;
    CsvWriter csv(os);
    for (const char* c : {"alpha_deg", "beta_deg", "trials", "first_transmitted",
                          "conditioned_rate", "expected_conditioned", "conditioned_stderr",
                          "marginal_rate", "marginal_stderr"}) {
      csv.field(c);
    }
    csv.end_row();
    for (const auto& r : rows) {
      csv.field(r.alpha_deg).field(r.beta_deg).field(r.tally.trials)
          .field(r.tally.first_transmitted).field(r.tally.conditioned_rate()).field(r.expected)
          .field(cond_se(r)).field(r.tally.marginal_rate()).field(marg_se(r));
      csv.end_row();
    }
    return os.str();
  }

  ojson j = header("malus_run", cfg);
  j["source"] = source_json(m.source);
  j["trials"] = m.trials;
  ojson out = ojson::array();
  for (const auto& r : rows) {
    out.push_back({{"alpha_deg", r.alpha_deg},
                   {"beta_deg", r.beta_deg},
                   {"first_transmitted", r.tally.first_transmitted},
                   {"conditioned_rate", r.tally.conditioned_rate()},
                   {"expected_conditioned", r.expected},
                   {"conditioned_stderr", cond_se(r)},
                   {"marginal_rate", r.tally.marginal_rate()},
                   {"marginal_stderr", marg_se(r)}});
  }
  j["rows"] = std::move(out);
  return emit(j);
}

std::string run_chsh(const ExperimentConfig& cfg, const ChshRun& c) {
  const auto est = optics::chsh_statistic(c.settings, c.source, c.trials, cfg.seed);
  const double exact = optics::chsh_exact(c.settings, c.source);

  if (cfg.output.format == OutputFormat::Csv) {
    std::ostringstream os;
    CsvWriter csv(os);
    for (const char* h : {"s", "std_error", "exact", "e_ab", "e_ab_prime", "e_a_prime_b",
                          "e_a_prime_b_prime", "trials_per_correlator"}) {
      csv.field(h);
    }
    csv.end_row();
    csv.field(est.s).field(est.std_error).field(exact);
    for (double e : est.correlators) csv.field(e);
    csv.field(est.trials_per_correlator);
    csv.end_row();
    return os.str();
  }

  ojson j = header("chsh_run", cfg);
  j["source"] = source_json(c.source);
  j["settings_deg"] = {c.settings.a.degrees(), c.settings.a_prime.degrees(),
                       c.settings.b.degrees(), c.settings.b_prime.degrees()};
  j["trials_per_correlator"] = est.trials_per_correlator;
  j["s"] = est.s;
  j["std_error"] = est.std_error;
  j["exact"] = exact;
  j["correlators"] = est.correlators;
  return emit(j);
}

std::string run_ghz(const ExperimentConfig& cfg, const GhzSignaling& g) {
  const auto report = protocol::signaling_experiment(g.protocol, g.source, g.model, g.decisions,
                                                     cfg.seed, g.threshold);

  if (cfg.output.format == OutputFormat::Csv) {
    std::ostringstream os;
    CsvWriter csv(os);
    for (const char* h : {"block", "decision", "inferred", "correct", "trials", "agreements",
                          "agreement_rate"}) {
      csv.field(h);
    }
    csv.end_row();
    for (std::size_t i = 0; i < report.blocks.size(); ++i) {
      const auto& b = report.blocks[i];
      csv.field(std::uint64_t{i}).field(b.decision).field(b.inferred).field(b.correct)
          .field(b.stats.trials).field(b.stats.agreements).field(b.stats.agreement_rate);
      csv.end_row();
    }
    return os.str();
  }

  ojson j = header("ghz_signaling", cfg);
  j["model"] = protocol::to_string(g.model);
  j["p"] = g.source.p;
  j["reachable"] = protocol::reachable(g.protocol);
  j["trials_per_block"] = g.protocol.trials;
  j["threshold"] = g.threshold;
  j["error_bound"] = report.error_bound;
  j["expected_rate_measured"] = protocol::expected_agreement_rate(g.protocol, g.source, g.model, true);
  j["expected_rate_unmeasured"] =
      protocol::expected_agreement_rate(g.protocol, g.source, g.model, false);
  j["accuracy"] = report.accuracy;
  ojson blocks = ojson::array();
  for (const auto& b : report.blocks) {
    blocks.push_back({{"decision", b.decision},
                      {"inferred", b.inferred},
                      {"correct", b.correct},
                      {"agreements", b.stats.agreements},
                      {"agreement_rate", b.stats.agreement_rate}});
  }
  j["blocks"] = std::move(blocks);
  return emit(j);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string render(const ExperimentConfig& cfg) {
  return std::visit(
      Overloaded{[&](const KinematicsScan& e) { return run_scan(cfg, e); },
                 [&](const RoundTrip& e) { return run_round_trip_experiment(cfg, e); },
                 [&](const MalusRun& e) { return run_malus(cfg, e); },
                 [&](const ChshRun& e) { return run_chsh(cfg, e); },
                 [&](const GhzSignaling& e) { return run_ghz(cfg, e); }},
      cfg.experiment);
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    text = render(cfg);
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  }
  if (cfg.output.path) {
    std::ofstream file(*cfg.output.path, std::ios::binary | std::ios::trunc);
    if (!file || !(file << text) || !file.flush()) {
      err << "i/o error: cannot write " << *cfg.output.path << '\n';
      return kExitIo;
    }
    return kExitOk;
  }
  out << text;
  if (!out) {
    err << "i/o error: cannot write results\n";
    return kExitIo;
  }
  return kExitOk;
}

int run_config_text(const std::string& text, std::ostream& out, std::ostream& err,
                    std::optional<std::uint64_t> seed_override) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(text, seed_override);
  } catch (const ParseError& e) {
    err << e.what() << '\n';
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  }
  return run_experiment(cfg, out, err);
}

}  // namespace vcausal::cli
