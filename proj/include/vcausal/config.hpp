#pragma once

// Experiment descriptions accepted by the command-line runner. The JSON
// schema is documented in docs/config.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vcausal/kinematics.hpp"
#include "vcausal/optics.hpp"
#include "vcausal/protocol.hpp"

namespace vcausal::cli {

enum class OutputFormat { Csv, Json };

struct OutputSpec {
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> path;  // standard output when empty
};

struct KinematicsScan {
  double ubar = 2;
  double x1 = 1;
  double v_start = 0.05;
  double v_stop = 0.95;
  double v_step = 0.05;
  kinematics::Regime regime = kinematics::Regime::SpecialRelativity;

  /// Grid points v_start + i * v_step, up to and including v_stop.
  std::vector<double> grid() const;
};

struct RoundTrip {
  double x1 = 1;
  double v = 0.9;
  double ubar = 2;
  std::vector<kinematics::Regime> regimes{kinematics::Regime::SpecialRelativity};
};

struct MalusRun {
  optics::PairSource source = optics::PairSource::entangled();
  std::vector<double> alpha_deg{0};
  std::vector<double> beta_deg{0};
  std::uint64_t trials = 100000;
};

struct ChshRun {
  optics::PairSource source = optics::PairSource::entangled();
  optics::ChshSettings settings = optics::ChshSettings::optimal();
  std::vector<double> settings_deg{0, 45, 22.5, 67.5};
  std::uint64_t trials = 1000000;
};

struct GhzSignaling {
  protocol::ProtocolConfig protocol;
  protocol::GhzSource source;
  protocol::InfluenceModel model = protocol::InfluenceModel::FiniteSpeedVCausal;
  std::vector<bool> decisions;
  double threshold = protocol::kDefaultThreshold;
};

using Experiment = std::variant<KinematicsScan, RoundTrip, MalusRun, ChshRun, GhzSignaling>;

struct ExperimentConfig {
  std::uint64_t seed = 0;
  // Speed of light in the caller's units (e.g. m/s). When set, kinematics
  // speeds are given in those units and positions in matching length units.
  std::optional<double> c;
  Experiment experiment;
  OutputSpec output;
};

/// Parse and validate a JSON document. Throws ParseError for malformed JSON
/// and ValidationError for schema or invariant violations. A seed override
/// replaces the document's seed before anything derived from it is expanded.
ExperimentConfig parse_config(std::string_view text,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

/// Validate an already-parsed document.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Index of the substream that expands "random" decision patterns.
inline constexpr std::uint64_t kDecisionStreamIndex = 0x8000000000000000ULL;

}  // namespace vcausal::cli
