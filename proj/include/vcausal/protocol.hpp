#pragma once

// Three-party GHZ signaling protocol in the privileged frame.
//
// Alice sits a distance l from the lab shared by Bob and Charlie. She may
// measure at t_A; Bob and Charlie measure simultaneously at t_L > t_A. All
// polarizers are fixed in the H/V basis.

#include <cstdint>
#include <optional>
#include <vector>

#include "vcausal/random.hpp"

namespace vcausal::protocol {

struct ProtocolConfig {
  double l = 1.0;
  double t_a = 0.0;
  double t_l = 0.4;
  double ubar = 3.0;
  std::uint64_t trials = 1000;  // per block

  /// Throws DomainError unless l > 0, t_L > t_A, ubar > 1 and trials >= 1.
  void validate() const;
};

/// Fraction p of emissions in the GHZ state; the rest split evenly between HHH and VVV.
struct GhzSource {
  double p = 1.0;

  void validate() const;
};

enum class InfluenceModel {
  FiniteSpeedVCausal,  // influence travels at ubar from the measuring site
  AgreementVariant,    // Bob and Charlie always settle on a common outcome
  LocalOnly,           // outcomes fixed by the hidden product state; requires p = 0
};

const char* to_string(InfluenceModel m);

enum class Polarization { H, V };

struct TrialRecord {
  std::optional<Polarization> alice;  // empty when Alice did not measure
  Polarization bob = Polarization::H;
  Polarization charlie = Polarization::H;
  bool entangled = false;  // this emission was in the GHZ state

  bool agree() const { return bob == charlie; }
};

struct BlockStats {
  std::uint64_t trials = 0;
  std::uint64_t agreements = 0;
  double agreement_rate = 0;
  std::uint64_t bob_horizontal = 0;
  std::uint64_t charlie_horizontal = 0;
  std::uint64_t alice_horizontal = 0;  // counted only over trials where Alice measured
  std::uint64_t alice_measured = 0;
};

/// ubar > l/(t_L - t_A) > 1: Alice's influence reaches the lab in time, and
/// only a superluminal influence could.
bool reachable(const ProtocolConfig& config);

/// Throws ModelSourceConflict for LocalOnly with p > 0.
void check_model_source(const GhzSource& source, InfluenceModel model);

TrialRecord run_trial(const ProtocolConfig& config, const GhzSource& source, InfluenceModel model,
                      bool alice_measures, Stream& rng);

BlockStats run_block(const ProtocolConfig& config, const GhzSource& source, InfluenceModel model,
                     bool alice_decision, Stream& rng);

inline constexpr double kDefaultThreshold = 0.75;

struct Inference {
  bool inferred = false;   // Bob and Charlie conclude that Alice measured
  double error_bound = 1;  // Hoeffding bound on calling a no-measurement block "measured"
};

/// inferred = agreement_rate >= threshold (inclusive). Threshold must lie in (0.5, 1].
Inference infer_decision(const BlockStats& stats, double threshold = kDefaultThreshold);

struct BlockOutcome {
  bool decision = false;
  bool inferred = false;
  bool correct = false;
  BlockStats stats;
};

struct SignalingReport {
  std::vector<BlockOutcome> blocks;
  double accuracy = 0;
  double error_bound = 1;  // per block
};

/// One block per decision; block i draws from derive_substream(seed, i).
SignalingReport signaling_experiment(const ProtocolConfig& config, const GhzSource& source,
                                     InfluenceModel model, const std::vector<bool>& decisions,
                                     std::uint64_t seed, double threshold = kDefaultThreshold);

/// Expected agreement rate of a block, in closed form.
double expected_agreement_rate(const ProtocolConfig& config, const GhzSource& source,
                               InfluenceModel model, bool alice_decision);

}  // namespace vcausal::protocol
