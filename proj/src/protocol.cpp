#include "vcausal/protocol.hpp"

#include <cmath>
#include <string>

#include "vcausal/errors.hpp"

namespace vcausal::protocol {

namespace {

Polarization draw(Stream& rng) { return fair_bit(rng) ? Polarization::H : Polarization::V; }

}  // namespace

void ProtocolConfig::validate() const {
  if (!std::isfinite(l) || !(l > 0)) throw DomainError("distance l must be > 0");
  if (!std::isfinite(t_a) || !std::isfinite(t_l) || !(t_l > t_a)) {
    throw DomainError("measurement instants must satisfy t_L > t_A");
  }
  if (!std::isfinite(ubar) || !(ubar > 1)) throw DomainError("influence speed must satisfy ubar > 1");
  if (trials < 1) throw DomainError("trials per block must be >= 1");
}

void GhzSource::validate() const {
  if (!(p >= 0 && p <= 1)) throw DomainError("GHZ fraction p must lie in [0, 1]");
}

const char* to_string(InfluenceModel m) {
  switch (m) {
    case InfluenceModel::FiniteSpeedVCausal: return "finite_speed";
    case InfluenceModel::AgreementVariant: return "agreement";
    case InfluenceModel::LocalOnly: return "local_only";
  }
  return "?";
}

bool reachable(const ProtocolConfig& config) {
  config.validate();
  const double required = config.l / (config.t_l - config.t_a);
  return config.ubar > required && required > 1;
}

void check_model_source(const GhzSource& source, InfluenceModel model) {
  source.validate();
  if (model == InfluenceModel::LocalOnly && source.p > 0) {
    throw ModelSourceConflict("local_only model requires p = 0; got p = " +
                              std::to_string(source.p));
  }
}

TrialRecord run_trial(const ProtocolConfig& config, const GhzSource& source, InfluenceModel model,
                      bool alice_measures, Stream& rng) {
  check_model_source(source, model);
  const bool in_time = reachable(config);

  TrialRecord rec;
  rec.entangled = bernoulli(rng, source.p);
  if (!rec.entangled) {
    const Polarization lambda = draw(rng);
    rec.bob = rec.charlie = lambda;
    if (alice_measures) rec.alice = lambda;
    return rec;
  }

  if (alice_measures) rec.alice = draw(rng);
  const bool forced = alice_measures && in_time;

  switch (model) {
    case InfluenceModel::FiniteSpeedVCausal:
      if (forced) {
        rec.bob = rec.charlie = *rec.alice;
      } else {
        // No influence reaches the lab and B, C cannot exchange one while
        // measuring simultaneously.
        rec.bob = draw(rng);
        rec.charlie = draw(rng);
      }
      break;
    case InfluenceModel::AgreementVariant:
      rec.bob = rec.charlie = forced ? *rec.alice : draw(rng);
      break;
    case InfluenceModel::LocalOnly:
      break;  // unreachable: p == 0 never yields an entangled trial
  }
  return rec;
}

BlockStats run_block(const ProtocolConfig& config, const GhzSource& source, InfluenceModel model,
                     bool alice_decision, Stream& rng) {
  config.validate();
  check_model_source(source, model);
  BlockStats s;
  s.trials = config.trials;
  for (std::uint64_t i = 0; i < config.trials; ++i) {
    const TrialRecord r = run_trial(config, source, model, alice_decision, rng);
    s.agreements += r.agree();
    s.bob_horizontal += r.bob == Polarization::H;
    s.charlie_horizontal += r.charlie == Polarization::H;
    if (r.alice) {
      ++s.alice_measured;
      s.alice_horizontal += *r.alice == Polarization::H;
    }
  }
  s.agreement_rate = static_cast<double>(s.agreements) / static_cast<double>(s.trials);
  return s;
}

Inference infer_decision(const BlockStats& stats, double threshold) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw DomainError("inference threshold must lie in (0.5, 1]");
  }
  if (stats.trials < 1) throw DomainError("block must contain at least one trial");
  const double margin = threshold - 0.5;
  return {stats.agreement_rate >= threshold,
          std::exp(-2.0 * static_cast<double>(stats.trials) * margin * margin)};
}

SignalingReport signaling_experiment(const ProtocolConfig& config, const GhzSource& source,
                                     InfluenceModel model, const std::vector<bool>& decisions,
                                     std::uint64_t seed, double threshold) {
  config.validate();
  check_model_source(source, model);
  if (decisions.empty()) throw DomainError("signaling experiment needs at least one block");

  SignalingReport report;
  report.blocks.reserve(decisions.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    Stream rng = derive_substream(seed, i);
    BlockOutcome b;
    b.decision = decisions[i];
    b.stats = run_block(config, source, model, b.decision, rng);
    const Inference inf = infer_decision(b.stats, threshold);
    b.inferred = inf.inferred;
    b.correct = b.inferred == b.decision;
    report.error_bound = inf.error_bound;
    correct += b.correct;
    report.blocks.push_back(b);
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(decisions.size());
  return report;
}

double expected_agreement_rate(const ProtocolConfig& config, const GhzSource& source,
                               InfluenceModel model, bool alice_decision) {
  check_model_source(source, model);
  double entangled_rate = 0.5;
  if (model == InfluenceModel::AgreementVariant || (alice_decision && reachable(config))) {
    entangled_rate = 1.0;
  }
  return source.p * entangled_rate + (1.0 - source.p);
}

}  // namespace vcausal::protocol
