#include "vcausal/optics.hpp"

#include <cmath>
#include <string>

#include "vcausal/errors.hpp"

namespace vcausal::optics {

namespace {

double channel_probability(PolarizationAngle state, PolarizationAngle analyzer, Channel c) {
  const double t = malus_probability(state, analyzer);
  return c == Channel::Transmitted ? t : 1.0 - t;
}

Channel draw_channel(PolarizationAngle state, PolarizationAngle analyzer, Stream& rng) {
  return bernoulli(rng, malus_probability(state, analyzer)) ? Channel::Transmitted
                                                            : Channel::Reflected;
}

}  // namespace

Collapse collapse_first(const PairSource& source, PolarizationAngle alpha, Stream& rng) {
  if (source.kind == PairSource::Kind::Entangled) {
    const Channel c = fair_bit(rng) ? Channel::Transmitted : Channel::Reflected;
    return {c, c == Channel::Transmitted ? alpha : alpha.orthogonal()};
  }
  // Mixture: the pair already carries a definite polarization lambda and the
  // partner keeps it whatever happens at polarizer I.
  const PolarizationAngle lambda = fair_bit(rng) ? source.axis : source.axis.orthogonal();
  return {draw_channel(lambda, alpha, rng), lambda};
}

std::array<DetectionRecord, 2> detect_pair(const PairSource& source, PolarizationAngle alpha,
                                           PolarizationAngle beta, Stream& rng) {
  const Collapse first = collapse_first(source, alpha, rng);
  const Channel second = draw_channel(first.partner, beta, rng);
  return {DetectionRecord{Photon::Nu1, alpha, first.outcome, 0},
          DetectionRecord{Photon::Nu2, beta, second, 1}};
}

double joint_probability(PolarizationAngle alpha, PolarizationAngle beta, Channel first,
                         Channel second, const PairSource& source) {
  if (source.kind == PairSource::Kind::Entangled) {
    const double c2 = malus_probability(alpha, beta);
    return first == second ? 0.5 * c2 : 0.5 * (1.0 - c2);
  }
  double p = 0;
  for (PolarizationAngle lambda : {source.axis, source.axis.orthogonal()}) {
    p += 0.5 * channel_probability(lambda, alpha, first) *
         channel_probability(lambda, beta, second);
  }
  return p;
}

double correlation(PolarizationAngle alpha, PolarizationAngle beta, const PairSource& source) {
  constexpr Channel T = Channel::Transmitted, R = Channel::Reflected;
  return joint_probability(alpha, beta, T, T, source) + joint_probability(alpha, beta, R, R, source) -
         joint_probability(alpha, beta, T, R, source) - joint_probability(alpha, beta, R, T, source);
}

double chsh_exact(const ChshSettings& st, const PairSource& source) {
  return std::abs(correlation(st.a, st.b, source) - correlation(st.a, st.b_prime, source) +
                  correlation(st.a_prime, st.b, source) +
                  correlation(st.a_prime, st.b_prime, source));
}

ChshEstimate chsh_statistic(const ChshSettings& st, const PairSource& source,
                            std::uint64_t trials, std::uint64_t seed) {
  if (trials < kMinChshTrials) {
    throw DomainError("CHSH estimate needs at least " + std::to_string(kMinChshTrials) +
                      " trials per correlator");
  }
  const std::array<std::array<PolarizationAngle, 2>, 4> pairs{{
      {st.a, st.b}, {st.a, st.b_prime}, {st.a_prime, st.b}, {st.a_prime, st.b_prime}}};
  constexpr std::array<double, 4> sign{1, -1, 1, 1};

  ChshEstimate out;
  out.trials_per_correlator = trials;
  double sum = 0, variance = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    Stream rng = derive_substream(seed, k);
    std::uint64_t same = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const auto rec = detect_pair(source, pairs[k][0], pairs[k][1], rng);
      same += rec[0].outcome == rec[1].outcome;
    }
    const double n = static_cast<double>(trials);
    const double e = (2.0 * static_cast<double>(same) - n) / n;
    out.correlators[k] = e;
    sum += sign[k] * e;
    // E = 2q - 1 with q binomial, so Var(E) = (1 - E^2)/n.
    variance += (1.0 - e * e) / n;
  }
  out.s = std::abs(sum);
  out.std_error = std::sqrt(variance);
  return out;
}

MalusTally malus_run(const PairSource& source, PolarizationAngle alpha, PolarizationAngle beta,
                     std::uint64_t trials, Stream& rng) {
  MalusTally tally;
  tally.trials = trials;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const auto rec = detect_pair(source, alpha, beta, rng);
    const bool t1 = rec[0].outcome == Channel::Transmitted;
    const bool t2 = rec[1].outcome == Channel::Transmitted;
    tally.first_transmitted += t1;
    tally.second_transmitted += t2;
    tally.both_transmitted += t1 && t2;
  }
  return tally;
}

}  // namespace vcausal::optics
