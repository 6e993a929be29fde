#pragma once

// Two-photon polarization experiment with a time-like detection order:
// photon nu1 always reaches polarizer I first, its outcome fixes the state of
// nu2, and nu2 is then analysed at polarizer II by Malus' law.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "vcausal/random.hpp"

namespace vcausal::optics {

/// Polarization direction, canonicalised into [0, pi).
class PolarizationAngle {
 public:
  PolarizationAngle() = default;

  static PolarizationAngle radians(double theta) { return PolarizationAngle(canonical(theta)); }
  static PolarizationAngle degrees(double deg) {
    return radians(deg * std::numbers::pi / 180.0);
  }

  double radians() const { return theta_; }
  double degrees() const { return theta_ * 180.0 / std::numbers::pi; }

  PolarizationAngle orthogonal() const { return radians(theta_ + std::numbers::pi / 2); }

  /// Real Jones vector (cos theta, sin theta).
  Eigen::Vector2d jones() const { return {std::cos(theta_), std::sin(theta_)}; }

  friend bool operator==(PolarizationAngle, PolarizationAngle) = default;

 private:
  explicit PolarizationAngle(double theta) : theta_(theta) {}

  static double canonical(double theta) {
    double r = std::fmod(theta, std::numbers::pi);
    if (r < 0) r += std::numbers::pi;
    if (r >= std::numbers::pi) r = 0;  // rounding of tiny negatives, and exact pi
    return r;
  }

  double theta_ = 0;
};

enum class Channel { Transmitted, Reflected };

inline const char* to_string(Channel c) { return c == Channel::Transmitted ? "T" : "R"; }

/// Either the rotationally symmetric entangled pair, or a classical mixture
/// emitting both photons along axis or both along axis + pi/2.
struct PairSource {
  enum class Kind { Entangled, Mixture };

  Kind kind = Kind::Entangled;
  PolarizationAngle axis{};

  static PairSource entangled() { return {}; }
  static PairSource mixture(PolarizationAngle axis) { return {Kind::Mixture, axis}; }
};

enum class Photon { Nu1, Nu2 };

struct DetectionRecord {
  Photon photon = Photon::Nu1;
  PolarizationAngle analyzer{};
  Channel outcome = Channel::Transmitted;
  int order_index = 0;
};

struct Collapse {
  Channel outcome = Channel::Transmitted;
  PolarizationAngle partner{};
};

/// cos^2 of the angle between the two polarization directions.
template <typename Scalar = double>
Scalar malus_probability(PolarizationAngle partner, PolarizationAngle analyzer) {
  const Scalar overlap = static_cast<Scalar>(partner.jones().dot(analyzer.jones()));
  return overlap * overlap;
}

/// Detect nu1 at polarizer I oriented along alpha and return the state nu2
/// is left in.
Collapse collapse_first(const PairSource& source, PolarizationAngle alpha, Stream& rng);

/// Full time-ordered detection: nu1 at alpha (order 0), then nu2 at beta (order 1).
std::array<DetectionRecord, 2> detect_pair(const PairSource& source, PolarizationAngle alpha,
                                           PolarizationAngle beta, Stream& rng);

/// Closed-form probability of the outcome pair (nu1 at alpha, nu2 at beta).
double joint_probability(PolarizationAngle alpha, PolarizationAngle beta, Channel first,
                         Channel second, const PairSource& source);

/// Closed-form correlation P(same) - P(different).
double correlation(PolarizationAngle alpha, PolarizationAngle beta, const PairSource& source);

struct ChshSettings {
  PolarizationAngle a, a_prime, b, b_prime;

  /// (0, 45, 22.5, 67.5) degrees, the maximiser for the entangled pair.
  static ChshSettings optimal() {
    return {PolarizationAngle::degrees(0), PolarizationAngle::degrees(45),
            PolarizationAngle::degrees(22.5), PolarizationAngle::degrees(67.5)};
  }
};

struct ChshEstimate {
  double s = 0;
  double std_error = 0;
  // E(a,b), E(a,b'), E(a',b), E(a',b')
  std::array<double, 4> correlators{};
  std::uint64_t trials_per_correlator = 0;
};

inline constexpr std::uint64_t kMinChshTrials = 1000;

/// Monte Carlo CHSH value |E(a,b) - E(a,b') + E(a',b) + E(a',b')|, each
/// correlator estimated from `trials` sampled pairs. Correlator k draws from
/// derive_substream(seed, k).
ChshEstimate chsh_statistic(const ChshSettings& settings, const PairSource& source,
                            std::uint64_t trials, std::uint64_t seed);

/// Closed-form counterpart of chsh_statistic.
double chsh_exact(const ChshSettings& settings, const PairSource& source);

struct MalusTally {
  std::uint64_t trials = 0;
  std::uint64_t first_transmitted = 0;   // nu1 transmitted at I
  std::uint64_t both_transmitted = 0;    // nu1 and nu2 both transmitted
  std::uint64_t second_transmitted = 0;  // nu2 transmitted, regardless of nu1

  double conditioned_rate() const {
    return first_transmitted ? double(both_transmitted) / double(first_transmitted) : 0.0;
  }
  double marginal_rate() const {
    return trials ? double(second_transmitted) / double(trials) : 0.0;
  }
};

/// Sample `trials` pairs at fixed (alpha, beta) and count the channels.
MalusTally malus_run(const PairSource& source, PolarizationAngle alpha, PolarizationAngle beta,
                     std::uint64_t trials, Stream& rng);

}  // namespace vcausal::optics
