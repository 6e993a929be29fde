#pragma once

// Reference computations used only by the tests. Each one reaches its answer
// by a route different from the library code it checks.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>

namespace vcausal::testing {

/// Round trip by explicit worldline intersection: the outbound arrival event
/// is boosted into S', then the return signal's worldline is intersected with
/// the S' origin's worldline. Returns t' at the S' origin when the answer arrives.
/// `preferred` selects a return speed of -ubar in S rather than in S'.
inline double round_trip_arrival_oracle(double x1, double v, double ubar, bool preferred) {
  const double g = 1.0 / std::sqrt((1.0 - v) * (1.0 + v));
  const double t1 = x1 / ubar;
  if (!preferred) {
    // Arrival event in S', then travel back over x' at speed ubar.
    const double xp = g * x1 - g * v * t1;
    const double tp = g * t1 - g * v * x1;
    return tp + xp / ubar;
  }
  // In S the return leaves (x1, t1) at -ubar and meets x = v t.
  const double t_meet = (x1 + ubar * t1) / (ubar + v);
  return t_meet / g;  // proper time of the S' origin since the shared origin
}

/// Two-photon state vectors over the basis |HH>, |HV>, |VH>, |VV>.
using PairState = Eigen::Vector4d;

inline Eigen::Vector2d linear(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline PairState tensor(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return {a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1)};
}

/// Born-rule joint probability for the pair state (|HH> + |VV>)/sqrt(2).
/// `first_t` / `second_t` select the transmitted (parallel) channel.
inline double entangled_joint_oracle(double alpha, double beta, bool first_t, bool second_t) {
  const PairState psi = PairState(1, 0, 0, 1) / std::sqrt(2.0);
  const double pi_2 = std::acos(0.0);
  const auto e1 = linear(first_t ? alpha : alpha + pi_2);
  const auto e2 = linear(second_t ? beta : beta + pi_2);
  const double amp = tensor(e1, e2).dot(psi);
  return amp * amp;
}

/// Born-rule joint probability for the equal mixture of |axis, axis> and
/// |axis+90, axis+90>, via the density matrix.
inline double mixture_joint_oracle(double axis, double alpha, double beta, bool first_t,
                                   bool second_t) {
  const double pi_2 = std::acos(0.0);
  const PairState a = tensor(linear(axis), linear(axis));
  const PairState b = tensor(linear(axis + pi_2), linear(axis + pi_2));
  const Eigen::Matrix4d rho = 0.5 * a * a.transpose() + 0.5 * b * b.transpose();
  const PairState proj =
      tensor(linear(first_t ? alpha : alpha + pi_2), linear(second_t ? beta : beta + pi_2));
  return proj.dot(rho * proj);
}

}  // namespace vcausal::testing
