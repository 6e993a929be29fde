#pragma once

// 1+1 dimensional Lorentz kinematics in natural units (c = 1) and the
// superluminal round-trip construction used to test for causal paradoxes.
//
// Frame S is the privileged frame; S' moves with speed v along +x and shares
// its origin with S at t = t' = 0. Everything is templated on the scalar type;
// the rest of the library instantiates it with double.

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "vcausal/errors.hpp"

namespace vcausal::kinematics {

/// Absolute tolerance for algebraic identities and the composition pole.
inline constexpr double kIdentityTolerance = 1e-12;

enum class Frame { Privileged, Moving };

inline const char* to_string(Frame f) {
  return f == Frame::Privileged ? "S" : "S'";
}

template <typename Scalar>
using Coords = Eigen::Matrix<Scalar, 2, 1>;  // (x, t)

template <typename Scalar>
using BoostMatrix = Eigen::Matrix<Scalar, 2, 2>;

/// A spacetime point tagged with the frame its coordinates refer to.
template <typename Scalar>
struct Event {
  Coords<Scalar> coords = Coords<Scalar>::Zero();
  Frame frame = Frame::Privileged;

  Event() = default;
  Event(Scalar x, Scalar t, Frame f) : coords(x, t), frame(f) {}
  Event(const Coords<Scalar>& c, Frame f) : coords(c), frame(f) {}

  Scalar x() const { return coords(0); }
  Scalar t() const { return coords(1); }

  /// t^2 - x^2, the invariant interval from the shared origin.
  Scalar interval() const { return (t() - x()) * (t() + x()); }
};

using Eventd = Event<double>;

namespace detail {

template <typename Scalar>
void require_frame_speed(Scalar v) {
  using std::abs;
  using std::isfinite;
  if (!isfinite(v) || !(abs(v) < Scalar(1))) {
    throw DomainError("frame speed must satisfy |v| < 1, got v = " +
                      std::to_string(static_cast<double>(v)));
  }
}

template <typename Scalar>
void require_signal_speed(Scalar ubar) {
  using std::isfinite;
  if (!isfinite(ubar) || !(ubar > Scalar(1))) {
    throw DomainError("superluminal signal speed must satisfy ubar > 1, got ubar = " +
                      std::to_string(static_cast<double>(ubar)));
  }
}

template <typename Scalar>
void require_finite(const Event<Scalar>& e) {
  if (!e.coords.allFinite()) throw DomainError("event coordinates must be finite");
}

}  // namespace detail

/// Lorentz factor 1/sqrt(1 - v^2); throws DomainError for |v| >= 1.
template <typename Scalar>
Scalar lorentz_factor(Scalar v) {
  using std::sqrt;
  detail::require_frame_speed(v);
  return Scalar(1) / sqrt(Scalar(1) - v * v);
}

/// Matrix taking S coordinates (x, t) to S' coordinates for a frame moving
/// with speed v. The inverse is boost_matrix(-v).
template <typename Scalar>
BoostMatrix<Scalar> boost_matrix(Scalar v) {
  const Scalar g = lorentz_factor(v);
  BoostMatrix<Scalar> m;
  m << g, -g * v,
       -g * v, g;
  return m;
}

template <typename Scalar>
Event<Scalar> boost_to_prime(const Event<Scalar>& e, Scalar v) {
  detail::require_frame_speed(v);
  if (e.frame != Frame::Privileged) {
    throw FrameMismatch("boost_to_prime expects an event in S, got one in S'");
  }
  detail::require_finite(e);
  return {boost_matrix(v) * e.coords, Frame::Moving};
}

template <typename Scalar>
Event<Scalar> boost_from_prime(const Event<Scalar>& e, Scalar v) {
  detail::require_frame_speed(v);
  if (e.frame != Frame::Moving) {
    throw FrameMismatch("boost_from_prime expects an event in S', got one in S");
  }
  detail::require_finite(e);
  return {boost_matrix(Scalar(-v)) * e.coords, Frame::Privileged};
}

/// Speed in S' of an object moving with speed u in S: (u - v)/(1 - v u).
template <typename Scalar>
Scalar compose_velocity_to_prime(Scalar u, Scalar v) {
  using std::abs;
  detail::require_frame_speed(v);
  const Scalar denom = Scalar(1) - v * u;
  if (abs(denom) < Scalar(kIdentityTolerance)) {
    throw CompositionSingularity("velocity composition diverges at v*u = 1");
  }
  return (u - v) / denom;
}

/// Speed in S of an object moving with speed u' in S': (u' + v)/(1 + v u').
template <typename Scalar>
Scalar compose_velocity_from_prime(Scalar u_prime, Scalar v) {
  using std::abs;
  detail::require_frame_speed(v);
  const Scalar denom = Scalar(1) + v * u_prime;
  if (abs(denom) < Scalar(kIdentityTolerance)) {
    throw CompositionSingularity("velocity composition diverges at v*u' = -1");
  }
  return (u_prime + v) / denom;
}

/// Time in S at which a signal sent from the origin at t = 0 with speed ubar reaches x1.
template <typename Scalar>
Scalar signal_arrival_time(Scalar x1, Scalar ubar) {
  using std::isfinite;
  if (!isfinite(x1) || !(x1 > Scalar(0))) throw DomainError("target position x1 must be > 0");
  detail::require_signal_speed(ubar);
  return x1 / ubar;
}

enum class Regime {
  SpecialRelativity,  // return signal leaves at -ubar in S'
  PreferredFrame,     // return signal leaves at -ubar in S
};

inline const char* to_string(Regime r) {
  return r == Regime::SpecialRelativity ? "sr" : "preferred";
}

template <typename Scalar>
struct RoundTripScenario {
  Scalar x1{1};
  Scalar v{0};
  Scalar ubar{2};
  Regime regime = Regime::SpecialRelativity;

  void validate() const {
    using std::isfinite;
    if (!isfinite(x1) || !(x1 > Scalar(0))) throw DomainError("target position x1 must be > 0");
    if (!isfinite(v) || !(v > Scalar(0) && v < Scalar(1))) {
      throw DomainError("frame speed must satisfy 0 < v < 1");
    }
    detail::require_signal_speed(ubar);
  }
};

/// Derivation trace of the round trip. Times and positions are in frame S'
/// except t1, which is the outbound arrival time in S.
template <typename Scalar>
struct ParadoxReport {
  Scalar t1{};
  Scalar t1_prime{};
  Scalar x1_prime{};
  Scalar return_speed{};  // speed of the return signal as seen in S'
  Scalar delta_t_prime{};
  Scalar total{};  // t1' + delta t'; the return reaches the S' origin at this t'
  bool paradox = false;
};

/// Outbound signal x = 0 -> x1 at speed ubar in S; an observer at rest in S'
/// at the arrival point answers with a return signal toward the S' origin.
/// A paradox is reported when the answer arrives before t' = 0 (strictly).
template <typename Scalar>
ParadoxReport<Scalar> run_round_trip(const RoundTripScenario<Scalar>& s) {
  s.validate();
  const Scalar g = lorentz_factor(s.v);
  ParadoxReport<Scalar> r;
  r.t1 = signal_arrival_time(s.x1, s.ubar);
  r.t1_prime = g * (Scalar(1) - s.v * s.ubar) * s.x1 / s.ubar;
  r.x1_prime = g * (Scalar(1) - s.v / s.ubar) * s.x1;
  if (s.regime == Regime::SpecialRelativity) {
    r.return_speed = -s.ubar;
    r.delta_t_prime = r.x1_prime / s.ubar;
    // Same sum with the two (1 - ...) terms collected, so that a threshold
    // speed representable in binary lands on total == 0.
    r.total = g * (s.x1 / s.ubar) * (Scalar(2) - s.v * (s.ubar + Scalar(1) / s.ubar));
  } else {
    r.return_speed = (-s.ubar - s.v) / (Scalar(1) + s.v * s.ubar);
    r.delta_t_prime = r.x1_prime / (-r.return_speed);
    r.total = r.t1_prime + r.delta_t_prime;
  }
  r.paradox = r.total < Scalar(0);
  return r;
}

/// Frame speed above which the special-relativistic round trip closes into
/// the past: 2 ubar / (1 + ubar^2). Strictly below 1 for every ubar > 1.
template <typename Scalar>
Scalar paradox_threshold(Scalar ubar) {
  detail::require_signal_speed(ubar);
  return Scalar(2) * ubar / (Scalar(1) + ubar * ubar);
}

}  // namespace vcausal::kinematics
