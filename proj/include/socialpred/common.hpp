#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace socialpred {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SOCIALPRED_ERROR(Name) \
  struct Name : Error {        \
    using Error::Error;        \
  }

SOCIALPRED_ERROR(DegenerateGaze);
SOCIALPRED_ERROR(ParallelGazes);
SOCIALPRED_ERROR(GridMismatch);
SOCIALPRED_ERROR(NonDivisibleFactor);
SOCIALPRED_ERROR(ShapeMismatch);
SOCIALPRED_ERROR(NonFiniteLoss);
SOCIALPRED_ERROR(EmptyFrame);
SOCIALPRED_ERROR(DegenerateCollinear);
SOCIALPRED_ERROR(NoPairs);
SOCIALPRED_ERROR(LengthMismatch);
SOCIALPRED_ERROR(EmptySlice);
SOCIALPRED_ERROR(TooLarge);
SOCIALPRED_ERROR(HorizonExceedsData);
SOCIALPRED_ERROR(InvalidConfig);
SOCIALPRED_ERROR(VersionMismatch);
SOCIALPRED_ERROR(HashMismatch);
SOCIALPRED_ERROR(Corrupt);
SOCIALPRED_ERROR(InvalidArgument);

#undef SOCIALPRED_ERROR

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) {
  double r = wrap_two_pi(a);
  if (r > kPi) r -= kTwoPi;
  return r;
}

/// Circular distance between two angles, in [0, pi].
inline double circular_diff(double a, double b) {
  double d = std::fabs(wrap_two_pi(a) - wrap_two_pi(b));
  return std::min(d, kTwoPi - d);
}

inline double angle_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }

inline Vec2 unit_from_angle(double a) { return Vec2(std::cos(a), std::sin(a)); }

inline Vec2 rotate(const Vec2& v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

/// Basketball court, corner at the origin, axes aligned with the sidelines.
/// x spans the width, y the length. Defaults are 50 ft x 94 ft in meters.
struct Court {
  double width = 15.24;
  double length = 28.65;

  bool contains(const Vec2& p, double margin = 0.0) const {
    return p.x() >= -margin && p.x() <= width + margin && p.y() >= -margin &&
           p.y() <= length + margin;
  }
  Vec2 clamp(const Vec2& p, double margin = 0.0) const {
    return Vec2(std::clamp(p.x(), -margin, width + margin),
                std::clamp(p.y(), -margin, length + margin));
  }
  Vec2 center() const { return Vec2(width / 2.0, length / 2.0); }
};

/// Location, gaze and instantaneous velocity of one agent at one instant.
struct PlayerState {
  Vec2 position{0.0, 0.0};
  Vec2 gaze{1.0, 0.0};
  Vec2 velocity{0.0, 0.0};
  int player_id = -1;

  void validate(const Court& court) const {
    if (std::fabs(gaze.norm() - 1.0) > 1e-9)
      throw InvalidArgument("PlayerState: gaze is not unit length");
    if (!court.contains(position, 3.0))
      throw InvalidArgument("PlayerState: position outside court + 3 m margin");
  }
};

/// All players at one instant, with the ground-truth attention point when known.
struct FrameState {
  double timestamp = 0.0;
  std::vector<PlayerState> players;
  std::optional<Vec2> attention;

  void validate() const {
    for (size_t i = 0; i < players.size(); ++i)
      for (size_t j = i + 1; j < players.size(); ++j)
        if (players[i].player_id == players[j].player_id)
          throw InvalidArgument("FrameState: duplicate player id");
  }
};

/// Fixed-rate (location, gaze) sequence for one agent.
struct Trajectory {
  struct Sample {
    Vec2 position{0.0, 0.0};
    Vec2 gaze{1.0, 0.0};
  };

  int player_id = -1;
  double start_time = 0.0;
  double dt = 0.1;
  std::vector<Sample> samples;

  size_t size() const { return samples.size(); }

  void validate() const {
    if (samples.empty()) throw InvalidArgument("Trajectory: empty");
    for (const auto& s : samples)
      if (std::fabs(s.gaze.norm() - 1.0) > 1e-9)
        throw InvalidArgument("Trajectory: gaze is not unit length");
  }

  /// New trajectory with every sample translated so the first lands on `start`.
  Trajectory anchored_at(const Vec2& start) const {
    Trajectory out = *this;
    if (!samples.empty()) {
      const Vec2 shift = start - samples.front().position;
      for (auto& s : out.samples) s.position += shift;
    }
    return out;
  }
};

/// Deterministic random source. Gaussians use Box-Muller on top of the
/// raw engine so streams do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  uint64_t next_u64() {
    // xorshift* generator; small state keeps copies cheap.
    uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  /// Uniform in (0, 1].
  double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    if (n <= 0) throw InvalidArgument("Rng::uniform_int: n <= 0");
    const uint64_t un = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  uint64_t state_;
};

template <typename T>
void shuffle_inplace(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(static_cast<int>(i)));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace socialpred
