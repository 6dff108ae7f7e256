// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace snapnet {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Single tolerance knob for algebraic predicates. Residuals are compared
// against `algebraic` after inputs have been normalized to unit max
// coordinate, so the value is an absolute bound on a dimensionless number.
struct Tolerances {
  double algebraic = 1e-9;
  double geometric = 1e-9;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SNAPNET_DEFINE_ERROR(Name)      \
  struct Name : Error {                 \
    using Error::Error;                 \
  }

SNAPNET_DEFINE_ERROR(DegeneratePose);
SNAPNET_DEFINE_ERROR(NotARotation);
SNAPNET_DEFINE_ERROR(CoincidentAxes);
SNAPNET_DEFINE_ERROR(NoRealSolution);
SNAPNET_DEFINE_ERROR(RankDeficient);
SNAPNET_DEFINE_ERROR(ConstructionFailed);
SNAPNET_DEFINE_ERROR(DegenerateFace);
SNAPNET_DEFINE_ERROR(Inconclusive);
SNAPNET_DEFINE_ERROR(SingularVertex);
SNAPNET_DEFINE_ERROR(ProjectionDegenerate);
SNAPNET_DEFINE_ERROR(InconsistentDual);
SNAPNET_DEFINE_ERROR(NonParallelSeed);
SNAPNET_DEFINE_ERROR(NotKoenigs);
SNAPNET_DEFINE_ERROR(NotIsometric);
SNAPNET_DEFINE_ERROR(WindowTooSmall);
SNAPNET_DEFINE_ERROR(NotCongruent);
SNAPNET_DEFINE_ERROR(IndexOutOfWindow);
SNAPNET_DEFINE_ERROR(DegenerateAxis);
SNAPNET_DEFINE_ERROR(ClosureFailed);
SNAPNET_DEFINE_ERROR(ParallelPlaneAxis);
SNAPNET_DEFINE_ERROR(PointsOffAxis);

#undef SNAPNET_DEFINE_ERROR

// All randomness flows through one seeded generator. Distribution helpers are
// hand-rolled so a given seed produces the same stream on every platform.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Box-Muller; one value per call keeps the stream layout obvious.
inline double gauss(Rng& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  while (u1 <= 1e-300) u1 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

inline Vec3 gauss_vec3(Rng& rng) {
  const double x = gauss(rng);
  const double y = gauss(rng);
  const double z = gauss(rng);
  return Vec3(x, y, z);
}

// SplitMix64 step, used to derive independent sub-seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace snapnet
