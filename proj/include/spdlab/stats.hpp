#pragma once

#include "spdlab/core.hpp"

#include <cstddef>
#include <span>

namespace spdlab {

/// Single-pass mean / corrected variance (Welford), mergeable (Chan et al.).
class ScalarAccumulator {
 public:
  void add(double x);
  void merge(const ScalarAccumulator& other);

  std::size_t count() const { return n_; }
  double mean() const;
  /// Corrected sample standard deviation, divisor N - 1.
  double stddev() const;
  /// Standard error of the mean, stddev / sqrt(N).
  double standard_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Streaming circular statistics of unit vectors.
///
/// Tracks the mean vector m and M2 = sum ||v - m||^2. For unit vectors
/// 1 - L^2 = M2 / N, which gives L and sqrt(-2 log L) without the
/// cancellation of 1 - ||m|| near L = 1. Undirected samples (zero vectors)
/// are counted separately and excluded.
class DirectionAccumulator {
 public:
  explicit DirectionAccumulator(int d = 2) : mean_(Vec::Zero(d)) {}

  void add(const Vec& unit);
  void add_undirected() { ++undirected_; }
  void merge(const DirectionAccumulator& other);

  std::size_t count() const { return n_; }
  std::size_t undirected() const { return undirected_; }
  /// False when no directed samples were seen or the resultant vanishes.
  bool has_direction() const;
  Vec mean_direction() const;
  double resultant_length() const;
  double circular_std() const;

 private:
  std::size_t n_ = 0;
  std::size_t undirected_ = 0;
  Vec mean_;
  double m2_ = 0.0;
};

double mc_mean(std::span<const double> values);
/// Corrected sample standard deviation; needs at least two values.
double mc_std(std::span<const double> values);

struct CircularMean {
  Vec direction;          ///< normalized resultant; zero when undirected
  double resultant = 0;   ///< L = ||sum v|| / N in [0, 1]
  bool undirected = false;
};

/// Batch resultant of unit vectors (each ||v|| = 1 to 1e-10).
CircularMean circular_mean(std::span<const Vec> vectors);

/// sqrt(-2 log L); +infinity for L <= 0. Rejects L > 1.
double circular_std(double resultant);

}  // namespace spdlab
