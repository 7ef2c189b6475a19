#pragma once

#include "spdlab/stats.hpp"
#include "spdlab/stochastic.hpp"

#include <cstdint>
#include <vector>

namespace spdlab {

/// Realisations 0..n-1 of `model`, realisation i drawn from sample_rng(seed, i).
/// Identical output for any worker count.
std::vector<Spectrum> sample_spectra(const TensorModel& model, std::uint64_t seed, std::size_t n,
                                     int workers);
/// Single-threaded reference for sample_spectra.
std::vector<Spectrum> sample_spectra_serial(const TensorModel& model, std::uint64_t seed,
                                            std::size_t n);

/// Entrywise streaming mean of d x d matrices.
class MatrixAccumulator {
 public:
  explicit MatrixAccumulator(int d = 2) : d_(d), entries_(static_cast<std::size_t>(d * d)) {}

  void add(const Mat& m);
  void merge(const MatrixAccumulator& other);
  std::size_t count() const { return entries_.front().count(); }
  Mat mean() const;
  /// Entrywise standard error of the mean.
  Mat standard_error() const;

 private:
  int d_;
  std::vector<ScalarAccumulator> entries_;
};

struct MatrixMeanEstimate {
  Mat mean;
  Mat standard_error;
};

/// Arithmetic mean of R h R^T over n rotations R drawn from `orientation`
/// (rotation i from sample_rng(seed, i)).
MatrixMeanEstimate rotated_mean(const SymMat& h, const OrientationModel& orientation,
                                std::uint64_t seed, std::size_t n, int workers);
MatrixMeanEstimate rotated_mean_serial(const SymMat& h, const OrientationModel& orientation,
                                       std::uint64_t seed, std::size_t n);

}  // namespace spdlab
