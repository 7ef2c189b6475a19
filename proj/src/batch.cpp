#include "spdlab/batch.hpp"

#include "spdlab/parallel.hpp"

#include <optional>

namespace spdlab {

std::vector<Spectrum> sample_spectra(const TensorModel& model, std::uint64_t seed, std::size_t n,
                                     int workers) {
  std::vector<std::optional<Spectrum>> slots(n);
  parallel_fill(slots, workers, [&](std::size_t i) {
    Rng rng = sample_rng(seed, i);
    return std::optional<Spectrum>(sample_spectrum(model, rng));
  });
  std::vector<Spectrum> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<Spectrum> sample_spectra_serial(const TensorModel& model, std::uint64_t seed,
                                            std::size_t n) {
  std::vector<Spectrum> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = sample_rng(seed, i);
    out.push_back(sample_spectrum(model, rng));
  }
  return out;
}

void MatrixAccumulator::add(const Mat& m) {
  for (int j = 0; j < d_; ++j) {
    for (int i = 0; i < d_; ++i) entries_[j * d_ + i].add(m(i, j));
  }
}

void MatrixAccumulator::merge(const MatrixAccumulator& other) {
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k].merge(other.entries_[k]);
}

Mat MatrixAccumulator::mean() const {
  Mat m(d_, d_);
  for (int j = 0; j < d_; ++j) {
    for (int i = 0; i < d_; ++i) m(i, j) = entries_[j * d_ + i].mean();
  }
  return m;
}

Mat MatrixAccumulator::standard_error() const {
  Mat m(d_, d_);
  for (int j = 0; j < d_; ++j) {
    for (int i = 0; i < d_; ++i) m(i, j) = entries_[j * d_ + i].standard_error();
  }
  return m;
}

namespace {

void check_rotated_mean_args(const SymMat& h, const OrientationModel& orientation,
                             std::size_t n) {
  orientation.validate();
  require(h.dim() == orientation.dim, "orientation model dimension mismatch");
  require(n >= 2, "rotated mean needs at least two samples");
}

Mat rotated_sample(const SymMat& h, const OrientationModel& orientation, std::uint64_t seed,
                   std::size_t i) {
  Rng rng = sample_rng(seed, i);
  return h.congruence(sample_rotation(orientation, rng).matrix()).matrix();
}

}  // namespace

MatrixMeanEstimate rotated_mean(const SymMat& h, const OrientationModel& orientation,
                                std::uint64_t seed, std::size_t n, int workers) {
  check_rotated_mean_args(h, orientation, n);
  const int d = h.dim();
  struct NoWorkspace {};
  const MatrixAccumulator acc = ordered_reduce<MatrixAccumulator, NoWorkspace>(
      n, workers, [d] { return MatrixAccumulator(d); },
      [&](MatrixAccumulator& a, NoWorkspace&, std::size_t i) {
        a.add(rotated_sample(h, orientation, seed, i));
      });
  return {acc.mean(), acc.standard_error()};
}

MatrixMeanEstimate rotated_mean_serial(const SymMat& h, const OrientationModel& orientation,
                                       std::uint64_t seed, std::size_t n) {
  check_rotated_mean_args(h, orientation, n);
  MatrixAccumulator acc(h.dim());
  for (std::size_t i = 0; i < n; ++i) acc.add(rotated_sample(h, orientation, seed, i));
  return {acc.mean(), acc.standard_error()};
}

}  // namespace spdlab
