#include "spdlab/stats.hpp"

#include <cmath>
#include <limits>

namespace spdlab {

namespace {
constexpr double kUndirected = 1e-12;
}

void ScalarAccumulator::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void ScalarAccumulator::merge(const ScalarAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += o.m2_ + delta * delta * (na * nb / n);
  n_ += o.n_;
}

double ScalarAccumulator::mean() const {
  require(n_ > 0, "mean of an empty sample");
  return mean_;
}

double ScalarAccumulator::stddev() const {
  require(n_ > 1, "standard deviation needs at least two samples");
  return std::sqrt(std::max(0.0, m2_) / static_cast<double>(n_ - 1));
}

double ScalarAccumulator::standard_error() const {
  return stddev() / std::sqrt(static_cast<double>(n_));
}

void DirectionAccumulator::add(const Vec& unit) {
  ++n_;
  const Vec delta = unit - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta.dot(unit - mean_);
}

void DirectionAccumulator::merge(const DirectionAccumulator& o) {
  undirected_ += o.undirected_;
  if (o.n_ == 0) return;
  if (n_ == 0) {
    const std::size_t u = undirected_;
    *this = o;
    undirected_ = u;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const Vec delta = o.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += o.m2_ + delta.squaredNorm() * (na * nb / n);
  n_ += o.n_;
}

bool DirectionAccumulator::has_direction() const {
  return n_ > 0 && mean_.norm() >= kUndirected;
}

Vec DirectionAccumulator::mean_direction() const {
  if (!has_direction()) return Vec::Zero(mean_.size());
  return mean_.normalized();
}

double DirectionAccumulator::resultant_length() const {
  if (n_ == 0) return 0.0;
  return std::sqrt(std::max(0.0, 1.0 - m2_ / static_cast<double>(n_)));
}

double DirectionAccumulator::circular_std() const {
  if (!has_direction()) return std::numeric_limits<double>::infinity();
  const double one_minus_l2 = std::max(0.0, m2_ / static_cast<double>(n_));
  if (one_minus_l2 >= 1.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(-std::log1p(-one_minus_l2));
}

double mc_mean(std::span<const double> values) {
  require(!values.empty(), "mean of an empty sample");
  ScalarAccumulator acc;
  for (double v : values) acc.add(v);
  return acc.mean();
}

double mc_std(std::span<const double> values) {
  require(values.size() >= 2, "standard deviation needs at least two samples");
  const double mean = mc_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

CircularMean circular_mean(std::span<const Vec> vectors) {
  require(!vectors.empty(), "circular mean of an empty sample");
  const Eigen::Index d = vectors.front().size();
  Vec sum = Vec::Zero(d);
  for (const Vec& v : vectors) {
    require(v.size() == d, "direction dimension mismatch");
    require(std::abs(v.norm() - 1.0) <= 1e-10, "direction samples must be unit vectors");
    sum += v;
  }
  CircularMean out;
  out.resultant = std::min(1.0, sum.norm() / static_cast<double>(vectors.size()));
  out.undirected = out.resultant < kUndirected;
  out.direction = out.undirected ? Vec::Zero(d) : Vec(sum.normalized());
  return out;
}

double circular_std(double resultant) {
  require(!(resultant > 1.0), "resultant length cannot exceed one");
  if (!(resultant > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(-2.0 * std::log(resultant));
}

}  // namespace spdlab
