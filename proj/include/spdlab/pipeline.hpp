#pragma once

#include "spdlab/config.hpp"
#include "spdlab/means.hpp"
#include "spdlab/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spdlab {

/// Ensemble mean of the sampled conductivities under one metric.
struct TensorMean {
  Metric metric;
  Mat mean;
  double frechet_variance;
};

struct McSummary {
  std::size_t n_samples = 0;
  int dim = 2;

  std::vector<double> temperature_mean;  ///< per node
  std::vector<double> temperature_std;   ///< per node

  std::vector<double> flux_norm_mean;         ///< per element
  std::vector<double> flux_norm_std;          ///< per element
  std::vector<Vec> flux_direction;            ///< per element; zero when undirected
  std::vector<double> flux_resultant;         ///< per element, L in [0, 1]
  std::vector<double> flux_circular_std;      ///< per element; +inf when undirected
  std::vector<bool> flux_undirected;          ///< no mean direction
  std::vector<std::size_t> undirected_draws;  ///< samples with a vanishing element flux

  std::vector<TensorMean> tensor_means;  ///< Frobenius, log-Euclidean, scaling-rotation
  std::optional<ScalingRotationMean> scaling_rotation;  ///< with standard errors
};

/// Mesh, model and boundary data of an experiment, validated.
struct Experiment {
  fem::Mesh mesh;
  TensorModel model;
  fem::BoundaryConditions bc;
};

Experiment build_experiment(const ExperimentConfig& cfg);

/// Monte-Carlo FEM propagation. Realisation i uses sample_rng(seed, i) and a
/// spatially constant conductivity. Output is bit-identical for every
/// worker count. Module errors are rethrown with the sample index prefixed.
McSummary run_mc(const ExperimentConfig& cfg, int workers);

/// Straight-line single-threaded reference implementation of run_mc.
McSummary run_mc_serial(const ExperimentConfig& cfg);

/// Writes nodes.csv, elements.csv and summary.json into `dir` (created if
/// missing). Column layouts are documented in schema/experiment.schema.json.
void write_outputs(const std::string& dir, const ExperimentConfig& cfg, const fem::Mesh& mesh,
                   const McSummary& summary);

}  // namespace spdlab
