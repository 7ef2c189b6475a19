#include "spdlab/pipeline.hpp"

#include "spdlab/batch.hpp"
#include "spdlab/parallel.hpp"
#include "spdlab/stats.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace spdlab {

namespace {

class FieldAccumulator {
 public:
  FieldAccumulator(std::size_t nodes, std::size_t elements, int d)
      : temperature(nodes), flux_norm(elements), flux_dir(elements, DirectionAccumulator(d)),
        undirected(elements, 0) {}

  void add(const fem::TemperatureField& t, const fem::FluxField& q) {
    for (std::size_t i = 0; i < temperature.size(); ++i) {
      temperature[i].add(t.values(static_cast<Eigen::Index>(i)));
    }
    for (std::size_t e = 0; e < flux_norm.size(); ++e) {
      flux_norm[e].add(q.magnitude[e]);
      if (q.undirected[e]) {
        flux_dir[e].add_undirected();
        ++undirected[e];
      } else {
        flux_dir[e].add(q.direction[e]);
      }
    }
  }

  void merge(const FieldAccumulator& o) {
    for (std::size_t i = 0; i < temperature.size(); ++i) temperature[i].merge(o.temperature[i]);
    for (std::size_t e = 0; e < flux_norm.size(); ++e) {
      flux_norm[e].merge(o.flux_norm[e]);
      flux_dir[e].merge(o.flux_dir[e]);
      undirected[e] += o.undirected[e];
    }
  }

  std::vector<ScalarAccumulator> temperature;
  std::vector<ScalarAccumulator> flux_norm;
  std::vector<DirectionAccumulator> flux_dir;
  std::vector<std::size_t> undirected;
};

std::string sample_prefix(std::size_t i) { return "sample " + std::to_string(i) + ": "; }

/// One realisation: solve with the spatially constant kappa of `s`.
void accumulate(FieldAccumulator& acc, fem::ConductionSolver& solver, const Experiment& ex,
                const Spectrum& s, std::size_t i) {
  try {
    const SpdMat kappa = s.reconstruct();
    const std::span<const SpdMat> k(&kappa, 1);
    const fem::LinearSystem sys = fem::assemble(ex.mesh, k, ex.bc);
    const fem::TemperatureField t = solver.solve(sys);
    acc.add(t, fem::heat_flux(ex.mesh, t, k));
  } catch (const ValidationError& e) {
    throw ValidationError(sample_prefix(i) + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(sample_prefix(i) + e.what());
  }
}

McSummary summarize(const ExperimentConfig& cfg, const Experiment& ex,
                    const std::vector<Spectrum>& samples, const FieldAccumulator& acc) {
  McSummary out;
  out.n_samples = samples.size();
  out.dim = ex.mesh.dim;
  for (const ScalarAccumulator& a : acc.temperature) {
    out.temperature_mean.push_back(a.mean());
    out.temperature_std.push_back(a.stddev());
  }
  for (std::size_t e = 0; e < acc.flux_norm.size(); ++e) {
    out.flux_norm_mean.push_back(acc.flux_norm[e].mean());
    out.flux_norm_std.push_back(acc.flux_norm[e].stddev());
    const DirectionAccumulator& d = acc.flux_dir[e];
    out.flux_direction.push_back(d.mean_direction());
    out.flux_resultant.push_back(d.resultant_length());
    out.flux_circular_std.push_back(d.circular_std());
    out.flux_undirected.push_back(!d.has_direction());
    out.undirected_draws.push_back(acc.undirected[e]);
  }

  const ProductWeight c(cfg.metric_weight);
  std::vector<SpdMat> tensors;
  tensors.reserve(samples.size());
  for (const Spectrum& s : samples) tensors.push_back(s.reconstruct());
  const auto ens = WeightedEnsemble<SpdMat>::uniform(tensors);

  const SpdMat euclid(mean_euclidean(ens));
  out.tensor_means.push_back(
      {Metric::Frobenius, euclid.matrix(), frechet_variance(euclid, ens, Metric::Frobenius, c)});
  const SpdMat logeuclid = mean_log_euclidean(ens);
  out.tensor_means.push_back({Metric::LogEuclidean, logeuclid.matrix(),
                              frechet_variance(logeuclid, ens, Metric::LogEuclidean, c)});
  try {
    out.scaling_rotation =
        mean_scaling_rotation_with_se(samples, ex.model.reference().spectrum(), {}, c);
  } catch (const ValidationError& e) {
    throw NumericalError(std::string("scaling-rotation mean: ") + e.what());
  }
  const SpdMat sr = out.scaling_rotation->mean.reconstruct();
  out.tensor_means.push_back(
      {Metric::ScalingRotation, sr.matrix(), frechet_variance(sr, ens, Metric::ScalingRotation, c)});
  return out;
}

}  // namespace

Experiment build_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  fem::Mesh mesh = build_mesh(cfg.mesh);
  TensorModel model = build_model(cfg.model);
  require(mesh.dim == model.dim(), "mesh dimension " + std::to_string(mesh.dim) +
                                       " does not match model dimension " +
                                       std::to_string(model.dim()));
  fem::BoundaryConditions bc = build_boundary(cfg.boundary);
  require(mesh.boundary.count(cfg.boundary.fixed_set) == 1,
          "mesh has no boundary set '" + cfg.boundary.fixed_set + "'");
  return {std::move(mesh), std::move(model), std::move(bc)};
}

McSummary run_mc(const ExperimentConfig& cfg, int workers) {
  const Experiment ex = build_experiment(cfg);
  const std::vector<Spectrum> samples = sample_spectra(ex.model, cfg.seed, cfg.n_samples, workers);
  const std::size_t nn = ex.mesh.num_nodes(), ne = ex.mesh.num_elements();
  const int d = ex.mesh.dim;
  const FieldAccumulator acc = ordered_reduce<FieldAccumulator, fem::ConductionSolver>(
      samples.size(), workers, [&] { return FieldAccumulator(nn, ne, d); },
      [&](FieldAccumulator& a, fem::ConductionSolver& solver, std::size_t i) {
        accumulate(a, solver, ex, samples[i], i);
      });
  return summarize(cfg, ex, samples, acc);
}

McSummary run_mc_serial(const ExperimentConfig& cfg) {
  const Experiment ex = build_experiment(cfg);
  const std::vector<Spectrum> samples = sample_spectra_serial(ex.model, cfg.seed, cfg.n_samples);
  FieldAccumulator acc(ex.mesh.num_nodes(), ex.mesh.num_elements(), ex.mesh.dim);
  fem::ConductionSolver solver;
  for (std::size_t i = 0; i < samples.size(); ++i) accumulate(acc, solver, ex, samples[i], i);
  return summarize(cfg, ex, samples, acc);
}

// --- output ---

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json matrix_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (int j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> vec_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ValidationError("cannot write '" + p.string() + "'");
  return os;
}

const char* axis(int k) { return k == 0 ? "x" : k == 1 ? "y" : "z"; }

}  // namespace

void write_outputs(const std::string& dir, const ExperimentConfig& cfg, const fem::Mesh& mesh,
                   const McSummary& s) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), "cannot create output directory '" + dir + "'");
  const int d = mesh.dim;

  {
    std::ofstream os = open_out(fs::path(dir) / "nodes.csv");
    os << "node";
    for (int k = 0; k < d; ++k) os << ',' << axis(k);
    os << ",temperature_mean,temperature_std\n";
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
      os << i;
      for (int k = 0; k < d; ++k) os << ',' << num(mesh.nodes[i](k));
      os << ',' << num(s.temperature_mean[i]) << ',' << num(s.temperature_std[i]) << '\n';
    }
  }
  {
    std::ofstream os = open_out(fs::path(dir) / "elements.csv");
    os << "element";
    for (int k = 0; k < d; ++k) os << ",centroid_" << axis(k);
    os << ",flux_norm_mean,flux_norm_std";
    for (int k = 0; k < d; ++k) os << ",direction_" << axis(k);
    os << ",resultant_length,circular_std,undirected_draws,status\n";
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      Vec centroid = Vec::Zero(d);
      for (int a = 0; a <= d; ++a) centroid += mesh.nodes[mesh.elements[e][a]];
      centroid /= d + 1;
      os << e;
      for (int k = 0; k < d; ++k) os << ',' << num(centroid(k));
      os << ',' << num(s.flux_norm_mean[e]) << ',' << num(s.flux_norm_std[e]);
      for (int k = 0; k < d; ++k) {
        os << ',';
        if (!s.flux_undirected[e]) os << num(s.flux_direction[e](k));
      }
      os << ',' << num(s.flux_resultant[e]) << ',';
      if (s.flux_undirected[e]) {
        os << "undirected";
      } else {
        os << num(s.flux_circular_std[e]);
      }
      os << ',' << s.undirected_draws[e] << ',' << (s.flux_undirected[e] ? "undirected" : "directed")
         << '\n';
    }
  }
  {
    nlohmann::json j;
    j["config"] = to_json(cfg);
    j["n_samples"] = s.n_samples;
    j["mesh"] = {{"dim", mesh.dim},
                 {"nodes", mesh.num_nodes()},
                 {"elements", mesh.num_elements()}};
    nlohmann::json means = nlohmann::json::object();
    for (const TensorMean& m : s.tensor_means) {
      means[metric_name(m.metric)] = {{"mean", matrix_json(m.mean)},
                                      {"frechet_variance", m.frechet_variance}};
    }
    if (s.scaling_rotation) {
      const ScalingRotationMean& sr = *s.scaling_rotation;
      means[metric_name(Metric::ScalingRotation)]["eigenvalues"] =
          vec_std(sr.mean.scaling.values());
      means[metric_name(Metric::ScalingRotation)]["log_eigenvalue_se"] = vec_std(sr.log_scaling_se);
      means[metric_name(Metric::ScalingRotation)]["rotation"] = matrix_json(sr.mean.rotation.matrix());
      means[metric_name(Metric::ScalingRotation)]["rotation_se"] = vec_std(sr.rotation_se);
    }
    j["tensor_means"] = means;
    std::size_t undirected = 0;
    for (bool u : s.flux_undirected) undirected += u ? 1 : 0;
    j["undirected_elements"] = undirected;
    std::ofstream os = open_out(fs::path(dir) / "summary.json");
    os << j.dump(2) << '\n';
  }
}

}  // namespace spdlab
