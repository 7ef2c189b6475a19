#include "spdlab/commands.hpp"

#include "spdlab/batch.hpp"
#include "spdlab/means.hpp"
#include "spdlab/parallel.hpp"
#include "spdlab/pipeline.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace spdlab {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Splits `line` into numbers; false on a non-numeric token.
bool parse_numbers(const std::string& line, std::vector<double>& out) {
  std::istringstream ls(line);
  std::string tok;
  out.clear();
  while (ls >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      return false;
    }
    if (used != tok.size()) return false;
    out.push_back(v);
  }
  return true;
}

/// Calls f(line_number, values) for every data line.
template <class F>
void for_each_record(std::istream& in, F f) {
  std::string line;
  std::vector<double> values;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    if (!parse_numbers(line, values)) {
      throw ValidationError("line " + std::to_string(line_no) + ": non-numeric token");
    }
    try {
      f(line_no, values);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

int record_dim(const std::vector<double>& v, std::size_t per_tensor_count) {
  require(!v.empty(), "empty record");
  const double d = v[0];
  require(d == 2.0 || d == 3.0, "first field must be the dimension 2 or 3");
  const int di = static_cast<int>(d);
  require(v.size() == 1 + per_tensor_count * di * di,
          "expected " + std::to_string(1 + per_tensor_count * di * di) + " fields, got " +
              std::to_string(v.size()));
  return di;
}

Mat read_matrix(const std::vector<double>& v, int d, std::size_t offset) {
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = v[offset + i * d + j];
  }
  return m;
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

}  // namespace

void cmd_run(const ExperimentConfig& cfg, int workers, const std::string& out_dir,
             std::ostream& log) {
  const Experiment ex = build_experiment(cfg);
  const McSummary s = run_mc(cfg, workers);
  write_outputs(out_dir, cfg, ex.mesh, s);
  std::size_t undirected = 0;
  for (bool u : s.flux_undirected) undirected += u ? 1 : 0;
  log << "run: " << s.n_samples << " samples, " << ex.mesh.num_nodes() << " nodes, "
      << ex.mesh.num_elements() << " elements, " << undirected << " undirected elements -> "
      << out_dir << '\n';
}

void cmd_metrics(std::istream& in, Metric metric, ProductWeight c, std::ostream& out) {
  out << "pair,metric,distance\n";
  std::size_t pair = 0;
  for_each_record(in, [&](int, const std::vector<double>& v) {
    const int d = record_dim(v, 2);
    const SpdMat c1(read_matrix(v, d, 1));
    const SpdMat c2(read_matrix(v, d, 1 + d * d));
    out << pair++ << ',' << metric_name(metric) << ',' << num(distance(metric, c1, c2, c)) << '\n';
  });
}

std::vector<SpdMat> read_tensors(std::istream& in) {
  std::vector<SpdMat> out;
  for_each_record(in, [&](int, const std::vector<double>& v) {
    const int d = record_dim(v, 1);
    require(out.empty() || out.front().dim() == d, "all tensors must have the same dimension");
    out.emplace_back(read_matrix(v, d, 1));
  });
  return out;
}

void cmd_means(const std::vector<SpdMat>& tensors, ProductWeight c, std::ostream& out) {
  require(!tensors.empty(), "no tensors given");
  const auto ens = WeightedEnsemble<SpdMat>::uniform(tensors);
  nlohmann::json j;
  j["count"] = tensors.size();
  j["c"] = c.value();
  auto entry = [&](Metric m, const SpdMat& mean) {
    j["means"][metric_name(m)] = {{"mean", matrix_json(mean.matrix())},
                                  {"frechet_variance", frechet_variance(mean, ens, m, c)}};
  };
  entry(Metric::Frobenius, SpdMat(mean_euclidean(ens)));
  entry(Metric::LogEuclidean, mean_log_euclidean(ens));
  entry(Metric::AffineInvariant, mean_affine_invariant(ens));
  std::vector<Spectrum> spectra;
  spectra.reserve(tensors.size());
  for (const SpdMat& t : tensors) spectra.push_back(spd_spectrum(t));
  const Spectrum sr =
      mean_scaling_rotation(WeightedEnsemble<Spectrum>::uniform(spectra), KarcherConfig{}, c);
  entry(Metric::ScalingRotation, sr.reconstruct());
  out << j.dump(2) << '\n';
}

void cmd_sample(const ModelSpec& model, std::size_t n, std::uint64_t seed, int workers,
                std::ostream& out) {
  const TensorModel m = build_model(model);
  const int d = m.dim();
  out << "sample";
  for (int i = 1; i <= d; ++i) {
    for (int j = 1; j <= d; ++j) out << ",c" << i << j;
  }
  out << '\n';
  if (n == 0) return;
  const std::vector<Spectrum> spectra = sample_spectra(m, seed, n, workers);
  for (std::size_t k = 0; k < n; ++k) {
    const SpdMat c = spectra[k].reconstruct();
    out << k;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) out << ',' << num(c(i, j));
    }
    out << '\n';
  }
}

DistortionReport verify_distortion(double eta, std::size_t n, std::uint64_t seed, int workers,
                                   bool isotropic) {
  require(std::isfinite(eta) && eta > 0.0, "eta must be positive");
  require(n >= 2, "need at least two samples");
  const ModelSpec spec = scenario_model(isotropic ? "iso-iso-scl" : "ortho-ortho-dir", 2);
  const SymMat h = spd_log(reference_spectrum(spec).reconstruct());
  DistortionReport r;
  r.eta = eta;
  r.rho2 = rho2_von_mises(eta);
  r.reference = h.matrix();
  r.closed_form = distorted_euclid_mean_2d(h, r.rho2).matrix();
  const MatrixMeanEstimate mc =
      rotated_mean(h, OrientationModel::planar(0.0, eta), seed, n, workers);
  r.mc_mean = mc.mean;
  r.standard_error = mc.standard_error;
  r.deviation = (mc.mean - r.closed_form).cwiseAbs();
  const double floor = 1e-12 * std::max(1.0, h.matrix().norm());
  r.pass = (r.deviation.array() <= 3.0 * r.standard_error.array() + floor).all();
  return r;
}

void print_report(const DistortionReport& r, std::ostream& out) {
  auto row = [&](const char* name, const Mat& m) {
    out << name << ':';
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) out << ' ' << num(m(i, j));
    }
    out << '\n';
  };
  out << "eta: " << num(r.eta) << '\n' << "rho2: " << num(r.rho2) << '\n';
  row("reference", r.reference);
  row("closed_form", r.closed_form);
  row("mc_mean", r.mc_mean);
  row("standard_error", r.standard_error);
  row("deviation", r.deviation);
  out << "result: " << (r.pass ? "pass" : "fail") << '\n';
}

void cmd_mesh(const MeshSpec& spec, std::ostream& out) { fem::write_mesh(out, build_mesh(spec)); }

}  // namespace spdlab
