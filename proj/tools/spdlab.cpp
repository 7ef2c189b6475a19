// Command-line front end. Exit codes: 0 success, 1 validation error,
// 2 numerical failure.

#include "spdlab/batch.hpp"
#include "spdlab/commands.hpp"
#include "spdlab/parallel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace spdlab;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  int workers = 0;
  std::string out;
  std::string metric = "affine";
  double c = 1.0;
  std::string input;
  // mesh and verify-distortion
  std::string preset;
  int resolution = 0;
  double eta = 75.0;
  bool isotropic = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--samples", o.samples, "Number of samples");
  cmd->add_option("--workers", o.workers, "Worker threads (default: SPDLAB_WORKERS)")
      ->check(CLI::Range(1, 4096));
  cmd->add_option("--out", o.out, "Output directory");
}

/// `sample` takes --samples as its own row count, which may be 0 or 1.
ExperimentConfig config_from(const Options& o, bool samples_override = true) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.samples && samples_override) cfg.n_samples = *o.samples;
  cfg.validate();
  return cfg;
}

/// Writes to `dir/name` when an output directory was given, else to stdout.
template <class F>
void emit(const std::string& dir, const std::string& name, F write) {
  if (dir.empty()) {
    write(std::cout);
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot write '" + path.string() + "'");
  write(os);
}

std::vector<SpdMat> tensors_from(const std::string& input) {
  if (input.empty() || input == "-") return read_tensors(std::cin);
  std::ifstream in(input);
  require(static_cast<bool>(in), "cannot open '" + input + "'");
  return read_tensors(in);
}

int dispatch(CLI::App& app, Options& o) {
  const auto* used = app.get_subcommands().front();
  const std::string name = used->get_name();

  if (name == "run") {
    const ExperimentConfig cfg = config_from(o);
    cmd_run(cfg, resolve_workers(o.workers), o.out.empty() ? cfg.output : o.out, std::cerr);
    return 0;
  }
  if (name == "metrics") {
    const Metric m = parse_metric(o.metric);
    const ProductWeight c(o.c);
    if (o.input.empty() || o.input == "-") {
      emit(o.out, "distances.csv", [&](std::ostream& os) { cmd_metrics(std::cin, m, c, os); });
    } else {
      std::ifstream in(o.input);
      require(static_cast<bool>(in), "cannot open '" + o.input + "'");
      emit(o.out, "distances.csv", [&](std::ostream& os) { cmd_metrics(in, m, c, os); });
    }
    return 0;
  }
  if (name == "means") {
    const ProductWeight c(o.c);
    std::vector<SpdMat> tensors;
    if (!o.config.empty() && o.input.empty()) {
      const ExperimentConfig cfg = config_from(o);
      const TensorModel model = build_model(cfg.model);
      for (const Spectrum& s : sample_spectra(model, cfg.seed, cfg.n_samples,
                                              resolve_workers(o.workers))) {
        tensors.push_back(s.reconstruct());
      }
    } else {
      tensors = tensors_from(o.input);
    }
    emit(o.out, "means.json", [&](std::ostream& os) { cmd_means(tensors, c, os); });
    return 0;
  }
  if (name == "sample") {
    const ExperimentConfig cfg = config_from(o, false);
    const std::size_t n = o.samples.value_or(cfg.n_samples);
    emit(o.out, "samples.csv", [&](std::ostream& os) {
      cmd_sample(cfg.model, n, cfg.seed, resolve_workers(o.workers), os);
    });
    return 0;
  }
  if (name == "verify-distortion") {
    const DistortionReport r = verify_distortion(o.eta, o.samples.value_or(1'000'000),
                                                 o.seed.value_or(1), resolve_workers(o.workers),
                                                 o.isotropic);
    emit(o.out, "distortion.txt", [&](std::ostream& os) { print_report(r, os); });
    if (!o.out.empty()) print_report(r, std::cout);
    return r.pass ? 0 : 2;
  }
  if (name == "mesh") {
    MeshSpec spec = o.config.empty() ? MeshSpec{} : load_config(o.config).mesh;
    if (!o.preset.empty()) {
      spec.file.clear();
      spec.preset.kind = o.preset;
    }
    if (o.resolution > 0) spec.preset.resolution = o.resolution;
    emit(o.out, "mesh.txt", [&](std::ostream& os) { cmd_mesh(spec, os); });
    return 0;
  }
  throw ValidationError("unknown subcommand '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPD tensor geometry and Monte-Carlo heat-conduction toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Monte-Carlo FEM experiment");
  add_common(run, o);

  auto* metrics = app.add_subcommand("metrics", "Distances between SPD pairs");
  add_common(metrics, o);
  metrics->add_option("input", o.input, "Pairs file ('-' or omitted: stdin)");
  metrics->add_option("--metric", o.metric, "frobenius|affine|logeuclid|scaling");
  metrics->add_option("--c", o.c, "Rotation weight of the scaling-rotation metric");

  auto* means = app.add_subcommand("means", "Fréchet means of a tensor file or sampled model");
  add_common(means, o);
  means->add_option("input", o.input, "Tensor file ('-': stdin)");
  means->add_option("--metric", o.metric, "Accepted for symmetry; all metrics are reported");
  means->add_option("--c", o.c, "Rotation weight of the scaling-rotation metric");

  auto* sample = app.add_subcommand("sample", "Draw tensor realisations");
  add_common(sample, o);

  auto* verify = app.add_subcommand("verify-distortion", "Check the distorted Euclidean mean");
  add_common(verify, o);
  verify->add_option("--eta", o.eta, "von Mises concentration");
  verify->add_flag("--isotropic", o.isotropic, "Use the isotropic reference");

  auto* mesh = app.add_subcommand("mesh", "Emit a preset mesh");
  add_common(mesh, o);
  mesh->add_option("--preset", o.preset, "unit_square|rect_2d|box_3d|femur_like_2d");
  mesh->add_option("--resolution", o.resolution, "Preset resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (o.c <= 0.0 || !std::isfinite(o.c)) throw ValidationError("--c must be positive");
    parse_metric(o.metric);
    return dispatch(app, o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
