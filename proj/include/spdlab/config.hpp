#pragma once

#include "spdlab/fem.hpp"
#include "spdlab/stochastic.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace spdlab {

/// Declarative form of a TensorModel, as read from a config document.
///
/// A named scenario fills every field from its preset; only `dispersion` and
/// `concentration` may then be overridden.
struct ModelSpec {
  std::string scenario;  ///< "" for an explicit model
  int dim = 2;
  ModelMode mode = ModelMode::Combined;
  std::vector<double> eigenvalues;   ///< reference Lambda, length d
  std::vector<double> orientation;   ///< reference Q: {angle} in 2D, Euler vector in 3D
  SymmetryClass reference_class = SymmetryClass::Orthotropic;
  SymmetryClass realisation_class = SymmetryClass::Orthotropic;
  double dispersion = 0.1;
  Coupling coupling = Coupling::Independent;
  bool ordered = false;
  double mean_angle = 0.0;
  std::array<double, 3> mean_direction{0.0, 0.0, 1.0};
  double concentration = 75.0;

  bool operator==(const ModelSpec&) const = default;
};

/// "iso-iso-scl", "iso-ortho-scl" or "ortho-ortho-dir" in dimension 2 or 3.
ModelSpec scenario_model(const std::string& name, int dim);
std::vector<std::string> scenario_names();

TensorModel build_model(const ModelSpec& spec);
Spectrum reference_spectrum(const ModelSpec& spec);

struct MeshSpec {
  fem::MeshPreset preset;
  std::string file;  ///< mesh text file; overrides `preset` when nonempty

  bool operator==(const MeshSpec& o) const {
    return file == o.file && preset.kind == o.preset.kind &&
           preset.resolution == o.preset.resolution && preset.width == o.preset.width &&
           preset.height == o.preset.height;
  }
};

struct BoundarySpec {
  std::string fixed_set = "fixed";
  double fixed_temperature = 0.0;  ///< degrees C
  std::string flux_set = "flux";
  double flux_power = 0.1;  ///< W, total over the flux set

  bool operator==(const BoundarySpec&) const = default;
};

struct ExperimentConfig {
  MeshSpec mesh;
  ModelSpec model = scenario_model("ortho-ortho-dir", 2);
  std::size_t n_samples = 10000;
  std::uint64_t seed = 1;
  double metric_weight = 1.0;
  std::string output = "out";
  BoundarySpec boundary;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Strict parse: unknown keys and wrong types are ValidationErrors.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

ModelSpec parse_model(const nlohmann::json& doc);
nlohmann::json to_json(const ModelSpec& spec);

fem::Mesh build_mesh(const MeshSpec& spec);
fem::BoundaryConditions build_boundary(const BoundarySpec& spec);

}  // namespace spdlab
