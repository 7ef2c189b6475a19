#include "spdlab/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace spdlab {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

/// Object view that rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j_.is_object(), path_ + " must be an object");
  }
  ~Section() = default;

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    require(j_.contains(key), path_ + "." + key + " is required");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    require(v.is_number(), where(key) + " must be a number");
    const double x = v.get<double>();
    require(std::isfinite(x), where(key) + " must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (seen_.insert(key), fallback);
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    require(v.is_string(), where(key) + " must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : (seen_.insert(key), fallback);
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    require(j_.at(key).is_boolean(), where(key) + " must be true or false");
    return j_.at(key).get<bool>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
            where(key) + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    require(v.is_array(), where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      require(x.is_number(), where(key) + " must be an array of numbers");
      out.push_back(x.get<double>());
      require(std::isfinite(out.back()), where(key) + " entries must be finite");
    }
    return out;
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      require(seen_.count(key) == 1, "unknown key " + path_ + "." + key);
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Coupling parse_coupling(const std::string& s) {
  if (s == "identical") return Coupling::Identical;
  if (s == "independent") return Coupling::Independent;
  throw ValidationError("coupling must be 'identical' or 'independent', got '" + s + "'");
}

std::string coupling_name(Coupling c) {
  return c == Coupling::Identical ? "identical" : "independent";
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec from_std(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

Rotation orientation_rotation(int dim, const std::vector<double>& o) {
  if (dim == 2) {
    require(o.size() == 1, "2D reference orientation is a single angle");
    return rotation_2d(o[0]);
  }
  require(o.size() == 3, "3D reference orientation is an Euler vector of length 3");
  return rodrigues_exp(EulerVector::spatial(Eigen::Vector3d(o[0], o[1], o[2])));
}

std::vector<double> orientation_coordinates(const Rotation& r) {
  const EulerVector w = rotation_log(r).w;
  if (r.dim() == 2) return {w.planar_angle()};
  return {w.vector().x(), w.vector().y(), w.vector().z()};
}

void apply_reference(ModelSpec& spec, Section& ref) {
  if (ref.has("matrix")) {
    require(!ref.has("eigenvalues") && !ref.has("orientation"),
            ref.path() + ": give either 'matrix' or 'eigenvalues'/'orientation'");
    const json& m = ref.at("matrix");
    require(m.is_array() && static_cast<int>(m.size()) == spec.dim,
            ref.where("matrix") + " must be a d x d array");
    Mat a(spec.dim, spec.dim);
    for (int i = 0; i < spec.dim; ++i) {
      require(m[i].is_array() && static_cast<int>(m[i].size()) == spec.dim,
              ref.where("matrix") + " must be a d x d array");
      for (int j = 0; j < spec.dim; ++j) {
        require(m[i][j].is_number(), ref.where("matrix") + " entries must be numbers");
        a(i, j) = m[i][j].get<double>();
      }
    }
    const Spectrum s = spd_spectrum(SpdMat(a));
    spec.eigenvalues = to_std(s.scaling.values());
    spec.orientation = orientation_coordinates(s.rotation);
  } else {
    spec.eigenvalues = ref.numbers("eigenvalues");
    require(static_cast<int>(spec.eigenvalues.size()) == spec.dim,
            ref.where("eigenvalues") + " must have d entries");
    spec.orientation = ref.has("orientation") ? ref.numbers("orientation")
                                              : std::vector<double>(spec.dim == 2 ? 1 : 3, 0.0);
  }
  const std::string cls = ref.string("class", "");
  spec.reference_class = cls.empty() ? classify_eigenvalues(from_std(spec.eigenvalues))
                                     : parse_symmetry_class(cls);
  ref.finish();
}

}  // namespace

// --- scenarios ---

std::vector<std::string> scenario_names() {
  return {"iso-iso-scl", "iso-ortho-scl", "ortho-ortho-dir"};
}

ModelSpec scenario_model(const std::string& name, int dim) {
  check_dim(dim);
  ModelSpec s;
  s.scenario = name;
  s.dim = dim;
  s.dispersion = 0.1;
  s.concentration = 75.0;
  // Material frame of the orthotropic cases: rot(-pi/4) in 2D, R_y(pi/4) in 3D.
  const std::vector<double> tilted =
      dim == 2 ? std::vector<double>{-kPi / 4} : std::vector<double>{0.0, kPi / 4, 0.0};
  const std::vector<double> upright = dim == 2 ? std::vector<double>{0.0}
                                               : std::vector<double>{0.0, 0.0, 0.0};
  if (name == "iso-iso-scl") {
    s.mode = ModelMode::ScalingOnly;
    s.eigenvalues.assign(dim, 0.54);
    s.orientation = upright;
    s.reference_class = SymmetryClass::Isotropic;
    s.realisation_class = SymmetryClass::Isotropic;
    s.coupling = Coupling::Identical;
  } else if (name == "iso-ortho-scl") {
    s.mode = ModelMode::ScalingOnly;
    s.eigenvalues.assign(dim, 0.54);
    s.orientation = tilted;
    s.reference_class = SymmetryClass::Isotropic;
    s.realisation_class = SymmetryClass::Orthotropic;
    s.coupling = Coupling::Independent;
  } else if (name == "ortho-ortho-dir") {
    s.mode = ModelMode::RotationOnly;
    s.eigenvalues = dim == 2 ? std::vector<double>{0.54, 1.0} : std::vector<double>{0.54, 0.75, 1.0};
    s.orientation = tilted;
    s.reference_class = SymmetryClass::Orthotropic;
    s.realisation_class = SymmetryClass::Orthotropic;
    s.coupling = Coupling::Independent;
    s.mean_angle = 0.0;
    // The largest-eigenvalue axis of the tilted 3D frame.
    s.mean_direction = {std::numbers::sqrt2 / 2, 0.0, std::numbers::sqrt2 / 2};
  } else {
    throw ValidationError("unknown scenario '" + name + "'");
  }
  return s;
}

Spectrum reference_spectrum(const ModelSpec& spec) {
  check_dim(spec.dim);
  require(static_cast<int>(spec.eigenvalues.size()) == spec.dim,
          "reference needs d eigenvalues");
  return {orientation_rotation(spec.dim, spec.orientation), DiagPos(from_std(spec.eigenvalues))};
}

TensorModel build_model(const ModelSpec& spec) {
  ReferenceTensor ref(reference_spectrum(spec), spec.reference_class);
  auto scaling = [&] {
    ScalingModel m{ref, spec.realisation_class, spec.dispersion, spec.coupling, spec.ordered};
    m.validate();
    return m;
  };
  auto orientation = [&] {
    if (spec.dim == 2) return OrientationModel::planar(spec.mean_angle, spec.concentration);
    const auto& m = spec.mean_direction;
    return OrientationModel::spatial(Eigen::Vector3d(m[0], m[1], m[2]), spec.concentration);
  };
  switch (spec.mode) {
    case ModelMode::ScalingOnly: return TensorModel::scaling_only(scaling());
    case ModelMode::RotationOnly: return TensorModel::rotation_only(ref, orientation());
    case ModelMode::Combined: return TensorModel::combined(scaling(), orientation());
  }
  throw ValidationError("unknown model mode");
}

// --- model section ---

ModelSpec parse_model(const json& doc) {
  Section sec(doc, "model");
  const int dim = static_cast<int>(sec.number("dim", 2));
  require(dim == 2 || dim == 3, "model.dim must be 2 or 3");
  ModelSpec spec;
  if (sec.has("scenario")) {
    spec = scenario_model(sec.string("scenario"), dim);
    spec.dispersion = sec.number("dispersion", spec.dispersion);
    spec.concentration = sec.number("concentration", spec.concentration);
    sec.finish();
    return spec;
  }
  spec.scenario.clear();
  spec.dim = dim;
  spec.mode = parse_model_mode(sec.string("mode"));
  {
    Section ref(sec.at("reference"), "model.reference");
    apply_reference(spec, ref);
  }
  const bool has_scaling = spec.mode != ModelMode::RotationOnly;
  const bool has_orientation = spec.mode != ModelMode::ScalingOnly;
  if (has_scaling) {
    spec.realisation_class = parse_symmetry_class(sec.string("realisation_class"));
    spec.dispersion = sec.number("dispersion");
    spec.coupling = parse_coupling(sec.string(
        "coupling", spec.realisation_class == SymmetryClass::Isotropic ? "identical" : "independent"));
    spec.ordered = sec.boolean("ordered", false);
  } else {
    spec.realisation_class = spec.reference_class;
    for (const char* key : {"realisation_class", "dispersion", "coupling", "ordered"}) {
      require(!sec.has(key), std::string("model.") + key + " needs a scaling component");
    }
  }
  if (has_orientation) {
    spec.concentration = sec.number("concentration");
    if (dim == 2) {
      spec.mean_angle = sec.number("mean_angle", 0.0);
      require(!sec.has("mean_direction"), "model.mean_direction is 3D only");
    } else {
      const std::vector<double> mu = sec.numbers("mean_direction");
      require(mu.size() == 3, "model.mean_direction must have 3 entries");
      spec.mean_direction = {mu[0], mu[1], mu[2]};
      require(!sec.has("mean_angle"), "model.mean_angle is 2D only");
    }
  } else {
    for (const char* key : {"concentration", "mean_angle", "mean_direction"}) {
      require(!sec.has(key), std::string("model.") + key + " needs an orientation component");
    }
  }
  sec.finish();
  build_model(spec);
  return spec;
}

json to_json(const ModelSpec& spec) {
  json j;
  j["dim"] = spec.dim;
  if (!spec.scenario.empty()) {
    j["scenario"] = spec.scenario;
    j["dispersion"] = spec.dispersion;
    j["concentration"] = spec.concentration;
    return j;
  }
  j["mode"] = model_mode_name(spec.mode);
  j["reference"] = {{"eigenvalues", spec.eigenvalues},
                    {"orientation", spec.orientation},
                    {"class", symmetry_class_name(spec.reference_class)}};
  if (spec.mode != ModelMode::RotationOnly) {
    j["realisation_class"] = symmetry_class_name(spec.realisation_class);
    j["dispersion"] = spec.dispersion;
    j["coupling"] = coupling_name(spec.coupling);
    j["ordered"] = spec.ordered;
  }
  if (spec.mode != ModelMode::ScalingOnly) {
    j["concentration"] = spec.concentration;
    if (spec.dim == 2) {
      j["mean_angle"] = spec.mean_angle;
    } else {
      j["mean_direction"] = spec.mean_direction;
    }
  }
  return j;
}

// --- experiment ---

void ExperimentConfig::validate() const {
  require(n_samples >= 2, "n_samples must be at least 2");
  require(std::isfinite(metric_weight) && metric_weight > 0.0, "metric_weight must be positive");
  require(!output.empty(), "output must be a nonempty path");
  require(std::isfinite(boundary.flux_power), "boundary.flux_power must be finite");
  require(std::isfinite(boundary.fixed_temperature), "boundary.fixed_temperature must be finite");
  build_model(model);
}

ExperimentConfig parse_config(const json& doc) {
  Section top(doc, "config");
  ExperimentConfig cfg;
  if (top.has("mesh")) {
    Section m(top.at("mesh"), "mesh");
    cfg.mesh.file = m.string("file", "");
    cfg.mesh.preset.kind = m.string("preset", cfg.mesh.preset.kind);
    const double res = m.number("resolution", cfg.mesh.preset.resolution);
    require(res == std::floor(res) && res >= 1 && res <= 2000,
            "mesh.resolution must be an integer in [1, 2000]");
    cfg.mesh.preset.resolution = static_cast<int>(res);
    cfg.mesh.preset.width = m.number("width", cfg.mesh.preset.width);
    cfg.mesh.preset.height = m.number("height", cfg.mesh.preset.height);
    m.finish();
  }
  if (top.has("model")) cfg.model = parse_model(top.at("model"));
  cfg.n_samples = top.unsigned_integer("n_samples", cfg.n_samples);
  cfg.seed = top.unsigned_integer("seed", cfg.seed);
  cfg.metric_weight = top.number("metric_weight", cfg.metric_weight);
  cfg.output = top.string("output", cfg.output);
  if (top.has("boundary")) {
    Section b(top.at("boundary"), "boundary");
    cfg.boundary.fixed_set = b.string("fixed_set", cfg.boundary.fixed_set);
    cfg.boundary.fixed_temperature = b.number("fixed_temperature", cfg.boundary.fixed_temperature);
    cfg.boundary.flux_set = b.string("flux_set", cfg.boundary.flux_set);
    cfg.boundary.flux_power = b.number("flux_power", cfg.boundary.flux_power);
    b.finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  json mesh;
  if (!cfg.mesh.file.empty()) mesh["file"] = cfg.mesh.file;
  mesh["preset"] = cfg.mesh.preset.kind;
  mesh["resolution"] = cfg.mesh.preset.resolution;
  mesh["width"] = cfg.mesh.preset.width;
  mesh["height"] = cfg.mesh.preset.height;
  j["mesh"] = mesh;
  j["model"] = to_json(cfg.model);
  j["n_samples"] = cfg.n_samples;
  j["seed"] = cfg.seed;
  j["metric_weight"] = cfg.metric_weight;
  j["output"] = cfg.output;
  j["boundary"] = {{"fixed_set", cfg.boundary.fixed_set},
                   {"fixed_temperature", cfg.boundary.fixed_temperature},
                   {"flux_set", cfg.boundary.flux_set},
                   {"flux_power", cfg.boundary.flux_power}};
  return j;
}

fem::Mesh build_mesh(const MeshSpec& spec) {
  if (spec.file.empty()) return fem::generate_mesh(spec.preset);
  std::ifstream in(spec.file);
  require(static_cast<bool>(in), "cannot open mesh file '" + spec.file + "'");
  return fem::read_mesh(in);
}

fem::BoundaryConditions build_boundary(const BoundarySpec& spec) {
  fem::BoundaryConditions bc;
  bc.dirichlet.push_back({spec.fixed_set, spec.fixed_temperature, {}});
  if (spec.flux_power != 0.0) bc.flux.push_back({spec.flux_set, spec.flux_power});
  return bc;
}

}  // namespace spdlab
