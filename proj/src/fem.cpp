#include "spdlab/fem.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace spdlab::fem {

namespace {

constexpr double kDegenerate = 1e-14;
constexpr double kUndirected = 1e-12;

double factorial(int d) { return d == 2 ? 2.0 : 6.0; }

/// Edge matrix [x1 - x0, ..., xd - x0].
Mat edge_matrix(const Mesh& mesh, std::size_t e) {
  const Element& el = mesh.elements[e];
  Mat j(mesh.dim, mesh.dim);
  for (int k = 0; k < mesh.dim; ++k) j.col(k) = mesh.nodes[el[k + 1]] - mesh.nodes[el[0]];
  return j;
}

/// Rows are the gradients of the d+1 barycentric shape functions.
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 3> shape_gradients(const Mesh& mesh,
                                                                               std::size_t e) {
  const int d = mesh.dim;
  const Mat jinv = edge_matrix(mesh, e).inverse();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 3> g(d + 1, d);
  g.bottomRows(d) = jinv;
  g.row(0) = -jinv.colwise().sum();
  return g;
}

struct QuadPoint {
  std::array<double, 4> bary;
  double weight;  ///< fraction of the element measure
};

std::vector<QuadPoint> quadrature(int d) {
  if (d == 2) {
    // Dunavant degree 5.
    std::vector<QuadPoint> q{{{1.0 / 3, 1.0 / 3, 1.0 / 3, 0}, 0.225}};
    const double w1 = 0.132394152788506, a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double w2 = 0.125939180544827, a2 = 0.797426985353087, b2 = 0.101286507323456;
    for (auto [w, a, b] : {std::tuple{w1, a1, b1}, std::tuple{w2, a2, b2}}) {
      q.push_back({{a, b, b, 0}, w});
      q.push_back({{b, a, b, 0}, w});
      q.push_back({{b, b, a, 0}, w});
    }
    return q;
  }
  const double a = 0.5854101966249685, b = 0.1381966011250105;
  return {{{a, b, b, b}, 0.25}, {{b, a, b, b}, 0.25}, {{b, b, a, b}, 0.25}, {{b, b, b, a}, 0.25}};
}

Vec point_at(const Mesh& mesh, std::size_t e, const QuadPoint& qp) {
  Vec x = Vec::Zero(mesh.dim);
  for (int a = 0; a <= mesh.dim; ++a) x += qp.bary[a] * mesh.nodes[mesh.elements[e][a]];
  return x;
}

std::vector<int> sorted_facet(const Facet& f, int d) {
  std::vector<int> v(f.begin(), f.begin() + d);
  std::sort(v.begin(), v.end());
  return v;
}

/// Faces of all elements with their multiplicity.
std::map<std::vector<int>, int> face_counts(const Mesh& mesh) {
  std::map<std::vector<int>, int> counts;
  const int n = mesh.nodes_per_element();
  for (const Element& el : mesh.elements) {
    for (int skip = 0; skip < n; ++skip) {
      std::vector<int> face;
      for (int a = 0; a < n; ++a) {
        if (a != skip) face.push_back(el[a]);
      }
      std::sort(face.begin(), face.end());
      ++counts[face];
    }
  }
  return counts;
}

/// Boundary faces whose nodes all satisfy `pred`.
std::vector<Facet> select_boundary(const Mesh& mesh, const std::map<std::vector<int>, int>& faces,
                                   const std::function<bool(const Vec&)>& pred) {
  std::vector<Facet> out;
  for (const auto& [face, count] : faces) {
    if (count != 1) continue;
    if (std::all_of(face.begin(), face.end(), [&](int i) { return pred(mesh.nodes[i]); })) {
      Facet f{-1, -1, -1};
      std::copy(face.begin(), face.end(), f.begin());
      out.push_back(f);
    }
  }
  return out;
}

Mesh structured_2d(int nx, int ny, const std::function<Vec(double, double)>& map) {
  Mesh m;
  m.dim = 2;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) m.nodes.push_back(map(double(i) / nx, double(j) / ny));
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      m.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  }
  return m;
}

Mesh structured_box(int n) {
  Mesh m;
  m.dim = 3;
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        Vec x(3);
        x << double(i) / n, double(j) / n, double(k) / n;
        m.nodes.push_back(x);
      }
    }
  }
  auto id = [n](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
  // Kuhn subdivision: one tetrahedron per axis ordering.
  const std::array<std::array<int, 3>, 6> orders{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        for (const auto& ord : orders) {
          std::array<int, 3> c{i, j, k};
          Element el{id(i, j, k), 0, 0, 0};
          for (int s = 0; s < 3; ++s) {
            ++c[ord[s]];
            el[s + 1] = id(c[0], c[1], c[2]);
          }
          m.elements.push_back(el);
        }
      }
    }
  }
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    if (m.element_measure(e) < 0.0) std::swap(m.elements[e][2], m.elements[e][3]);
  }
  return m;
}

void add_box_sets(Mesh& m) {
  const auto faces = face_counts(m);
  const double tol = 1e-12 * m.scale();
  Vec lo = m.nodes.front(), hi = m.nodes.front();
  for (const Vec& x : m.nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  auto on = [&](int axis, double v) {
    return [=](const Vec& x) { return std::abs(x(axis) - v) <= tol; };
  };
  m.boundary["left"] = select_boundary(m, faces, on(0, lo(0)));
  m.boundary["right"] = select_boundary(m, faces, on(0, hi(0)));
  const int up = m.dim - 1;
  m.boundary["bottom"] = select_boundary(m, faces, on(up, lo(up)));
  m.boundary["top"] = select_boundary(m, faces, on(up, hi(up)));
  if (m.dim == 3) {
    m.boundary["front"] = select_boundary(m, faces, on(1, lo(1)));
    m.boundary["back"] = select_boundary(m, faces, on(1, hi(1)));
  }
  m.boundary["boundary"] = select_boundary(m, faces, [](const Vec&) { return true; });
  m.boundary["fixed"] = m.boundary["bottom"];
  m.boundary["flux"] = m.boundary["top"];
}

double smoothstep(double a, double b, double t) {
  const double s = std::clamp((t - a) / (b - a), 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

Mesh femur_like(int n) {
  // Proximal-femur-like outline, 0.217 m tall: a 3 cm shaft widening to a
  // 7 cm head region that leans medially.
  constexpr double height = 0.217, shaft = 0.03, head = 0.07, lean = -0.02;
  Mesh m = structured_2d(n, 3 * n, [&](double s, double t) {
    const double blend = smoothstep(0.55, 1.0, t);
    const double w = shaft + (head - shaft) * blend;
    Vec x(2);
    x << lean * blend + w * (s - 0.5), height * t;
    return x;
  });
  const auto faces = face_counts(m);
  const double tol = 1e-12;
  m.boundary["fixed"] = select_boundary(m, faces, [&](const Vec& x) { return x(1) <= tol; });
  m.boundary["flux"] =
      select_boundary(m, faces, [&](const Vec& x) { return x(1) >= height - tol; });
  return m;
}

}  // namespace

// --- Mesh ---

double Mesh::element_measure(std::size_t e) const {
  return edge_matrix(*this, e).determinant() / factorial(dim);
}

double Mesh::facet_measure(const Facet& f) const {
  if (dim == 2) return (nodes[f[1]] - nodes[f[0]]).norm();
  const Eigen::Vector3d a = nodes[f[1]] - nodes[f[0]];
  const Eigen::Vector3d b = nodes[f[2]] - nodes[f[0]];
  return 0.5 * a.cross(b).norm();
}

double Mesh::scale() const {
  if (nodes.empty()) return 0.0;
  Vec lo = nodes.front(), hi = nodes.front();
  for (const Vec& x : nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  return (hi - lo).maxCoeff();
}

void Mesh::validate() const {
  check_dim(dim);
  require(!nodes.empty() && !elements.empty(), "mesh has no nodes or elements");
  const int n = static_cast<int>(nodes.size());
  for (const Vec& x : nodes) {
    require(x.size() == dim && x.allFinite(), "node coordinates must be finite d-vectors");
  }
  const double min_measure = kDegenerate * std::pow(scale(), dim);
  for (std::size_t e = 0; e < elements.size(); ++e) {
    for (int a = 0; a < nodes_per_element(); ++a) {
      require(elements[e][a] >= 0 && elements[e][a] < n,
              "element " + std::to_string(e) + " references a missing node");
    }
    require(element_measure(e) > min_measure,
            "element " + std::to_string(e) + " is degenerate or negatively oriented");
  }
  const auto faces = face_counts(*this);
  for (const auto& [name, facets] : boundary) {
    for (const Facet& f : facets) {
      for (int a = 0; a < dim; ++a) {
        require(f[a] >= 0 && f[a] < n, "boundary set '" + name + "' references a missing node");
      }
      require(faces.count(sorted_facet(f, dim)) == 1,
              "boundary set '" + name + "' has a facet that is not an element face");
    }
  }
}

std::vector<int> Mesh::boundary_nodes(const std::string& set) const {
  const auto it = boundary.find(set);
  require(it != boundary.end(), "unknown boundary set '" + set + "'");
  std::set<int> ids;
  for (const Facet& f : it->second) ids.insert(f.begin(), f.begin() + dim);
  return {ids.begin(), ids.end()};
}

// --- assembly ---

Eigen::MatrixXd element_stiffness(const Mesh& mesh, std::size_t e, const SpdMat& kappa) {
  require(kappa.dim() == mesh.dim, "conductivity dimension does not match the mesh");
  const auto g = shape_gradients(mesh, e);
  return mesh.element_measure(e) * g * kappa.matrix() * g.transpose();
}

LinearSystem assemble(const Mesh& mesh, std::span<const SpdMat> kappa,
                      const BoundaryConditions& bc) {
  const std::size_t ne = mesh.num_elements();
  const auto nn = static_cast<Eigen::Index>(mesh.num_nodes());
  require(kappa.size() == ne || kappa.size() == 1,
          "need one conductivity per element or a single uniform one");
  require(!bc.dirichlet.empty(), "at least one Dirichlet condition is required");

  const int npe = mesh.nodes_per_element();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(ne * npe * npe);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(nn);
  const auto rule = quadrature(mesh.dim);
  for (std::size_t e = 0; e < ne; ++e) {
    const Eigen::MatrixXd ke = element_stiffness(mesh, e, kappa.size() == 1 ? kappa[0] : kappa[e]);
    const double vol = mesh.element_measure(e);
    for (int a = 0; a < npe; ++a) {
      for (int b = 0; b < npe; ++b) {
        trip.emplace_back(mesh.elements[e][a], mesh.elements[e][b], ke(a, b));
      }
    }
    if (bc.source) {
      for (const QuadPoint& qp : rule) {
        const double fx = bc.source(point_at(mesh, e, qp)) * qp.weight * vol;
        for (int a = 0; a < npe; ++a) load(mesh.elements[e][a]) += fx * qp.bary[a];
      }
    }
  }

  std::set<std::vector<int>> dirichlet_facets;
  for (const DirichletCondition& dc : bc.dirichlet) {
    const auto it = mesh.boundary.find(dc.set);
    require(it != mesh.boundary.end(), "unknown boundary set '" + dc.set + "'");
    for (const Facet& f : it->second) dirichlet_facets.insert(sorted_facet(f, mesh.dim));
  }
  for (const FluxCondition& fc : bc.flux) {
    const auto it = mesh.boundary.find(fc.set);
    require(it != mesh.boundary.end() && !it->second.empty(),
            "flux set '" + fc.set + "' is missing or empty");
    double measure = 0.0;
    for (const Facet& f : it->second) {
      require(!dirichlet_facets.count(sorted_facet(f, mesh.dim)),
              "flux set '" + fc.set + "' overlaps a Dirichlet set");
      measure += mesh.facet_measure(f);
    }
    const double density = fc.power / measure;
    for (const Facet& f : it->second) {
      const double share = density * mesh.facet_measure(f) / mesh.dim;
      for (int a = 0; a < mesh.dim; ++a) load(f[a]) += share;
    }
  }

  LinearSystem sys;
  sys.full_stiffness.resize(nn, nn);
  sys.full_stiffness.setFromTriplets(trip.begin(), trip.end());
  sys.full_load = load;
  sys.prescribed = Eigen::VectorXd::Zero(nn);
  std::vector<bool> fixed(nn, false);
  for (const DirichletCondition& dc : bc.dirichlet) {
    for (int i : mesh.boundary_nodes(dc.set)) {
      fixed[i] = true;
      sys.prescribed(i) = dc.profile ? dc.profile(mesh.nodes[i]) : dc.value;
    }
  }
  require(std::any_of(fixed.begin(), fixed.end(), [](bool b) { return b; }),
          "Dirichlet sets contain no nodes");

  sys.free_index.assign(nn, -1);
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (!fixed[i]) {
      sys.free_index[i] = static_cast<int>(sys.free_nodes.size());
      sys.free_nodes.push_back(static_cast<int>(i));
    }
  }
  const auto nf = static_cast<Eigen::Index>(sys.free_nodes.size());
  sys.rhs = Eigen::VectorXd::Zero(nf);
  for (Eigen::Index f = 0; f < nf; ++f) sys.rhs(f) = load(sys.free_nodes[f]);

  std::vector<Eigen::Triplet<double>> free_trip;
  free_trip.reserve(trip.size());
  for (int col = 0; col < sys.full_stiffness.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.full_stiffness, col); it; ++it) {
      const int fr = sys.free_index[it.row()];
      if (fr < 0) continue;
      const int fc = sys.free_index[it.col()];
      if (fc >= 0) {
        free_trip.emplace_back(fr, fc, it.value());
      } else {
        sys.rhs(fr) -= it.value() * sys.prescribed(it.col());
      }
    }
  }
  sys.stiffness.resize(nf, nf);
  sys.stiffness.setFromTriplets(free_trip.begin(), free_trip.end());
  return sys;
}

TemperatureField ConductionSolver::solve(const LinearSystem& sys) {
  const Eigen::Index nf = sys.stiffness.rows();
  TemperatureField t{sys.prescribed};
  if (nf == 0) return t;
  if (analyzed_rows_ != nf || analyzed_nnz_ != sys.stiffness.nonZeros()) {
    ldlt_.analyzePattern(sys.stiffness);
    analyzed_rows_ = nf;
    analyzed_nnz_ = sys.stiffness.nonZeros();
  }
  ldlt_.factorize(sys.stiffness);
  if (ldlt_.info() != Eigen::Success) throw NumericalError("stiffness factorization failed");
  const Eigen::VectorXd x = ldlt_.solve(sys.rhs);
  const double rhs_norm = sys.rhs.norm();
  const double residual = (sys.stiffness * x - sys.rhs).norm();
  if (!x.allFinite() || residual > 1e-10 * std::max(rhs_norm, std::numeric_limits<double>::min())) {
    if (rhs_norm > 0.0 || residual > 0.0) {
      std::ostringstream os;
      os << "linear solve residual too large (" << residual << " vs rhs " << rhs_norm << ")";
      throw NumericalError(os.str());
    }
  }
  for (Eigen::Index f = 0; f < nf; ++f) t.values(sys.free_nodes[f]) = x(f);
  return t;
}

TemperatureField solve(const LinearSystem& system) {
  ConductionSolver solver;
  return solver.solve(system);
}

double dirichlet_reaction_total(const LinearSystem& sys, const TemperatureField& t) {
  const Eigen::VectorXd r = sys.full_stiffness * t.values - sys.full_load;
  double total = 0.0;
  for (std::size_t i = 0; i < sys.free_index.size(); ++i) {
    if (sys.free_index[i] < 0) total += r(static_cast<Eigen::Index>(i));
  }
  return total;
}

FluxField heat_flux(const Mesh& mesh, const TemperatureField& t, std::span<const SpdMat> kappa) {
  const std::size_t ne = mesh.num_elements();
  require(kappa.size() == ne || kappa.size() == 1,
          "need one conductivity per element or a single uniform one");
  require(t.values.size() == static_cast<Eigen::Index>(mesh.num_nodes()),
          "temperature field does not match the mesh");
  FluxField out;
  out.flux.reserve(ne);
  out.magnitude.reserve(ne);
  double max_mag = 0.0;
  for (std::size_t e = 0; e < ne; ++e) {
    const auto g = shape_gradients(mesh, e);
    // Differences against node 0 keep the gradient of a constant field exactly zero.
    const double t0 = t.values(mesh.elements[e][0]);
    Vec grad = Vec::Zero(mesh.dim);
    for (int a = 1; a <= mesh.dim; ++a) {
      grad += (t.values(mesh.elements[e][a]) - t0) * g.row(a).transpose();
    }
    const Vec q = -(kappa.size() == 1 ? kappa[0] : kappa[e]).matrix() * grad;
    out.flux.push_back(q);
    out.magnitude.push_back(q.norm());
    max_mag = std::max(max_mag, out.magnitude.back());
  }
  out.direction.resize(ne);
  out.undirected.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const bool none = !(out.magnitude[e] > kUndirected * max_mag);
    out.undirected[e] = none;
    out.direction[e] = none ? Vec(Vec::Zero(mesh.dim)) : Vec(out.flux[e] / out.magnitude[e]);
  }
  return out;
}

double l2_error(const Mesh& mesh, const TemperatureField& t, const ScalarFunction& exact) {
  const auto rule = quadrature(mesh.dim);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double vol = mesh.element_measure(e);
    for (const QuadPoint& qp : rule) {
      double th = 0.0;
      for (int a = 0; a <= mesh.dim; ++a) th += qp.bary[a] * t.values(mesh.elements[e][a]);
      const double diff = th - exact(point_at(mesh, e, qp));
      sum += qp.weight * vol * diff * diff;
    }
  }
  return std::sqrt(sum);
}

// --- presets ---

Mesh generate_mesh(const MeshPreset& p) {
  require(p.resolution >= 1, "mesh resolution must be at least 1");
  require(p.resolution <= 2000, "mesh resolution is unreasonably large");
  Mesh m;
  if (p.kind == "unit_square" || p.kind == "rect_2d") {
    const double w = p.kind == "rect_2d" ? p.width : 1.0;
    const double h = p.kind == "rect_2d" ? p.height : 1.0;
    require(w > 0.0 && h > 0.0, "rectangle extents must be positive");
    const int nx = p.resolution;
    const int ny = p.kind == "rect_2d" ? std::max(1, static_cast<int>(std::lround(nx * h / w))) : nx;
    m = structured_2d(nx, ny, [&](double s, double t) {
      Vec x(2);
      x << w * s, h * t;
      return x;
    });
    add_box_sets(m);
  } else if (p.kind == "box_3d") {
    require(p.resolution <= 60, "box_3d resolution is unreasonably large");
    m = structured_box(p.resolution);
    add_box_sets(m);
  } else if (p.kind == "femur_like_2d") {
    m = femur_like(p.resolution);
  } else {
    throw ValidationError("unknown mesh preset '" + p.kind + "'");
  }
  m.validate();
  return m;
}

// --- text format ---

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << mesh.dim << ' ' << mesh.num_nodes() << ' ' << mesh.num_elements() << '\n';
  os << std::setprecision(17);
  for (const Vec& x : mesh.nodes) {
    for (int k = 0; k < mesh.dim; ++k) os << (k ? " " : "") << x(k);
    os << '\n';
  }
  for (const Element& el : mesh.elements) {
    for (int a = 0; a <= mesh.dim; ++a) os << (a ? " " : "") << el[a];
    os << '\n';
  }
  for (const auto& [name, facets] : mesh.boundary) {
    os << "boundary " << name << ' ' << facets.size() << '\n';
    for (const Facet& f : facets) {
      for (int a = 0; a < mesh.dim; ++a) os << (a ? " " : "") << f[a];
      os << '\n';
    }
  }
}

Mesh read_mesh(std::istream& is) {
  int line_no = 0;
  std::string line;
  auto fail = [&](const std::string& what) -> ValidationError {
    return ValidationError("mesh line " + std::to_string(line_no) + ": " + what);
  };
  auto next_line = [&](bool required) -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    if (required) {
      ++line_no;
      throw fail("unexpected end of file");
    }
    return false;
  };
  auto parse_exact = [&](auto& values, std::size_t count) {
    std::istringstream ls(line);
    for (std::size_t k = 0; k < count; ++k) {
      if (!(ls >> values[k])) throw fail("expected " + std::to_string(count) + " values");
    }
    std::string extra;
    if (ls >> extra) throw fail("unexpected trailing token '" + extra + "'");
  };

  Mesh m;
  next_line(true);
  std::array<long, 3> header{};
  parse_exact(header, 3);
  if (header[0] != 2 && header[0] != 3) throw fail("dimension must be 2 or 3");
  if (header[1] <= 0 || header[2] <= 0) throw fail("node and element counts must be positive");
  m.dim = static_cast<int>(header[0]);
  for (long i = 0; i < header[1]; ++i) {
    next_line(true);
    std::array<double, 3> c{};
    parse_exact(c, m.dim);
    Vec x(m.dim);
    for (int k = 0; k < m.dim; ++k) x(k) = c[k];
    m.nodes.push_back(x);
  }
  for (long e = 0; e < header[2]; ++e) {
    next_line(true);
    Element el{-1, -1, -1, -1};
    parse_exact(el, m.dim + 1);
    m.elements.push_back(el);
  }
  while (next_line(false)) {
    std::istringstream ls(line);
    std::string keyword, name;
    long count = -1;
    if (!(ls >> keyword >> name >> count) || keyword != "boundary" || count < 0) {
      throw fail("expected 'boundary <name> <count>'");
    }
    auto& facets = m.boundary[name];
    for (long k = 0; k < count; ++k) {
      next_line(true);
      Facet f{-1, -1, -1};
      parse_exact(f, m.dim);
      facets.push_back(f);
    }
  }
  m.validate();
  return m;
}

Mesh rotate_mesh(const Mesh& mesh, const Rotation& r) {
  require(r.dim() == mesh.dim, "rotation dimension does not match the mesh");
  Mesh out = mesh;
  for (Vec& x : out.nodes) x = r.apply(x);
  return out;
}

}  // namespace spdlab::fem
