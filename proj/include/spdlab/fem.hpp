#pragma once

#include "spdlab/linalg.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace spdlab::fem {

using Facet = std::array<int, 3>;     ///< first `dim` entries used
using Element = std::array<int, 4>;   ///< first `dim + 1` entries used

/// Linear simplex mesh: triangles in 2D, tetrahedra in 3D. Coordinates in metres.
struct Mesh {
  int dim = 2;
  std::vector<Vec> nodes;
  std::vector<Element> elements;
  std::map<std::string, std::vector<Facet>> boundary;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_elements() const { return elements.size(); }
  int nodes_per_element() const { return dim + 1; }

  /// Positive orientation, indices in range, boundary facets on element faces.
  void validate() const;
  /// Sorted node indices touched by a boundary set.
  std::vector<int> boundary_nodes(const std::string& set) const;
  /// Signed area / volume of element e.
  double element_measure(std::size_t e) const;
  /// Length / area of a boundary facet.
  double facet_measure(const Facet& f) const;
  /// Largest bounding-box extent.
  double scale() const;
};

using ScalarFunction = std::function<double(const Vec&)>;

struct DirichletCondition {
  std::string set;
  double value = 0.0;
  /// Overrides `value` when set.
  ScalarFunction profile;
};

/// Total power (W) entering through a facet set, spread uniformly over its measure.
struct FluxCondition {
  std::string set;
  double power = 0.0;
};

struct BoundaryConditions {
  std::vector<DirichletCondition> dirichlet;
  std::vector<FluxCondition> flux;
  /// Volumetric heat source f (W/m^d); zero when empty.
  ScalarFunction source;
};

/// Stiffness system after elimination of Dirichlet nodes.
struct LinearSystem {
  Eigen::SparseMatrix<double> stiffness;       ///< free x free, SPD
  Eigen::VectorXd rhs;                         ///< free load minus Dirichlet lift
  Eigen::SparseMatrix<double> full_stiffness;  ///< all nodes, for reactions
  Eigen::VectorXd full_load;                   ///< all nodes
  std::vector<int> free_index;                 ///< node -> free dof, -1 if constrained
  std::vector<int> free_nodes;                 ///< free dof -> node
  Eigen::VectorXd prescribed;                  ///< Dirichlet values (0 on free nodes)
};

struct TemperatureField {
  Eigen::VectorXd values;  ///< nodal temperature
};

struct FluxField {
  std::vector<Vec> flux;          ///< q = -kappa grad T per element
  std::vector<double> magnitude;  ///< ||q||
  std::vector<Vec> direction;     ///< q / ||q||, zero when undirected
  std::vector<bool> undirected;   ///< ||q|| below 1e-12 of the largest element flux
};

/// Element stiffness integral grad(phi_i) . kappa grad(phi_j) over element e.
Eigen::MatrixXd element_stiffness(const Mesh& mesh, std::size_t e, const SpdMat& kappa);

/// Assembles -div(kappa grad T) = f with the given boundary data. `kappa`
/// holds one tensor per element, or a single tensor used everywhere.
LinearSystem assemble(const Mesh& mesh, std::span<const SpdMat> kappa,
                      const BoundaryConditions& bc);

/// Sparse LDL^T solver that keeps the symbolic analysis between solves with
/// an unchanged sparsity pattern.
class ConductionSolver {
 public:
  TemperatureField solve(const LinearSystem& system);

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::Index analyzed_rows_ = -1;
  Eigen::Index analyzed_nnz_ = -1;
};

TemperatureField solve(const LinearSystem& system);

/// Sum of nodal reactions K T - F over the Dirichlet nodes (power leaving
/// through the constrained boundary, with sign).
double dirichlet_reaction_total(const LinearSystem& system, const TemperatureField& t);

FluxField heat_flux(const Mesh& mesh, const TemperatureField& t, std::span<const SpdMat> kappa);

/// L2 norm of T_h - exact with a degree-5 (2D) / degree-2 (3D) rule.
double l2_error(const Mesh& mesh, const TemperatureField& t, const ScalarFunction& exact);

// --- meshes ---

struct MeshPreset {
  std::string kind = "femur_like_2d";  ///< unit_square | rect_2d | box_3d | femur_like_2d
  int resolution = 8;
  double width = 1.0;   ///< rect_2d only
  double height = 1.0;  ///< rect_2d only
};

/// Structured presets. Every preset has boundary sets "fixed" and "flux";
/// the box and rectangles also carry "bottom", "top", "left", "right"
/// ("front"/"back" in 3D) and "boundary" (all boundary facets).
Mesh generate_mesh(const MeshPreset& preset);

/// Whitespace-delimited text format:
///   d nnodes nelems
///   <nnodes lines of d coordinates>
///   <nelems lines of d+1 node indices>
///   boundary <name> <count>
///   <count lines of d node indices>   (repeated per set)
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

/// Same mesh with every node mapped through x -> R x.
Mesh rotate_mesh(const Mesh& mesh, const Rotation& r);

}  // namespace spdlab::fem
