#pragma once

#include <map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "porodarcy/drag.hpp"
#include "porodarcy/mesh.hpp"
#include "porodarcy/problem.hpp"
#include "porodarcy/reference_element.hpp"

namespace porodarcy {

/// Fixed degree of freedom with its prescribed value.
struct Constraint {
  int dof = 0;
  double value = 0.0;
};

/// Global numbering: node a owns velocity DOFs 3a, 3a+1 and pressure DOF 3a+2.
/// Constrained DOFs are excluded from the free numbering.
class DofMap {
 public:
  DofMap(int num_nodes, const std::vector<Constraint>& constraints);

  static int velocity(int node, int component) { return 3 * node + component; }
  static int pressure(int node) { return 3 * node + 2; }

  int num_nodes() const { return num_nodes_; }
  int num_dofs() const { return 3 * num_nodes_; }
  int num_free() const { return num_free_; }
  /// Free equation number of `dof`, or -1 when constrained.
  int free_index(int dof) const { return free_index_[dof]; }
  bool is_constrained(int dof) const { return free_index_[dof] < 0; }
  const std::map<int, double>& constraints() const { return constraints_; }

 private:
  int num_nodes_;
  int num_free_ = 0;
  std::vector<int> free_index_;
  std::map<int, double> constraints_;
};

using ElementVelocity = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::ColMajor, 4, 2>;
using ElementPressure = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

/// Nodal unknowns of one element: velocity n-by-2, pressure n.
struct ElementState {
  ElementVelocity v;
  ElementPressure p;
};

template <int MaxRows, int MaxCols>
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, MaxRows,
                                  MaxCols>;
template <int MaxRows>
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, MaxRows, 1>;

/// Element residuals and tangent blocks. Velocity entries are ordered
/// node-major (v_{1,x}, v_{1,y}, v_{2,x}, ...).
struct ElementContribution {
  SmallVector<8> Rv;
  SmallVector<4> Rp;
  SmallMatrix<8, 8> Kvv;
  SmallMatrix<8, 4> Kvp;
  SmallMatrix<4, 8> Kpv;
  SmallMatrix<4, 4> Kpp;
};

/// Prescribed pressure on local edge `local_edge` of an element.
struct FacetPressure {
  int local_edge = 0;
  double p0 = 0.0;
};

struct ElementInputs {
  int element_id = -1;
  ElementKind kind = ElementKind::Q4;
  ElementCoords coords;
  DragModel drag = DragModel::constant(1.0);
  ElementState state;
  const BodyForce* body = nullptr;  // null: no body force
  double A = 1.0;
  double C = 1.0;
  std::vector<FacetPressure> pressure_facets;
  const QuadratureRule* quadrature = nullptr;
  bool div_stabilization = false;
};

/// Coefficient of the optional (div w; div v) stabilization term.
inline constexpr double kDivStabilization = 0.5;

/// Residual and consistent tangent of the stabilized mixed weak form on one
/// element. With a = A alpha(p) and r = a v + grad p - C b:
///
///   Rv = int N (a v - C b) - B p - 1/2 N r  + int_{Gamma_D} N n p0
///   Rp = int -N div v - 1/2 B a^{-1} r
///
/// and K = dR/d(v, p). Drag failures are rethrown with the element id.
ElementContribution element_contribution(const ElementInputs& in);

struct AssemblyOptions {
  QuadratureLevel quadrature = QuadratureLevel::Default;
  bool div_stabilization = false;
  bool operator==(const AssemblyOptions&) const = default;
};

/// Reduced Newton system over the free DOFs: K du = rhs with
/// rhs = -R_free - K_fc (prescribed - current) for constrained DOFs.
struct GlobalSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd rhs;
  /// Full-length residual, including constrained rows.
  Eigen::VectorXd residual;
  /// 2-norm of the residual restricted to the free DOFs.
  double residual_norm = 0.0;
};

/// Assembles the global system for one problem. The sparsity pattern of the
/// reduced matrix is computed once at construction and reused.
class Assembler {
 public:
  Assembler(const ProblemSpec& problem, DofMap dofs, AssemblyOptions options = {});

  const DofMap& dofs() const { return dofs_; }
  const ProblemSpec& problem() const { return problem_; }
  const Mesh& mesh() const { return *problem_.mesh; }

  ElementInputs element_inputs(int element, const Eigen::VectorXd& state) const;

  /// Reduced system (tangent and right-hand side) at `state`.
  GlobalSystem assemble(const Eigen::VectorXd& state, bool with_tangent = true) const;

  /// Residual over every DOF, including point sources.
  Eigen::VectorXd residual(const Eigen::VectorXd& state) const;

  /// Tangent over every DOF with no constraint elimination.
  Eigen::SparseMatrix<double> full_tangent(const Eigen::VectorXd& state) const;

  /// 2-norm of the residual over the free DOFs.
  double free_residual_norm(const Eigen::VectorXd& residual) const;

 private:
  void add_sources(Eigen::VectorXd& residual) const;
  std::vector<int> element_dofs(int element) const;

  ProblemSpec problem_;
  DofMap dofs_;
  AssemblyOptions options_;
  std::vector<QuadratureRule> rules_;  // indexed by ElementKind
  std::vector<ElementCoords> coords_;
  std::vector<DragModel> drags_;
  std::vector<std::vector<FacetPressure>> pressure_facets_;
  Eigen::SparseMatrix<double> pattern_;
  /// Per element, position of each local (i, j) entry in pattern_ values, or -1.
  std::vector<std::vector<int>> positions_;
};

/// Element matrix [Kvv Kvp; Kpv Kpp] in local DOF order (velocity block first).
Eigen::MatrixXd element_matrix(const ElementContribution& c);
/// Element residual [Rv; Rp].
Eigen::VectorXd element_residual(const ElementContribution& c);

}  // namespace porodarcy
