#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "porodarcy/assembly.hpp"
#include "porodarcy/problem.hpp"

namespace porodarcy {

enum class InitialGuess { Zero, DarcyLinear };

std::string_view to_string(InitialGuess guess);
InitialGuess initial_guess_from_string(std::string_view name);

struct NewtonConfig {
  double rtol = 1e-12;
  double atol = 1e-14;
  int max_iter = 50;
  InitialGuess initial_guess = InitialGuess::Zero;
  /// Halve the step while the residual norm grows (at most 20 halvings).
  bool line_search = false;
  AssemblyOptions assembly;

  void validate() const;
  bool operator==(const NewtonConfig&) const = default;
};

struct ConvergenceHistory {
  /// Residual 2-norms over free DOFs; entry 0 is the initial residual.
  std::vector<double> residual_norms;
  bool converged = false;
  int iterations() const { return static_cast<int>(residual_norms.size()) - 1; }
};

struct SolutionField {
  Eigen::MatrixX2d velocity;  // nn x 2
  Eigen::VectorXd pressure;   // nn
  Eigen::VectorXd dofs;       // interleaved (vx, vy, p) per node
  ConvergenceHistory history;
};

/// Unpacks an interleaved DOF vector into nodal fields.
SolutionField make_solution(const Eigen::VectorXd& dofs, ConvergenceHistory history = {});

/// Sparse LU (COLAMD ordering) for the general nonsymmetric reduced system.
/// The symbolic analysis is computed on the first factorization and reused
/// while the pattern is unchanged.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws SingularSystemError when the matrix is singular or the solve does
  /// not reach a relative residual of 1e-10.
  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot sparse solve of K x = rhs.
Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs);
Eigen::VectorXd linear_solve(const GlobalSystem& system);

/// Essential conditions: on axis-aligned normal-velocity facets the normal
/// velocity component of each facet node is fixed to v_n * n_i. An explicit
/// pin is honored; otherwise, with no pressure boundary, the pressure of the
/// lowest-numbered node is pinned to `auto_pin_value`.
std::vector<Constraint> apply_essential_bcs(const ProblemSpec& problem);

struct WellposednessReport {
  bool all_neumann = false;
  /// Point-source total minus prescribed boundary outflow.
  double net_inflow = 0.0;
  bool compatible = true;
  bool pressure_pinned = false;
  int pin_node = -1;
  std::string summary() const;
};

/// Checks the compatibility condition of pure-Neumann problems and reports
/// how the pressure gauge is fixed. Throws IncompatibleProblemError when
/// |net inflow| > 1e-10.
WellposednessReport check_wellposedness(const ProblemSpec& problem);

/// Newton-Raphson on the stabilized system, stopping once
/// ||R|| <= rtol ||R_0|| + atol. Throws ConvergenceError (with history) when
/// max_iter is exhausted.
SolutionField newton_solve(const ProblemSpec& problem, const NewtonConfig& config = {});

/// Observed convergence order over the last three residuals above `floor`:
/// log(r_k+1 / r_k) / log(r_k / r_k-1). Residuals at or below the floor are
/// roundoff-dominated and excluded. NaN when fewer than three remain.
double terminal_convergence_order(const std::vector<double>& residual_norms, double floor);

/// Default roundoff floor for a history: 1e3 * machine epsilon * r_0.
double roundoff_floor(const std::vector<double>& residual_norms);

}  // namespace porodarcy
