#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "porodarcy/problem.hpp"
#include "porodarcy/reference_element.hpp"
#include "porodarcy/solver.hpp"

namespace porodarcy {

/// One-dimensional problem A alpha(p) v + dp/dx = 0, dv/dx = 0 on (0, 1) with
/// p(0) = p1 and p(1) = p2.
struct ExactSolution1D {
  DragVariant variant = DragVariant::Constant;
  double p1 = 200.0;
  double p2 = 1.0;
  double A = 1.0;
  double alpha0 = 1.0;
  double beta = 0.0;
};

struct PressureVelocity1D {
  double p = 0.0;
  double v = 0.0;
};

/// Closed-form solution at x in [0, 1]. The Barus variants require beta > 0.
PressureVelocity1D exact_1d(const ExactSolution1D& spec, double x);

/// Strip [0,1] x [0,1/n] meshed with n x 1 Q4 elements: pressure p1 on "left",
/// p2 on "right", zero normal velocity on "top" and "bottom".
ProblemSpec build_strip_problem(const ExactSolution1D& spec, int n);

struct ManufacturedValue {
  Point v = Point::Zero();
  double p = 0.0;
  Point b = Point::Zero();
};

/// v = (sin(pi x) cos(pi y), -cos(pi x) sin(pi y)), p = 1 + 25 x y (x-1)(y-1),
/// with the body force b = A alpha(p) v + grad p (divided by C) for `drag`.
ManufacturedValue manufactured_fields(double x, double y, const DragModel& drag, double A = 1.0,
                                      double C = 1.0);
/// Same fields with alpha(p) = exp(2 p).
ManufacturedValue manufactured_fields(double x, double y);

/// Manufactured problem on a unit-square mesh: zero normal velocity on every
/// tag and the pressure of the node closest to the origin pinned to its exact value.
ProblemSpec build_manufactured_problem(std::shared_ptr<const Mesh> mesh, const DragModel& drag,
                                       double A = 1.0, double C = 1.0);

/// Exact (v, p) field used for error measurement.
using ExactField = std::function<std::pair<Point, double>(const Point&)>;

struct L2Errors {
  double err_p = 0.0;
  double err_v = 0.0;  // both components
};

/// L2 norms of the nodal-interpolated errors, integrated with the given rule level.
L2Errors l2_error(const SolutionField& solution, const Mesh& mesh, const ExactField& exact,
                  QuadratureLevel level = QuadratureLevel::High);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double err_p = 0.0;
  double err_v = 0.0;
  int iterations = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slopes of log(err) against log(h).
  double slope_p = 0.0;
  double slope_v = 0.0;
  /// Slopes between consecutive levels.
  std::vector<double> pairwise_p;
  std::vector<double> pairwise_v;
  /// False when a level failed; rows then hold the levels before the failure.
  bool complete = true;
  std::string failure;
};

/// Runs one solve per level (levels are independent and may run concurrently)
/// and fits convergence slopes. `build(n)` returns the problem for level n.
ConvergenceTable convergence_study(const std::function<ProblemSpec(int)>& build,
                                   const std::vector<int>& levels, const ExactField& exact,
                                   const NewtonConfig& config = {});

/// Manufactured-solution ladder on n x n structured meshes of the given kind.
ConvergenceTable manufactured_convergence(ElementKind kind, const std::vector<int>& levels,
                                          const DragModel& drag, const NewtonConfig& config = {});

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace porodarcy
