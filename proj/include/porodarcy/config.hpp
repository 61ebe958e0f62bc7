#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "porodarcy/cases.hpp"
#include "porodarcy/drag.hpp"
#include "porodarcy/problem.hpp"
#include "porodarcy/solver.hpp"

namespace porodarcy {

/// Settings of one batch run, read from a flat `key = value` file.
///
///   case                    five-spot | reservoir | oned | manufactured | convergence | mesh
///   mesh.kind, mesh.n       element kind (q4 | t3) and elements per side
///   mesh.file               mesh file (case = mesh)
///   drag.model              constant | linear | exponential
///   drag.alpha0, drag.beta  beta is required unless the model is constant
///   drag.per_element_alpha0 elem:value,elem:value,...
///   problem.A, problem.C, problem.body (bx,by)
///   bc.<tag>                pressure <value> | normal_velocity <value>   (case = mesh)
///   sources                 node:strength,...                          (case = mesh)
///   newton.*                rtol, atol, max_iter, initial_guess, line_search
///   stabilization.div_term  on | off
///   quadrature.order        default | high
///   oned.p1, oned.p2
///   reservoir.p_enh, reservoir.cells_per_unit, cone.depths
///   convergence.levels      comma-separated n values
///   sweep.parameter, sweep.values
///   output.dir
struct RunConfig {
  std::string case_name;
  ElementKind kind = ElementKind::Q4;
  int n = 20;
  std::string mesh_file;
  DragVariant drag = DragVariant::Constant;
  double alpha0 = 1.0;
  std::optional<double> beta;
  std::map<int, double> per_element_alpha0;
  double A = 1.0;
  double C = 1.0;
  Point body = Point::Zero();
  std::map<std::string, BoundaryCondition> bcs;
  std::vector<PointSource> sources;
  NewtonConfig newton;
  double p1 = 200.0;
  double p2 = 1.0;
  double p_enh = 1000.0;
  int cells_per_unit = 60;
  std::vector<double> cone_depths{0.6, 0.75, 0.9};
  std::vector<int> levels{10, 20, 40, 80};
  std::optional<SweepParameter> sweep_parameter;
  std::vector<double> sweep_values;
  std::string output_dir = "out";

  DragModel drag_model() const;
  bool operator==(const RunConfig&) const;
};

/// Case names accepted by the `case` key.
const std::vector<std::string>& known_cases();

RunConfig parse_config(std::istream& in);
/// Throws ConfigError when the file cannot be opened.
RunConfig parse_config(const std::string& path);
/// Writes every key; parse_config(serialize_config(c)) == c.
void serialize_config(const RunConfig& config, std::ostream& out);

}  // namespace porodarcy
