#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "porodarcy/drag.hpp"
#include "porodarcy/mesh.hpp"

namespace porodarcy {

/// Prescribed pressure p0 on a facet tag (weakly imposed through the facet term).
struct PressureBC {
  double value = 0.0;
  bool operator==(const PressureBC&) const = default;
};

/// Prescribed normal velocity v.n on a facet tag (strongly imposed).
struct NormalVelocityBC {
  double value = 0.0;
  bool operator==(const NormalVelocityBC&) const = default;
};

using BoundaryCondition = std::variant<PressureBC, NormalVelocityBC>;

/// Concentrated source (strength > 0) or sink (strength < 0) at a mesh node.
struct PointSource {
  int node = 0;
  double strength = 0.0;
  bool operator==(const PointSource&) const = default;
};

struct PressurePin {
  int node = 0;
  double value = 0.0;
};

/// Body force field (already multiplied by the non-dimensional density).
using BodyForce = std::function<Point(const Point&)>;

BodyForce constant_body_force(const Point& b);

/// Non-dimensional boundary value problem
///
///   A alpha(p) v + grad p = C b,   div v = sources   in the domain
///   v.n = v_n on normal-velocity tags,  p = p0 on pressure tags.
struct ProblemSpec {
  std::string name;
  std::shared_ptr<const Mesh> mesh;
  DragModel drag = DragModel::constant(1.0);
  /// Optional per-element alpha0 overrides (element id -> alpha0).
  std::map<int, double> element_alpha0;
  double A = 1.0;
  double C = 1.0;
  BodyForce body_force;  // empty means zero
  std::map<std::string, BoundaryCondition> boundary;
  std::vector<PointSource> sources;
  std::optional<PressurePin> pin;
  /// Value used when a pure-Neumann problem is pinned automatically.
  double auto_pin_value = 0.0;

  DragModel drag_for(int element) const;
  Point body(const Point& x) const;
  bool has_pressure_boundary() const;
  /// Validates that every mesh tag has exactly one condition and that every
  /// condition names a mesh tag. Throws InvalidArgument otherwise.
  void validate() const;
};

/// Index of the mesh node closest to `x`.
int nearest_node(const Mesh& mesh, const Point& x);

}  // namespace porodarcy
