#include "porodarcy/problem.hpp"

#include <cmath>
#include <limits>

#include "porodarcy/error.hpp"

namespace porodarcy {

BodyForce constant_body_force(const Point& b) {
  return [b](const Point&) { return b; };
}

DragModel ProblemSpec::drag_for(int element) const {
  if (const auto it = element_alpha0.find(element); it != element_alpha0.end())
    return drag.with_alpha0(it->second);
  return drag;
}

Point ProblemSpec::body(const Point& x) const {
  return body_force ? body_force(x) : Point::Zero();
}

bool ProblemSpec::has_pressure_boundary() const {
  for (const auto& [tag, bc] : boundary) {
    if (std::holds_alternative<PressureBC>(bc)) return true;
  }
  return false;
}

void ProblemSpec::validate() const {
  if (!mesh) throw InvalidArgument("problem '" + name + "' has no mesh");
  for (const auto& tag : mesh->tags()) {
    if (!boundary.count(tag))
      throw InvalidArgument("boundary tag '" + tag + "' has no boundary condition");
  }
  for (const auto& [tag, bc] : boundary) {
    if (!mesh->has_tag(tag))
      throw InvalidArgument("boundary condition names unknown tag '" + tag + "'");
  }
  for (const auto& s : sources) {
    if (s.node < 0 || s.node >= mesh->num_nodes())
      throw InvalidArgument("point source at unknown node " + std::to_string(s.node));
    if (!std::isfinite(s.strength)) throw InvalidArgument("point source strength must be finite");
  }
  if (pin && (pin->node < 0 || pin->node >= mesh->num_nodes()))
    throw InvalidArgument("pressure pin at unknown node " + std::to_string(pin->node));
  for (const auto& [elem, a0] : element_alpha0) {
    if (elem < 0 || elem >= mesh->num_elements())
      throw InvalidArgument("alpha0 override for unknown element " + std::to_string(elem));
    if (!(a0 > 0.0)) throw InvalidArgument("alpha0 override must be positive");
  }
  if (!(A > 0.0) || !std::isfinite(C)) throw InvalidArgument("group A must be positive, C finite");
}

int nearest_node(const Mesh& mesh, const Point& x) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double d = (mesh.node(i) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace porodarcy
