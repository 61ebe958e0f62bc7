#include "porodarcy/error.hpp"

#include <sstream>
#include <utility>

namespace porodarcy {

namespace {

std::string with_element(std::string msg, int element) {
  if (element >= 0) msg += " (element " + std::to_string(element) + ")";
  return msg;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

DegenerateElementError::DegenerateElementError(int element, double det_j)
    : MeshError("degenerate element " + std::to_string(element) +
                ": Jacobian determinant " + fmt_double(det_j) + " <= 0"),
      element_(element),
      det_j_(det_j) {}

DragError::DragError(const std::string& what, double pressure, int element)
    : Error(with_element(what, element)), pressure_(pressure), element_(element) {}

NonpositiveDragError::NonpositiveDragError(double pressure, double value, int element)
    : DragError("nonpositive drag " + fmt_double(value) + " at pressure " + fmt_double(pressure),
                pressure, element),
      value_(value) {}

DragOverflowError::DragOverflowError(double pressure, double exponent, int element)
    : DragError("drag overflow: beta*p = " + fmt_double(exponent) + " exceeds 700 at pressure " +
                    fmt_double(pressure),
                pressure, element),
      exponent_(exponent) {}

IncompatibleProblemError::IncompatibleProblemError(double net_inflow)
    : Error("incompatible all-Neumann problem: net inflow " + fmt_double(net_inflow) +
            " (sources minus boundary outflow) must vanish"),
      net_inflow_(net_inflow) {}

ConvergenceError::ConvergenceError(const std::string& what, std::vector<double> residual_norms)
    : Error(what), residual_norms_(std::move(residual_norms)) {}

ConfigError::ConfigError(const std::string& what, std::string key, int line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      key_(std::move(key)),
      line_(line) {}

}  // namespace porodarcy
