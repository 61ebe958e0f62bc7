#include "porodarcy/drag.hpp"

#include <cmath>
#include <string>

#include "porodarcy/error.hpp"

namespace porodarcy {

std::string_view to_string(DragVariant variant) {
  switch (variant) {
    case DragVariant::Constant: return "constant";
    case DragVariant::LinearBarus: return "linear";
    case DragVariant::ExponentialBarus: return "exponential";
  }
  return "unknown";
}

DragVariant drag_variant_from_string(std::string_view name) {
  if (name == "constant") return DragVariant::Constant;
  if (name == "linear") return DragVariant::LinearBarus;
  if (name == "exponential") return DragVariant::ExponentialBarus;
  throw InvalidArgument("unknown drag model '" + std::string(name) +
                        "' (expected constant, linear or exponential)");
}

DragModel::DragModel(DragVariant variant, double alpha0, double beta)
    : variant_(variant), alpha0_(alpha0), beta_(beta) {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0))
    throw InvalidArgument("drag alpha0 must be positive and finite");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw InvalidArgument("drag beta must be non-negative and finite");
}

double DragModel::exp_term(double p) const {
  const double exponent = beta_ * p;
  if (exponent > kMaxExponent) throw DragOverflowError(p, exponent);
  return std::exp(exponent);
}

double DragModel::alpha(double p) const {
  if (!std::isfinite(p)) throw DragError("drag evaluated at non-finite pressure", p);
  double value = alpha0_;
  switch (variant_) {
    case DragVariant::Constant:
      break;
    case DragVariant::LinearBarus:
      value = alpha0_ * (1.0 + beta_ * p);
      break;
    case DragVariant::ExponentialBarus:
      value = alpha0_ * exp_term(p);
      break;
  }
  if (!(value > 0.0)) throw NonpositiveDragError(p, value);
  return value;
}

double DragModel::dalpha_dp(double p) const {
  if (!std::isfinite(p)) throw DragError("drag evaluated at non-finite pressure", p);
  switch (variant_) {
    case DragVariant::Constant: return 0.0;
    case DragVariant::LinearBarus: return alpha0_ * beta_;
    case DragVariant::ExponentialBarus: return alpha0_ * beta_ * exp_term(p);
  }
  return 0.0;
}

double barus_percentage_change(double beta, double p_ref, double p) {
  const DragModel mu = DragModel::exponential(1.0, beta);
  return 100.0 * (mu.alpha(p) - mu.alpha(p_ref)) / mu.alpha(p_ref);
}

}  // namespace porodarcy
