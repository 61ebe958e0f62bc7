#pragma once

#include <string_view>

namespace porodarcy {

enum class DragVariant { Constant, LinearBarus, ExponentialBarus };

std::string_view to_string(DragVariant variant);
/// Accepts the config spellings `constant`, `linear` and `exponential`.
DragVariant drag_variant_from_string(std::string_view name);

/// Pressure-dependent drag coefficient in non-dimensional form:
///
///   Constant          alpha(p) = alpha0
///   LinearBarus       alpha(p) = alpha0 (1 + beta p)
///   ExponentialBarus  alpha(p) = alpha0 exp(beta p)
///
/// Physically alpha is viscosity over permeability; only the non-dimensional
/// coefficients are carried here. `beta` is ignored for Constant.
class DragModel {
 public:
  /// Largest beta*p accepted by the exponential variant.
  static constexpr double kMaxExponent = 700.0;

  DragModel(DragVariant variant, double alpha0, double beta);

  static DragModel constant(double alpha0) { return {DragVariant::Constant, alpha0, 0.0}; }
  static DragModel linear(double alpha0, double beta) {
    return {DragVariant::LinearBarus, alpha0, beta};
  }
  static DragModel exponential(double alpha0, double beta) {
    return {DragVariant::ExponentialBarus, alpha0, beta};
  }

  DragVariant variant() const { return variant_; }
  double alpha0() const { return alpha0_; }
  double beta() const { return beta_; }

  /// Same law with a different reference drag (per-element overrides).
  DragModel with_alpha0(double alpha0) const { return {variant_, alpha0, beta_}; }

  /// Throws NonpositiveDragError when the value is not positive and
  /// DragOverflowError when beta*p > kMaxExponent.
  double alpha(double p) const;
  double dalpha_dp(double p) const;
  double alpha_inv(double p) const { return 1.0 / alpha(p); }

  bool operator==(const DragModel&) const = default;

 private:
  double exp_term(double p) const;

  DragVariant variant_;
  double alpha0_;
  double beta_;
};

/// Percentage change of a Barus-law viscosity mu0 exp(beta p) between p_ref
/// and p: 100 (mu(p) - mu(p_ref)) / mu(p_ref).
double barus_percentage_change(double beta, double p_ref, double p);

}  // namespace porodarcy
