#pragma once

#include <optional>
#include <string>
#include <vector>

#include "porodarcy/problem.hpp"
#include "porodarcy/solver.hpp"

namespace porodarcy {

/// Quarter five-spot on the unit square: zero normal velocity on every edge,
/// source +1/4 at (0,0), sink -1/4 at (1,1), pressure pinned to 0 at the sink.
ProblemSpec build_five_spot(int n, ElementKind kind, const DragModel& drag);

struct ReservoirGeometry {
  double width = 2.0;
  double depth = 1.0;
  double notch_width = 0.1;
  double notch_depth = 0.5;
  /// Grid cells per unit length; notch edges must fall on grid lines.
  int cells_per_unit = 60;
};

/// Reservoir with a production-well notch cut from the top centre.
/// Tags: "production_well" (notch bottom, p = 1), "injection" (both side
/// walls, p = p_enh) and "impermeable" (v.n = 0). b = (0, -1), A = C = 1.
ProblemSpec build_reservoir(const DragModel& drag, double p_enh, const ReservoirGeometry& geometry = {},
                            ElementKind kind = ElementKind::Q4);

/// Atmospheric pressure at the well mouth.
inline constexpr double kAtmosphericPressure = 1.0;

struct FluxReport {
  std::string tag;
  double value = 0.0;
};

/// Integral of v.n over the facets carrying `tag` (two-point Gauss per facet).
FluxReport total_flux(const SolutionField& solution, const Mesh& mesh, const std::string& tag);

struct FieldSample {
  Point v = Point::Zero();
  double p = 0.0;
};

/// Finite-element interpolation at a physical point; nullopt outside the mesh.
std::optional<FieldSample> sample(const SolutionField& solution, const Mesh& mesh, const Point& x);

/// Flux of the interpolated velocity through the polyline, with the normal
/// taken as the segment tangent rotated clockwise. Midpoint rule with
/// `samples_per_segment` points per segment.
double polyline_flux(const SolutionField& solution, const Mesh& mesh, const std::vector<Point>& path,
                     int samples_per_segment = 200);

struct ConeSample {
  double distance = 0.0;  // signed horizontal offset from the well axis
  double depth = 0.0;     // below the top surface
  double p = 0.0;
};

struct ConeProfile {
  std::vector<ConeSample> samples;
  int skipped = 0;  // points outside the mesh
};

/// Pressure along horizontal lines y = top - depth at x = well_x + distance.
ConeProfile cone_profile(const SolutionField& solution, const Mesh& mesh,
                         const std::vector<double>& depths, double well_x,
                         const std::vector<double>& distances, double top = 1.0);

enum class SweepParameter { Beta, PEnh };
std::string_view to_string(SweepParameter parameter);
SweepParameter sweep_parameter_from_string(std::string_view name);

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  int iterations = 0;
  double p_max = 0.0;
  double exp_beta_pmax = 0.0;
  double flux = 0.0;  // NaN without a flux tag
  std::string error;
};

/// Independent solves over `values`. Beta replaces drag.beta; PEnh replaces the
/// pressure on the "injection" tag. A failed solve is recorded in its row.
std::vector<SweepRow> sweep(const ProblemSpec& base, SweepParameter parameter,
                            const std::vector<double>& values, const NewtonConfig& config = {},
                            const std::string& flux_tag = "");

}  // namespace porodarcy
