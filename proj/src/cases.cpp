#include "porodarcy/cases.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "porodarcy/error.hpp"
#include "porodarcy/parallel.hpp"
#include "porodarcy/reference_element.hpp"

namespace porodarcy {

ProblemSpec build_five_spot(int n, ElementKind kind, const DragModel& drag) {
  if (n < 2) throw InvalidArgument("five-spot needs n >= 2");
  ProblemSpec p;
  p.name = "five-spot";
  auto mesh = std::make_shared<Mesh>(generate_structured(kind, n, n));
  const int injection = nearest_node(*mesh, {0.0, 0.0});
  const int production = nearest_node(*mesh, {1.0, 1.0});
  p.mesh = mesh;
  p.drag = drag;
  for (const auto& tag : mesh->tags()) p.boundary[tag] = NormalVelocityBC{0.0};
  p.sources = {{injection, 0.25}, {production, -0.25}};
  p.pin = PressurePin{production, 0.0};
  return p;
}

ProblemSpec build_reservoir(const DragModel& drag, double p_enh, const ReservoirGeometry& g,
                            ElementKind kind) {
  if (!(p_enh >= kAtmosphericPressure))
    throw InvalidArgument("p_enh must be at least the atmospheric pressure 1");
  const int m = g.cells_per_unit;
  auto on_grid = [m](double len) {
    const double cells = len * m;
    return std::abs(cells - std::round(cells)) < 1e-9 && cells >= 1.0 - 1e-9;
  };
  const double notch_x0 = 0.5 * (g.width - g.notch_width);
  const double notch_x1 = notch_x0 + g.notch_width;
  const double notch_y0 = g.depth - g.notch_depth;
  if (m < 1 || !on_grid(g.width) || !on_grid(g.depth) || !on_grid(notch_x0) ||
      !on_grid(g.notch_width) || !on_grid(g.notch_depth) || !(notch_y0 > 0.0))
    throw InvalidArgument("reservoir notch does not align with the grid; adjust cells_per_unit");

  const int nx = static_cast<int>(std::lround(g.width * m));
  const int ny = static_cast<int>(std::lround(g.depth * m));
  const double dx = g.width / nx, dy = g.depth / ny;
  auto keep = [&](int i, int j) {
    const double xc = (i + 0.5) * dx, yc = (j + 0.5) * dy;
    return !(xc > notch_x0 && xc < notch_x1 && yc > notch_y0);
  };
  const double eps = 1e-9;
  auto tagger = [&](const Point& mid, const Point& normal) -> std::string {
    if (std::abs(mid.y() - notch_y0) < eps && mid.x() > notch_x0 && mid.x() < notch_x1 &&
        normal.y() > 0.5)
      return "production_well";
    if (mid.x() < eps || mid.x() > g.width - eps) return "injection";
    return "impermeable";
  };

  ProblemSpec p;
  p.name = "reservoir";
  p.mesh = std::make_shared<Mesh>(
      generate_masked_grid(kind, nx, ny, {0.0, 0.0, g.width, g.depth}, keep, tagger));
  p.drag = drag;
  p.A = 1.0;
  p.C = 1.0;
  p.body_force = constant_body_force({0.0, -1.0});
  p.boundary["production_well"] = PressureBC{kAtmosphericPressure};
  p.boundary["injection"] = PressureBC{p_enh};
  p.boundary["impermeable"] = NormalVelocityBC{0.0};
  return p;
}

FluxReport total_flux(const SolutionField& solution, const Mesh& mesh, const std::string& tag) {
  const auto rule = edge_gauss2();
  double flux = 0.0;
  for (const auto& f : mesh.boundary_facets(tag)) {
    const Point va = solution.velocity.row(f.nodes[0]).transpose();
    const Point vb = solution.velocity.row(f.nodes[1]).transpose();
    for (int q = 0; q < rule.size(); ++q) {
      const double s = rule.points[q].x();
      flux += rule.weights[q] * f.length * ((1.0 - s) * va + s * vb).dot(f.normal);
    }
  }
  return {tag, flux};
}

std::optional<FieldSample> sample(const SolutionField& solution, const Mesh& mesh, const Point& x) {
  const auto loc = mesh.locate(x);
  if (!loc) return std::nullopt;
  const Element& e = mesh.element(loc->element);
  const auto s = shape(e.kind, loc->xi);
  FieldSample out;
  for (int a = 0; a < e.size(); ++a) {
    out.v += s.N(a) * solution.velocity.row(e.nodes[a]).transpose();
    out.p += s.N(a) * solution.pressure(e.nodes[a]);
  }
  return out;
}

double polyline_flux(const SolutionField& solution, const Mesh& mesh, const std::vector<Point>& path,
                     int samples_per_segment) {
  double flux = 0.0;
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const Point t = path[k + 1] - path[k];
    const Point n(t.y(), -t.x());  // length-weighted
    for (int i = 0; i < samples_per_segment; ++i) {
      const Point x = path[k] + (i + 0.5) / samples_per_segment * t;
      const auto s = sample(solution, mesh, x);
      if (!s) throw InvalidArgument("flux path leaves the mesh");
      flux += s->v.dot(n) / samples_per_segment;
    }
  }
  return flux;
}

ConeProfile cone_profile(const SolutionField& solution, const Mesh& mesh,
                         const std::vector<double>& depths, double well_x,
                         const std::vector<double>& distances, double top) {
  ConeProfile out;
  for (double depth : depths) {
    for (double d : distances) {
      const Point x(well_x + d, top - depth);
      if (const auto s = sample(solution, mesh, x)) {
        out.samples.push_back({d, depth, s->p});
      } else {
        ++out.skipped;
        std::cerr << "warning: cone sample (" << x.x() << ", " << x.y()
                  << ") lies outside the mesh, skipped\n";
      }
    }
  }
  return out;
}

std::string_view to_string(SweepParameter parameter) {
  return parameter == SweepParameter::Beta ? "beta" : "p_enh";
}

SweepParameter sweep_parameter_from_string(std::string_view name) {
  if (name == "beta") return SweepParameter::Beta;
  if (name == "p_enh") return SweepParameter::PEnh;
  throw InvalidArgument("unknown sweep parameter '" + std::string(name) + "' (expected beta or p_enh)");
}

std::vector<SweepRow> sweep(const ProblemSpec& base, SweepParameter parameter,
                            const std::vector<double>& values, const NewtonConfig& config,
                            const std::string& flux_tag) {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("sweep values must be finite");
  }
  if (parameter == SweepParameter::PEnh) {
    const auto it = base.boundary.find("injection");
    if (it == base.boundary.end() || !std::holds_alternative<PressureBC>(it->second))
      throw InvalidArgument("p_enh sweep needs a pressure condition on tag 'injection'");
  }

  std::vector<SweepRow> rows(values.size());
  parallel_for(static_cast<int>(values.size()), [&](int i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    row.flux = std::numeric_limits<double>::quiet_NaN();
    try {
      ProblemSpec problem = base;
      if (parameter == SweepParameter::Beta) {
        problem.drag = DragModel(base.drag.variant(), base.drag.alpha0(), values[i]);
      } else {
        problem.boundary["injection"] = PressureBC{values[i]};
      }
      const SolutionField s = newton_solve(problem, config);
      row.iterations = s.history.iterations();
      row.p_max = s.pressure.maxCoeff();
      row.exp_beta_pmax = std::exp(problem.drag.beta() * row.p_max);
      if (!flux_tag.empty()) row.flux = total_flux(s, *problem.mesh, flux_tag).value;
      row.ok = true;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  });
  return rows;
}

}  // namespace porodarcy
