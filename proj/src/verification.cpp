#include "porodarcy/verification.hpp"

#include <cmath>
#include <numbers>

#include "porodarcy/error.hpp"
#include "porodarcy/parallel.hpp"

namespace porodarcy {

PressureVelocity1D exact_1d(const ExactSolution1D& s, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("exact_1d: x must lie in [0, 1]");
  if (!(s.A > 0.0) || !(s.alpha0 > 0.0)) throw InvalidArgument("exact_1d: A and alpha0 must be positive");
  const double k = s.A * s.alpha0;
  if (s.variant == DragVariant::Constant) return {(s.p2 - s.p1) * x + s.p1, -(s.p2 - s.p1) / k};

  if (!(s.beta > 0.0))
    throw InvalidArgument("exact_1d: the " + std::string(to_string(s.variant)) +
                          " solution needs beta > 0; use the constant drag model for beta = 0");
  const double b = s.beta;
  if (s.variant == DragVariant::LinearBarus) {
    const double g1 = 1.0 + b * s.p1;
    const double g2 = 1.0 + b * s.p2;
    if (!(g1 > 0.0) || !(g2 > 0.0)) throw InvalidArgument("exact_1d: 1 + beta p must stay positive");
    const double p = (std::pow(g1, 1.0 - x) * std::pow(g2, x) - 1.0) / b;
    return {p, -std::log(g2 / g1) / (k * b)};
  }
  const double e1 = std::exp(-b * s.p1);
  const double e2 = std::exp(-b * s.p2);
  return {-std::log((1.0 - x) * e1 + x * e2) / b, (e2 - e1) / (k * b)};
}

ProblemSpec build_strip_problem(const ExactSolution1D& spec, int n) {
  if (n < 1) throw InvalidArgument("strip needs at least one element");
  ProblemSpec p;
  p.name = "oned";
  p.mesh = std::make_shared<Mesh>(generate_structured(ElementKind::Q4, n, 1, {0.0, 0.0, 1.0, 1.0 / n}));
  p.drag = DragModel(spec.variant, spec.alpha0,
                     spec.variant == DragVariant::Constant ? 0.0 : spec.beta);
  p.A = spec.A;
  p.boundary["left"] = PressureBC{spec.p1};
  p.boundary["right"] = PressureBC{spec.p2};
  p.boundary["top"] = NormalVelocityBC{0.0};
  p.boundary["bottom"] = NormalVelocityBC{0.0};
  return p;
}

ManufacturedValue manufactured_fields(double x, double y, const DragModel& drag, double A,
                                      double C) {
  using std::numbers::pi;
  ManufacturedValue m;
  m.v = {std::sin(pi * x) * std::cos(pi * y), -std::cos(pi * x) * std::sin(pi * y)};
  m.p = 1.0 + 25.0 * x * y * (x - 1.0) * (y - 1.0);
  const Point grad{25.0 * (2.0 * x - 1.0) * y * (y - 1.0), 25.0 * x * (x - 1.0) * (2.0 * y - 1.0)};
  m.b = (A * drag.alpha(m.p) * m.v + grad) / C;
  return m;
}

ManufacturedValue manufactured_fields(double x, double y) {
  return manufactured_fields(x, y, DragModel::exponential(1.0, 2.0));
}

ProblemSpec build_manufactured_problem(std::shared_ptr<const Mesh> mesh, const DragModel& drag,
                                       double A, double C) {
  ProblemSpec p;
  p.name = "manufactured";
  p.drag = drag;
  p.A = A;
  p.C = C;
  p.body_force = [drag, A, C](const Point& x) {
    return manufactured_fields(x.x(), x.y(), drag, A, C).b;
  };
  for (const auto& tag : mesh->tags()) p.boundary[tag] = NormalVelocityBC{0.0};
  const int pin = nearest_node(*mesh, Point(0.0, 0.0));
  const Point& xp = mesh->node(pin);
  p.pin = PressurePin{pin, manufactured_fields(xp.x(), xp.y(), drag, A, C).p};
  p.mesh = std::move(mesh);
  return p;
}

L2Errors l2_error(const SolutionField& solution, const Mesh& mesh, const ExactField& exact,
                  QuadratureLevel level) {
  if (solution.pressure.size() != mesh.num_nodes())
    throw InvalidArgument("solution size does not match the mesh");
  double ep = 0.0, ev = 0.0;
  for (const auto& e : mesh.elements()) {
    const auto rule = quadrature(e.kind, quadrature_points(e.kind, level));
    const ElementCoords c = mesh.element_coords(e.id);
    const int n = e.size();
    ElementVelocity v(n, 2);
    ElementPressure p(n);
    for (int a = 0; a < n; ++a) {
      v.row(a) = solution.velocity.row(e.nodes[a]);
      p(a) = solution.pressure(e.nodes[a]);
    }
    for (int q = 0; q < rule.size(); ++q) {
      const auto s = shape(e.kind, rule.points[q]);
      const auto g = geometry(c, s.DN, e.id);
      const Point x = c.transpose() * s.N.transpose();
      const auto [ve, pe] = exact(x);
      const double w = rule.weights[q] * g.detJ;
      const double dp = (s.N * p)(0) - pe;
      const Point dv = (s.N * v).transpose() - ve;
      ep += w * dp * dp;
      ev += w * dv.squaredNorm();
    }
  }
  return {std::sqrt(ep), std::sqrt(ev)};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_study(const std::function<ProblemSpec(int)>& build,
                                   const std::vector<int>& levels, const ExactField& exact,
                                   const NewtonConfig& config) {
  if (levels.size() < 3) throw InvalidArgument("convergence study needs at least three levels");
  const int m = static_cast<int>(levels.size());
  std::vector<ConvergenceRow> rows(m);
  std::vector<std::string> failures(m);
  parallel_for(m, [&](int i) {
    try {
      const ProblemSpec problem = build(levels[i]);
      const SolutionField s = newton_solve(problem, config);
      const L2Errors err = l2_error(s, *problem.mesh, exact);
      rows[i] = {levels[i], problem.mesh->h(), err.err_p, err.err_v, s.history.iterations()};
    } catch (const std::exception& ex) {
      failures[i] = "level " + std::to_string(levels[i]) + ": " + ex.what();
    }
  });

  ConvergenceTable table;
  for (int i = 0; i < m; ++i) {
    if (!failures[i].empty()) {
      table.complete = false;
      table.failure = failures[i];
      break;
    }
    table.rows.push_back(rows[i]);
  }
  if (table.rows.size() < 2) return table;

  std::vector<double> lh, lp, lv;
  for (const auto& r : table.rows) {
    lh.push_back(std::log(r.h));
    lp.push_back(std::log(r.err_p));
    lv.push_back(std::log(r.err_v));
  }
  table.slope_p = least_squares_slope(lh, lp);
  table.slope_v = least_squares_slope(lh, lv);
  for (size_t i = 1; i < lh.size(); ++i) {
    table.pairwise_p.push_back((lp[i] - lp[i - 1]) / (lh[i] - lh[i - 1]));
    table.pairwise_v.push_back((lv[i] - lv[i - 1]) / (lh[i] - lh[i - 1]));
  }
  return table;
}

ConvergenceTable manufactured_convergence(ElementKind kind, const std::vector<int>& levels,
                                          const DragModel& drag, const NewtonConfig& config) {
  auto build = [kind, drag](int n) {
    return build_manufactured_problem(std::make_shared<Mesh>(generate_structured(kind, n, n)), drag);
  };
  auto exact = [drag](const Point& x) {
    const auto m = manufactured_fields(x.x(), x.y(), drag);
    return std::make_pair(m.v, m.p);
  };
  return convergence_study(build, levels, exact, config);
}

}  // namespace porodarcy
