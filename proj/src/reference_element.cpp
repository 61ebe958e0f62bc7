#include "porodarcy/reference_element.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "porodarcy/error.hpp"

namespace porodarcy {

ShapeEval shape(ElementKind kind, const Point& xi) {
  ShapeEval s;
  const double r = xi.x(), t = xi.y();
  switch (kind) {
    case ElementKind::Q4:
      s.N.resize(4);
      s.DN.resize(4, 2);
      s.N << 0.25 * (1 - r) * (1 - t), 0.25 * (1 + r) * (1 - t), 0.25 * (1 + r) * (1 + t),
          0.25 * (1 - r) * (1 + t);
      s.DN << -0.25 * (1 - t), -0.25 * (1 - r),  //
          0.25 * (1 - t), -0.25 * (1 + r),       //
          0.25 * (1 + t), 0.25 * (1 + r),        //
          -0.25 * (1 + t), 0.25 * (1 - r);
      return s;
    case ElementKind::T3:
      s.N.resize(3);
      s.DN.resize(3, 2);
      s.N << 1 - r - t, r, t;
      s.DN << -1, -1, 1, 0, 0, 1;
      return s;
  }
  throw InvalidArgument("unknown element kind");
}

GeometryEval geometry(const ElementCoords& coords, const ShapeGrad& DN, int element_id) {
  GeometryEval g;
  g.J = coords.transpose() * DN;
  g.detJ = g.J.determinant();
  if (!(g.detJ > 0.0)) throw DegenerateElementError(element_id, g.detJ);
  g.B = DN * g.J.inverse();
  return g;
}

QuadratureRule quadrature(ElementKind kind, int points) {
  QuadratureRule q;
  if (kind == ElementKind::Q4) {
    std::vector<double> x, w;
    switch (points) {
      case 1:
        x = {0.0};
        w = {2.0};
        break;
      case 4:
        x = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
        w = {1.0, 1.0};
        break;
      case 9:
        x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
        w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
        break;
      default:
        throw InvalidArgument("unsupported Q4 quadrature with " + std::to_string(points) +
                              " points (use 1, 4 or 9)");
    }
    for (size_t j = 0; j < x.size(); ++j) {
      for (size_t i = 0; i < x.size(); ++i) {
        q.points.emplace_back(x[i], x[j]);
        q.weights.push_back(w[i] * w[j]);
      }
    }
    return q;
  }

  switch (points) {
    case 1:
      q.points = {Point(1.0 / 3.0, 1.0 / 3.0)};
      q.weights = {0.5};
      break;
    case 3:
      q.points = {Point(1.0 / 6.0, 1.0 / 6.0), Point(2.0 / 3.0, 1.0 / 6.0),
                  Point(1.0 / 6.0, 2.0 / 3.0)};
      q.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
      break;
    case 6: {
      // Dunavant degree-4 rule.
      const double a1 = 0.445948490915965, w1 = 0.223381589678011;
      const double a2 = 0.091576213509771, w2 = 0.109951743655322;
      q.points = {Point(a1, a1), Point(1 - 2 * a1, a1), Point(a1, 1 - 2 * a1),
                  Point(a2, a2), Point(1 - 2 * a2, a2), Point(a2, 1 - 2 * a2)};
      q.weights = {0.5 * w1, 0.5 * w1, 0.5 * w1, 0.5 * w2, 0.5 * w2, 0.5 * w2};
      break;
    }
    default:
      throw InvalidArgument("unsupported T3 quadrature with " + std::to_string(points) +
                            " points (use 1, 3 or 6)");
  }
  return q;
}

int quadrature_degree(ElementKind kind, int points) {
  if (kind == ElementKind::Q4) {
    switch (points) {
      case 1: return 1;
      case 4: return 3;
      case 9: return 5;
    }
  } else {
    switch (points) {
      case 1: return 1;
      case 3: return 2;
      case 6: return 4;
    }
  }
  throw InvalidArgument("unsupported quadrature rule");
}

int quadrature_points(ElementKind kind, QuadratureLevel level) {
  if (kind == ElementKind::Q4) return level == QuadratureLevel::Default ? 4 : 9;
  return level == QuadratureLevel::Default ? 3 : 6;
}

QuadratureRule edge_gauss2() {
  const double d = 0.5 / std::sqrt(3.0);
  return QuadratureRule{{Point(0.5 - d, 0.0), Point(0.5 + d, 0.0)}, {0.5, 0.5}};
}

}  // namespace porodarcy
