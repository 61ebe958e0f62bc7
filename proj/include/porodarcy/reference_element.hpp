#pragma once

#include <vector>

#include <Eigen/Core>

#include "porodarcy/mesh.hpp"

namespace porodarcy {

/// Row vector of shape-function values, at most four entries.
using ShapeRow = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, 4>;
/// n-by-2 matrix of shape-function derivatives, one row per node.
using ShapeGrad = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::ColMajor, 4, 2>;

struct ShapeEval {
  ShapeRow N;
  ShapeGrad DN;  // derivatives with respect to the reference coordinates
};

struct GeometryEval {
  Eigen::Matrix2d J;  // dx/dxi
  double detJ = 0.0;
  ShapeGrad B;  // DN * J^{-1}: physical shape-function gradients
};

struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(weights.size()); }
};

/// Reference element Q4: [-1,1]^2, nodes counter-clockwise from (-1,-1).
/// Reference element T3: unit simplex, nodes (0,0), (1,0), (0,1).
ShapeEval shape(ElementKind kind, const Point& xi);

/// Isoparametric map of an element with nodal coordinates `coords`.
/// Throws DegenerateElementError (naming `element_id`) when detJ <= 0.
GeometryEval geometry(const ElementCoords& coords, const ShapeGrad& DN, int element_id = -1);

/// Quadrature on the reference element. Q4 accepts 1, 4 (2x2 Gauss) and 9 (3x3
/// Gauss) points; T3 accepts 1 (degree 1), 3 (degree 2) and 6 (degree 4) points.
QuadratureRule quadrature(ElementKind kind, int points);

/// Polynomial degree integrated exactly by `quadrature(kind, points)`.
int quadrature_degree(ElementKind kind, int points);

enum class QuadratureLevel { Default, High };

/// Default: 2x2 Gauss on Q4, 3-point on T3. High: 3x3 Gauss on Q4, 6-point on T3.
int quadrature_points(ElementKind kind, QuadratureLevel level);

/// Two-point Gauss rule on [0,1] used for facet integrals.
QuadratureRule edge_gauss2();

}  // namespace porodarcy
