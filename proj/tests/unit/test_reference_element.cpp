#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "porodarcy/error.hpp"
#include "porodarcy/reference_element.hpp"

using namespace porodarcy;

namespace {

Point random_reference_point(ElementKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (kind == ElementKind::Q4) return {2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0};
  double a = u(rng), b = u(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return {a, b};
}

ElementCoords coords(std::initializer_list<Point> pts) {
  ElementCoords c(static_cast<int>(pts.size()), 2);
  int i = 0;
  for (const auto& p : pts) c.row(i++) = p.transpose();
  return c;
}

// Exact integral of xi^a eta^b over the reference element.
double monomial_integral(ElementKind kind, int a, int b) {
  if (kind == ElementKind::Q4) {
    auto one = [](int k) { return k % 2 ? 0.0 : 2.0 / (k + 1); };
    return one(a) * one(b);
  }
  return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
}

}  // namespace

TEST(Shape, Q4Centre) {
  const auto s = shape(ElementKind::Q4, {0.0, 0.0});
  for (int a = 0; a < 4; ++a) EXPECT_DOUBLE_EQ(s.N(a), 0.25);
}

TEST(Shape, T3Vertex) {
  const auto s = shape(ElementKind::T3, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(s.N(0), 1.0);
  EXPECT_DOUBLE_EQ(s.N(1), 0.0);
  EXPECT_DOUBLE_EQ(s.N(2), 0.0);
}

TEST(Shape, PartitionOfUnity) {
  std::mt19937_64 rng(5);
  for (auto kind : {ElementKind::Q4, ElementKind::T3}) {
    for (int i = 0; i < 20; ++i) {
      const auto s = shape(kind, random_reference_point(kind, rng));
      EXPECT_NEAR(s.N.sum(), 1.0, 1e-15);
      EXPECT_NEAR(s.DN.col(0).sum(), 0.0, 1e-15);
      EXPECT_NEAR(s.DN.col(1).sum(), 0.0, 1e-15);
    }
  }
  const auto s = shape(ElementKind::Q4, {0.3, -0.2});
  EXPECT_NEAR(s.N.sum(), 1.0, 1e-15);
}

TEST(Geometry, UnitSquareAndTriangle) {
  const auto sq = coords({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    const auto g = geometry(sq, shape(ElementKind::Q4, random_reference_point(ElementKind::Q4, rng)).DN);
    EXPECT_NEAR(g.detJ, 0.25, 1e-15);
  }
  const auto tri = coords({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_NEAR(geometry(tri, shape(ElementKind::T3, {0.2, 0.2}).DN).detJ, 1.0, 1e-15);
}

TEST(Geometry, LinearFieldReproduction) {
  const Point b(0.7, -1.3);
  const double a0 = 0.4;
  const auto sheared = coords({{0, 0}, {2, 0.3}, {2.5, 1.7}, {0.4, 1.2}});
  const auto tri = coords({{0.1, 0.2}, {1.4, 0.5}, {0.3, 1.9}});
  std::mt19937_64 rng(9);
  for (const auto& [kind, c] : {std::pair{ElementKind::Q4, sheared}, std::pair{ElementKind::T3, tri}}) {
    Eigen::VectorXd u(c.rows());
    for (int a = 0; a < c.rows(); ++a) u(a) = a0 + b.dot(c.row(a).transpose());
    for (int i = 0; i < 20; ++i) {
      const auto g = geometry(c, shape(kind, random_reference_point(kind, rng)).DN);
      const Point grad = g.B.transpose() * u;
      EXPECT_NEAR(grad.x(), b.x(), 1e-13);
      EXPECT_NEAR(grad.y(), b.y(), 1e-13);
      EXPECT_NEAR(g.B.col(0).sum(), 0.0, 1e-13);
    }
  }
}

TEST(Geometry, DegenerateElementNamesId) {
  const auto flat = coords({{0, 0}, {1, 0}, {2, 0}});
  try {
    geometry(flat, shape(ElementKind::T3, {0.2, 0.2}).DN, 17);
    FAIL() << "expected DegenerateElementError";
  } catch (const DegenerateElementError& e) {
    EXPECT_EQ(e.element(), 17);
    EXPECT_NE(std::string(e.what()).find("17"), std::string::npos);
  }
}

TEST(Quadrature, WeightsAndMeasure) {
  for (int n : {1, 4, 9}) {
    const auto r = quadrature(ElementKind::Q4, n);
    double s = 0.0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 4.0, 1e-14);
  }
  for (int n : {1, 3, 6}) {
    const auto r = quadrature(ElementKind::T3, n);
    double s = 0.0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 0.5, 1e-14);
  }
  EXPECT_THROW(quadrature(ElementKind::Q4, 5), InvalidArgument);
  EXPECT_THROW(quadrature(ElementKind::T3, 4), InvalidArgument);
}

TEST(Quadrature, Q4Integrates49) {
  const auto r = quadrature(ElementKind::Q4, 4);
  double s = 0.0;
  for (int q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q].x() * r.points[q].y(), 2);
  EXPECT_NEAR(s, 4.0 / 9.0, 1e-15);
}

TEST(Quadrature, MonomialExactness) {
  for (auto kind : {ElementKind::Q4, ElementKind::T3}) {
    for (int n : kind == ElementKind::Q4 ? std::vector<int>{1, 4, 9} : std::vector<int>{1, 3, 6}) {
      const auto r = quadrature(kind, n);
      const int deg = quadrature_degree(kind, n);
      for (int a = 0; a <= deg; ++a) {
        for (int b = 0; b <= deg; ++b) {
          // Gauss tensor rules are exact per direction, simplex rules in total degree.
          if (kind == ElementKind::T3 && a + b > deg) continue;
          double s = 0.0;
          for (int q = 0; q < r.size(); ++q)
            s += r.weights[q] * std::pow(r.points[q].x(), a) * std::pow(r.points[q].y(), b);
          EXPECT_NEAR(s, monomial_integral(kind, a, b), 1e-14)
              << to_string(kind) << " n=" << n << " a=" << a << " b=" << b;
        }
      }
    }
  }
}

TEST(Quadrature, Levels) {
  EXPECT_EQ(quadrature_points(ElementKind::Q4, QuadratureLevel::Default), 4);
  EXPECT_EQ(quadrature_points(ElementKind::T3, QuadratureLevel::Default), 3);
  EXPECT_EQ(quadrature_points(ElementKind::Q4, QuadratureLevel::High), 9);
  EXPECT_EQ(quadrature_points(ElementKind::T3, QuadratureLevel::High), 6);
  const auto e = edge_gauss2();
  double s = 0.0, cubic = 0.0;
  for (int q = 0; q < e.size(); ++q) {
    s += e.weights[q];
    cubic += e.weights[q] * std::pow(e.points[q].x(), 3);
  }
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_NEAR(cubic, 0.25, 1e-15);
}
