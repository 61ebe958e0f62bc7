#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "porodarcy/error.hpp"
#include "porodarcy/verification.hpp"

using namespace porodarcy;

namespace {

const double pi = std::numbers::pi;

ExactSolution1D spec(DragVariant v, double beta) {
  ExactSolution1D s;
  s.variant = v;
  s.beta = beta;
  s.A = 1.3;
  s.alpha0 = 0.7;
  return s;
}

DragModel drag_of(const ExactSolution1D& s) { return DragModel(s.variant, s.alpha0, s.beta); }

// RK4 for p' = -A alpha(p) v from p(0) = p1.
double shoot(const ExactSolution1D& s, double v, int steps = 2000) {
  const auto d = drag_of(s);
  auto f = [&](double p) { return -s.A * d.alpha(p) * v; };
  double p = s.p1;
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(p), k2 = f(p + 0.5 * h * k1), k3 = f(p + 0.5 * h * k2), k4 = f(p + h * k3);
    p += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return p;
}

// Velocity for which the shot lands on p2, by bisection.
double shooting_velocity(const ExactSolution1D& s) {
  double lo = 0.0, hi = (s.p1 - s.p2) / (s.A * s.alpha0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shoot(s, mid) > s.p2 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Exact1D, ConstantIsLinear) {
  const auto s = spec(DragVariant::Constant, 0.0);
  EXPECT_DOUBLE_EQ(exact_1d(s, 0.0).p, 200.0);
  EXPECT_DOUBLE_EQ(exact_1d(s, 1.0).p, 1.0);
  EXPECT_NEAR(exact_1d(s, 0.25).p, 150.25, 1e-12);
  EXPECT_NEAR(exact_1d(s, 0.6).v, 199.0 / (1.3 * 0.7), 1e-12);
}

TEST(Exact1D, BoundaryValuesAndDomain) {
  for (auto v : {DragVariant::LinearBarus, DragVariant::ExponentialBarus}) {
    const auto s = spec(v, 0.01);
    EXPECT_NEAR(exact_1d(s, 0.0).p, s.p1, 1e-10);
    EXPECT_NEAR(exact_1d(s, 1.0).p, s.p2, 1e-10);
    EXPECT_THROW(exact_1d(s, 1.5), InvalidArgument);
    EXPECT_THROW(exact_1d(spec(v, 0.0), 0.5), InvalidArgument);
  }
  EXPECT_THROW(exact_1d(spec(DragVariant::Constant, 0.0), -0.1), InvalidArgument);
}

TEST(Exact1D, SatisfiesOde) {
  const double h = 1e-5;
  for (auto v : {DragVariant::Constant, DragVariant::LinearBarus, DragVariant::ExponentialBarus}) {
    const auto s = spec(v, 0.02);
    const auto d = drag_of(s);
    for (double x = 0.05; x < 1.0; x += 0.1) {
      const double dp = (exact_1d(s, x + h).p - exact_1d(s, x - h).p) / (2.0 * h);
      const auto e = exact_1d(s, x);
      EXPECT_NEAR(s.A * d.alpha(e.p) * e.v + dp, 0.0, 1e-6 * std::abs(dp)) << to_string(v) << " x=" << x;
      EXPECT_NEAR(exact_1d(s, x + h).v, e.v, 1e-12 * std::abs(e.v));
    }
  }
}

TEST(Exact1D, MatchesShooting) {
  for (auto v : {DragVariant::Constant, DragVariant::LinearBarus, DragVariant::ExponentialBarus}) {
    const auto s = spec(v, 0.01);
    const double vs = shooting_velocity(s);
    EXPECT_NEAR(exact_1d(s, 0.3).v, vs, 1e-8 * vs) << to_string(v);
  }
}

TEST(Exact1D, SmallBetaLimit) {
  const auto c = exact_1d(spec(DragVariant::Constant, 0.0), 0.4);
  for (auto v : {DragVariant::LinearBarus, DragVariant::ExponentialBarus}) {
    const auto e = exact_1d(spec(v, 1e-9), 0.4);
    EXPECT_NEAR(e.p, c.p, 1e-4);
    EXPECT_NEAR(e.v, c.v, 1e-4);
  }
}

TEST(Manufactured, KnownValues) {
  const auto m = manufactured_fields(0.5, 0.5);
  EXPECT_DOUBLE_EQ(m.p, 2.5625);
  EXPECT_NEAR(m.v.x(), 0.0, 1e-15);
  EXPECT_NEAR(m.v.y(), 0.0, 1e-15);
  for (double y = 0.0; y <= 1.0; y += 0.125) {
    EXPECT_NEAR(manufactured_fields(0.0, y).v.x(), 0.0, 1e-15);
    EXPECT_NEAR(manufactured_fields(1.0, y).v.x(), 0.0, 1e-15);
    EXPECT_NEAR(manufactured_fields(y, 0.0).v.y(), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(manufactured_fields(y, 0.0).p, 1.0);
  }
}

TEST(Manufactured, BodyForceIdentity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), y = u(rng);
    const auto m = manufactured_fields(x, y);
    const Point v(std::sin(pi * x) * std::cos(pi * y), -std::cos(pi * x) * std::sin(pi * y));
    const Point grad(25.0 * (2 * x - 1) * y * (y - 1), 25.0 * x * (x - 1) * (2 * y - 1));
    const Point b = std::exp(2.0 * m.p) * v + grad;
    EXPECT_LE((m.b - b).norm(), 1e-12 * b.norm());
  }
}

TEST(Manufactured, DivergenceFreeAndScaled) {
  const double h = 1e-6;
  for (double x = 0.1; x < 1.0; x += 0.2) {
    for (double y = 0.15; y < 1.0; y += 0.2) {
      const double div = (manufactured_fields(x + h, y).v.x() - manufactured_fields(x - h, y).v.x() +
                          manufactured_fields(x, y + h).v.y() - manufactured_fields(x, y - h).v.y()) /
                         (2 * h);
      EXPECT_NEAR(div, 0.0, 1e-8);
      // b scales as 1/C
      const auto d = DragModel::linear(1.0, 0.5);
      EXPECT_LE((manufactured_fields(x, y, d, 2.0, 4.0).b * 4.0 - manufactured_fields(x, y, d, 2.0, 1.0).b).norm(),
                1e-12);
    }
  }
}

TEST(L2Error, ExactForInterpolatedFields) {
  for (auto kind : {ElementKind::Q4, ElementKind::T3}) {
    const Mesh m = generate_structured(kind, 3, 3);
    Eigen::VectorXd d(3 * m.num_nodes());
    auto field = [](const Point& x) {
      return std::pair<Point, double>{Point(1.0 - x.y(), 2.0 + x.x()), 0.5 + x.x() + 2.0 * x.y()};
    };
    for (int a = 0; a < m.num_nodes(); ++a) {
      const auto [v, p] = field(m.node(a));
      d.segment<3>(3 * a) << v.x(), v.y(), p;
    }
    const auto e = l2_error(make_solution(d), m, field);
    EXPECT_LE(e.err_p, 1e-14);
    EXPECT_LE(e.err_v, 1e-14);

    const auto unit = l2_error(make_solution(Eigen::VectorXd::Zero(3 * m.num_nodes())), m,
                               [](const Point&) { return std::pair<Point, double>{Point(3.0, 4.0), 1.0}; });
    EXPECT_NEAR(unit.err_p, 1.0, 1e-13);
    EXPECT_NEAR(unit.err_v, 5.0, 1e-13);
  }
}

TEST(LeastSquaresSlope, Line) {
  EXPECT_NEAR(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}), 2.0, 1e-14);
  EXPECT_THROW(least_squares_slope({1.0}, {2.0}), InvalidArgument);
}

TEST(Convergence, StripReproducesConstantSolution) {
  const auto s = spec(DragVariant::Constant, 0.0);
  const ProblemSpec p = build_strip_problem(s, 20);
  const auto sol = newton_solve(p);
  for (int a = 0; a < p.mesh->num_nodes(); ++a) {
    const auto e = exact_1d(s, p.mesh->node(a).x());
    EXPECT_NEAR(sol.pressure(a), e.p, 1e-9);
    EXPECT_NEAR(sol.velocity(a, 0), e.v, 1e-9);
  }
}

TEST(Convergence, ManufacturedLadderDecreases) {
  const auto t = manufactured_convergence(ElementKind::Q4, {4, 8, 16}, DragModel::constant(1.0));
  ASSERT_TRUE(t.complete);
  ASSERT_EQ(t.rows.size(), 3u);
  for (int i = 1; i < 3; ++i) {
    EXPECT_LT(t.rows[i].err_p, t.rows[i - 1].err_p);
    EXPECT_LT(t.rows[i].err_v, t.rows[i - 1].err_v);
  }
  EXPECT_GT(t.slope_p, 1.5);
  EXPECT_EQ(t.pairwise_p.size(), 2u);
}

TEST(Convergence, FailureTruncatesTable) {
  auto build = [](int n) {
    if (n >= 8) throw InvalidArgument("boom");
    return build_manufactured_problem(std::make_shared<Mesh>(generate_structured(ElementKind::T3, n, n)),
                                      DragModel::constant(1.0));
  };
  auto exact = [](const Point& x) {
    const auto m = manufactured_fields(x.x(), x.y(), DragModel::constant(1.0));
    return std::pair<Point, double>{m.v, m.p};
  };
  const auto t = convergence_study(build, {2, 4, 8, 16}, exact);
  EXPECT_FALSE(t.complete);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_NE(t.failure.find("level 8"), std::string::npos);
  EXPECT_THROW(convergence_study(build, {2, 4}, exact), InvalidArgument);
}
