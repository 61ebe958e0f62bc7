#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "porodarcy/cases.hpp"
#include "porodarcy/error.hpp"
#include "porodarcy/solver.hpp"
#include "porodarcy/verification.hpp"

using namespace porodarcy;

namespace {

Eigen::SparseMatrix<double> sparse(const Eigen::MatrixXd& A) { return A.sparseView(); }

ProblemSpec neumann_square(ElementKind kind, int n, const DragModel& drag) {
  ProblemSpec p;
  p.mesh = std::make_shared<Mesh>(generate_structured(kind, n, n));
  p.drag = drag;
  for (const auto& t : p.mesh->tags()) p.boundary[t] = NormalVelocityBC{0.0};
  return p;
}

ProblemSpec channel(ElementKind kind, int n, const DragModel& drag) {
  ProblemSpec p;
  p.mesh = std::make_shared<Mesh>(generate_structured(kind, n, n));
  p.drag = drag;
  p.boundary["left"] = PressureBC{2.0};
  p.boundary["right"] = PressureBC{1.0};
  p.boundary["top"] = NormalVelocityBC{0.0};
  p.boundary["bottom"] = NormalVelocityBC{0.0};
  return p;
}

}  // namespace

TEST(LinearSolver, IdentityAndDenseOracle) {
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(10, -1.0, 2.0);
  EXPECT_LE((linear_solve(sparse(Eigen::MatrixXd::Identity(10, 10)), b) - b).norm(), 1e-15);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  Eigen::MatrixXd R(10, 10);
  for (auto& x : R.reshaped()) x = g(rng);
  const Eigen::MatrixXd spd = R * R.transpose() + 10.0 * Eigen::MatrixXd::Identity(10, 10);
  const Eigen::VectorXd x_ref = spd.partialPivLu().solve(b);
  EXPECT_LE((linear_solve(sparse(spd), b) - x_ref).norm(), 1e-12 * x_ref.norm());

  // Nonsymmetric matrix, solved twice with the same solver to reuse the analysis.
  Eigen::MatrixXd ns = R + 8.0 * Eigen::MatrixXd::Identity(10, 10);
  LinearSolver solver;
  EXPECT_LE((solver.solve(sparse(ns), b) - ns.partialPivLu().solve(b)).norm(), 1e-12);
  ns(3, 4) += 0.5;
  EXPECT_LE((solver.solve(sparse(ns), b) - ns.partialPivLu().solve(b)).norm(), 1e-12);
}

TEST(LinearSolver, SingularMatrix) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
  A(2, 2) = 0.0;
  EXPECT_THROW(linear_solve(sparse(A), Eigen::VectorXd::Ones(4)), SingularSystemError);
}

TEST(LinearSolver, PureNeumannWithoutPinIsSingular) {
  const ProblemSpec p = neumann_square(ElementKind::Q4, 4, DragModel::constant(1.0));
  std::vector<Constraint> velocity_only;
  for (const auto& c : apply_essential_bcs(p)) {
    if (c.dof % 3 != 2) velocity_only.push_back(c);
  }
  const Assembler as(p, DofMap(p.mesh->num_nodes(), velocity_only));
  const auto sys = as.assemble(Eigen::VectorXd::Zero(as.dofs().num_dofs()));
  try {
    linear_solve(sys.K, Eigen::VectorXd::Ones(sys.K.rows()));
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_NE(std::string(e.what()).find("pin"), std::string::npos);
  }
}

TEST(EssentialBcs, LeftEdgeCornerAndPin) {
  ProblemSpec p = neumann_square(ElementKind::Q4, 3, DragModel::constant(1.0));
  p.boundary["left"] = NormalVelocityBC{0.5};
  const auto cs = apply_essential_bcs(p);
  std::map<int, double> m;
  for (const auto& c : cs) m[c.dof] = c.value;
  // outward normal (-1, 0): v_x = -0.5 on the left edge
  for (int j = 1; j < 3; ++j) EXPECT_DOUBLE_EQ(m.at(DofMap::velocity(4 * j, 0)), -0.5);
  // bottom-left corner: v_x from the left edge, v_y = 0 from the bottom edge
  EXPECT_DOUBLE_EQ(m.at(DofMap::velocity(0, 0)), -0.5);
  EXPECT_DOUBLE_EQ(m.at(DofMap::velocity(0, 1)), 0.0);
  // exactly one pressure pin, on node 0
  int pins = 0;
  for (const auto& [dof, v] : m) pins += (dof % 3 == 2);
  EXPECT_EQ(pins, 1);
  EXPECT_TRUE(m.count(DofMap::pressure(0)));

  p.pin = PressurePin{5, 3.0};
  std::map<int, double> m2;
  for (const auto& c : apply_essential_bcs(p)) m2[c.dof] = c.value;
  EXPECT_DOUBLE_EQ(m2.at(DofMap::pressure(5)), 3.0);
  EXPECT_FALSE(m2.count(DofMap::pressure(0)));
}

TEST(EssentialBcs, NoPinWithPressureBoundary) {
  const ProblemSpec p = channel(ElementKind::T3, 3, DragModel::constant(1.0));
  for (const auto& c : apply_essential_bcs(p)) EXPECT_NE(c.dof % 3, 2);
}

TEST(EssentialBcs, SlantedFacetUnsupported) {
  std::istringstream in(R"(nodes 3 elements 1 facets 3
0 0 0
1 1 0
2 0 1
0 T3 0 1 2
0 0 bottom
0 1 slant
0 2 left
)");
  ProblemSpec p;
  p.mesh = std::make_shared<Mesh>(parse_mesh(in));
  p.boundary["bottom"] = NormalVelocityBC{0.0};
  p.boundary["left"] = PressureBC{0.0};
  p.boundary["slant"] = NormalVelocityBC{0.0};
  EXPECT_THROW(apply_essential_bcs(p), UnsupportedConstraintError);
  p.boundary["slant"] = PressureBC{1.0};
  EXPECT_NO_THROW(apply_essential_bcs(p));
}

TEST(Wellposedness, IncompatibleAndMixed) {
  ProblemSpec p = neumann_square(ElementKind::Q4, 4, DragModel::constant(1.0));
  p.sources = {{0, 0.1}};
  try {
    check_wellposedness(p);
    FAIL() << "expected IncompatibleProblemError";
  } catch (const IncompatibleProblemError& e) {
    EXPECT_NEAR(e.net_inflow(), 0.1, 1e-15);
  }
  p.sources.push_back({24, -0.1});
  const auto ok = check_wellposedness(p);
  EXPECT_TRUE(ok.all_neumann);
  EXPECT_TRUE(ok.compatible);
  EXPECT_TRUE(ok.pressure_pinned);

  ProblemSpec mixed = channel(ElementKind::Q4, 4, DragModel::constant(1.0));
  mixed.sources = {{12, 0.3}};
  const auto r = check_wellposedness(mixed);
  EXPECT_FALSE(r.all_neumann);
  EXPECT_TRUE(r.compatible);
}

TEST(Newton, ConstantDragConvergesInOneIteration) {
  for (auto kind : {ElementKind::Q4, ElementKind::T3}) {
    const auto s = newton_solve(build_five_spot(10, kind, DragModel::constant(1.0)));
    EXPECT_TRUE(s.history.converged);
    EXPECT_EQ(s.history.iterations(), 1) << to_string(kind);
  }
}

TEST(Newton, ChannelFlowIsExactForConstantDrag) {
  // p = 2 - x, v = (1, 0) lies in the discrete space.
  for (auto kind : {ElementKind::Q4, ElementKind::T3}) {
    const ProblemSpec p = channel(kind, 4, DragModel::constant(1.0));
    const auto s = newton_solve(p);
    for (int a = 0; a < p.mesh->num_nodes(); ++a) {
      EXPECT_NEAR(s.pressure(a), 2.0 - p.mesh->node(a).x(), 1e-12);
      EXPECT_NEAR(s.velocity(a, 0), 1.0, 1e-12);
      EXPECT_NEAR(s.velocity(a, 1), 0.0, 1e-12);
    }
  }
}

TEST(Newton, GaugeShiftOfPureNeumannProblem) {
  ProblemSpec p = build_five_spot(8, ElementKind::Q4, DragModel::constant(1.0));
  const auto base = newton_solve(p);
  p.pin->value += 3.0;
  const auto shifted = newton_solve(p);
  EXPECT_LE((shifted.pressure.array() - base.pressure.array() - 3.0).abs().maxCoeff(), 1e-10);
  EXPECT_LE((shifted.velocity - base.velocity).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Newton, MaxIterCarriesHistory) {
  NewtonConfig cfg;
  cfg.max_iter = 2;
  try {
    newton_solve(build_five_spot(8, ElementKind::Q4, DragModel::exponential(1.0, 0.3)), cfg);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.residual_norms().size(), 3u);
    EXPECT_LT(e.residual_norms().back(), e.residual_norms().front());
  }
}

TEST(Newton, OverflowPropagates) {
  ProblemSpec p = channel(ElementKind::Q4, 3, DragModel::exponential(1.0, 1.0));
  p.boundary["left"] = PressureBC{900.0};
  EXPECT_THROW(newton_solve(p), DragError);
}

TEST(Newton, WarmStartAndLineSearchAgree) {
  const ProblemSpec p = build_five_spot(8, ElementKind::T3, DragModel::exponential(1.0, 0.3));
  const auto a = newton_solve(p);
  NewtonConfig cfg;
  cfg.initial_guess = InitialGuess::DarcyLinear;
  cfg.line_search = true;
  const auto b = newton_solve(p, cfg);
  EXPECT_TRUE(b.history.converged);
  EXPECT_LE((a.pressure - b.pressure).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(b.history.iterations(), a.history.iterations());
}

TEST(Newton, InvalidConfig) {
  NewtonConfig cfg;
  cfg.rtol = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.max_iter = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  EXPECT_THROW(initial_guess_from_string("random"), InvalidArgument);
  EXPECT_EQ(initial_guess_from_string(to_string(InitialGuess::DarcyLinear)), InitialGuess::DarcyLinear);
}

TEST(ConvergenceOrder, ReferenceHistories) {
  const std::vector<double> q4{0.2424, 0.0820, 0.0371, 0.00451, 4.104e-5, 1.424e-9, 2.095e-15};
  const std::vector<double> t3{0.2919, 0.0863, 0.0377, 0.00432, 3.434e-5, 7.61e-10, 3.49e-15};
  for (const auto* h : {&q4, &t3}) {
    const double order = terminal_convergence_order(*h, roundoff_floor(*h));
    EXPECT_GE(order, 1.8);
    EXPECT_LE(order, 2.5);
  }
  EXPECT_NEAR(terminal_convergence_order(q4, roundoff_floor(q4)),
              std::log(1.424e-9 / 4.104e-5) / std::log(4.104e-5 / 0.00451), 1e-12);
  // Without the floor the roundoff-limited last step dominates.
  EXPECT_LT(terminal_convergence_order(q4, 0.0), 1.5);
  EXPECT_TRUE(std::isnan(terminal_convergence_order({1.0, 0.1}, 0.0)));
}

TEST(ConvergenceOrder, QuadraticSequence) {
  std::vector<double> r{1e-1};
  for (int k = 0; k < 4; ++k) r.push_back(r.back() * r.back());
  EXPECT_NEAR(terminal_convergence_order(r, 0.0), 2.0, 1e-12);
}

TEST(Solution, Unpack) {
  Eigen::VectorXd d(6);
  d << 1, 2, 3, 4, 5, 6;
  const auto s = make_solution(d);
  EXPECT_EQ(s.pressure(1), 6.0);
  EXPECT_EQ(s.velocity(1, 0), 4.0);
  EXPECT_EQ(s.velocity(0, 1), 2.0);
}
