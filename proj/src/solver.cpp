#include "porodarcy/solver.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "porodarcy/error.hpp"

namespace porodarcy {

std::string_view to_string(InitialGuess guess) {
  return guess == InitialGuess::Zero ? "zero" : "darcy-linear";
}

InitialGuess initial_guess_from_string(std::string_view name) {
  if (name == "zero") return InitialGuess::Zero;
  if (name == "darcy-linear") return InitialGuess::DarcyLinear;
  throw InvalidArgument("unknown initial guess '" + std::string(name) +
                        "' (expected zero or darcy-linear)");
}

void NewtonConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("Newton tolerances must be positive");
  if (max_iter < 1) throw InvalidArgument("Newton max_iter must be at least 1");
}

SolutionField make_solution(const Eigen::VectorXd& dofs, ConvergenceHistory history) {
  const auto nn = dofs.size() / 3;
  SolutionField s;
  s.dofs = dofs;
  s.velocity.resize(nn, 2);
  s.pressure.resize(nn);
  for (Eigen::Index a = 0; a < nn; ++a) {
    s.velocity(a, 0) = dofs(3 * a);
    s.velocity(a, 1) = dofs(3 * a + 1);
    s.pressure(a) = dofs(3 * a + 2);
  }
  s.history = std::move(history);
  return s;
}

struct LinearSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  std::vector<int> outer, inner;

  bool same_pattern(const Eigen::SparseMatrix<double>& k) const {
    if (!analyzed || outer.size() != static_cast<size_t>(k.outerSize() + 1) ||
        inner.size() != static_cast<size_t>(k.nonZeros()))
      return false;
    return std::equal(outer.begin(), outer.end(), k.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), k.innerIndexPtr());
  }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const Eigen::SparseMatrix<double>& K_in,
                                    const Eigen::VectorXd& rhs) {
  if (K_in.rows() != K_in.cols() || K_in.rows() != rhs.size())
    throw InvalidArgument("linear system dimensions disagree");
  if (K_in.rows() == 0) return {};
  Eigen::SparseMatrix<double> K = K_in;
  K.makeCompressed();

  auto& s = *impl_;
  if (!s.same_pattern(K)) {
    s.lu.analyzePattern(K);
    s.outer.assign(K.outerIndexPtr(), K.outerIndexPtr() + K.outerSize() + 1);
    s.inner.assign(K.innerIndexPtr(), K.innerIndexPtr() + K.nonZeros());
    s.analyzed = true;
  }
  s.lu.factorize(K);
  const std::string hint = " (a pure-Neumann problem needs a pressure pin)";
  if (s.lu.info() != Eigen::Success)
    throw SingularSystemError("sparse LU factorization failed: " + s.lu.lastErrorMessage() + hint);

  // A random right-hand side exposes a near-null space as a huge solution.
  double k_norm = 0.0;
  for (int j = 0; j < K.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, j); it; ++it)
      k_norm = std::max(k_norm, std::abs(it.value()));
  }
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd probe(K.rows());
  for (auto& v : probe) v = unit(rng);
  const Eigen::VectorXd z = s.lu.solve(probe);
  const double growth = k_norm * z.lpNorm<Eigen::Infinity>() / probe.lpNorm<Eigen::Infinity>();
  if (!std::isfinite(growth) || growth > 1e14)
    throw SingularSystemError("linear system is numerically singular" + hint);

  Eigen::VectorXd x = s.lu.solve(rhs);
  const double b_norm = rhs.norm();
  const double res = (K * x - rhs).norm();
  if (!x.allFinite() || (b_norm > 0.0 && res > 1e-10 * b_norm))
    throw SingularSystemError("linear solve residual too large" + hint);
  return x;
}

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs) {
  LinearSolver solver;
  return solver.solve(K, rhs);
}

Eigen::VectorXd linear_solve(const GlobalSystem& system) { return linear_solve(system.K, system.rhs); }

std::vector<Constraint> apply_essential_bcs(const ProblemSpec& problem) {
  problem.validate();
  const Mesh& mesh = *problem.mesh;
  std::map<int, double> fixed;
  auto fix = [&](int dof, double value, const std::string& what) {
    const auto [it, inserted] = fixed.emplace(dof, value);
    if (!inserted && std::abs(it->second - value) > 1e-14 * (1.0 + std::abs(value)))
      throw UnsupportedConstraintError("conflicting " + what + " at dof " + std::to_string(dof));
  };

  for (const auto& f : mesh.facets()) {
    const auto* bc = std::get_if<NormalVelocityBC>(&problem.boundary.at(f.tag));
    if (!bc) continue;
    int axis = -1;
    if (std::abs(f.normal.y()) < 1e-12) axis = 0;
    if (std::abs(f.normal.x()) < 1e-12) axis = 1;
    if (axis < 0)
      throw UnsupportedConstraintError("normal-velocity condition on tag '" + f.tag +
                                       "' requires axis-aligned facets");
    const double value = bc->value * (f.normal(axis) > 0.0 ? 1.0 : -1.0);
    for (int node : f.nodes) fix(DofMap::velocity(node, axis), value, "normal-velocity conditions");
  }

  if (problem.pin) {
    fix(DofMap::pressure(problem.pin->node), problem.pin->value, "pressure pin");
  } else if (!problem.has_pressure_boundary()) {
    fix(DofMap::pressure(0), problem.auto_pin_value, "pressure pin");
  }

  std::vector<Constraint> out;
  out.reserve(fixed.size());
  for (const auto& [dof, value] : fixed) out.push_back({dof, value});
  return out;
}

std::string WellposednessReport::summary() const {
  std::ostringstream os;
  os.precision(17);
  if (!all_neumann) {
    os << "mixed boundary: pressure datum present";
  } else {
    os << "all-Neumann: net inflow " << net_inflow << (compatible ? " (compatible)" : " (incompatible)");
  }
  if (pressure_pinned) os << "; pressure pinned at node " << pin_node;
  return os.str();
}

WellposednessReport check_wellposedness(const ProblemSpec& problem) {
  problem.validate();
  WellposednessReport r;
  r.all_neumann = !problem.has_pressure_boundary();
  if (problem.pin) {
    r.pressure_pinned = true;
    r.pin_node = problem.pin->node;
  } else if (r.all_neumann) {
    r.pressure_pinned = true;
    r.pin_node = 0;
  }
  if (!r.all_neumann) return r;

  double inflow = 0.0;
  for (const auto& s : problem.sources) inflow += s.strength;
  for (const auto& f : problem.mesh->facets()) {
    const auto& bc = std::get<NormalVelocityBC>(problem.boundary.at(f.tag));
    inflow -= bc.value * f.length;
  }
  r.net_inflow = inflow;
  r.compatible = std::abs(inflow) <= 1e-10;
  if (!r.compatible) throw IncompatibleProblemError(inflow);
  return r;
}

namespace {

void add_update(const DofMap& dofs, const Eigen::VectorXd& du, double step, Eigen::VectorXd& x) {
  for (int d = 0; d < dofs.num_dofs(); ++d) {
    const int f = dofs.free_index(d);
    if (f >= 0) x(d) += step * du(f);
  }
}

}  // namespace

SolutionField newton_solve(const ProblemSpec& problem, const NewtonConfig& config) {
  config.validate();
  check_wellposedness(problem);
  const auto constraints = apply_essential_bcs(problem);
  const Assembler assembler(problem, DofMap(problem.mesh->num_nodes(), constraints), config.assembly);
  const DofMap& dofs = assembler.dofs();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dofs.num_dofs());
  if (config.initial_guess == InitialGuess::DarcyLinear &&
      problem.drag.variant() != DragVariant::Constant) {
    ProblemSpec linear = problem;
    linear.drag = DragModel::constant(problem.drag.alpha0());
    NewtonConfig warm = config;
    warm.initial_guess = InitialGuess::Zero;
    x = newton_solve(linear, warm).dofs;
  }
  for (const auto& [dof, value] : dofs.constraints()) x(dof) = value;

  ConvergenceHistory history;
  LinearSolver linear_solver;
  GlobalSystem sys = assembler.assemble(x);
  history.residual_norms.push_back(sys.residual_norm);
  const double tol = config.rtol * sys.residual_norm + config.atol;

  while (history.residual_norms.back() > tol) {
    if (history.iterations() >= config.max_iter)
      throw ConvergenceError("Newton did not converge in " + std::to_string(config.max_iter) +
                                 " iterations",
                             history.residual_norms);
    const Eigen::VectorXd du = linear_solver.solve(sys.K, sys.rhs);

    double step = 1.0;
    Eigen::VectorXd trial = x;
    add_update(dofs, du, step, trial);
    if (config.line_search) {
      const double current = history.residual_norms.back();
      for (int halving = 0; halving < 20; ++halving) {
        double norm = std::numeric_limits<double>::infinity();
        try {
          norm = assembler.assemble(trial, false).residual_norm;
        } catch (const DragError&) {
        }
        if (norm <= current) break;
        step *= 0.5;
        trial = x;
        add_update(dofs, du, step, trial);
      }
    }
    x = std::move(trial);
    sys = assembler.assemble(x);
    history.residual_norms.push_back(sys.residual_norm);
    if (!std::isfinite(sys.residual_norm))
      throw ConvergenceError("Newton produced a non-finite residual", history.residual_norms);
  }
  history.converged = true;
  return make_solution(x, std::move(history));
}

double roundoff_floor(const std::vector<double>& residual_norms) {
  if (residual_norms.empty()) return 0.0;
  return 1e3 * std::numeric_limits<double>::epsilon() * residual_norms.front();
}

double terminal_convergence_order(const std::vector<double>& residual_norms, double floor) {
  std::vector<double> above;
  for (double r : residual_norms) {
    if (r > floor) above.push_back(r);
  }
  if (above.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double r1 = above[above.size() - 3];
  const double r2 = above[above.size() - 2];
  const double r3 = above[above.size() - 1];
  return std::log(r3 / r2) / std::log(r2 / r1);
}

}  // namespace porodarcy
