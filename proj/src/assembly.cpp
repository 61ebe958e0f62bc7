#include "porodarcy/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "porodarcy/error.hpp"

namespace porodarcy {

DofMap::DofMap(int num_nodes, const std::vector<Constraint>& constraints)
    : num_nodes_(num_nodes), free_index_(3 * num_nodes, 0) {
  for (const auto& c : constraints) {
    if (c.dof < 0 || c.dof >= num_dofs())
      throw InvalidArgument("constraint on unknown dof " + std::to_string(c.dof));
    if (!std::isfinite(c.value)) throw InvalidArgument("constraint value must be finite");
    const auto [it, inserted] = constraints_.emplace(c.dof, c.value);
    if (!inserted && it->second != c.value)
      throw InvalidArgument("conflicting constraints on dof " + std::to_string(c.dof));
    free_index_[c.dof] = -1;
  }
  for (auto& idx : free_index_) {
    if (idx == 0) idx = num_free_++;
  }
}

namespace {

[[noreturn]] void rethrow_with_element(int element) {
  try {
    throw;
  } catch (const DragOverflowError& e) {
    throw DragOverflowError(e.pressure(), e.exponent(), element);
  } catch (const NonpositiveDragError& e) {
    throw NonpositiveDragError(e.pressure(), e.value(), element);
  } catch (const DragError& e) {
    throw DragError("drag evaluation failed", e.pressure(), element);
  }
}

}  // namespace

ElementContribution element_contribution(const ElementInputs& in) {
  const int n = nodes_per_element(in.kind);
  const int nv = 2 * n;
  ElementContribution c;
  c.Rv.setZero(nv);
  c.Rp.setZero(n);
  c.Kvv.setZero(nv, nv);
  c.Kvp.setZero(nv, n);
  c.Kpv.setZero(n, nv);
  c.Kpp.setZero(n, n);

  const QuadratureRule rule = in.quadrature
                                  ? *in.quadrature
                                  : quadrature(in.kind, quadrature_points(in.kind, QuadratureLevel::Default));
  const auto& vhat = in.state.v;
  const auto& phat = in.state.p;

  for (int q = 0; q < rule.size(); ++q) {
    const auto s = shape(in.kind, rule.points[q]);
    const auto g = geometry(in.coords, s.DN, in.element_id);
    const double w = rule.weights[q] * g.detJ;
    const auto& N = s.N;
    const auto& B = g.B;

    const Point v = vhat.transpose() * N.transpose();
    const double p = N.dot(phat);
    const Point grad_p = B.transpose() * phat;
    const double div_v = (B.array() * vhat.array()).sum();
    const Point x = in.coords.transpose() * N.transpose();
    const Point cb = in.body && *in.body ? Point(in.C * (*in.body)(x)) : Point::Zero();

    double a = 0.0, da = 0.0;
    try {
      a = in.A * in.drag.alpha(p);
      da = in.A * in.drag.dalpha_dp(p);
    } catch (const DragError&) {
      rethrow_with_element(in.element_id);
    }
    const Point r = a * v + grad_p - cb;
    const Point rest = grad_p - cb;  // r without the drag term

    for (int ia = 0; ia < n; ++ia) {
      const double Na = N(ia);
      const Point Ba = B.row(ia).transpose();
      for (int i = 0; i < 2; ++i) {
        c.Rv(2 * ia + i) += w * (Na * (a * v(i) - cb(i)) - Ba(i) * p - 0.5 * Na * r(i));
        if (in.div_stabilization) c.Rv(2 * ia + i) += w * kDivStabilization * Ba(i) * div_v;
      }
      c.Rp(ia) += w * (-Na * div_v - 0.5 * Ba.dot(r) / a);

      for (int ib = 0; ib < n; ++ib) {
        const double Nb = N(ib);
        const Point Bb = B.row(ib).transpose();
        for (int i = 0; i < 2; ++i) {
          c.Kvv(2 * ia + i, 2 * ib + i) += w * 0.5 * Na * a * Nb;
          if (in.div_stabilization) {
            for (int j = 0; j < 2; ++j)
              c.Kvv(2 * ia + i, 2 * ib + j) += w * kDivStabilization * Ba(i) * Bb(j);
          }
          c.Kvp(2 * ia + i, ib) += w * (0.5 * Na * v(i) * da * Nb - Ba(i) * Nb - 0.5 * Na * Bb(i));
          c.Kpv(ia, 2 * ib + i) += w * (-Na * Bb(i) - 0.5 * Ba(i) * Nb);
        }
        c.Kpp(ia, ib) += w * (-0.5 * Ba.dot(Bb) / a + 0.5 * Ba.dot(rest) * da / (a * a) * Nb);
      }
    }
  }

  if (!in.pressure_facets.empty()) {
    const auto edge_rule = edge_gauss2();
    for (const auto& f : in.pressure_facets) {
      const auto [normal, length] = edge_normal(in.coords, f.local_edge);
      const int a0 = f.local_edge;
      const int a1 = (f.local_edge + 1) % n;
      for (int q = 0; q < edge_rule.size(); ++q) {
        const double t = edge_rule.points[q].x();
        const double w = edge_rule.weights[q] * length * f.p0;
        for (int i = 0; i < 2; ++i) {
          c.Rv(2 * a0 + i) += w * (1.0 - t) * normal(i);
          c.Rv(2 * a1 + i) += w * t * normal(i);
        }
      }
    }
  }
  return c;
}

Eigen::MatrixXd element_matrix(const ElementContribution& c) {
  const auto nv = c.Kvv.rows();
  const auto np = c.Kpp.rows();
  Eigen::MatrixXd k(nv + np, nv + np);
  k << c.Kvv, c.Kvp, c.Kpv, c.Kpp;
  return k;
}

Eigen::VectorXd element_residual(const ElementContribution& c) {
  Eigen::VectorXd r(c.Rv.size() + c.Rp.size());
  r << c.Rv, c.Rp;
  return r;
}

Assembler::Assembler(const ProblemSpec& problem, DofMap dofs, AssemblyOptions options)
    : problem_(problem), dofs_(std::move(dofs)), options_(options) {
  problem_.validate();
  const Mesh& m = *problem_.mesh;
  if (dofs_.num_nodes() != m.num_nodes())
    throw InvalidArgument("dof map and mesh disagree on the node count");

  rules_ = {quadrature(ElementKind::Q4, quadrature_points(ElementKind::Q4, options_.quadrature)),
            quadrature(ElementKind::T3, quadrature_points(ElementKind::T3, options_.quadrature))};

  coords_.reserve(m.num_elements());
  drags_.reserve(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e) {
    coords_.push_back(m.element_coords(e));
    drags_.push_back(problem_.drag_for(e));
  }
  pressure_facets_.assign(m.num_elements(), {});
  for (const auto& f : m.facets()) {
    const auto& bc = problem_.boundary.at(f.tag);
    if (const auto* pbc = std::get_if<PressureBC>(&bc))
      pressure_facets_[f.element].push_back({f.local_edge, pbc->value});
  }

  // Reduced sparsity pattern, fixed for the life of the assembler.
  std::vector<Eigen::Triplet<double>> entries;
  for (int e = 0; e < m.num_elements(); ++e) {
    const auto ld = element_dofs(e);
    for (int gi : ld) {
      const int fi = dofs_.free_index(gi);
      if (fi < 0) continue;
      for (int gj : ld) {
        const int fj = dofs_.free_index(gj);
        if (fj >= 0) entries.emplace_back(fi, fj, 0.0);
      }
    }
  }
  pattern_.resize(dofs_.num_free(), dofs_.num_free());
  pattern_.setFromTriplets(entries.begin(), entries.end());
  pattern_.makeCompressed();

  positions_.resize(m.num_elements());
  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  for (int e = 0; e < m.num_elements(); ++e) {
    const auto ld = element_dofs(e);
    const int nl = static_cast<int>(ld.size());
    auto& pos = positions_[e];
    pos.assign(nl * nl, -1);
    for (int j = 0; j < nl; ++j) {
      const int fj = dofs_.free_index(ld[j]);
      if (fj < 0) continue;
      for (int i = 0; i < nl; ++i) {
        const int fi = dofs_.free_index(ld[i]);
        if (fi < 0) continue;
        const int* first = inner + outer[fj];
        const int* last = inner + outer[fj + 1];
        const int* hit = std::lower_bound(first, last, fi);
        if (hit == last || *hit != fi) throw Error("internal: sparsity pattern is missing an entry");
        pos[j * nl + i] = static_cast<int>(hit - inner);
      }
    }
  }
}

std::vector<int> Assembler::element_dofs(int element) const {
  const auto& e = problem_.mesh->element(element);
  const int n = e.size();
  std::vector<int> ld(3 * n);
  for (int a = 0; a < n; ++a) {
    ld[2 * a] = DofMap::velocity(e.nodes[a], 0);
    ld[2 * a + 1] = DofMap::velocity(e.nodes[a], 1);
    ld[2 * n + a] = DofMap::pressure(e.nodes[a]);
  }
  return ld;
}

ElementInputs Assembler::element_inputs(int element, const Eigen::VectorXd& state) const {
  const auto& e = problem_.mesh->element(element);
  const int n = e.size();
  ElementInputs in;
  in.element_id = element;
  in.kind = e.kind;
  in.coords = coords_[element];
  in.drag = drags_[element];
  in.state.v.resize(n, 2);
  in.state.p.resize(n);
  for (int a = 0; a < n; ++a) {
    in.state.v(a, 0) = state(DofMap::velocity(e.nodes[a], 0));
    in.state.v(a, 1) = state(DofMap::velocity(e.nodes[a], 1));
    in.state.p(a) = state(DofMap::pressure(e.nodes[a]));
  }
  in.body = problem_.body_force ? &problem_.body_force : nullptr;
  in.A = problem_.A;
  in.C = problem_.C;
  in.pressure_facets = pressure_facets_[element];
  in.quadrature = &rules_[static_cast<int>(e.kind)];
  in.div_stabilization = options_.div_stabilization;
  return in;
}

void Assembler::add_sources(Eigen::VectorXd& residual) const {
  // A source of strength s adds (q; s delta) to the continuity residual, whose
  // Galerkin part is -(q; div v).
  for (const auto& s : problem_.sources) residual(DofMap::pressure(s.node)) += s.strength;
}

double Assembler::free_residual_norm(const Eigen::VectorXd& residual) const {
  double sum = 0.0;
  for (int d = 0; d < dofs_.num_dofs(); ++d) {
    if (!dofs_.is_constrained(d)) sum += residual(d) * residual(d);
  }
  return std::sqrt(sum);
}

GlobalSystem Assembler::assemble(const Eigen::VectorXd& state, bool with_tangent) const {
  if (state.size() != dofs_.num_dofs()) throw InvalidArgument("state has the wrong length");
  GlobalSystem sys;
  sys.residual = Eigen::VectorXd::Zero(dofs_.num_dofs());
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(dofs_.num_free());
  if (with_tangent) {
    sys.K = pattern_;
    std::fill(sys.K.valuePtr(), sys.K.valuePtr() + sys.K.nonZeros(), 0.0);
  }
  double* values = with_tangent ? sys.K.valuePtr() : nullptr;

  for (int e = 0; e < problem_.mesh->num_elements(); ++e) {
    const auto c = element_contribution(element_inputs(e, state));
    const auto ld = element_dofs(e);
    const int nl = static_cast<int>(ld.size());
    const Eigen::VectorXd re = element_residual(c);
    for (int i = 0; i < nl; ++i) {
      if (ld[i] < 0 || ld[i] >= dofs_.num_dofs()) throw Error("internal: dof index out of range");
      sys.residual(ld[i]) += re(i);
    }
    if (!with_tangent) continue;
    const Eigen::MatrixXd ke = element_matrix(c);
    const auto& pos = positions_[e];
    for (int j = 0; j < nl; ++j) {
      const bool col_fixed = dofs_.is_constrained(ld[j]);
      const double jump = col_fixed ? dofs_.constraints().at(ld[j]) - state(ld[j]) : 0.0;
      for (int i = 0; i < nl; ++i) {
        const int fi = dofs_.free_index(ld[i]);
        if (fi < 0) continue;
        if (col_fixed) {
          lift(fi) += ke(i, j) * jump;
        } else {
          values[pos[j * nl + i]] += ke(i, j);
        }
      }
    }
  }
  add_sources(sys.residual);

  sys.rhs.resize(dofs_.num_free());
  for (int d = 0; d < dofs_.num_dofs(); ++d) {
    const int f = dofs_.free_index(d);
    if (f >= 0) sys.rhs(f) = -sys.residual(d) - lift(f);
  }
  sys.residual_norm = free_residual_norm(sys.residual);
  return sys;
}

Eigen::VectorXd Assembler::residual(const Eigen::VectorXd& state) const {
  return assemble(state, false).residual;
}

Eigen::SparseMatrix<double> Assembler::full_tangent(const Eigen::VectorXd& state) const {
  std::vector<Eigen::Triplet<double>> entries;
  for (int e = 0; e < problem_.mesh->num_elements(); ++e) {
    const Eigen::MatrixXd ke = element_matrix(element_contribution(element_inputs(e, state)));
    const auto ld = element_dofs(e);
    for (int i = 0; i < static_cast<int>(ld.size()); ++i) {
      for (int j = 0; j < static_cast<int>(ld.size()); ++j) entries.emplace_back(ld[i], ld[j], ke(i, j));
    }
  }
  Eigen::SparseMatrix<double> k(dofs_.num_dofs(), dofs_.num_dofs());
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

}  // namespace porodarcy
