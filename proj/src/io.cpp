#include "porodarcy/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "porodarcy/error.hpp"

namespace porodarcy {

namespace {

constexpr int kVtkQuad = 9;
constexpr int kVtkTriangle = 5;

void csv_stream(std::ostream& out) { out.precision(17); }

}  // namespace

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

void write_vtk(const SolutionField& s, const Mesh& mesh, std::ostream& out) {
  const int nn = mesh.num_nodes();
  if (s.pressure.size() != nn || s.velocity.rows() != nn)
    throw InvalidArgument("solution size does not match the mesh");
  out.precision(17);
  out << "# vtk DataFile Version 3.0\nporodarcy solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nn << " double\n";
  for (const auto& x : mesh.nodes()) out << x.x() << " " << x.y() << " 0\n";
  int size = 0;
  for (const auto& e : mesh.elements()) size += e.size() + 1;
  out << "CELLS " << mesh.num_elements() << " " << size << "\n";
  for (const auto& e : mesh.elements()) {
    out << e.size();
    for (int a : e.connectivity()) out << " " << a;
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.num_elements() << "\n";
  for (const auto& e : mesh.elements()) out << (e.kind == ElementKind::Q4 ? kVtkQuad : kVtkTriangle) << "\n";
  out << "POINT_DATA " << nn << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int a = 0; a < nn; ++a) out << s.pressure(a) << "\n";
  out << "VECTORS velocity double\n";
  for (int a = 0; a < nn; ++a) out << s.velocity(a, 0) << " " << s.velocity(a, 1) << " 0\n";
  if (!out) throw Error("failed writing VTK output");
}

void write_vtk(const SolutionField& solution, const Mesh& mesh, const std::string& path) {
  auto out = open_output(path);
  write_vtk(solution, mesh, out);
}

VtkData read_vtk(std::istream& in) {
  VtkData d;
  std::string word;
  auto expect = [&](const std::string& what) {
    if (!(in >> word) || word != what) throw Error("VTK parse error: expected " + what);
  };
  std::string line;
  for (int i = 0; i < 4; ++i) std::getline(in, line);
  int n = 0, ne = 0, size = 0;
  expect("POINTS");
  in >> n >> word;
  d.points.resize(n);
  for (auto& p : d.points) {
    double z;
    in >> p.x() >> p.y() >> z;
  }
  expect("CELLS");
  in >> ne >> size;
  d.cells.resize(ne);
  for (auto& c : d.cells) {
    int k = 0;
    in >> k;
    c.resize(k);
    for (auto& a : c) in >> a;
  }
  expect("CELL_TYPES");
  in >> ne;
  d.cell_types.resize(ne);
  for (auto& t : d.cell_types) in >> t;
  expect("POINT_DATA");
  in >> n;
  expect("SCALARS");
  in >> word >> word >> word;  // name, type, components
  expect("LOOKUP_TABLE");
  in >> word;
  d.pressure.resize(n);
  for (auto& p : d.pressure) in >> p;
  expect("VECTORS");
  in >> word >> word;
  d.velocity.resize(n);
  for (auto& v : d.velocity) {
    double z;
    in >> v.x() >> v.y() >> z;
  }
  if (!in) throw Error("VTK parse error: truncated file");
  return d;
}

VtkData read_vtk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_vtk(in);
}

void write_history_csv(const ConvergenceHistory& history, std::ostream& out) {
  csv_stream(out);
  out << "iter,residual_norm\n";
  for (size_t k = 0; k < history.residual_norms.size(); ++k)
    out << k << "," << history.residual_norms[k] << "\n";
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& out) {
  csv_stream(out);
  out << "h,err_p,err_v\n";
  for (const auto& r : table.rows) out << r.h << "," << r.err_p << "," << r.err_v << "\n";
  out << "slope," << table.slope_p << "," << table.slope_v << "\n";
  if (!table.complete) out << "# incomplete: " << table.failure << "\n";
}

void write_sweep_csv(const std::vector<SweepRow>& rows, SweepParameter parameter, std::ostream& out) {
  csv_stream(out);
  out << to_string(parameter) << ",ok,iterations,p_max,exp_beta_pmax,flux,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (auto& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << r.value << "," << (r.ok ? 1 : 0) << "," << r.iterations << "," << r.p_max << ","
        << r.exp_beta_pmax << "," << r.flux << "," << err << "\n";
  }
}

void write_cone_csv(const ConeProfile& profile, std::ostream& out) {
  csv_stream(out);
  out << "distance,depth,p\n";
  for (const auto& s : profile.samples) out << s.distance << "," << s.depth << "," << s.p << "\n";
}

void write_oned_csv(const SolutionField& solution, const Mesh& mesh, const ExactSolution1D& exact,
                    std::ostream& out) {
  csv_stream(out);
  out << "x,p,v,p_exact,v_exact\n";
  for (int a = 0; a < mesh.num_nodes(); ++a) {
    const Point& x = mesh.node(a);
    if (std::abs(x.y()) > 1e-12) continue;
    const auto e = exact_1d(exact, std::clamp(x.x(), 0.0, 1.0));
    out << x.x() << "," << solution.pressure(a) << "," << solution.velocity(a, 0) << "," << e.p << ","
        << e.v << "\n";
  }
}

void write_exact_csv(const ExactSolution1D& exact, int samples, std::ostream& out) {
  if (samples < 1) throw InvalidArgument("exact sampling needs at least one interval");
  csv_stream(out);
  out << "x,p_exact,v_exact\n";
  for (int i = 0; i <= samples; ++i) {
    const double x = static_cast<double>(i) / samples;
    const auto e = exact_1d(exact, x);
    out << x << "," << e.p << "," << e.v << "\n";
  }
}

}  // namespace porodarcy
