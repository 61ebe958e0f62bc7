#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "porodarcy/cases.hpp"
#include "porodarcy/mesh.hpp"
#include "porodarcy/solver.hpp"
#include "porodarcy/verification.hpp"

namespace porodarcy {

/// Legacy ASCII VTK unstructured grid with POINT_DATA pressure and velocity.
void write_vtk(const SolutionField& solution, const Mesh& mesh, std::ostream& out);
void write_vtk(const SolutionField& solution, const Mesh& mesh, const std::string& path);

struct VtkData {
  std::vector<Point> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> cell_types;  // 9 quad, 5 triangle
  std::vector<double> pressure;
  std::vector<Point> velocity;
};

/// Reads files produced by write_vtk.
VtkData read_vtk(std::istream& in);
VtkData read_vtk(const std::string& path);

/// CSV tables; floats carry 17 significant digits.
void write_history_csv(const ConvergenceHistory& history, std::ostream& out);
/// h,err_p,err_v rows followed by a `slope` footer row.
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);
void write_sweep_csv(const std::vector<SweepRow>& rows, SweepParameter parameter, std::ostream& out);
void write_cone_csv(const ConeProfile& profile, std::ostream& out);
/// x,p,v,p_exact,v_exact along the strip centreline (bottom nodes).
void write_oned_csv(const SolutionField& solution, const Mesh& mesh, const ExactSolution1D& exact,
                    std::ostream& out);
/// x,p_exact,v_exact at `samples` + 1 equispaced points.
void write_exact_csv(const ExactSolution1D& exact, int samples, std::ostream& out);

/// Opens `path` for writing, creating parent directories; throws Error on failure.
std::ofstream open_output(const std::string& path);

}  // namespace porodarcy
