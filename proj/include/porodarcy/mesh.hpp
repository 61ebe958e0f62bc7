#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace porodarcy {

using Point = Eigen::Vector2d;

enum class ElementKind { Q4, T3 };

std::string_view to_string(ElementKind kind);
ElementKind element_kind_from_string(std::string_view name);
int nodes_per_element(ElementKind kind);

struct Element {
  int id = 0;
  ElementKind kind = ElementKind::Q4;
  std::array<int, 4> nodes{-1, -1, -1, -1};

  int size() const { return nodes_per_element(kind); }
  std::span<const int> connectivity() const { return {nodes.data(), static_cast<size_t>(size())}; }
  /// Nodes of local edge k, running from node k to node k+1 (counter-clockwise).
  std::array<int, 2> edge(int k) const { return {nodes[k], nodes[(k + 1) % size()]}; }
};

struct BoundaryFacet {
  int element = 0;
  int local_edge = 0;
  std::array<int, 2> nodes{};
  std::string tag;
  Point normal = Point::Zero();
  double length = 0.0;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rectangle {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Element-local nodal coordinates, one row per node.
using ElementCoords = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::ColMajor, 4, 2>;

/// Location of a physical point inside the mesh.
struct PointLocation {
  int element = -1;
  Point xi = Point::Zero();
};

/// Immutable 2D mesh of Q4/T3 elements with tagged boundary facets.
///
/// Construction validates every invariant: contiguous node ids, distinct and
/// valid connectivity, counter-clockwise orientation, and a one-to-one mapping
/// between boundary edges (edges owned by exactly one element) and facets.
class Mesh {
 public:
  Mesh(std::vector<Point> nodes, std::vector<Element> elements, std::vector<BoundaryFacet> facets,
       double h);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const Point& node(int id) const { return nodes_[id]; }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(int id) const { return elements_[id]; }
  const std::vector<BoundaryFacet>& facets() const { return facets_; }
  double h() const { return h_; }

  std::vector<std::string> tags() const;
  bool has_tag(std::string_view tag) const;
  /// Facets carrying `tag`; throws MeshError if no facet carries it.
  std::vector<BoundaryFacet> boundary_facets(std::string_view tag) const;

  ElementCoords element_coords(int element) const;
  double signed_area(int element) const;

  /// Brute-force point location; nullopt when the point lies outside every element.
  std::optional<PointLocation> locate(const Point& x, double tol = 1e-10) const;

 private:
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<BoundaryFacet> facets_;
  double h_;
};

/// Signed area of the polygon given by `coords` (positive when counter-clockwise).
double polygon_signed_area(const ElementCoords& coords);

/// Outward unit normal and length of local edge `k` of a counter-clockwise element.
std::pair<Point, double> edge_normal(const ElementCoords& coords, int k);

/// Assigns a tag to a boundary edge from its midpoint and outward normal.
using FacetTagger = std::function<std::string(const Point& midpoint, const Point& normal)>;

/// Builds facet records for every boundary edge of `elements`, tagged by `tagger`.
std::vector<BoundaryFacet> tag_boundary(const std::vector<Point>& nodes,
                                        const std::vector<Element>& elements,
                                        const FacetTagger& tagger);

/// Uniform nx-by-ny grid on `domain`. T3 splits each cell along its
/// lower-left to upper-right diagonal. Facets are tagged left/right/bottom/top.
Mesh generate_structured(ElementKind kind, int nx, int ny, const Rectangle& domain = {});

/// Uniform grid restricted to the cells for which `keep(i, j)` holds; nodes not
/// touched by a kept cell are dropped. Facets are tagged by `tagger`.
Mesh generate_masked_grid(ElementKind kind, int nx, int ny, const Rectangle& domain,
                          const std::function<bool(int, int)>& keep, const FacetTagger& tagger);

/// Delaunay triangulation (Bowyer-Watson) of a rectangle. The boundary carries
/// `n_per_side` equal segments along x (proportionally many along y); interior
/// points sit on the matching grid, each displaced by up to `jitter` cell sizes.
/// Deterministic for a given seed. Facets are tagged left/right/bottom/top.
Mesh delaunay_rectangle(const Rectangle& domain, int n_per_side, double jitter = 0.3,
                        std::uint64_t seed = 1);

Mesh read_mesh(const std::string& path);
Mesh parse_mesh(std::istream& in);
void write_mesh(const Mesh& mesh, std::ostream& out);

}  // namespace porodarcy
