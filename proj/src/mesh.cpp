#include "porodarcy/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/LU>

#include "porodarcy/error.hpp"

namespace porodarcy {

std::string_view to_string(ElementKind kind) { return kind == ElementKind::Q4 ? "Q4" : "T3"; }

ElementKind element_kind_from_string(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "Q4") return ElementKind::Q4;
  if (upper == "T3") return ElementKind::T3;
  throw InvalidArgument("unknown element kind '" + std::string(name) + "' (expected q4 or t3)");
}

int nodes_per_element(ElementKind kind) { return kind == ElementKind::Q4 ? 4 : 3; }

double polygon_signed_area(const ElementCoords& coords) {
  const auto n = coords.rows();
  double twice = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto l = (k + 1) % n;
    twice += coords(k, 0) * coords(l, 1) - coords(l, 0) * coords(k, 1);
  }
  return 0.5 * twice;
}

std::pair<Point, double> edge_normal(const ElementCoords& coords, int k) {
  const auto n = static_cast<int>(coords.rows());
  const Point a = coords.row(k).transpose();
  const Point b = coords.row((k + 1) % n).transpose();
  const Point t = b - a;
  const double len = t.norm();
  return {Point(t.y(), -t.x()) / len, len};
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct EdgeUse {
  int count = 0;
  int element = -1;
  int local_edge = -1;
};

std::map<EdgeKey, EdgeUse> edge_incidence(const std::vector<Element>& elements) {
  std::map<EdgeKey, EdgeUse> uses;
  for (const auto& e : elements) {
    for (int k = 0; k < e.size(); ++k) {
      const auto [a, b] = e.edge(k);
      auto& use = uses[edge_key(a, b)];
      ++use.count;
      use.element = e.id;
      use.local_edge = k;
    }
  }
  return uses;
}

ElementCoords coords_of(const std::vector<Point>& nodes, const Element& e) {
  ElementCoords x(e.size(), 2);
  for (int a = 0; a < e.size(); ++a) x.row(a) = nodes[e.nodes[a]].transpose();
  return x;
}

double max_edge_length(const std::vector<Point>& nodes, const std::vector<Element>& elements) {
  double h = 0.0;
  for (const auto& e : elements) {
    for (int k = 0; k < e.size(); ++k) {
      const auto [a, b] = e.edge(k);
      h = std::max(h, (nodes[a] - nodes[b]).norm());
    }
  }
  return h;
}

std::string rectangle_tag(const Rectangle& r, const Point& mid, const Point& n) {
  const double tol = 1e-9 * std::max(r.width(), r.height());
  if (n.x() < -0.5 && std::abs(mid.x() - r.x0) < tol) return "left";
  if (n.x() > 0.5 && std::abs(mid.x() - r.x1) < tol) return "right";
  if (n.y() < -0.5 && std::abs(mid.y() - r.y0) < tol) return "bottom";
  if (n.y() > 0.5 && std::abs(mid.y() - r.y1) < tol) return "top";
  return {};
}

void flip_orientation(Element& e) {
  if (e.kind == ElementKind::Q4)
    std::swap(e.nodes[1], e.nodes[3]);
  else
    std::swap(e.nodes[1], e.nodes[2]);
}

}  // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<Element> elements,
           std::vector<BoundaryFacet> facets, double h)
    : nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      facets_(std::move(facets)),
      h_(h) {
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw MeshError("mesh size h must be positive and finite");
  for (const auto& x : nodes_) {
    if (!x.allFinite()) throw MeshError("node coordinates must be finite");
  }
  const int nn = num_nodes();
  for (int i = 0; i < num_elements(); ++i) {
    const auto& e = elements_[i];
    if (e.id != i) throw MeshError("element ids must be contiguous from 0");
    std::set<int> distinct;
    for (int a : e.connectivity()) {
      if (a < 0 || a >= nn)
        throw MeshError("dangling node reference " + std::to_string(a) + " in element " +
                        std::to_string(i));
      distinct.insert(a);
    }
    if (static_cast<int>(distinct.size()) != e.size())
      throw MeshError("element " + std::to_string(i) + " repeats a node");
    if (!(signed_area(i) > 0.0))
      throw MeshError("element " + std::to_string(i) + " is not counter-clockwise");
  }

  const auto uses = edge_incidence(elements_);
  std::map<EdgeKey, int> facet_of;
  for (int f = 0; f < static_cast<int>(facets_.size()); ++f) {
    auto& fc = facets_[f];
    if (fc.element < 0 || fc.element >= num_elements())
      throw MeshError("facet " + std::to_string(f) + " references unknown element");
    const auto& e = elements_[fc.element];
    if (fc.local_edge < 0 || fc.local_edge >= e.size())
      throw MeshError("facet " + std::to_string(f) + " has invalid local edge index");
    if (fc.tag.empty()) throw MeshError("facet " + std::to_string(f) + " has an empty tag");
    fc.nodes = e.edge(fc.local_edge);
    const auto key = edge_key(fc.nodes[0], fc.nodes[1]);
    const auto it = uses.find(key);
    if (it == uses.end() || it->second.count != 1)
      throw MeshError("facet " + std::to_string(f) + " is not on the boundary");
    if (!facet_of.emplace(key, f).second)
      throw MeshError("boundary edge " + std::to_string(key.first) + "-" +
                      std::to_string(key.second) + " has more than one facet");
    const auto [normal, length] = edge_normal(element_coords(fc.element), fc.local_edge);
    fc.normal = normal;
    fc.length = length;
  }
  for (const auto& [key, use] : uses) {
    if (use.count > 2)
      throw MeshError("edge " + std::to_string(key.first) + "-" + std::to_string(key.second) +
                      " is shared by more than two elements");
    if (use.count == 1 && !facet_of.count(key))
      throw MeshError("untagged boundary edge " + std::to_string(key.first) + "-" +
                      std::to_string(key.second) + " of element " + std::to_string(use.element));
  }
}

std::vector<std::string> Mesh::tags() const {
  std::set<std::string> all;
  for (const auto& f : facets_) all.insert(f.tag);
  return {all.begin(), all.end()};
}

bool Mesh::has_tag(std::string_view tag) const {
  return std::any_of(facets_.begin(), facets_.end(), [&](const auto& f) { return f.tag == tag; });
}

std::vector<BoundaryFacet> Mesh::boundary_facets(std::string_view tag) const {
  std::vector<BoundaryFacet> out;
  for (const auto& f : facets_) {
    if (f.tag == tag) out.push_back(f);
  }
  if (out.empty()) throw MeshError("unknown boundary tag '" + std::string(tag) + "'");
  return out;
}

ElementCoords Mesh::element_coords(int element) const {
  return coords_of(nodes_, elements_.at(element));
}

double Mesh::signed_area(int element) const {
  return polygon_signed_area(element_coords(element));
}

std::optional<PointLocation> Mesh::locate(const Point& x, double tol) const {
  for (const auto& e : elements_) {
    const auto c = element_coords(e.id);
    const Point lo = c.colwise().minCoeff().transpose();
    const Point hi = c.colwise().maxCoeff().transpose();
    const double slack = tol * (1.0 + (hi - lo).norm());
    if ((x.array() < lo.array() - slack).any() || (x.array() > hi.array() + slack).any()) continue;

    if (e.kind == ElementKind::T3) {
      Eigen::Matrix2d m;
      m.col(0) = (c.row(1) - c.row(0)).transpose();
      m.col(1) = (c.row(2) - c.row(0)).transpose();
      const Point xi = m.partialPivLu().solve(x - c.row(0).transpose());
      if (xi.x() >= -tol && xi.y() >= -tol && xi.sum() <= 1.0 + tol) return PointLocation{e.id, xi};
    } else {
      // Newton inversion of the bilinear map.
      Point xi = Point::Zero();
      for (int it = 0; it < 50; ++it) {
        const double s = xi.x(), t = xi.y();
        const Eigen::Vector4d n{0.25 * (1 - s) * (1 - t), 0.25 * (1 + s) * (1 - t),
                                0.25 * (1 + s) * (1 + t), 0.25 * (1 - s) * (1 + t)};
        Eigen::Matrix<double, 4, 2> dn;
        dn << -0.25 * (1 - t), -0.25 * (1 - s), 0.25 * (1 - t), -0.25 * (1 + s), 0.25 * (1 + t),
            0.25 * (1 + s), -0.25 * (1 + t), 0.25 * (1 - s);
        const Point r = c.transpose() * n - x;
        const Eigen::Matrix2d j = c.transpose() * dn;
        const Point step = j.partialPivLu().solve(r);
        xi -= step;
        if (step.norm() < 1e-14) break;
      }
      if ((xi.array().abs() <= 1.0 + tol).all()) return PointLocation{e.id, xi};
    }
  }
  return std::nullopt;
}

std::vector<BoundaryFacet> tag_boundary(const std::vector<Point>& nodes,
                                        const std::vector<Element>& elements,
                                        const FacetTagger& tagger) {
  std::vector<BoundaryFacet> facets;
  for (const auto& [key, use] : edge_incidence(elements)) {
    if (use.count != 1) continue;
    const auto& e = elements[use.element];
    const auto c = coords_of(nodes, e);
    const auto [normal, length] = edge_normal(c, use.local_edge);
    const auto ends = e.edge(use.local_edge);
    const Point mid = 0.5 * (nodes[ends[0]] + nodes[ends[1]]);
    BoundaryFacet f;
    f.element = use.element;
    f.local_edge = use.local_edge;
    f.nodes = ends;
    f.normal = normal;
    f.length = length;
    f.tag = tagger(mid, normal);
    if (f.tag.empty())
      throw MeshError("no tag assigned to boundary edge at (" + std::to_string(mid.x()) + ", " +
                      std::to_string(mid.y()) + ")");
    facets.push_back(std::move(f));
  }
  std::sort(facets.begin(), facets.end(), [](const auto& a, const auto& b) {
    return std::tie(a.element, a.local_edge) < std::tie(b.element, b.local_edge);
  });
  return facets;
}

Mesh generate_masked_grid(ElementKind kind, int nx, int ny, const Rectangle& domain,
                          const std::function<bool(int, int)>& keep, const FacetTagger& tagger) {
  if (nx < 1 || ny < 1) throw InvalidArgument("structured mesh needs nx >= 1 and ny >= 1");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw InvalidArgument("structured mesh domain is degenerate");

  const double dx = domain.width() / nx;
  const double dy = domain.height() / ny;
  std::vector<int> grid_id((nx + 1) * (ny + 1), -1);
  auto gid = [&](int i, int j) -> int& { return grid_id[j * (nx + 1) + i]; };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      gid(i, j) = gid(i + 1, j) = gid(i + 1, j + 1) = gid(i, j + 1) = 0;
    }
  }
  std::vector<Point> nodes;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (gid(i, j) < 0) continue;
      gid(i, j) = static_cast<int>(nodes.size());
      // Snap the far edges exactly onto the domain bounds.
      const double x = i == nx ? domain.x1 : domain.x0 + i * dx;
      const double y = j == ny ? domain.y1 : domain.y0 + j * dy;
      nodes.emplace_back(x, y);
    }
  }

  std::vector<Element> elements;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      const int n00 = gid(i, j), n10 = gid(i + 1, j), n11 = gid(i + 1, j + 1), n01 = gid(i, j + 1);
      Element e;
      e.kind = kind;
      if (kind == ElementKind::Q4) {
        e.id = static_cast<int>(elements.size());
        e.nodes = {n00, n10, n11, n01};
        elements.push_back(e);
      } else {
        e.id = static_cast<int>(elements.size());
        e.nodes = {n00, n10, n11, -1};
        elements.push_back(e);
        e.id = static_cast<int>(elements.size());
        e.nodes = {n00, n11, n01, -1};
        elements.push_back(e);
      }
    }
  }
  if (elements.empty()) throw InvalidArgument("grid mask removed every cell");
  auto facets = tag_boundary(nodes, elements, tagger);
  return Mesh(std::move(nodes), std::move(elements), std::move(facets), std::max(dx, dy));
}

Mesh generate_structured(ElementKind kind, int nx, int ny, const Rectangle& domain) {
  return generate_masked_grid(
      kind, nx, ny, domain, [](int, int) { return true; },
      [domain](const Point& mid, const Point& n) { return rectangle_tag(domain, mid, n); });
}

namespace {

struct Triangle {
  std::array<int, 3> v;
  Point center;
  double radius2;
};

Triangle make_triangle(const std::vector<Point>& p, int a, int b, int c) {
  const Point& pa = p[a];
  const Point& pb = p[b];
  const Point& pc = p[c];
  const double d = 2.0 * (pa.x() * (pb.y() - pc.y()) + pb.x() * (pc.y() - pa.y()) +
                          pc.x() * (pa.y() - pb.y()));
  const double a2 = pa.squaredNorm(), b2 = pb.squaredNorm(), c2 = pc.squaredNorm();
  const Point center((a2 * (pb.y() - pc.y()) + b2 * (pc.y() - pa.y()) + c2 * (pa.y() - pb.y())) / d,
                     (a2 * (pc.x() - pb.x()) + b2 * (pa.x() - pc.x()) + c2 * (pb.x() - pa.x())) / d);
  Triangle t{{a, b, c}, center, (center - pa).squaredNorm()};
  const double area = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
  if (area < 0.0) std::swap(t.v[1], t.v[2]);
  return t;
}

}  // namespace

Mesh delaunay_rectangle(const Rectangle& domain, int n_per_side, double jitter,
                        std::uint64_t seed) {
  if (n_per_side < 1) throw InvalidArgument("delaunay_rectangle needs n_per_side >= 1");
  if (!(jitter >= 0.0 && jitter < 0.5)) throw InvalidArgument("jitter must lie in [0, 0.5)");
  const int nx = n_per_side;
  const int ny = std::max(1, static_cast<int>(std::lround(n_per_side * domain.height() /
                                                          domain.width())));
  const double dx = domain.width() / nx;
  const double dy = domain.height() / ny;

  std::vector<Point> pts;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (i == 0 || j == 0 || i == nx || j == ny)
        pts.emplace_back(i == nx ? domain.x1 : domain.x0 + i * dx,
                         j == ny ? domain.y1 : domain.y0 + j * dy);
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shake(-jitter, jitter);
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const double sx = shake(rng), sy = shake(rng);
      pts.emplace_back(domain.x0 + (i + sx) * dx, domain.y0 + (j + sy) * dy);
    }
  }

  const int n_real = static_cast<int>(pts.size());
  const Point c(0.5 * (domain.x0 + domain.x1), 0.5 * (domain.y0 + domain.y1));
  const double big = 100.0 * std::max(domain.width(), domain.height());
  pts.emplace_back(c.x() - big, c.y() - big);
  pts.emplace_back(c.x() + big, c.y() - big);
  pts.emplace_back(c.x(), c.y() + big);

  std::vector<Triangle> tris{make_triangle(pts, n_real, n_real + 1, n_real + 2)};
  for (int p = 0; p < n_real; ++p) {
    std::vector<Triangle> keep;
    std::map<EdgeKey, std::pair<int, std::array<int, 2>>> cavity;
    for (const auto& t : tris) {
      if ((pts[p] - t.center).squaredNorm() < t.radius2 * (1.0 + 1e-12)) {
        for (int k = 0; k < 3; ++k) {
          const int a = t.v[k], b = t.v[(k + 1) % 3];
          auto& slot = cavity[edge_key(a, b)];
          ++slot.first;
          slot.second = {a, b};
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [key, use] : cavity) {
      if (use.first == 1) keep.push_back(make_triangle(pts, use.second[0], use.second[1], p));
    }
    tris = std::move(keep);
  }

  pts.resize(n_real);
  std::vector<Element> elements;
  for (const auto& t : tris) {
    if (t.v[0] >= n_real || t.v[1] >= n_real || t.v[2] >= n_real) continue;
    Element e;
    e.id = static_cast<int>(elements.size());
    e.kind = ElementKind::T3;
    e.nodes = {t.v[0], t.v[1], t.v[2], -1};
    const double area = polygon_signed_area(coords_of(pts, e));
    if (area <= 1e-14 * dx * dy) continue;  // collinear hull slivers
    elements.push_back(e);
  }
  auto facets = tag_boundary(pts, elements, [domain](const Point& mid, const Point& n) {
    return rectangle_tag(domain, mid, n);
  });
  const double h = max_edge_length(pts, elements);
  return Mesh(std::move(pts), std::move(elements), std::move(facets), h);
}

namespace {

/// Line-oriented tokenizer that strips `#` comments and blank lines.
class MeshReader {
 public:
  explicit MeshReader(std::istream& in) : in_(in) {}

  bool next(std::istringstream& fields) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      fields.clear();
      fields.str(text);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshError("mesh line " + std::to_string(line_) + ": " + what);
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

void expect_end(std::istringstream& fields, MeshReader& reader) {
  std::string extra;
  if (fields >> extra) reader.fail("unexpected trailing token '" + extra + "'");
}

}  // namespace

Mesh parse_mesh(std::istream& in) {
  MeshReader reader(in);
  std::istringstream fields;
  if (!reader.next(fields)) throw MeshError("empty mesh file");

  std::string w_nodes, w_elements, w_facets;
  long nn = -1, ne = -1, nf = -1;
  if (!(fields >> w_nodes >> nn >> w_elements >> ne >> w_facets >> nf) || w_nodes != "nodes" ||
      w_elements != "elements" || w_facets != "facets" || nn < 0 || ne < 0 || nf < 0)
    reader.fail("expected header 'nodes <nn> elements <ne> facets <nf>'");
  expect_end(fields, reader);

  std::vector<Point> nodes(nn);
  std::vector<bool> seen_node(nn, false);
  for (long i = 0; i < nn; ++i) {
    if (!reader.next(fields)) reader.fail("unexpected end of file in node block");
    long id;
    double x, y;
    if (!(fields >> id >> x >> y)) reader.fail("expected 'id x y'");
    expect_end(fields, reader);
    if (id < 0 || id >= nn) reader.fail("node id " + std::to_string(id) + " out of range");
    if (seen_node[id]) reader.fail("duplicate node id " + std::to_string(id));
    if (!std::isfinite(x) || !std::isfinite(y)) reader.fail("non-finite node coordinate");
    seen_node[id] = true;
    nodes[id] = Point(x, y);
  }

  std::vector<Element> elements(ne);
  std::vector<bool> seen_elem(ne, false);
  for (long i = 0; i < ne; ++i) {
    if (!reader.next(fields)) reader.fail("unexpected end of file in element block");
    long id;
    std::string kind_name;
    if (!(fields >> id >> kind_name)) reader.fail("expected 'id kind n0 n1 n2 [n3]'");
    if (id < 0 || id >= ne) reader.fail("element id " + std::to_string(id) + " out of range");
    if (seen_elem[id]) reader.fail("duplicate element id " + std::to_string(id));
    Element e;
    e.id = static_cast<int>(id);
    try {
      e.kind = element_kind_from_string(kind_name);
    } catch (const InvalidArgument& err) {
      reader.fail(err.what());
    }
    for (int a = 0; a < e.size(); ++a) {
      long n;
      if (!(fields >> n)) reader.fail("too few node ids for " + std::string(to_string(e.kind)));
      if (n < 0 || n >= nn) reader.fail("dangling node reference " + std::to_string(n));
      e.nodes[a] = static_cast<int>(n);
    }
    expect_end(fields, reader);
    seen_elem[id] = true;
    elements[id] = e;
  }

  // Facets are resolved to node pairs first so that orientation repair can
  // renumber local edges.
  struct RawFacet {
    int element;
    std::array<int, 2> nodes;
    std::string tag;
    int line;
  };
  std::vector<RawFacet> raw;
  for (long i = 0; i < nf; ++i) {
    if (!reader.next(fields)) reader.fail("unexpected end of file in facet block");
    long elem, edge;
    std::string tag;
    if (!(fields >> elem >> edge >> tag)) reader.fail("expected 'elem edge tag'");
    expect_end(fields, reader);
    if (elem < 0 || elem >= ne) reader.fail("facet references unknown element " + std::to_string(elem));
    const auto& e = elements[elem];
    if (edge < 0 || edge >= e.size()) reader.fail("invalid local edge " + std::to_string(edge));
    raw.push_back({static_cast<int>(elem), e.edge(static_cast<int>(edge)), tag, reader.line()});
  }
  if (reader.next(fields)) reader.fail("unexpected content after facet block");

  for (auto& e : elements) {
    const double area = polygon_signed_area(coords_of(nodes, e));
    if (area < 0.0) flip_orientation(e);
  }

  std::vector<BoundaryFacet> facets;
  for (const auto& r : raw) {
    const auto& e = elements[r.element];
    BoundaryFacet f;
    f.element = r.element;
    f.tag = r.tag;
    f.local_edge = -1;
    for (int k = 0; k < e.size(); ++k) {
      if (edge_key(e.edge(k)[0], e.edge(k)[1]) == edge_key(r.nodes[0], r.nodes[1])) f.local_edge = k;
    }
    facets.push_back(std::move(f));
  }

  const double h = elements.empty() ? 0.0 : max_edge_length(nodes, elements);
  return Mesh(std::move(nodes), std::move(elements), std::move(facets), h);
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return parse_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "nodes " << mesh.num_nodes() << " elements " << mesh.num_elements() << " facets "
      << mesh.facets().size() << '\n';
  for (int i = 0; i < mesh.num_nodes(); ++i)
    out << i << ' ' << mesh.node(i).x() << ' ' << mesh.node(i).y() << '\n';
  for (const auto& e : mesh.elements()) {
    out << e.id << ' ' << to_string(e.kind);
    for (int a : e.connectivity()) out << ' ' << a;
    out << '\n';
  }
  for (const auto& f : mesh.facets()) out << f.element << ' ' << f.local_edge << ' ' << f.tag << '\n';
  out.precision(old_precision);
}

}  // namespace porodarcy
