#include "porodarcy/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "porodarcy/error.hpp"

namespace porodarcy {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Parser {
  std::string key;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what, key, line); }

  double number(const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      fail("type mismatch for key '" + key + "': expected a number, got '" + s + "'");
    return v;
  }

  double positive(const std::string& s) const {
    const double v = number(s);
    if (!(v > 0.0)) fail("key '" + key + "' must be positive");
    return v;
  }

  int integer(const std::string& s) const {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      fail("type mismatch for key '" + key + "': expected an integer, got '" + s + "'");
    return v;
  }

  bool flag(const std::string& s) const {
    if (s == "on" || s == "true") return true;
    if (s == "off" || s == "false") return false;
    fail("type mismatch for key '" + key + "': expected on or off, got '" + s + "'");
  }

  template <typename F>
  auto choice(const std::string& s, F&& convert) const {
    try {
      return convert(s);
    } catch (const InvalidArgument& e) {
      fail(std::string("bad value for key '") + key + "': " + e.what());
    }
  }

  std::vector<double> numbers(const std::string& s) const {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(number(item));
    if (out.empty()) fail("key '" + key + "' needs at least one value");
    return out;
  }

  std::pair<int, double> pair(const std::string& item) const {
    const auto colon = item.find(':');
    if (colon == std::string::npos) fail("key '" + key + "' expects entries of the form id:value");
    return {integer(trim(item.substr(0, colon))), number(trim(item.substr(colon + 1)))};
  }
};

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

const std::vector<std::string>& known_cases() {
  static const std::vector<std::string> cases{"five-spot",    "reservoir",   "oned",
                                              "manufactured", "convergence", "mesh"};
  return cases;
}

DragModel RunConfig::drag_model() const {
  if (drag != DragVariant::Constant && !beta)
    throw ConfigError("missing required key 'drag.beta'", "drag.beta", 0);
  return DragModel(drag, alpha0, drag == DragVariant::Constant ? beta.value_or(0.0) : *beta);
}

bool RunConfig::operator==(const RunConfig& o) const {
  return case_name == o.case_name && kind == o.kind && n == o.n && mesh_file == o.mesh_file &&
         drag == o.drag && alpha0 == o.alpha0 && beta == o.beta &&
         per_element_alpha0 == o.per_element_alpha0 && A == o.A && C == o.C && body == o.body &&
         bcs == o.bcs && sources == o.sources && newton == o.newton && p1 == o.p1 && p2 == o.p2 &&
         p_enh == o.p_enh && cells_per_unit == o.cells_per_unit && cone_depths == o.cone_depths &&
         levels == o.levels && sweep_parameter == o.sweep_parameter &&
         sweep_values == o.sweep_values && output_dir == o.output_dir;
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  Parser p;
  using Handler = std::function<void(const std::string&)>;
  const std::map<std::string, Handler> handlers{
      {"case",
       [&](const std::string& v) {
         const auto& cases = known_cases();
         if (std::find(cases.begin(), cases.end(), v) == cases.end())
           p.fail("unknown case '" + v + "'");
         c.case_name = v;
       }},
      {"mesh.kind", [&](const std::string& v) { c.kind = p.choice(v, element_kind_from_string); }},
      {"mesh.n",
       [&](const std::string& v) {
         c.n = p.integer(v);
         if (c.n < 1) p.fail("key 'mesh.n' must be at least 1");
       }},
      {"mesh.file", [&](const std::string& v) { c.mesh_file = v; }},
      {"drag.model", [&](const std::string& v) { c.drag = p.choice(v, drag_variant_from_string); }},
      {"drag.alpha0", [&](const std::string& v) { c.alpha0 = p.positive(v); }},
      {"drag.beta",
       [&](const std::string& v) {
         c.beta = p.number(v);
         if (*c.beta < 0.0) p.fail("key 'drag.beta' must be non-negative");
       }},
      {"drag.per_element_alpha0",
       [&](const std::string& v) {
         for (const auto& item : split(v, ',')) {
           const auto [e, a] = p.pair(item);
           if (!(a > 0.0)) p.fail("per-element alpha0 must be positive");
           c.per_element_alpha0[e] = a;
         }
       }},
      {"problem.A", [&](const std::string& v) { c.A = p.positive(v); }},
      {"problem.C", [&](const std::string& v) { c.C = p.number(v); }},
      {"problem.body",
       [&](const std::string& v) {
         const auto b = p.numbers(v);
         if (b.size() != 2) p.fail("key 'problem.body' expects two components");
         c.body = {b[0], b[1]};
       }},
      {"sources",
       [&](const std::string& v) {
         for (const auto& item : split(v, ',')) {
           const auto [node, s] = p.pair(item);
           c.sources.push_back({node, s});
         }
       }},
      {"newton.rtol", [&](const std::string& v) { c.newton.rtol = p.positive(v); }},
      {"newton.atol", [&](const std::string& v) { c.newton.atol = p.positive(v); }},
      {"newton.max_iter",
       [&](const std::string& v) {
         c.newton.max_iter = p.integer(v);
         if (c.newton.max_iter < 1) p.fail("key 'newton.max_iter' must be at least 1");
       }},
      {"newton.initial_guess",
       [&](const std::string& v) { c.newton.initial_guess = p.choice(v, initial_guess_from_string); }},
      {"newton.line_search", [&](const std::string& v) { c.newton.line_search = p.flag(v); }},
      {"stabilization.div_term",
       [&](const std::string& v) { c.newton.assembly.div_stabilization = p.flag(v); }},
      {"quadrature.order",
       [&](const std::string& v) {
         if (v == "default") {
           c.newton.assembly.quadrature = QuadratureLevel::Default;
         } else if (v == "high") {
           c.newton.assembly.quadrature = QuadratureLevel::High;
         } else {
           p.fail("bad value for key 'quadrature.order': expected default or high");
         }
       }},
      {"oned.p1", [&](const std::string& v) { c.p1 = p.number(v); }},
      {"oned.p2", [&](const std::string& v) { c.p2 = p.number(v); }},
      {"reservoir.p_enh", [&](const std::string& v) { c.p_enh = p.number(v); }},
      {"reservoir.cells_per_unit",
       [&](const std::string& v) {
         c.cells_per_unit = p.integer(v);
         if (c.cells_per_unit < 1) p.fail("key 'reservoir.cells_per_unit' must be at least 1");
       }},
      {"cone.depths", [&](const std::string& v) { c.cone_depths = p.numbers(v); }},
      {"convergence.levels",
       [&](const std::string& v) {
         c.levels.clear();
         for (const auto& item : split(v, ',')) c.levels.push_back(p.integer(item));
       }},
      {"sweep.parameter",
       [&](const std::string& v) { c.sweep_parameter = p.choice(v, sweep_parameter_from_string); }},
      {"sweep.values", [&](const std::string& v) { c.sweep_values = p.numbers(v); }},
      {"output.dir", [&](const std::string& v) { c.output_dir = v; }},
  };

  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    p.line = line_no;
    p.key.clear();
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    p.key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (p.key.empty()) p.fail("missing key before '='");
    if (!seen.insert(p.key).second) p.fail("duplicate key '" + p.key + "'");

    if (p.key.rfind("bc.", 0) == 0 && p.key.size() > 3) {
      const auto parts = split(value, ' ');
      std::vector<std::string> words;
      for (const auto& w : parts) {
        if (!w.empty()) words.push_back(w);
      }
      if (words.size() != 2) p.fail("key '" + p.key + "' expects 'pressure <value>' or 'normal_velocity <value>'");
      const std::string kind = lower(words[0]);
      const double v = p.number(words[1]);
      if (kind == "pressure") {
        c.bcs[p.key.substr(3)] = PressureBC{v};
      } else if (kind == "normal_velocity") {
        c.bcs[p.key.substr(3)] = NormalVelocityBC{v};
      } else {
        p.fail("unknown boundary condition kind '" + words[0] + "'");
      }
      continue;
    }
    const auto it = handlers.find(p.key);
    if (it == handlers.end()) p.fail("unknown key '" + p.key + "'");
    it->second(value);
  }

  for (const std::string key : {"case", "drag.model"}) {
    if (!seen.count(key)) throw ConfigError("missing required key '" + key + "'", key, 0);
  }
  if (c.drag != DragVariant::Constant && !c.beta)
    throw ConfigError("missing required key 'drag.beta'", "drag.beta", 0);
  if (c.case_name == "mesh" && c.mesh_file.empty())
    throw ConfigError("case 'mesh' needs key 'mesh.file'", "mesh.file", 0);
  if (c.sweep_parameter.has_value() != !c.sweep_values.empty())
    throw ConfigError("sweep.parameter and sweep.values must be given together", "sweep.values", 0);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "", 0);
  return parse_config(in);
}

void serialize_config(const RunConfig& c, std::ostream& out) {
  out << "case = " << c.case_name << "\n";
  out << "mesh.kind = " << lower(std::string(to_string(c.kind))) << "\n";
  out << "mesh.n = " << c.n << "\n";
  if (!c.mesh_file.empty()) out << "mesh.file = " << c.mesh_file << "\n";
  out << "drag.model = " << to_string(c.drag) << "\n";
  out << "drag.alpha0 = " << fmt(c.alpha0) << "\n";
  if (c.beta) out << "drag.beta = " << fmt(*c.beta) << "\n";
  if (!c.per_element_alpha0.empty()) {
    out << "drag.per_element_alpha0 = ";
    bool first = true;
    for (const auto& [e, a] : c.per_element_alpha0) {
      out << (first ? "" : ",") << e << ":" << fmt(a);
      first = false;
    }
    out << "\n";
  }
  out << "problem.A = " << fmt(c.A) << "\n";
  out << "problem.C = " << fmt(c.C) << "\n";
  out << "problem.body = " << fmt(c.body.x()) << "," << fmt(c.body.y()) << "\n";
  for (const auto& [tag, bc] : c.bcs) {
    if (const auto* pb = std::get_if<PressureBC>(&bc)) {
      out << "bc." << tag << " = pressure " << fmt(pb->value) << "\n";
    } else {
      out << "bc." << tag << " = normal_velocity " << fmt(std::get<NormalVelocityBC>(bc).value) << "\n";
    }
  }
  if (!c.sources.empty()) {
    out << "sources = ";
    for (size_t i = 0; i < c.sources.size(); ++i)
      out << (i ? "," : "") << c.sources[i].node << ":" << fmt(c.sources[i].strength);
    out << "\n";
  }
  out << "newton.rtol = " << fmt(c.newton.rtol) << "\n";
  out << "newton.atol = " << fmt(c.newton.atol) << "\n";
  out << "newton.max_iter = " << c.newton.max_iter << "\n";
  out << "newton.initial_guess = " << to_string(c.newton.initial_guess) << "\n";
  out << "newton.line_search = " << (c.newton.line_search ? "on" : "off") << "\n";
  out << "stabilization.div_term = " << (c.newton.assembly.div_stabilization ? "on" : "off") << "\n";
  out << "quadrature.order = "
      << (c.newton.assembly.quadrature == QuadratureLevel::High ? "high" : "default") << "\n";
  out << "oned.p1 = " << fmt(c.p1) << "\n";
  out << "oned.p2 = " << fmt(c.p2) << "\n";
  out << "reservoir.p_enh = " << fmt(c.p_enh) << "\n";
  out << "reservoir.cells_per_unit = " << c.cells_per_unit << "\n";
  out << "cone.depths = ";
  for (size_t i = 0; i < c.cone_depths.size(); ++i) out << (i ? "," : "") << fmt(c.cone_depths[i]);
  out << "\n";
  out << "convergence.levels = ";
  for (size_t i = 0; i < c.levels.size(); ++i) out << (i ? "," : "") << c.levels[i];
  out << "\n";
  if (c.sweep_parameter) {
    out << "sweep.parameter = " << to_string(*c.sweep_parameter) << "\n";
    out << "sweep.values = ";
    for (size_t i = 0; i < c.sweep_values.size(); ++i) out << (i ? "," : "") << fmt(c.sweep_values[i]);
    out << "\n";
  }
  out << "output.dir = " << c.output_dir << "\n";
}

}  // namespace porodarcy
