#include "facetflow/scenario_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace facetflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line;
  mutable bool used{false};
};

struct Doc {
  // section -> key -> entry (later duplicates overwrite; flagged as error)
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_lines;

  bool has(const std::string& sec) const { return sections.count(sec) > 0; }

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }
};

Doc tokenize(const std::string& text) {
  Doc doc;
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto pos = line.find('#'); pos != std::string::npos)
      line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ScenarioError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ScenarioError(line_no, "empty section name");
      doc.sections[section];
      doc.section_lines.emplace(section, line_no);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ScenarioError(line_no, "expected 'key = value'");
    if (section.empty())
      throw ScenarioError(line_no, "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ScenarioError(line_no, "empty key");
    auto [it, inserted] = doc.sections[section].emplace(key, Entry{value, line_no});
    if (!inserted)
      throw ScenarioError(line_no, "duplicate key '" + key + "' in [" + section + "]");
  }
  return doc;
}

Scalar parse_number(const std::string& s, int line) {
  const std::string t = trim(s);
  char* end = nullptr;
  const Scalar v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0')
    throw ScenarioError(line, "expected a number, got '" + t + "'");
  return v;
}

long parse_integer(const std::string& s, int line) {
  const std::string t = trim(s);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end == t.c_str() || *end != '\0')
    throw ScenarioError(line, "expected an integer, got '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<Scalar> parse_number_list(const std::string& s, int line) {
  std::vector<Scalar> out;
  for (const auto& part : split(s, ','))
    if (!trim(part).empty()) out.push_back(parse_number(part, line));
  if (out.empty()) throw ScenarioError(line, "expected a list of numbers");
  return out;
}

// "t:v, t:v" pairs.
std::vector<std::pair<Scalar, Scalar>> parse_pair_list(const std::string& s,
                                                       int line) {
  std::vector<std::pair<Scalar, Scalar>> out;
  for (const auto& part : split(s, ',')) {
    const std::string p = trim(part);
    if (p.empty()) continue;
    auto colon = p.find(':');
    if (colon == std::string::npos)
      throw ScenarioError(line, "expected 'a:b' pair, got '" + p + "'");
    out.emplace_back(parse_number(p.substr(0, colon), line),
                     parse_number(p.substr(colon + 1), line));
  }
  if (out.empty()) throw ScenarioError(line, "expected a list of pairs");
  return out;
}

// "(p, y_lo, y_hi); (p, y_lo, y_hi)" knot list.
std::vector<Knot> parse_knot_list(const std::string& s, int line) {
  std::vector<Knot> out;
  for (const auto& part : split(s, ';')) {
    std::string p = trim(part);
    if (p.empty()) continue;
    if (p.front() != '(' || p.back() != ')')
      throw ScenarioError(line, "expected '(p, y_lo, y_hi)', got '" + p + "'");
    const auto nums = parse_number_list(p.substr(1, p.size() - 2), line);
    if (nums.size() != 3)
      throw ScenarioError(line, "knot needs exactly 3 numbers");
    out.push_back({nums[0], nums[1], nums[2]});
  }
  if (out.empty()) throw ScenarioError(line, "expected a knot list");
  return out;
}

const Entry& require(const Doc& doc, const std::string& sec,
                     const std::string& key, const std::string& why) {
  const Entry* e = doc.find(sec, key);
  if (!e) {
    const int line = doc.has(sec) ? doc.section_lines.at(sec) : 0;
    throw ScenarioError(line, "[" + sec + "] is missing '" + key + "': " + why);
  }
  return *e;
}

MonotoneGraph build_graph(const Doc& doc, std::string* preset_echo) {
  if (!doc.has("graph"))
    throw ScenarioError(0, "scenario requires a [graph] section");
  if (const Entry* p = doc.find("graph", "preset")) {
    *preset_echo = trim(p->value);
    try {
      return MonotoneGraph::preset(*preset_echo);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(p->line, e.what());
    }
  }
  preset_echo->clear();
  const Entry* knots_entry = doc.find("graph", "knots");
  try {
    if (const Entry* k = knots_entry) {
      auto knots = parse_knot_list(k->value, k->line);
      if (const Entry* sl = doc.find("graph", "slopes")) {
        auto slopes = parse_number_list(sl->value, sl->line);
        return MonotoneGraph(std::move(knots), std::move(slopes));
      }
      const Entry& ts = require(doc, "graph", "tail_slopes",
                                "literal graphs need the two tail slopes");
      auto tails = parse_number_list(ts.value, ts.line);
      if (tails.size() != 2)
        throw ScenarioError(ts.line, "tail_slopes needs exactly 2 numbers");
      return MonotoneGraph::from_knots(std::move(knots), tails[0], tails[1]);
    }
    const Entry& sl = require(doc, "graph", "slope",
                              "knotless graphs need a single slope");
    std::pair<Scalar, Scalar> anchor{0, 0};
    if (const Entry* a = doc.find("graph", "anchor")) {
      auto nums = parse_number_list(a->value, a->line);
      if (nums.size() != 2)
        throw ScenarioError(a->line, "anchor needs exactly 2 numbers");
      anchor = {nums[0], nums[1]};
    }
    return MonotoneGraph::affine(parse_number(sl.value, sl.line), anchor.first,
                                 anchor.second);
  } catch (const std::invalid_argument& e) {
    // attribute graph-validation failures to the knot data when present
    const int line =
        knots_entry ? knots_entry->line : doc.section_lines.at("graph");
    throw ScenarioError(line, e.what());
  }
}

InitialSpec build_initial(const Doc& doc) {
  if (!doc.has("initial"))
    throw ScenarioError(0, "scenario requires an [initial] section");
  const Entry& kind = require(doc, "initial", "kind",
                              "one of fourier|cosine|vee|affine|quadratic|samples");
  InitialSpec s;
  const std::string k = trim(kind.value);
  if (k == "fourier") {
    s.kind = InitialSpec::Kind::fourier;
    const Entry& m = require(doc, "initial", "modes", "e.g. modes = 1:1.0, 2:0.1");
    s.modes.clear();
    for (const auto& [mode, amp] : parse_pair_list(m.value, m.line)) {
      if (mode < 1 || mode != std::floor(mode))
        throw ScenarioError(m.line, "mode numbers must be positive integers");
      s.modes.emplace_back(static_cast<int>(mode), amp);
    }
  } else if (k == "cosine") {
    s.kind = InitialSpec::Kind::cosine;
    s.modes = {{1, 1.0}};
    if (const Entry* a = doc.find("initial", "amplitude"))
      s.modes[0].second = parse_number(a->value, a->line);
  } else if (k == "vee") {
    s.kind = InitialSpec::Kind::vee;
    if (const Entry* c = doc.find("initial", "center"))
      s.center = parse_number(c->value, c->line);
  } else if (k == "affine") {
    s.kind = InitialSpec::Kind::affine;
    s.a = parse_number(require(doc, "initial", "a", "affine offset").value,
                       doc.find("initial", "a")->line);
    s.b = parse_number(require(doc, "initial", "b", "affine slope").value,
                       doc.find("initial", "b")->line);
  } else if (k == "quadratic") {
    s.kind = InitialSpec::Kind::quadratic;
  } else if (k == "samples") {
    s.kind = InitialSpec::Kind::samples;
    const Entry& v = require(doc, "initial", "values", "nodal sample list");
    const auto nums = parse_number_list(v.value, v.line);
    s.samples = Eigen::Map<const Vector>(nums.data(), nums.size());
  } else {
    throw ScenarioError(kind.line, "unknown initial kind '" + k + "'");
  }
  if (const Entry* sc = doc.find("initial", "scale"))
    s.scale = parse_number(sc->value, sc->line);
  return s;
}

BoundaryEvaluator build_boundary_side(const Doc& doc, const std::string& side) {
  if (const Entry* t = doc.find("boundary", side + "_table")) {
    try {
      return BoundaryEvaluator::table(parse_pair_list(t->value, t->line));
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(t->line, e.what());
    }
  }
  const Entry& v =
      require(doc, "boundary", side,
              "Dirichlet endpoint values must be prescribed on both ends");
  return BoundaryEvaluator::constant(parse_number(v.value, v.line));
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const Doc doc = tokenize(text);
  static const std::vector<std::string> known_sections = {
      "scenario", "graph", "initial", "boundary", "discretization", "solver"};
  for (const auto& [sec, _] : doc.sections)
    if (std::find(known_sections.begin(), known_sections.end(), sec) ==
        known_sections.end())
      throw ScenarioError(doc.section_lines.at(sec),
                          "unknown section [" + sec + "]");

  Scenario s;
  if (const Entry* n = doc.find("scenario", "name")) s.name = trim(n->value);

  s.graph = build_graph(doc, &s.graph_preset);
  s.initial = build_initial(doc);

  if (!doc.has("boundary"))
    throw ScenarioError(0,
                        "scenario requires a [boundary] section: Dirichlet "
                        "endpoint values must be prescribed");
  s.left = build_boundary_side(doc, "left");
  s.right = build_boundary_side(doc, "right");

  if (!doc.has("discretization"))
    throw ScenarioError(0, "scenario requires a [discretization] section");
  {
    const Entry& n = require(doc, "discretization", "n", "node count");
    s.n = static_cast<int>(parse_integer(n.value, n.line));
    const Entry& dt = require(doc, "discretization", "dt", "time step");
    s.dt = parse_number(dt.value, dt.line);
    const Entry& T = require(doc, "discretization", "T", "final time");
    s.T = parse_number(T.value, T.line);
  }

  if (const Entry* m = doc.find("solver", "method")) {
    const std::string v = trim(m->value);
    if (v == "prox")
      s.method = Method::prox;
    else if (v == "regularized")
      s.method = Method::regularized;
    else
      throw ScenarioError(m->line, "method must be 'prox' or 'regularized'");
  }
  if (const Entry* e = doc.find("solver", "epsilon_schedule"))
    s.epsilon_schedule = parse_number_list(e->value, e->line);
  if (const Entry* t = doc.find("solver", "tol_prox"))
    s.solver.tol_prox = parse_number(t->value, t->line);
  if (const Entry* r = doc.find("solver", "max_rounds"))
    s.solver.max_rounds = static_cast<int>(parse_integer(r->value, r->line));
  if (const Entry* c = doc.find("solver", "substep_ceiling"))
    s.solver.substep_ceiling = parse_integer(c->value, c->line);
  if (const Entry* st = doc.find("solver", "snapshot_stride"))
    s.snapshot_stride = static_cast<int>(parse_integer(st->value, st->line));

  // Reject unrecognized keys: typos should not silently fall back to defaults.
  for (const auto& [sec, kvs] : doc.sections)
    for (const auto& [key, entry] : kvs)
      if (!entry.used)
        throw ScenarioError(entry.line,
                            "unknown key '" + key + "' in [" + sec + "]");

  try {
    validate_scenario(s);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(0, e.what());
  }
  return s;
}

namespace {

std::string fmt(Scalar v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_boundary_side(std::ostream& out, const std::string& side,
                        const BoundaryEvaluator& b) {
  const auto& pts = b.points();
  if (pts.size() == 1) {
    out << side << " = " << fmt(pts[0].second) << "\n";
    return;
  }
  out << side << "_table = ";
  for (std::size_t i = 0; i < pts.size(); ++i)
    out << (i ? ", " : "") << fmt(pts[i].first) << ":" << fmt(pts[i].second);
  out << "\n";
}

}  // namespace

std::string emit_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[scenario]\nname = " << s.name << "\n\n";

  out << "[graph]\n";
  if (!s.graph_preset.empty()) {
    out << "preset = " << s.graph_preset << "\n";
  } else if (!s.graph.knots().empty()) {
    out << "knots = ";
    const auto& ks = s.graph.knots();
    for (std::size_t i = 0; i < ks.size(); ++i)
      out << (i ? "; " : "") << "(" << fmt(ks[i].p) << ", " << fmt(ks[i].y_lo)
          << ", " << fmt(ks[i].y_hi) << ")";
    out << "\nslopes = ";
    for (std::size_t i = 0; i < s.graph.slopes().size(); ++i)
      out << (i ? ", " : "") << fmt(s.graph.slopes()[i]);
    out << "\n";
  } else {
    out << "slope = " << fmt(s.graph.slopes()[0]) << "\n";
    out << "anchor = " << fmt(s.graph.anchor_p()) << ", "
        << fmt(s.graph.anchor_y()) << "\n";
  }

  out << "\n[initial]\n";
  switch (s.initial.kind) {
    case InitialSpec::Kind::fourier:
      out << "kind = fourier\nmodes = ";
      for (std::size_t i = 0; i < s.initial.modes.size(); ++i)
        out << (i ? ", " : "") << s.initial.modes[i].first << ":"
            << fmt(s.initial.modes[i].second);
      out << "\n";
      break;
    case InitialSpec::Kind::cosine:
      out << "kind = cosine\namplitude = " << fmt(s.initial.modes[0].second)
          << "\n";
      break;
    case InitialSpec::Kind::vee:
      out << "kind = vee\ncenter = " << fmt(s.initial.center) << "\n";
      break;
    case InitialSpec::Kind::affine:
      out << "kind = affine\na = " << fmt(s.initial.a)
          << "\nb = " << fmt(s.initial.b) << "\n";
      break;
    case InitialSpec::Kind::quadratic:
      out << "kind = quadratic\n";
      break;
    case InitialSpec::Kind::samples:
      out << "kind = samples\nvalues = ";
      for (Eigen::Index i = 0; i < s.initial.samples.size(); ++i)
        out << (i ? ", " : "") << fmt(s.initial.samples[i]);
      out << "\n";
      break;
  }
  if (s.initial.scale != 1) out << "scale = " << fmt(s.initial.scale) << "\n";

  out << "\n[boundary]\n";
  emit_boundary_side(out, "left", s.left);
  emit_boundary_side(out, "right", s.right);

  out << "\n[discretization]\n";
  out << "n = " << s.n << "\ndt = " << fmt(s.dt) << "\nT = " << fmt(s.T)
      << "\n";

  out << "\n[solver]\n";
  out << "method = " << (s.method == Method::prox ? "prox" : "regularized")
      << "\n";
  out << "epsilon_schedule = ";
  for (std::size_t i = 0; i < s.epsilon_schedule.size(); ++i)
    out << (i ? ", " : "") << fmt(s.epsilon_schedule[i]);
  out << "\n";
  out << "tol_prox = " << fmt(s.solver.tol_prox) << "\n";
  out << "max_rounds = " << s.solver.max_rounds << "\n";
  out << "substep_ceiling = " << s.solver.substep_ceiling << "\n";
  out << "snapshot_stride = " << s.snapshot_stride << "\n";
  return out.str();
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Scenario s = parse_scenario(ss.str());
  if (s.name == "scenario") {
    // Default the name to the file stem.
    std::string stem = path;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
      stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos)
      stem = stem.substr(0, dot);
    if (!stem.empty()) s.name = stem;
  }
  return s;
}

}  // namespace facetflow
