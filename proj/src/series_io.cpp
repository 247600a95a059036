#include "facetflow/series_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "facetflow/scenario_io.hpp"
#include "facetflow/verification.hpp"

namespace facetflow {

namespace {

constexpr const char* kFormatTag = "facetflow-series v1";

std::string fmt(Scalar v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail_at(std::size_t byte, const std::string& why) {
  throw std::runtime_error("series stream: " + why + " at byte " +
                           std::to_string(byte));
}

struct LineReader {
  explicit LineReader(std::istream& s) : in(s) {}

  std::istream& in;
  std::size_t byte = 0;       // offset of the start of the current line
  std::size_t next_byte = 0;  // offset one past the current line
  std::string line;

  bool next() {
    byte = next_byte;
    if (!std::getline(in, line)) return false;
    next_byte = byte + line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
};

Scalar parse_field(const std::string& text, std::size_t byte) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const Scalar v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') fail_at(byte, "malformed number field");
  return v;
}

}  // namespace

void emit_series(const TimeSeries& series, std::ostream& out) {
  out << "# " << kFormatTag << "\n";
  out << "# fingerprint=" << series.meta.fingerprint << "\n";
  out << "# method="
      << (series.meta.method == Method::prox ? "prox" : "regularized") << "\n";
  out << "# epsilon=" << fmt(series.meta.epsilon) << "\n";
  out << "# n=" << series.meta.n << "\n";
  out << "# dt=" << fmt(series.meta.dt) << "\n";
  out << "# snapshots=" << series.snaps.size() << "\n";
  out << "t,x,u,omega_mid,slope,cell_flag\n";
  for (const Snapshot& s : series.snaps) {
    const int n = s.u.n();
    const Scalar h = s.u.h();
    for (int i = 0; i < n; ++i) {
      const int c = std::min(i, n - 2);
      const Scalar slope = (s.u.values[c + 1] - s.u.values[c]) / h;
      out << fmt(s.t) << ',' << fmt(i * h) << ',' << fmt(s.u.values[i]) << ','
          << fmt(s.flux.mid[c]) << ',' << fmt(slope) << ','
          << static_cast<int>(s.flux.flag(c)) << "\n";
    }
  }
}

TimeSeries load_series(std::istream& in) {
  LineReader r(in);
  TimeSeries out;
  long snapshots = -1;
  bool tagged = false;

  // header
  while (r.next()) {
    if (r.line.empty()) continue;
    if (r.line[0] != '#') break;
    std::string body = r.line.substr(1);
    const auto start = body.find_first_not_of(" \t");
    body = start == std::string::npos ? "" : body.substr(start);
    if (!tagged) {
      if (body != kFormatTag)
        fail_at(r.byte, "unknown format tag (expected '" +
                            std::string(kFormatTag) + "')");
      tagged = true;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail_at(r.byte, "malformed header line");
    const std::string key = body.substr(0, eq);
    const std::string val = body.substr(eq + 1);
    if (key == "fingerprint") {
      out.meta.fingerprint = val;
    } else if (key == "method") {
      if (val == "prox")
        out.meta.method = Method::prox;
      else if (val == "regularized")
        out.meta.method = Method::regularized;
      else
        fail_at(r.byte, "unknown method '" + val + "'");
    } else if (key == "epsilon") {
      out.meta.epsilon = parse_field(val, r.byte);
    } else if (key == "n") {
      out.meta.n = static_cast<int>(parse_field(val, r.byte));
    } else if (key == "dt") {
      out.meta.dt = parse_field(val, r.byte);
    } else if (key == "snapshots") {
      snapshots = static_cast<long>(parse_field(val, r.byte));
    } else {
      fail_at(r.byte, "unknown header key '" + key + "'");
    }
  }
  if (!tagged) fail_at(0, "missing format tag");
  if (out.meta.n < 3) fail_at(0, "missing or invalid n header");
  if (snapshots < 1) fail_at(0, "missing or invalid snapshots header");
  if (r.line != "t,x,u,omega_mid,slope,cell_flag")
    fail_at(r.byte, "unexpected column header");

  const int n = out.meta.n;
  long rows = 0;
  Snapshot cur;
  cur.u.values.resize(n);
  cur.flux.mid.resize(n - 1);
  std::vector<CellFlag> flags(n - 1, CellFlag::ok);
  bool any_flag = false;

  while (r.next()) {
    if (r.line.empty()) continue;
    std::array<std::string, 6> field;
    std::size_t pos = 0;
    for (int f = 0; f < 6; ++f) {
      const auto comma = r.line.find(',', pos);
      if (f < 5 && comma == std::string::npos)
        fail_at(r.byte, "expected 6 comma-separated fields");
      field[f] = r.line.substr(pos, comma == std::string::npos
                                        ? std::string::npos
                                        : comma - pos);
      pos = comma + 1;
      if (f == 5 && comma != std::string::npos)
        fail_at(r.byte, "expected 6 comma-separated fields");
    }
    const int i = static_cast<int>(rows % n);
    if (i == 0) {
      cur.t = parse_field(field[0], r.byte);
      std::fill(flags.begin(), flags.end(), CellFlag::ok);
      any_flag = false;
    }
    cur.u.values[i] = parse_field(field[2], r.byte);
    const int c = std::min(i, n - 2);
    cur.flux.mid[c] = parse_field(field[3], r.byte);
    const int flag = static_cast<int>(parse_field(field[5], r.byte));
    if (i < n - 1 && flag != 0) {
      flags[c] = static_cast<CellFlag>(flag);
      any_flag = true;
    }
    ++rows;
    if (rows % n == 0) {
      cur.flux.flags = any_flag ? flags : std::vector<CellFlag>{};
      out.snaps.push_back(cur);
    }
  }
  if (rows != snapshots * n)
    fail_at(r.next_byte, "truncated stream: expected " +
                             std::to_string(snapshots * n) + " rows, found " +
                             std::to_string(rows));
  return out;
}

TimeSeries load_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series file: " + path);
  return load_series(in);
}

namespace {

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string render_archive_summary(const Scenario& sc,
                                   const RunResult& result) {
  std::ostringstream out;
  const TimeSeries& ts = result.series;
  out << "facetflow run summary\n";
  out << "name:          " << sc.name << "\n";
  out << "fingerprint:   " << ts.meta.fingerprint << "\n";
  out << "method:        "
      << (sc.method == Method::prox ? "prox" : "regularized") << "\n";
  if (sc.method == Method::regularized) {
    out << "epsilons:     ";
    for (Scalar e : sc.epsilon_schedule) out << ' ' << fmt(e);
    out << "\n";
  }
  out << "n:             " << sc.n << "\n";
  out << "dt:            " << fmt(sc.dt) << "\n";
  out << "T:             " << fmt(sc.T) << "\n";
  out << "snapshots:     " << ts.snaps.size() << "\n";
  out << "wall_seconds:  " << fmt(result.wall_seconds) << "\n";
  out << "total_rounds:  " << result.total_rounds << "\n";
  out << "total_substeps:" << result.total_substeps << "\n";
  out << "written_utc:   " << utc_now() << "\n\n";

  out << "snapshot diagnostics\n";
  out << "t,energy,slope_tv,min_second_diff,max_abs_flux\n";
  for (const Snapshot& s : ts.snaps)
    out << fmt(s.t) << ',' << fmt(s.diag.energy) << ',' << fmt(s.diag.bv)
        << ',' << fmt(s.diag.min_second_difference) << ','
        << fmt(s.diag.max_abs_flux) << "\n";

  if (!result.convergence.empty()) {
    out << "\nmollifier convergence (final-time L2 distance to finest)\n";
    out << "epsilon,l2_to_finest\n";
    for (const auto& e : result.convergence)
      out << fmt(e.epsilon) << ',' << fmt(e.l2_to_finest) << "\n";
    out << "fitted order: " << fmt(fit_observed_order(result.convergence))
        << "\n";
  }
  return out.str();
}

}  // namespace

void save_archive(const std::string& dir, const Scenario& sc,
                  const RunResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "scenario.resolved.scn");
    if (!out) throw std::runtime_error("cannot write scenario echo in " + dir);
    out << emit_scenario(sc);
  }
  {
    std::ofstream out(fs::path(dir) / "series.csv");
    if (!out) throw std::runtime_error("cannot write series.csv in " + dir);
    emit_series(result.series, out);
  }
  for (std::size_t k = 0; k < result.epsilon_series.size(); ++k) {
    std::ofstream out(fs::path(dir) /
                      ("series_eps" + std::to_string(k) + ".csv"));
    emit_series(result.epsilon_series[k], out);
  }
  {
    std::ofstream out(fs::path(dir) / "summary.txt");
    out << render_archive_summary(sc, result);
  }
}

RunArchive load_archive(const std::string& dir) {
  namespace fs = std::filesystem;
  RunArchive a;
  a.scenario = load_scenario_file((fs::path(dir) / "scenario.resolved.scn").string());
  a.series = load_series_file((fs::path(dir) / "series.csv").string());
  if (a.series.meta.n != a.scenario.n)
    throw std::runtime_error(
        "archive: series grid does not match the scenario echo");
  for (Snapshot& s : a.series.snaps)
    s.diag = compute_diagnostics(a.scenario.graph, s.u, s.flux);
  return a;
}

}  // namespace facetflow
