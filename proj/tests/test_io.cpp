#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "facetflow/scenario_io.hpp"
#include "facetflow/series_io.hpp"
#include "facetflow/solver.hpp"

using namespace facetflow;

namespace {

const char* kVeeText = R"([scenario]
name = vee_demo

[graph]
preset = sign

[initial]
kind = vee
center = 0.5

[boundary]
left = 0.5
right = 0.5

[discretization]
n = 41
dt = 1e-3
T = 0.01

[solver]
method = prox
snapshot_stride = 5
)";

}  // namespace

TEST_CASE("scenario parsing: preset expansion and defaults") {
  const Scenario sc = parse_scenario(kVeeText);
  CHECK(sc.name == "vee_demo");
  CHECK(sc.graph_preset == "sign");
  REQUIRE(sc.graph.knots().size() == 1);
  CHECK(sc.graph.knots()[0].y_lo == -1);
  CHECK(sc.graph.knots()[0].y_hi == 1);
  CHECK(sc.graph.slopes() == std::vector<Scalar>{0, 0});
  CHECK(sc.initial.kind == InitialSpec::Kind::vee);
  CHECK(sc.left.value(0) == 0.5);
  CHECK(sc.n == 41);
  CHECK(sc.dt == 1e-3);
  CHECK(sc.method == Method::prox);
  CHECK(sc.snapshot_stride == 5);
  CHECK(sc.solver.max_rounds > 0);  // default filled in
}

TEST_CASE("scenario parsing: literal graphs") {
  const Scenario sc = parse_scenario(R"(
[graph]
knots = (0, -2, 0); (1, 0, 2)
slopes = 0, 0, 0

[initial]
kind = affine
a = 0.5
b = 0

[boundary]
left = 0.5
right = 0.5

[discretization]
n = 21
dt = 1e-3
T = 0.01
)");
  REQUIRE(sc.graph.knots().size() == 2);
  CHECK(sc.graph.knots()[1].p == 1);
  CHECK(sc.graph.knots()[1].y_hi == 2);
  CHECK(sc.graph_preset.empty());
}

TEST_CASE("scenario parsing: errors carry line numbers and context") {
  // missing boundary section
  try {
    parse_scenario(R"(
[graph]
preset = sign

[initial]
kind = vee

[discretization]
n = 21
dt = 1e-3
T = 0.01
)");
    FAIL("expected a parse error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("Dirichlet") != std::string::npos);
  }

  // decreasing knots reported with a line number
  try {
    parse_scenario(R"([graph]
knots = (1, 0, 0); (0, 1, 1)
slopes = 0, 0, 0

[initial]
kind = affine

[boundary]
left = 0
right = 0

[discretization]
n = 21
dt = 1e-3
T = 0.01
)");
    FAIL("expected a parse error");
  } catch (const ScenarioError& e) {
    CHECK(e.line == 2);
  }

  // unknown keys are rejected, not ignored
  CHECK_THROWS_AS(parse_scenario(std::string(kVeeText) + "\nbogus_key = 1\n"),
                  ScenarioError);
}

TEST_CASE("scenario echo closes the round trip") {
  const Scenario sc = parse_scenario(kVeeText);
  const std::string echo = emit_scenario(sc);
  const Scenario back = parse_scenario(echo);
  CHECK(back == sc);
  // echo is canonical: emitting again is byte-identical
  CHECK(emit_scenario(back) == echo);
}

TEST_CASE("fingerprints are stable and discriminating") {
  const Scenario a = parse_scenario(kVeeText);
  const Scenario b = parse_scenario(kVeeText);
  CHECK(scenario_fingerprint(a) == scenario_fingerprint(b));
  Scenario c = a;
  c.dt = 2e-3;
  CHECK(scenario_fingerprint(c) != scenario_fingerprint(a));
}

TEST_CASE("series emit/load round trip is exact") {
  Scenario sc = parse_scenario(kVeeText);
  const auto result = run(sc);
  std::ostringstream out;
  emit_series(result.series, out);

  std::istringstream in(out.str());
  const TimeSeries back = load_series(in);
  REQUIRE(back.snaps.size() == result.series.snaps.size());
  CHECK(back.meta.n == result.series.meta.n);
  CHECK(back.meta.fingerprint == result.series.meta.fingerprint);
  for (size_t k = 0; k < back.snaps.size(); ++k) {
    const auto& s0 = result.series.snaps[k];
    const auto& s1 = back.snaps[k];
    CHECK(s1.t == s0.t);
    CHECK(linf_distance(s1.u, s0.u) == 0);
    for (int c = 0; c < sc.n - 1; ++c) {
      CHECK(s1.flux.mid[c] == s0.flux.mid[c]);
      CHECK(s1.flux.flag(c) == s0.flux.flag(c));
    }
  }
}

TEST_CASE("series loader reports byte offsets") {
  Scenario sc = parse_scenario(kVeeText);
  const auto result = run(sc);
  std::ostringstream out;
  emit_series(result.series, out);
  const std::string text = out.str();

  // truncate in the middle of the table
  std::istringstream trunc(text.substr(0, text.size() * 2 / 3));
  try {
    load_series(trunc);
    FAIL("expected a truncation error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }

  // corrupt one numeric field
  std::string bad = text;
  const auto pos = bad.rfind("0.5");
  bad.replace(pos, 3, "x.q");
  std::istringstream badin(bad);
  CHECK_THROWS_AS(load_series(badin), std::runtime_error);

  // foreign format tag
  std::istringstream foreign("# someformat v9\n");
  try {
    load_series(foreign);
    FAIL("expected a version mismatch");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("format") != std::string::npos);
  }
}

TEST_CASE("archive round trip preserves the run bit for bit") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "facetflow_archive_test";
  fs::remove_all(dir);

  Scenario sc = parse_scenario(kVeeText);
  const auto result = run(sc);
  save_archive(dir.string(), sc, result);

  CHECK(fs::exists(dir / "scenario.resolved.scn"));
  CHECK(fs::exists(dir / "series.csv"));
  CHECK(fs::exists(dir / "summary.txt"));

  const RunArchive back = load_archive(dir.string());
  CHECK(back.scenario == sc);
  REQUIRE(back.series.snaps.size() == result.series.snaps.size());
  for (size_t k = 0; k < back.series.snaps.size(); ++k) {
    const auto& s0 = result.series.snaps[k];
    const auto& s1 = back.series.snaps[k];
    CHECK(linf_distance(s1.u, s0.u) == 0);
    // diagnostics are recomputed from the echoed scenario graph and land on
    // the same bits
    CHECK(s1.diag.energy == s0.diag.energy);
    CHECK(s1.diag.bv == s0.diag.bv);
    CHECK(s1.diag.max_abs_flux == s0.diag.max_abs_flux);
  }
  fs::remove_all(dir);
}

TEST_CASE("archives of mollified sweeps keep every schedule entry") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "facetflow_sweep_test";
  fs::remove_all(dir);

  Scenario sc = parse_scenario(kVeeText);
  sc.method = Method::regularized;
  sc.epsilon_schedule = {0.1, 0.05};
  sc.T = 0.005;
  const auto result = run(sc);
  save_archive(dir.string(), sc, result);
  CHECK(fs::exists(dir / "series_eps0.csv"));
  CHECK(fs::exists(dir / "series_eps1.csv"));

  const RunArchive back = load_archive(dir.string());
  CHECK(back.series.meta.epsilon == 0.05);  // finest entry is the main series
  fs::remove_all(dir);
}

TEST_CASE("boundary tables parse and evaluate") {
  const Scenario sc = parse_scenario(R"(
[graph]
preset = identity

[initial]
kind = affine
a = 0
b = 1

[boundary]
left = 0
right_table = 0:1, 0.005:1.2, 0.01:1.2

[discretization]
n = 21
dt = 1e-3
T = 0.01
)");
  CHECK(!sc.right.is_constant());
  CHECK(sc.right.value(0) == 1);
  CHECK(sc.right.value(0.0025) == doctest::Approx(1.1));
  CHECK(sc.right.value(5) == doctest::Approx(1.2));
  // the run accepts moving data
  const auto result = run(sc);
  CHECK(result.series.back().u.values[20] == doctest::Approx(1.2));
}
