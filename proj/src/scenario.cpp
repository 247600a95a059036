#include "facetflow/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "facetflow/scenario_io.hpp"

namespace facetflow {

std::function<Scalar(Scalar)> initial_evaluator(const InitialSpec& s) {
  const Scalar sc = s.scale;
  switch (s.kind) {
    case InitialSpec::Kind::fourier: {
      auto modes = s.modes;
      return [modes, sc](Scalar x) {
        Scalar v = 0;
        for (const auto& [m, amp] : modes) v += amp * std::sin(m * M_PI * x);
        return sc * v;
      };
    }
    case InitialSpec::Kind::cosine: {
      const Scalar amp = s.modes.empty() ? 1.0 : s.modes.front().second;
      return [amp, sc](Scalar x) { return sc * amp * std::cos(M_PI * x); };
    }
    case InitialSpec::Kind::vee: {
      const Scalar c = s.center;
      return [c, sc](Scalar x) { return sc * std::abs(x - c); };
    }
    case InitialSpec::Kind::affine: {
      const Scalar a = s.a, b = s.b;
      return [a, b, sc](Scalar x) { return sc * (a + b * x); };
    }
    case InitialSpec::Kind::quadratic:
      return [sc](Scalar x) { return sc * x * x; };
    case InitialSpec::Kind::samples: {
      const Vector vals = s.samples;
      if (vals.size() < 2)
        throw std::invalid_argument("initial samples: need at least 2 values");
      return [vals, sc](Scalar x) {
        const int m = static_cast<int>(vals.size()) - 1;
        const Scalar pos = std::clamp(x, Scalar(0), Scalar(1)) * m;
        const int i = std::min(static_cast<int>(pos), m - 1);
        const Scalar f = pos - i;
        return sc * ((1 - f) * vals[i] + f * vals[i + 1]);
      };
    }
  }
  throw std::logic_error("initial_evaluator: unreachable");
}

GridFunction materialize(const InitialSpec& s, int n) {
  if (n < 3) throw std::invalid_argument("grid needs n >= 3");
  GridFunction u{Vector(n)};
  if (s.kind == InitialSpec::Kind::samples &&
      static_cast<int>(s.samples.size()) == n) {
    u.values = s.scale * s.samples;
    return u;
  }
  const auto f = initial_evaluator(s);
  const Scalar h = Scalar(1) / (n - 1);
  for (int i = 0; i < n; ++i) u.values[i] = f(i * h);
  return u;
}

std::vector<Scalar> default_epsilon_schedule() {
  std::vector<Scalar> eps;
  for (int k = 0; k <= 5; ++k) eps.push_back(0.1 * std::pow(2.0, -k));
  return eps;
}

void validate_scenario(const Scenario& s) {
  if (s.n < 3) throw std::invalid_argument("scenario: n must be >= 3");
  if (!(s.dt > 0)) throw std::invalid_argument("scenario: dt must be > 0");
  if (!(s.T >= s.dt)) throw std::invalid_argument("scenario: T must be >= dt");
  if (s.snapshot_stride < 1)
    throw std::invalid_argument("scenario: snapshot_stride must be >= 1");
  if (s.method == Method::regularized) {
    if (s.epsilon_schedule.empty())
      throw std::invalid_argument("scenario: empty epsilon schedule");
    for (std::size_t k = 0; k < s.epsilon_schedule.size(); ++k) {
      if (!(s.epsilon_schedule[k] > 0))
        throw std::invalid_argument("scenario: epsilon must be > 0");
      if (k > 0 && !(s.epsilon_schedule[k] < s.epsilon_schedule[k - 1]))
        throw std::invalid_argument(
            "scenario: epsilon schedule must be strictly decreasing");
    }
  }
  const GridFunction u0 = materialize(s.initial, s.n);
  const Scalar tol = 1e-9 * std::max<Scalar>(1, u0.values.cwiseAbs().maxCoeff());
  if (std::abs(u0.values[0] - s.left.value(0)) > tol ||
      std::abs(u0.values[s.n - 1] - s.right.value(0)) > tol)
    throw std::invalid_argument(
        "scenario: initial datum must match the Dirichlet boundary values at "
        "t = 0");
}

std::string scenario_fingerprint(const Scenario& s) {
  const std::string text = emit_scenario(s);
  unsigned long long hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", hash);
  return buf;
}

}  // namespace facetflow
