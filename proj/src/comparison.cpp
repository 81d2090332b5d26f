#include "jfs/comparison.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

#include "jfs/differencing.hpp"

namespace jfs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleTol = 1e-14;
constexpr double kSlack = 1e-9;

double arccot(double s) { return kPi / 2 - std::atan(s); }

}  // namespace

std::optional<std::size_t> ScalarTrace::find(Index node) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
  if (it == nodes.end() || *it != node) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

ScalarTrace scalar_traces(const JacobiTrajectory& traj, const Tolerances& tol) {
  ScalarTrace out;
  out.n = traj.field().n();
  out.step = traj.step();
  const double dim = static_cast<double>(out.n - 1);
  const auto instants = singular_instants(traj, tol.singular);
  auto singular_between = [&](double a, double b) {
    return std::any_of(instants.begin(), instants.end(),
                       [&](const SingularInstant& x) { return x.time >= a && x.time <= b; });
  };
  int segment = 0;
  for (Index i = 0; i < traj.size(); ++i) {
    if (!traj.is_regular(i, tol.singular)) continue;
    if (!out.nodes.empty() &&
        (out.nodes.back() + 1 != i || singular_between(out.t.back(), traj.time(i)))) {
      ++segment;
    }
    out.segment.push_back(segment);
    const Matrixd s = riccati(traj, i, tol.singular).matrix();
    const double mean = s.trace() / dim;
    const Matrixd s0 = s - mean * Matrixd::Identity(s.rows(), s.cols());
    const double tr_r = traj.field().evaluate(traj.time(i)).trace();
    out.nodes.push_back(i);
    out.t.push_back(traj.time(i));
    out.s.push_back(mean);
    out.r.push_back((tr_r + s0.squaredNorm()) / dim);
    out.op_norm.push_back(spectral_norm<double>(s));
  }
  if (out.nodes.empty()) throw Error("scalar_traces: no regular node in the trajectory");
  return out;
}

ResidualSummary scalar_trace_residual(const ScalarTrace& trace, const Tolerances& tol) {
  ResidualSummary out;
  const auto half = static_cast<std::size_t>(kStencilHalfWidth);
  for (std::size_t p = half; p + half < trace.size(); ++p) {
    bool admissible = true;
    std::array<double, 5> s{};
    for (std::size_t j = 0; j < 5 && admissible; ++j) {
      const std::size_t q = p + j - half;
      admissible = trace.nodes[q] == trace.nodes[p] + static_cast<Index>(j) - static_cast<Index>(half) &&
                   trace.segment[q] == trace.segment[p] && trace.op_norm[q] <= tol.resolved_riccati;
      s[j] = trace.s[q];
    }
    if (!admissible) continue;
    const double res =
        std::abs(central_difference(s, trace.step) + trace.s[p] * trace.s[p] + trace.r[p]);
    ++out.nodes_checked;
    if (res > out.max) {
      out.max = res;
      out.worst_time = trace.t[p];
    }
  }
  return out;
}

double ModelSolution::operator()(double t) const {
  return std::cos(t - delta) / std::sin(t - delta);
}

double ModelSolution::derivative(double t) const {
  const double sn = std::sin(t - delta);
  return -1.0 / (sn * sn);
}

std::string to_string(ModelSolution::Side side) {
  switch (side) {
    case ModelSolution::Side::None: return "none";
    case ModelSolution::Side::Left: return "left";
    case ModelSolution::Side::Right: return "right";
  }
  return "?";
}

ModelSolution model_solution(double t0, double s0) {
  if (!(t0 > 0.0 && t0 < kPi)) throw Error("model_solution: t0 must lie in (0, pi)");
  if (!std::isfinite(s0)) throw Error("model_solution: s0 must be finite");
  ModelSolution m;
  m.t0 = t0;
  m.s0 = s0;
  m.delta = t0 - arccot(s0);
  if (m.delta > kPoleTol) {
    m.asymptote = m.delta;
    m.side = ModelSolution::Side::Left;
  } else if (m.delta < -kPoleTol) {
    m.asymptote = m.delta + kPi;
    m.side = ModelSolution::Side::Right;
  }
  return m;
}

Verdict ComparisonReport::verdict() const {
  if (!hypothesis_ok) return Verdict::HypothesisViolated;
  return left_ok && right_ok ? Verdict::Verified : Verdict::Falsified;
}

ComparisonReport comparison_check(const ScalarTrace& trace, double t0, const Tolerances& tol) {
  const auto it = std::min_element(trace.t.begin(), trace.t.end(), [&](double a, double b) {
    return std::abs(a - t0) < std::abs(b - t0);
  });
  if (it == trace.t.end() || std::abs(*it - t0) > 1e-6 * trace.step) {
    throw Error("comparison_check: t0 is not a regular node");
  }
  const auto p = static_cast<std::size_t>(it - trace.t.begin());
  std::size_t lo = p, hi = p;
  while (lo > 0 && trace.segment[lo - 1] == trace.segment[p]) --lo;
  while (hi + 1 < trace.size() && trace.segment[hi + 1] == trace.segment[p]) ++hi;

  ComparisonReport rep;
  rep.t0 = trace.t[p];
  rep.model = model_solution(rep.t0, trace.s[p]);
  rep.window_begin = trace.t[lo];
  rep.window_end = trace.t[hi];
  rep.r_min = *std::min_element(trace.r.begin() + static_cast<std::ptrdiff_t>(lo),
                                trace.r.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  rep.hypothesis_ok = rep.r_min >= 1.0 - kSlack;
  if (!rep.hypothesis_ok) rep.note = "hypothesis r>=1 fails";

  struct Worst {
    double value = -std::numeric_limits<double>::infinity();
    double time = 0.0;
  } left, right;
  for (std::size_t q = lo; q < p; ++q) {
    const double v = rep.model(trace.t[q]) - trace.s[q];
    if (v > left.value) left = {v, trace.t[q]};
    ++rep.nodes_left;
  }
  for (std::size_t q = p + 1; q <= hi; ++q) {
    const double v = trace.s[q] - rep.model(trace.t[q]);
    if (v > right.value) right = {v, trace.t[q]};
    ++rep.nodes_right;
  }
  rep.left_ok = left.value <= tol.comparison;
  rep.right_ok = right.value <= tol.comparison;
  const Worst& worst = left.value >= right.value ? left : right;
  rep.max_violation = worst.value;
  rep.worst_time = worst.time;
  if (rep.nodes_left + rep.nodes_right == 0) rep.max_violation = 0.0;
  return rep;
}

RigidityReport rigidity_check(const JacobiTrajectory& traj, double alpha, const Tolerances& tol) {
  RigidityReport rep;
  rep.alpha = alpha;
  const int n = traj.field().n();
  const Index m = traj.dim();
  const double end = traj.time(traj.size() - 1);

  rep.self_adjoint = self_adjoint_gate(traj, tol);

  rep.curvature.value = std::numeric_limits<double>::infinity();
  const Index stride = traj.field().is_constant() ? traj.size() : 1;
  for (Index i = 0; i < traj.size(); i += stride) {
    rep.curvature.value =
        std::min(rep.curvature.value, traj.field().evaluate(traj.time(i)).trace() - (n - 1));
  }
  rep.curvature.pass = rep.curvature.value >= -tol.curvature;
  if (!rep.curvature.pass) rep.curvature.note = "Ric < n-1";

  rep.window.value = end;
  rep.window.pass = end >= kPi - kSlack && traj.time(0) <= alpha + kSlack;
  if (!rep.window.pass) rep.window.note = "trajectory does not cover [alpha, pi]";

  rep.regularity.value = std::numeric_limits<double>::quiet_NaN();
  for (const auto& instant : singular_instants(traj, tol.singular)) {
    if (instant.time > alpha + kSlack && instant.time < kPi - kSlack) {
      rep.regularity.pass = false;
      rep.regularity.value = instant.time;
      rep.regularity.note = "family fails to span at an interior time";
      break;
    }
  }

  rep.boundary = boundary_gate(traj, alpha, tol);

  const std::array<std::pair<const Gate*, const char*>, 5> gates = {{
      {&rep.self_adjoint, "self-adjoint"},
      {&rep.curvature, "curvature"},
      {&rep.window, "window"},
      {&rep.regularity, "regularity"},
      {&rep.boundary, "boundary"},
  }};
  for (const auto& [gate, name] : gates) {
    if (!gate->pass) {
      rep.verdict = Verdict::HypothesisViolated;
      rep.reason = name;
      return rep;
    }
  }

  const Matrixd id = Matrixd::Identity(m, m);
  for (Index i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (!(t > alpha + kSlack && t < kPi - kSlack) || !traj.is_regular(i, tol.singular)) continue;
    const Matrixd s = riccati(traj, i, tol.singular).matrix();
    const double ds = spectral_norm<double>(s - (std::cos(t) / std::sin(t)) * id);
    const double dr = spectral_norm<double>(traj.field().evaluate(t).matrix() - id);
    ++rep.nodes_checked;
    if (ds > rep.max_s_deviation) {
      rep.max_s_deviation = ds;
      rep.worst_time = t;
    }
    rep.max_r_deviation = std::max(rep.max_r_deviation, dr);
  }
  const bool ok = rep.max_s_deviation <= tol.rigidity && rep.max_r_deviation <= tol.rigidity;
  rep.verdict = ok ? Verdict::Verified : Verdict::Falsified;
  if (!ok) rep.reason = "S differs from cot(t) id";
  return rep;
}

void write_scalar_trace_csv(std::ostream& os, const ScalarTrace& trace,
                            const std::optional<ModelSolution>& model) {
  os << "t,s,r" << (model ? ",f" : "") << "\n" << std::setprecision(17);
  for (std::size_t q = 0; q < trace.size(); ++q) {
    os << trace.t[q] << "," << trace.s[q] << "," << trace.r[q];
    if (model) os << "," << (*model)(trace.t[q]);
    os << "\n";
  }
}

}  // namespace jfs
