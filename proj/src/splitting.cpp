#include "jfs/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace jfs {

namespace {

constexpr double kEndpointSlack = 1e-9;
// kernels found at nearby instants agree only to integration accuracy
constexpr double kUnionDropTol = 1e-6;
constexpr double kIndependenceTol = 1e-8;

double node_scale(const JacobiTrajectory& traj) {
  double scale = 0.0;
  for (Index i = 0; i < traj.size(); ++i) {
    scale = std::max({scale, traj.Y(i).norm(), traj.Yd(i).norm()});
  }
  return scale > 0.0 ? scale : 1.0;
}

template <typename Residual>
SpanResult near_null_span(const JacobiTrajectory& traj, double tol, Residual residual_at) {
  const Index m = traj.dim();
  const Index n = traj.size();
  const double h = traj.step();
  SpanResult out;
  out.scale = node_scale(traj);

  Matrixd gram = Matrixd::Zero(m, m);
  for (Index i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 * h : h;
    const Matrixd r = residual_at(i);
    gram += w * r.transpose() * r;
  }
  const double length = traj.time(n - 1) - traj.time(0);
  const auto spec = spectrum(SymOperatord(gram));
  const double cutoff = tol * tol * out.scale * out.scale * length;

  Index keep = 0;
  while (keep < m && spec.values(keep) <= cutoff) ++keep;

  auto max_residual = [&](const Matrixd& basis) {
    double worst = 0.0;
    if (basis.cols() == 0) return worst;
    for (Index i = 0; i < n; ++i) {
      worst = std::max(worst, spectral_norm<double>(residual_at(i) * basis));
    }
    return worst / out.scale;
  };
  // RMS smallness does not bound the pointwise residual; prune the least
  // convincing direction until the max over nodes is within tolerance.
  for (; keep > 0; --keep) {
    out.basis = spec.vectors.leftCols(keep);
    out.residual = max_residual(out.basis);
    if (out.residual <= tol) return out;
  }
  out.basis = Matrixd(m, 0);
  out.residual = 0.0;
  return out;
}

bool inside(double t, double a, double b, bool open_ends) {
  if (open_ends) return t > a + kEndpointSlack && t < b - kEndpointSlack;
  return t >= a - kEndpointSlack && t <= b + kEndpointSlack;
}

// Eigenvalues of S(alpha) restricted to the image of Y(alpha).
std::optional<double> quotient_max_eig(const JacobiTrajectory& traj, Index i,
                                       double tol_sing) {
  const Matrixd& y = traj.Y(i);
  Eigen::JacobiSVD<Matrixd> svd(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thr = tol_sing * traj.sigma_max();
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > thr) ++rank;
  if (rank == 0) return std::nullopt;
  const Matrixd u = svd.matrixU().leftCols(rank);
  const Matrixd v = svd.matrixV().leftCols(rank);
  // S maps Y c to Y' c; on the image, y = U_r s_r V_r^T c
  const Matrixd inv = v * sv.head(rank).cwiseInverse().asDiagonal();
  const Matrixd s = u.transpose() * traj.Yd(i) * inv;
  return max_eigenvalue(SymOperatord(s));
}

double orthogonality_residual(const JacobiTrajectory& traj, const Matrixd& z,
                              const Matrixd& p, const Tolerances& tol) {
  double worst = 0.0;
  if (z.cols() == 0 || p.cols() == 0) return worst;
  for (Index i = 0; i < traj.size(); ++i) {
    const Matrixd yz = traj.Y(i) * z;
    const Matrixd yp = traj.Y(i) * p;
    const Matrixd g = yz.transpose() * yp;
    for (Index a = 0; a < z.cols(); ++a) {
      for (Index b = 0; b < p.cols(); ++b) {
        const double excess = std::abs(g(a, b)) - tol.orth_abs;
        if (excess <= 0.0) continue;
        const double norms = yz.col(a).norm() * yp.col(b).norm();
        worst = std::max(worst, norms > 0.0 ? excess / norms
                                            : std::numeric_limits<double>::infinity());
      }
    }
  }
  return worst;
}

}  // namespace

std::string to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::A: return "A";
    case Theorem::B: return "B";
    case Theorem::C: return "C";
    case Theorem::E: return "E";
  }
  return "?";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Verified: return "verified";
    case Verdict::HypothesisViolated: return "hypothesis-violated";
    case Verdict::Falsified: return "falsified";
  }
  return "?";
}

Theorem theorem_from_string(const std::string& name) {
  if (name == "A") return Theorem::A;
  if (name == "B") return Theorem::B;
  if (name == "C") return Theorem::C;
  if (name == "E") return Theorem::E;
  throw Error("unknown theorem '" + name + "' (expected A, B, C or E)");
}

Verdict verdict_from_string(const std::string& name) {
  if (name == "verified") return Verdict::Verified;
  if (name == "hypothesis-violated") return Verdict::HypothesisViolated;
  if (name == "falsified") return Verdict::Falsified;
  throw Error("unknown verdict '" + name + "'");
}

VanishingSpan vanishing_span(const JacobiTrajectory& traj, double a, double b,
                             bool open_ends, double tol_zero) {
  VanishingSpan out;
  out.begin = a;
  out.end = b;
  out.open_ends = open_ends;
  Matrixd stacked(traj.dim(), 0);
  for (auto& instant : singular_instants(traj, tol_zero)) {
    if (!inside(instant.time, a, b, open_ends)) continue;
    Matrixd grown(traj.dim(), stacked.cols() + instant.kernel.cols());
    grown << stacked, instant.kernel;
    stacked = std::move(grown);
    out.zeros.push_back({instant.time, std::move(instant.kernel)});
  }
  out.basis = orthonormalize<double>(stacked, kUnionDropTol);
  return out;
}

SpanResult parallel_span(const JacobiTrajectory& traj, double tol) {
  return near_null_span(traj, tol, [&](Index i) -> const Matrixd& { return traj.Yd(i); });
}

SpanResult sine_span(const JacobiTrajectory& traj, double tol) {
  return near_null_span(traj, tol, [&](Index i) -> Matrixd {
    const double t = traj.time(i);
    return std::sin(t) * traj.Yd(i) - std::cos(t) * traj.Y(i);
  });
}

bool SplittingReport::hypotheses_hold() const {
  for (const auto* gate : {&self_adjoint, &curvature, &boundary, &dim_condition, &window}) {
    if (gate->has_value() && !(*gate)->pass) return false;
  }
  return true;
}

Gate self_adjoint_gate(const JacobiTrajectory& traj, const Tolerances& tol) {
  Gate g;
  g.value = wronskian(traj, 0).matrix().cwiseAbs().maxCoeff();
  const double bound =
      tol.self_adjoint * (1.0 + spectral_norm<double>(traj.Y(0)) * spectral_norm<double>(traj.Yd(0)));
  g.pass = g.value <= bound;
  if (!g.pass) g.note = "Wronskian does not vanish";
  return g;
}

Gate boundary_gate(const JacobiTrajectory& traj, double alpha, const Tolerances& tol) {
  Gate g;
  if (alpha == 0.0) {
    g.value = std::numeric_limits<double>::infinity();
    g.note = "cot(0) = +inf";
    return g;
  }
  const Index i = traj.node_index(alpha);
  const double cot = std::cos(alpha) / std::sin(alpha);
  std::optional<double> lmax;
  if (traj.is_regular(i, tol.singular)) {
    lmax = max_eigenvalue(SymOperatord(riccati(traj, i, tol.singular).matrix()));
  } else {
    lmax = quotient_max_eig(traj, i, tol.singular);
    g.note = "Y(alpha) singular; restricted to its image";
  }
  if (!lmax) {
    g.evaluated = false;
    g.pass = false;
    g.value = std::numeric_limits<double>::quiet_NaN();
    g.note = "not evaluable: Y(alpha) = 0";
    return g;
  }
  g.value = cot + tol.eig - *lmax;  // margin
  g.pass = g.value >= 0.0;
  if (!g.pass) g.note = "max eig S(alpha) exceeds cot(alpha)";
  return g;
}

Gate curvature_gate(const JacobiTrajectory& traj, int k, double bound, const Tolerances& tol) {
  Gate g;
  const auto& field = traj.field();
  g.value = std::numeric_limits<double>::infinity();
  const Index stride = field.is_constant() ? traj.size() : 1;
  for (Index i = 0; i < traj.size(); i += stride) {
    g.value = std::min(g.value, ric_k_floor(field, traj.time(i), k));
  }
  g.pass = g.value >= bound - tol.curvature;
  if (!g.pass) {
    g.note = "Ric_" + std::to_string(k) + " floor below " + std::to_string(bound);
  }
  return g;
}

SplittingReport check_splitting(const JacobiTrajectory& traj, Theorem theorem,
                                const SplittingParams& params, const Tolerances& tol) {
  const bool sine_type = theorem == Theorem::B || theorem == Theorem::E;
  const bool needs_k = theorem == Theorem::C || theorem == Theorem::E;
  if (sine_type && !params.alpha) {
    throw Error("check_splitting: theorem " + to_string(theorem) + " needs alpha");
  }
  if (needs_k && !params.k) {
    throw Error("check_splitting: theorem " + to_string(theorem) + " needs k");
  }
  const Index m = traj.dim();
  const int n = traj.field().n();
  if (needs_k && (*params.k < 1 || *params.k > n - 1)) {
    throw Error("check_splitting: k out of range");
  }

  SplittingReport rep;
  rep.theorem = theorem;
  rep.params = params;
  rep.self_adjoint = self_adjoint_gate(traj, tol);

  const double t0 = traj.time(0);
  const double t1 = traj.time(traj.size() - 1);
  switch (theorem) {
    case Theorem::A: rep.curvature = curvature_gate(traj, 1, 0.0, tol); break;
    case Theorem::B: rep.curvature = curvature_gate(traj, 1, 1.0, tol); break;
    case Theorem::C: rep.curvature = curvature_gate(traj, *params.k, 0.0, tol); break;
    case Theorem::E:
      rep.curvature = curvature_gate(traj, *params.k, static_cast<double>(*params.k), tol);
      break;
  }

  VanishingSpan z;
  SpanResult p;
  if (sine_type) {
    const double alpha = *params.alpha;
    rep.boundary = boundary_gate(traj, alpha, tol);
    Gate w;
    w.value = t1;
    w.pass = alpha >= t0 - kEndpointSlack && t1 >= std::numbers::pi - kEndpointSlack;
    if (!w.pass) w.note = "trajectory does not cover [alpha, pi]";
    rep.window = w;
    z = vanishing_span(traj, alpha, std::min(t1, std::numbers::pi), true, tol.zero);
    p = sine_span(traj, tol.span);
  } else {
    z = vanishing_span(traj, t0, t1, false, tol.zero);
    p = parallel_span(traj, tol.span);
  }
  if (needs_k) {
    Gate d;
    d.value = static_cast<double>(z.basis.cols());
    d.pass = z.basis.cols() <= n - *params.k - 1;
    if (!d.pass) d.note = "vanishing span exceeds n-k-1";
    rep.dim_condition = d;
  }

  rep.window_begin = z.begin;
  rep.window_end = z.end;
  rep.window_open = z.open_ends;
  rep.Z_basis = z.basis;
  rep.P_basis = p.basis;
  rep.dim_Z = z.basis.cols();
  rep.dim_P = p.basis.cols();
  rep.zero_times = std::move(z.zeros);
  rep.residual_span = p.residual;
  rep.residual_orth = orthogonality_residual(traj, rep.Z_basis, rep.P_basis, tol);
  Matrixd both(m, rep.dim_Z + rep.dim_P);
  both << rep.Z_basis, rep.P_basis;
  rep.independence = both.cols() == 0 ? 0.0 : smallest_singular_value<double>(both);

  const bool complete = rep.dim_Z + rep.dim_P == m;
  if (!sine_type) {
    // Z is defined by zeros on the whole line; the grid only sees [t0, t1].
    Gate w;
    w.value = static_cast<double>(m - rep.dim_Z - rep.dim_P);
    w.pass = complete;
    if (!w.pass) w.note = "fields outside Z + P may vanish beyond the integration window";
    rep.window = w;
  }
  const bool conclusion = complete && rep.residual_orth <= tol.orth &&
                          rep.independence >= kIndependenceTol;
  if (!rep.hypotheses_hold()) {
    rep.verdict = Verdict::HypothesisViolated;
  } else {
    rep.verdict = conclusion ? Verdict::Verified : Verdict::Falsified;
  }
  return rep;
}

}  // namespace jfs
