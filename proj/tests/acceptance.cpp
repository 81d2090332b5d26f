// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned
// here and do not follow the library defaults.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "jfs/scenario.hpp"

namespace {

using namespace jfs;

constexpr double kPi = std::numbers::pi;
constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr double kRigidityTol = 1e-5;
constexpr double kRigidityMargin = 0.05;
constexpr double kRuntimeLimit = 1.0;
constexpr double kWronskianTol = 1e-9;
constexpr double kRiccatiTol = 1e-4;
constexpr double kPairingTol = 1e-9;
constexpr double kEigTol = 1e-8;
constexpr double kZeroTimeTol = 1e-4;
constexpr double kOrthTol = 1e-6;
constexpr double kFloorTol = 1e-12;
constexpr double kKyFanGap = 1e-2;
constexpr int kKyFanSamples = 10000;
constexpr double kComparisonTol = 1e-6;
constexpr double kHceSphereTol = 1e-4;
constexpr double kHceHopfTol = 1e-3;
constexpr double kRhatTol = 1e-3;
constexpr double kAsymptoteTol = 1e-6;
constexpr double kConvergenceRatio = 12.0;

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("%s %2d  %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double cot(double t) { return std::cos(t) / std::sin(t); }

JacobiTrajectory trajectory(const std::string& name, double step = kDefaultStep) {
  return integrate(builtin_scenario(name).family, step);
}

void sphere_rigidity() {
  const auto start = std::chrono::steady_clock::now();
  const auto run = run_scenario(builtin_scenario("sphere-zero"));
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto traj = trajectory("sphere-zero");
  double worst = 0.0;
  for (Index i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (t < kRigidityMargin || t > kPi - kRigidityMargin) continue;
    const Matrixd s = riccati(traj, i).matrix();
    worst = std::max(worst, spectral_norm<double>(s - cot(t) * Matrixd::Identity(2, 2)));
  }
  const bool verified = run.checks[0].kind == CheckKind::Rigidity &&
                        run.checks[0].verdict == Verdict::Verified;
  report(1, worst <= kRigidityTol && runtime < kRuntimeLimit && verified,
         fmt("sphere rigidity: max |S - cot id| = %.2e (tol %.0e), rigidity %s, runtime %.3f s",
             worst, kRigidityTol, to_string(run.checks[0].verdict).c_str(), runtime));
}

void wronskian_conservation() {
  bool pass = true;
  double worst_ratio = 0.0;
  std::string worst_name;
  for (const auto& name : list_scenarios()) {
    const auto traj = trajectory(name);
    const double bound = kWronskianTol * (1.0 + spectral_norm<double>(wronskian(traj, 0).matrix()));
    const double drift = wronskian_drift(traj);
    pass = pass && drift <= bound;
    if (drift / bound >= worst_ratio) {
      worst_ratio = drift / bound;
      worst_name = name;
    }
  }
  report(2, pass, fmt("Wronskian drift: worst drift/bound = %.2e (%s)", worst_ratio, worst_name.c_str()));
}

void riccati_residuals() {
  bool pass = true;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& name : list_scenarios()) {
    const auto res = riccati_residual(trajectory(name));
    pass = pass && res.nodes_checked > 0 && res.max <= kRiccatiTol;
    if (res.max >= worst) {
      worst = res.max;
      worst_name = name;
    }
  }
  report(3, pass, fmt("Riccati residual: max %.2e (tol %.0e, %s)", worst, kRiccatiTol, worst_name.c_str()));
}

void example_nonselfadjoint() {
  const auto traj = trajectory("example-nonselfadjoint");
  double dev = 0.0;
  for (int j = 0; j < 10; ++j) {
    const Index i = traj.nearest_node(0.1 + j * (kPi - 0.2) / 9);
    const auto fb = riccati_in_family_basis(traj, i);
    const Matrixd g = fb.metric.matrix();
    const Matrixd a = fb.op.matrix();
    const double sj1_j2 = a.col(0).dot(g.col(1));
    const double j1_sj2 = g.row(0).dot(a.col(1));
    dev = std::max({dev, std::abs(sj1_j2 - 1.0), std::abs(j1_sj2 + 1.0)});
  }
  const auto rep = check_splitting(traj, Theorem::B, {std::nullopt, 0.0});
  report(4, dev <= kPairingTol && rep.verdict == Verdict::HypothesisViolated,
         fmt("non-self-adjoint family: <SJ1,J2> = +1, <J1,SJ2> = -1 within %.2e at 10 times; splitting %s", dev,
             to_string(rep.verdict).c_str()));
}

void example_shifted_sine() {
  const double eps = kPi / 12;
  const auto traj = trajectory("example-shifted-sine");
  const double max_eig = max_eigenvalue(SymOperatord(riccati(traj, 0).matrix()));
  const double err = std::abs(max_eig - std::tan(eps));
  const auto rep = check_splitting(traj, Theorem::B, {std::nullopt, kPi / 2});
  const bool boundary_fails = rep.boundary && !rep.boundary->pass;
  const auto sine = sine_span(traj);
  const auto zeros = vanishing_span(traj, kPi / 2, kPi, true);
  report(5, err <= kEigTol && boundary_fails && sine.basis.cols() == 0 && zeros.basis.cols() == 0,
         fmt("shifted-sine family: |max eig S(pi/2) - tan(pi/12)| = %.2e, boundary gate %s, dim sine %ld, dim Z %ld",
             err, boundary_fails ? "fails" : "passes", static_cast<long>(sine.basis.cols()),
             static_cast<long>(zeros.basis.cols())));
}

void cp2_splitting() {
  const auto traj = trajectory("cp2-zero");
  const auto b = check_splitting(traj, Theorem::B, {std::nullopt, 0.0});
  double zero_err = kInfinity;
  for (const auto& z : b.zero_times) zero_err = std::min(zero_err, std::abs(z.time - kPi / 2));
  const auto e = check_splitting(traj, Theorem::E, {2, 0.0});
  const bool e_gate = e.curvature && e.curvature->pass;
  const double floor = e.curvature ? e.curvature->value : kNaN;
  const bool pass = b.dim_Z == 1 && b.dim_P == 2 && zero_err <= kZeroTimeTol &&
                    b.residual_orth <= kOrthTol && e_gate && std::abs(floor - 2.0) <= kFloorTol;
  report(6, pass,
         fmt("CP2 splitting: dims (%ld, %ld), |zero - pi/2| = %.2e, orth %.2e, Ric_2 floor %.12g, E gate %s",
             static_cast<long>(b.dim_Z), static_cast<long>(b.dim_P), zero_err, b.residual_orth, floor,
             e_gate ? "passes" : "fails"));
}

void ky_fan_oracle() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(2, 6);
  bool ordered = true;
  double worst_gap = 0.0;
  int worst_dim = 0, worst_k = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = dim(rng);
    Matrixd a(m, m);
    for (Index i = 0; i < a.size(); ++i) a(i) = g(rng);
    const SymOperatord op(0.5 * (a + a.transpose()));
    for (int k = 1; k <= m; ++k) {
      const double exact = ky_fan_min(op, k);
      const double sampled = ky_fan_sampled(op, k, kKyFanSamples, 1000 + static_cast<std::uint64_t>(trial));
      ordered = ordered && exact <= sampled + 1e-12;
      if (sampled - exact > worst_gap) {
        worst_gap = sampled - exact;
        worst_dim = m;
        worst_k = k;
      }
    }
  }
  report(7, ordered && worst_gap <= kKyFanGap,
         fmt("Ky Fan: exact <= sampled %s, worst gap %.3e at dim %d k %d (tol %.0e)",
             ordered ? "always" : "violated", worst_gap, worst_dim, worst_k, kKyFanGap));
}

void comparison() {
  bool pass = true;
  double worst = -kInfinity;
  for (const auto* name : {"sphere-zero", "cp2-zero"}) {
    const auto trace = scalar_traces(trajectory(name));
    for (std::size_t j = 0; j < 20; ++j) {
      const auto rep = comparison_check(trace, trace.t[(j + 1) * trace.size() / 21]);
      pass = pass && rep.hypothesis_ok && rep.max_violation <= kComparisonTol;
      worst = std::max(worst, rep.max_violation);
    }
  }
  report(8, pass, fmt("comparison: worst signed violation %.2e over 40 anchors (tol %.0e)", worst,
                      kComparisonTol));
}

void hce() {
  const auto sphere = trajectory("sphere-zero");
  const Matrixd e1 = Vectord::Unit(2, 0);
  const double sphere_res = hce_residual(reduce(sphere, e1)).max;
  const auto hopf = trajectory("hopf-holonomy");
  const auto rs = reduce(hopf, e1);
  const double hopf_res = hce_residual(rs).max;
  double rhat_dev = 0.0;
  for (Index i = 0; i < hopf.size(); ++i) {
    if (!rs.is_regular(i)) continue;
    const Matrixd r = rs.rhat_on_h(i);
    rhat_dev = std::max(rhat_dev, spectral_norm<double>(r - 4.0 * Matrixd::Identity(r.rows(), r.cols())));
  }
  report(9, sphere_res <= kHceSphereTol && hopf_res <= kHceHopfTol && rhat_dev <= kRhatTol,
         fmt("HCE: sphere residual %.2e, Hopf residual %.2e, |Rhat - 4 id| = %.2e", sphere_res, hopf_res,
             rhat_dev));
}

// Zeros of u = cos(t - t0) + s0 sin(t - t0) in (0, pi) are the poles of
// the model solution; located by bisection without reference to delta.
std::optional<double> pole(double t0, double s0) {
  auto u = [&](double t) { return std::cos(t - t0) + s0 * std::sin(t - t0); };
  constexpr int kCells = 20000;
  for (int i = 0; i < kCells; ++i) {
    double lo = kPi * i / kCells + (i == 0 ? 1e-15 : 0.0);
    double hi = kPi * (i + 1) / kCells - (i + 1 == kCells ? 1e-15 : 0.0);
    if (u(lo) * u(hi) > 0.0) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (u(lo) * u(mid) <= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::nullopt;
}

void asymptotes() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> time(0.05, kPi - 0.05);
  std::normal_distribution<double> slope(0.0, 5.0);
  int agree = 0;
  double worst = 0.0;
  for (int j = 0; j < 100; ++j) {
    const double t0 = time(rng);
    const double s0 = slope(rng);
    const auto model = model_solution(t0, s0);
    const auto p = pole(t0, s0);
    bool ok = p.has_value() == model.asymptote.has_value();
    if (ok && p) {
      const auto side = *p < t0 ? ModelSolution::Side::Left : ModelSolution::Side::Right;
      worst = std::max(worst, std::abs(*p - *model.asymptote));
      ok = side == model.side && std::abs(*p - *model.asymptote) <= kAsymptoteTol;
    }
    agree += ok ? 1 : 0;
  }
  report(10, agree == 100,
         fmt("asymptotes: %d/100 agree on side and location, worst offset %.2e", agree, worst));
}

void never_falsified() {
  int falsified = 0, checks = 0;
  auto count = [&](const RunReport& r) {
    for (const auto& c : r.checks) {
      ++checks;
      falsified += c.verdict == Verdict::Falsified ? 1 : 0;
    }
  };
  for (const auto& name : list_scenarios()) count(run_scenario(builtin_scenario(name)));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) count(run_scenario(random_scenario(seed, 1.0, 2.5)));
  report(11, falsified == 0,
         fmt("meta: %d falsified verdicts in %d checks (built-ins and 10 random families)", falsified, checks));
}

double sphere_error(double step) {
  const auto traj = integrate(builtin_scenario("sphere-zero").family, step);
  double err = 0.0;
  for (Index i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    const Matrixd id = Matrixd::Identity(2, 2);
    err = std::max({err, (traj.Y(i) - std::sin(t) * id).cwiseAbs().maxCoeff(),
                    (traj.Yd(i) - std::cos(t) * id).cwiseAbs().maxCoeff()});
  }
  return err;
}

void convergence() {
  const double coarse = sphere_error(kPi / 100);
  const double fine = sphere_error(kPi / 200);
  report(12, coarse / fine >= kConvergenceRatio,
         fmt("convergence: error %.3e -> %.3e, ratio %.2f (need %.0f)", coarse, fine, coarse / fine,
             kConvergenceRatio));
}

}  // namespace

int main() {
  const std::pair<int, void (*)()> criteria[] = {
      {1, sphere_rigidity}, {2, wronskian_conservation}, {3, riccati_residuals},
      {4, example_nonselfadjoint}, {5, example_shifted_sine}, {6, cp2_splitting},
      {7, ky_fan_oracle}, {8, comparison}, {9, hce}, {10, asymptotes},
      {11, never_falsified}, {12, convergence}};
  for (const auto& [id, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      report(id, false, std::string("error: ") + e.what());
    }
  }
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
