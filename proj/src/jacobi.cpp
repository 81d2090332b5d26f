#include "jfs/jacobi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "jfs/differencing.hpp"

namespace jfs {

namespace {

constexpr int kRefineIterations = 200;

std::string time_str(double t) {
  std::ostringstream os;
  os << std::setprecision(12) << t;
  return os.str();
}

auto curvature_of(const CurvatureField& field) {
  return [&field](double t) -> Matrixd { return field.evaluate(t).matrix(); };
}

double sigma_min_of(const Matrixd& y) { return smallest_singular_value<double>(y); }

double det_of(const Matrixd& y) { return y.partialPivLu().determinant(); }

}  // namespace

void FamilySpec::validate() const {
  const Index m = field.normal_dim();
  if (!(alpha < end)) {
    throw Error("family '" + label + "': alpha must be < end");
  }
  if (!std::isfinite(alpha) || !std::isfinite(end)) {
    throw Error("family '" + label + "': window must be finite");
  }
  if (Y0.rows() != m || Y0.cols() != m || Yd0.rows() != m || Yd0.cols() != m) {
    throw Error("family '" + label + "': initial data must be " +
                std::to_string(m) + "x" + std::to_string(m));
  }
  if (!Y0.allFinite() || !Yd0.allFinite()) {
    throw Error("family '" + label + "': non-finite initial data");
  }
  Matrixd stacked(2 * m, m);
  stacked << Y0, Yd0;
  Eigen::JacobiSVD<Matrixd> svd(stacked);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(m - 1) <= 1e-12 * sv(0)) {
    throw Error("family '" + label +
                "': initial data is rank deficient (family must be (n-1)-dimensional)");
  }
}

Index JacobiTrajectory::nearest_node(double t) const {
  const double x = (t - spec_.alpha) / step_;
  const auto i = static_cast<Index>(std::llround(x));
  return std::clamp<Index>(i, 0, size() - 1);
}

Index JacobiTrajectory::node_index(double t) const {
  const Index i = nearest_node(t);
  if (std::abs(time(i) - t) > 1e-6 * step_) {
    throw Error("t=" + time_str(t) + " is not a grid node");
  }
  return i;
}

JacobiStated JacobiTrajectory::state_at(double t) const {
  const double slack = 1e-9 * step_;
  if (t < spec_.alpha - slack || t > spec_.end + slack) {
    throw Error("t=" + time_str(t) + " outside trajectory window");
  }
  auto i = static_cast<Index>(std::floor((t - spec_.alpha) / step_));
  i = std::clamp<Index>(i, 0, size() - 2);
  if (t < time(i)) i = std::max<Index>(0, i - 1);
  const double tau = t - time(i);
  JacobiStated node{Y(i), Yd(i)};
  if (tau == 0.0) return node;
  return rk4_step(curvature_of(spec_.field), time(i), tau, node);
}

bool JacobiTrajectory::is_regular(Index i, double tol) const {
  return sigma_min(i) > tol * sigma_max_;
}

JacobiTrajectory integrate(FamilySpec spec, double step) {
  spec.validate();
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error("integrate: step must be positive");
  }
  const double length = spec.end - spec.alpha;
  const auto steps = std::max<long long>(
      1, static_cast<long long>(std::ceil(length / step * (1.0 - 1e-12))));

  JacobiTrajectory traj;
  traj.spec_ = std::move(spec);
  traj.step_ = length / static_cast<double>(steps);
  const auto nodes = static_cast<std::size_t>(steps + 1);
  traj.times_.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    traj.times_[i] = traj.spec_.alpha + static_cast<double>(i) * traj.step_;
  }
  traj.times_.back() = traj.spec_.end;

  traj.Y_.reserve(nodes);
  traj.Yd_.reserve(nodes);
  JacobiStated state{traj.spec_.Y0, traj.spec_.Yd0};
  traj.Y_.push_back(state.Y);
  traj.Yd_.push_back(state.Yd);
  const auto curvature = curvature_of(traj.spec_.field);
  for (std::size_t i = 0; i + 1 < nodes; ++i) {
    const double t = traj.times_[i];
    state = rk4_step(curvature, t, traj.times_[i + 1] - t, state);
    traj.Y_.push_back(state.Y);
    traj.Yd_.push_back(state.Yd);
  }

  traj.sigma_min_.resize(nodes);
  traj.det_.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    Eigen::JacobiSVD<Matrixd> svd(traj.Y_[i]);
    const auto& sv = svd.singularValues();
    traj.sigma_max_ = std::max(traj.sigma_max_, sv(0));
    traj.sigma_min_[i] = sv(sv.size() - 1);
    traj.det_[i] = det_of(traj.Y_[i]);
  }
  return traj;
}

GeneralOperatord wronskian(const JacobiTrajectory& traj, Index i) {
  const Matrixd& y = traj.Y(i);
  const Matrixd& yd = traj.Yd(i);
  return GeneralOperatord(y.transpose() * yd - yd.transpose() * y);
}

double wronskian_drift(const JacobiTrajectory& traj) {
  const Matrixd w0 = wronskian(traj, 0).matrix();
  double drift = 0.0;
  for (Index i = 1; i < traj.size(); ++i) {
    drift = std::max(drift,
                     (wronskian(traj, i).matrix() - w0).cwiseAbs().maxCoeff());
  }
  return drift;
}

namespace {

GeneralOperatord riccati_of(const Matrixd& y, const Matrixd& yd) {
  // S Y = Y'  <=>  Y^T S^T = Y'^T
  return GeneralOperatord(
      y.transpose().partialPivLu().solve(yd.transpose()).transpose());
}

}  // namespace

GeneralOperatord riccati(const JacobiTrajectory& traj, Index i,
                         double tol_sing) {
  if (!traj.is_regular(i, tol_sing)) {
    throw SingularTimeError(traj.time(i),
                            "singular time t=" + time_str(traj.time(i)));
  }
  return riccati_of(traj.Y(i), traj.Yd(i));
}

GeneralOperatord riccati_at(const JacobiTrajectory& traj, double t,
                            double tol_sing) {
  const JacobiStated s = traj.state_at(t);
  if (sigma_min_of(s.Y) <= tol_sing * traj.sigma_max()) {
    throw SingularTimeError(t, "singular time t=" + time_str(t));
  }
  return riccati_of(s.Y, s.Yd);
}

FamilyBasisRiccati riccati_in_family_basis(const JacobiTrajectory& traj,
                                           Index i) {
  if (!traj.is_regular(i, Tolerances{}.singular)) {
    throw SingularTimeError(traj.time(i),
                            "singular time t=" + time_str(traj.time(i)));
  }
  const Matrixd& y = traj.Y(i);
  return {GeneralOperatord(y.partialPivLu().solve(traj.Yd(i))),
          SymOperatord(y.transpose() * y)};
}

namespace {

double sigma_min_at(const JacobiTrajectory& traj, double t) {
  return sigma_min_of(traj.state_at(t).Y);
}

double bisect_det(const JacobiTrajectory& traj, double lo, double hi) {
  const double sign_lo = std::copysign(1.0, det_of(traj.state_at(lo).Y));
  for (int it = 0; it < kRefineIterations && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double d = det_of(traj.state_at(mid).Y);
    if (d == 0.0) return mid;
    if (std::copysign(1.0, d) == sign_lo) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double golden_min(const JacobiTrajectory& traj, double lo, double hi) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = sigma_min_at(traj, c), fd = sigma_min_at(traj, d);
  for (int it = 0; it < kRefineIterations && b - a > 1e-15 * (1.0 + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d; d = c; fd = fc;
      c = b - ratio * (b - a);
      fc = sigma_min_at(traj, c);
    } else {
      a = c; c = d; fc = fd;
      d = a + ratio * (b - a);
      fd = sigma_min_at(traj, d);
    }
  }
  return fc <= fd ? c : d;
}

SingularInstant make_instant(double t, const Matrixd& y, double threshold) {
  Eigen::JacobiSVD<Matrixd> svd(y, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  SingularInstant out;
  out.time = t;
  out.sigma = sv(sv.size() - 1);
  Index count = 0;
  for (Index k = 0; k < sv.size(); ++k)
    if (sv(k) <= threshold) ++count;
  out.kernel = svd.matrixV().rightCols(count);
  return out;
}

}  // namespace

std::vector<SingularInstant> singular_instants(const JacobiTrajectory& traj,
                                               double tol_rel) {
  std::vector<SingularInstant> out;
  const double thr = tol_rel * traj.sigma_max();
  const Index n = traj.size();
  auto low = [&](Index i) { return traj.sigma_min(i) <= thr; };
  auto sign_change = [&](Index i) {  // between i and i+1
    return i + 1 < n && !low(i) && !low(i + 1) &&
           traj.det(i) * traj.det(i + 1) < 0.0;
  };

  for (Index i = 0; i < n; ++i) {
    if (low(i)) {
      out.push_back(make_instant(traj.time(i), traj.Y(i), thr));
      continue;
    }
    if (sign_change(i)) {
      const double t = bisect_det(traj, traj.time(i), traj.time(i + 1));
      out.push_back(make_instant(t, traj.state_at(t).Y, thr));
      continue;
    }
    const bool interior = i > 0 && i + 1 < n;
    if (!interior || low(i - 1) || low(i + 1) || sign_change(i - 1)) continue;
    if (!(traj.sigma_min(i) < traj.sigma_min(i - 1) &&
          traj.sigma_min(i) <= traj.sigma_min(i + 1))) {
      continue;
    }
    const double t = golden_min(traj, traj.time(i - 1), traj.time(i + 1));
    const Matrixd y = traj.state_at(t).Y;
    if (sigma_min_of(y) <= thr) out.push_back(make_instant(t, y, thr));
  }
  std::sort(out.begin(), out.end(),
            [](const SingularInstant& a, const SingularInstant& b) {
              return a.time < b.time;
            });
  return out;
}

std::optional<double> first_singular_time(const JacobiTrajectory& traj,
                                          double from, double tol_sing) {
  const double slack = 1e-9 * traj.step();
  for (const auto& instant : singular_instants(traj, tol_sing)) {
    if (instant.time >= from - slack) return instant.time;
  }
  return std::nullopt;
}

FieldValue evaluate_field(const JacobiTrajectory& traj, const Vectord& coeffs,
                          Index i) {
  if (coeffs.size() != traj.dim()) {
    throw Error("evaluate_field: expected " + std::to_string(traj.dim()) +
                " coefficients");
  }
  return {traj.Y(i) * coeffs, traj.Yd(i) * coeffs};
}

ResidualSummary riccati_residual(const JacobiTrajectory& traj,
                                 const Tolerances& tol) {
  ResidualSummary out;
  const Index n = traj.size();
  const auto half = static_cast<Index>(kStencilHalfWidth);
  for (Index i = half; i + half < n; ++i) {
    std::array<Matrixd, 5> s;
    bool admissible = true;
    for (Index j = -half; j <= half && admissible; ++j) {
      if (!traj.is_regular(i + j, tol.singular)) {
        admissible = false;
        break;
      }
      s[static_cast<std::size_t>(j + half)] = riccati(traj, i + j, tol.singular).matrix();
      if (spectral_norm<double>(s[static_cast<std::size_t>(j + half)]) > tol.resolved_riccati) {
        admissible = false;
      }
    }
    if (!admissible) continue;
    const Matrixd ds = central_difference(s, traj.step());
    const Matrixd& si = s[static_cast<std::size_t>(half)];
    const Matrixd r = traj.field().evaluate(traj.time(i)).matrix();
    const double res = spectral_norm<double>(ds + si * si + r);
    ++out.nodes_checked;
    if (res > out.max) {
      out.max = res;
      out.worst_time = traj.time(i);
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const JacobiTrajectory& traj) {
  const Index m = traj.dim();
  os << "# label=" << traj.spec().label << " h=" << std::setprecision(17)
     << traj.step() << "\n";
  os << "t";
  for (Index k = 0; k < m * m; ++k) os << ",Y" << k % m << "_" << k / m;
  for (Index k = 0; k < m * m; ++k) os << ",Yd" << k % m << "_" << k / m;
  os << "\n";
  for (Index i = 0; i < traj.size(); ++i) {
    os << traj.time(i);
    // column-major vec: entry k is (k % m, k / m)
    for (Index k = 0; k < m * m; ++k) os << "," << traj.Y(i)(k % m, k / m);
    for (Index k = 0; k < m * m; ++k) os << "," << traj.Yd(i)(k % m, k / m);
    os << "\n";
  }
}

}  // namespace jfs
