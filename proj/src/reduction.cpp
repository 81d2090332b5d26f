#include "jfs/reduction.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <limits>

#include "jfs/differencing.hpp"

namespace jfs {

namespace {

enum class Stencil { None, Central, Forward, Backward };

}  // namespace

Index ReducedSystem::regular_count() const {
  Index count = 0;
  for (char r : regular_) count += r ? 1 : 0;
  return count;
}

Matrixd ReducedSystem::shat_on_h(Index i) const { return H(i).transpose() * Shat(i) * H(i); }

Matrixd ReducedSystem::rhat_on_h(Index i) const {
  const Matrixd r = traj_->field().evaluate(traj_->time(i)).matrix();
  const Matrixd full = PH(i) * r * PH(i) + 3.0 * A(i) * A(i).transpose();
  return H(i).transpose() * full * H(i);
}

ReducedSystem reduce(const JacobiTrajectory& traj, const Matrixd& psi, const Tolerances& tol) {
  const Index m = traj.dim();
  if (psi.rows() != m) {
    throw Error("reduce: psi vectors must have length " + std::to_string(m));
  }
  ReducedSystem rs;
  rs.traj_ = &traj;
  rs.psi_ = orthonormalize<double>(psi);
  if (rs.psi_.cols() != psi.cols()) throw Error("reduce: psi is rank deficient");
  const Index p = rs.psi_.cols();
  const Index n = traj.size();
  const auto sz = static_cast<std::size_t>(n);
  rs.regular_.assign(sz, 0);
  rs.pv_.resize(sz);
  rs.ph_.resize(sz);
  rs.h_.resize(sz);
  rs.shat_.resize(sz);
  rs.a_.resize(sz);

  const Matrixd id = Matrixd::Identity(m, m);
  const double thr = tol.singular * traj.sigma_max();
  std::vector<char> v_ok(sz, 0);
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Matrixd w = traj.Y(i) * rs.psi_;
    if (p > 0 && smallest_singular_value<double>(w) <= thr) continue;
    v_ok[k] = 1;
    const Matrixd q = orthonormalize<double>(w);
    rs.pv_[k] = q * q.transpose();
    rs.ph_[k] = id - rs.pv_[k];
    rs.h_[k] = orthogonal_complement<double>(w);
    if (p == 0) {
      rs.pv_[k] = Matrixd::Zero(m, m);
      rs.ph_[k] = id;
    }
  }

  auto run_ok = [&](Index from, Index to) {
    if (from < 0 || to >= n) return false;
    for (Index j = from; j <= to; ++j)
      if (!v_ok[static_cast<std::size_t>(j)]) return false;
    return true;
  };
  const auto half = static_cast<Index>(kStencilHalfWidth);
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!v_ok[k] || !traj.is_regular(i, tol.singular)) continue;
    Stencil stencil = Stencil::None;
    if (run_ok(i - half, i + half)) stencil = Stencil::Central;
    else if (run_ok(i, i + 2 * half)) stencil = Stencil::Forward;
    else if (run_ok(i - 2 * half, i)) stencil = Stencil::Backward;
    if (stencil == Stencil::None) continue;

    const Matrixd& q = rs.h_[k];
    const Matrixd c = traj.Y(i).partialPivLu().solve(q);
    // J^h = J - PV J; differencing only the vertical part keeps
    // Shat exact when V is trivial.
    std::array<Matrixd, 5> vert;
    auto vertical = [&](Index j) -> Matrixd {
      return rs.pv_[static_cast<std::size_t>(j)] * traj.Y(j) * c;
    };
    Matrixd dvert;
    if (p == 0) {
      dvert = Matrixd::Zero(m, q.cols());
    } else if (stencil == Stencil::Central) {
      for (Index j = 0; j < 5; ++j) vert[static_cast<std::size_t>(j)] = vertical(i - half + j);
      dvert = central_difference(vert, traj.step());
    } else {
      const Index dir = stencil == Stencil::Forward ? 1 : -1;
      for (Index j = 0; j < 5; ++j) vert[static_cast<std::size_t>(j)] = vertical(i + dir * j);
      dvert = one_sided_difference(vert, static_cast<double>(dir) * traj.step());
    }
    const Matrixd s = riccati(traj, i, tol.singular).matrix();
    const Matrixd& ph = rs.ph_[k];
    rs.shat_[k] = (ph * s * q - ph * dvert) * q.transpose();

    if (p == 0) {
      rs.a_[k] = Matrixd::Zero(m, m);
    } else {
      const Matrixd w = traj.Y(i) * rs.psi_;
      const Matrixd pinv = (w.transpose() * w).ldlt().solve(w.transpose());
      rs.a_[k] = ph * traj.Yd(i) * rs.psi_ * pinv;
    }
    rs.regular_[k] = 1;
  }
  return rs;
}

HceSummary hce_residual(const ReducedSystem& rs, const Tolerances& tol) {
  const auto& traj = rs.trajectory();
  const Index n = traj.size();
  const auto half = static_cast<Index>(kStencilHalfWidth);
  HceSummary out;
  out.per_node.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());

  std::vector<char> resolved(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    if (!rs.is_regular(i)) continue;
    const double s_norm = spectral_norm<double>(riccati(traj, i, tol.singular).matrix());
    resolved[static_cast<std::size_t>(i)] =
        s_norm <= tol.resolved_riccati && spectral_norm<double>(rs.Shat(i)) <= tol.resolved_riccati;
  }
  for (Index i = half; i + half < n; ++i) {
    bool ok = true;
    for (Index j = i - half; j <= i + half && ok; ++j) ok = resolved[static_cast<std::size_t>(j)] != 0;
    if (!ok) continue;
    std::array<Matrixd, 5> sh;
    for (Index j = 0; j < 5; ++j) sh[static_cast<std::size_t>(j)] = rs.Shat(i - half + j);
    const Matrixd d = central_difference(sh, traj.step());
    const Matrixd& ph = rs.PH(i);
    const Matrixd& s = rs.Shat(i);
    const Matrixd r = traj.field().evaluate(traj.time(i)).matrix();
    const double res = spectral_norm<double>(ph * d * ph + s * s + ph * r * ph +
                                             3.0 * rs.A(i) * rs.A(i).transpose());
    out.per_node[static_cast<std::size_t>(i)] = res;
    ++out.nodes_checked;
    if (res > out.max) {
      out.max = res;
      out.worst_time = traj.time(i);
    }
  }
  if (out.nodes_checked == 0) throw Error("hce_residual: too few regular nodes");
  return out;
}

ReducedBoundaryReport reduced_boundary_check(const ReducedSystem& rs, double alpha,
                                             const Tolerances& tol) {
  const auto& traj = rs.trajectory();
  const Index i = traj.node_index(alpha);
  if (!rs.is_regular(i)) throw Error("reduced_boundary_check: alpha is not a regular node");
  ReducedBoundaryReport rep;
  rep.alpha = traj.time(i);
  rep.max_eig_shat = rs.dim_h() == 0 ? -std::numeric_limits<double>::infinity()
                                     : max_eigenvalue(SymOperatord(rs.shat_on_h(i)));
  rep.max_eig_s = max_eigenvalue(SymOperatord(riccati(traj, i, tol.singular).matrix()));
  rep.pass = rep.max_eig_shat <= rep.max_eig_s + tol.eig;
  return rep;
}

void write_reduced_csv(std::ostream& os, const ReducedSystem& rs, const HceSummary& hce) {
  const auto& traj = rs.trajectory();
  os << "t,regular";
  for (Index k = 0; k < rs.dim_h(); ++k) os << ",shat_eig" << k;
  os << ",norm_A,hce\n" << std::setprecision(17);
  for (Index i = 0; i < traj.size(); ++i) {
    os << traj.time(i) << "," << (rs.is_regular(i) ? 1 : 0);
    if (rs.is_regular(i)) {
      const auto eig = spectrum(SymOperatord(rs.shat_on_h(i))).values;
      for (Index k = 0; k < eig.size(); ++k) os << "," << eig(k);
      os << "," << spectral_norm<double>(rs.A(i));
    } else {
      for (Index k = 0; k < rs.dim_h(); ++k) os << ",";
      os << ",";
    }
    const double res = hce.per_node[static_cast<std::size_t>(i)];
    os << ",";
    if (!std::isnan(res)) os << res;
    os << "\n";
  }
}

}  // namespace jfs
