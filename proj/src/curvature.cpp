#include "jfs/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "json.hpp"

namespace jfs {

namespace {

// Tolerance for evaluating a sampled field a hair outside its grid, which
// happens when the integrator's last stage lands on end + rounding.
constexpr double kGridSlack = 1e-12;

}  // namespace

double CurvatureField::t_min() const {
  return kind_ == Kind::Sampled ? grid_.front()
                                : -std::numeric_limits<double>::infinity();
}

double CurvatureField::t_max() const {
  return kind_ == Kind::Sampled ? grid_.back()
                                : std::numeric_limits<double>::infinity();
}

SymOperatord CurvatureField::evaluate(double t) const {
  if (kind_ != Kind::Sampled) return SymOperatord(constant_);

  const double span = grid_.back() - grid_.front();
  const double slack = kGridSlack * (1.0 + std::abs(span));
  if (!(t >= grid_.front() - slack && t <= grid_.back() + slack)) {
    throw FieldDomainError(t, "curvature field evaluated at t=" +
                                  std::to_string(t) + " outside [" +
                                  std::to_string(grid_.front()) + ", " +
                                  std::to_string(grid_.back()) + "]");
  }
  if (grid_.size() == 1) return SymOperatord(ops_.front());

  t = std::clamp(t, grid_.front(), grid_.back());
  auto upper = std::upper_bound(grid_.begin(), grid_.end(), t);
  std::size_t i = upper == grid_.end()
                      ? grid_.size() - 2
                      : static_cast<std::size_t>(upper - grid_.begin()) - 1;
  const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
  return SymOperatord((1.0 - w) * ops_[i] + w * ops_[i + 1]);
}

CurvatureField constant_sectional(int n, double c) {
  if (n < 2) throw Error("constant_sectional: n must be >= 2");
  CurvatureField f;
  f.n_ = n;
  f.kind_ = CurvatureField::Kind::ConstantSectional;
  f.sectional_ = c;
  f.eigs_ = Vectord::Constant(n - 1, c);
  f.constant_ = c * Matrixd::Identity(n - 1, n - 1);
  return f;
}

CurvatureField fubini_study_model(int n) {
  if (n < 4 || n % 2 != 0) {
    throw Error("fubini_study_model: n must be even and >= 4, got " +
                std::to_string(n));
  }
  std::vector<double> eigs(static_cast<std::size_t>(n - 1), 1.0);
  eigs.front() = 4.0;
  return diagonal_constant(eigs);
}

CurvatureField diagonal_constant(const std::vector<double>& eigs) {
  if (eigs.empty()) throw Error("diagonal_constant: eigenvalue list is empty");
  CurvatureField f;
  f.n_ = static_cast<int>(eigs.size()) + 1;
  f.kind_ = CurvatureField::Kind::DiagonalConstant;
  f.eigs_ = Eigen::Map<const Vectord>(eigs.data(),
                                      static_cast<Index>(eigs.size()));
  f.constant_ = f.eigs_.asDiagonal();
  return f;
}

CurvatureField sampled_field(int n, std::vector<double> grid,
                             std::vector<Matrixd> ops) {
  if (n < 2) throw Error("sampled field: n must be >= 2");
  if (grid.empty()) throw Error("sampled field: empty grid");
  if (grid.size() != ops.size()) {
    throw Error("sampled field: " + std::to_string(grid.size()) +
                " grid times but " + std::to_string(ops.size()) + " operators");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) {
      throw Error("sampled field: node " + std::to_string(i) +
                  ": non-finite time");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error("sampled field: node " + std::to_string(i) +
                  ": grid not strictly increasing");
    }
    if (ops[i].rows() != n - 1 || ops[i].cols() != n - 1) {
      throw Error("sampled field: node " + std::to_string(i) +
                  ": operator must be " + std::to_string(n - 1) + "x" +
                  std::to_string(n - 1));
    }
    if (!ops[i].allFinite()) {
      throw Error("sampled field: node " + std::to_string(i) +
                  ": non-finite entry");
    }
    ops[i] = SymOperatord(ops[i]).matrix();
  }
  CurvatureField f;
  f.n_ = n;
  f.kind_ = CurvatureField::Kind::Sampled;
  f.grid_ = std::move(grid);
  f.ops_ = std::move(ops);
  return f;
}

CurvatureField sampled_field_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("sampled field: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("grid") ||
      !doc.contains("ops")) {
    throw Error("sampled field: expected keys n, grid, ops");
  }
  if (!doc["n"].is_number_integer()) throw Error("sampled field: n must be an integer");
  const int n = doc["n"].get<int>();
  if (n < 2) throw Error("sampled field: n must be >= 2");
  const auto& grid_j = doc["grid"];
  const auto& ops_j = doc["ops"];
  if (!grid_j.is_array() || !ops_j.is_array()) {
    throw Error("sampled field: grid and ops must be arrays");
  }
  const std::size_t m = static_cast<std::size_t>(n - 1);
  std::vector<double> grid;
  std::vector<Matrixd> ops;
  for (std::size_t i = 0; i < grid_j.size(); ++i) {
    if (!grid_j[i].is_number()) {
      throw Error("sampled field: node " + std::to_string(i) +
                  ": time is not a number");
    }
    grid.push_back(grid_j[i].get<double>());
  }
  for (std::size_t i = 0; i < ops_j.size(); ++i) {
    const auto& row = ops_j[i];
    if (!row.is_array() || row.size() != m * m) {
      throw Error("sampled field: node " + std::to_string(i) + ": expected " +
                  std::to_string(m * m) + " entries");
    }
    Matrixd op(m, m);
    for (std::size_t k = 0; k < m * m; ++k) {
      if (!row[k].is_number()) {
        throw Error("sampled field: node " + std::to_string(i) + ": entry " +
                    std::to_string(k) + " is not a number");
      }
      op(static_cast<Index>(k / m), static_cast<Index>(k % m)) =
          row[k].get<double>();
    }
    ops.push_back(std::move(op));
  }
  return sampled_field(n, std::move(grid), std::move(ops));
}

double ric_k_floor(const CurvatureField& field, double t, int k) {
  if (k < 1 || k > field.n() - 1) {
    throw Error("ric_k_floor: k=" + std::to_string(k) + " out of range [1, " +
                std::to_string(field.n() - 1) + "]");
  }
  return ky_fan_min(field.evaluate(t), k);
}

double ky_fan_sampled(const SymOperatord& op, int k, int samples,
                      std::uint64_t seed) {
  if (samples < 1) throw Error("ky_fan_sampled: samples must be >= 1");
  if (k < 1 || k > op.dim()) throw Error("ky_fan_sampled: k out of range");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index m = op.dim();
  double best = std::numeric_limits<double>::infinity();
  Matrixd g(m, k);
  for (int s = 0; s < samples; ++s) {
    for (Index j = 0; j < k; ++j)
      for (Index i = 0; i < m; ++i) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Matrixd> qr(g);
    const Matrixd w = qr.householderQ() * Matrixd::Identity(m, k);
    best = std::min(best, (w.transpose() * op.matrix() * w).trace());
  }
  return best;
}

double ric_k_floor_sampled(const CurvatureField& field, double t, int k,
                           int samples, std::uint64_t seed) {
  if (k < 1 || k > field.n() - 1) throw Error("ric_k_floor_sampled: k out of range");
  return ky_fan_sampled(field.evaluate(t), k, samples, seed);
}

std::string to_string(CurvatureField::Kind kind) {
  switch (kind) {
    case CurvatureField::Kind::ConstantSectional: return "constant_sectional";
    case CurvatureField::Kind::DiagonalConstant: return "diagonal_constant";
    case CurvatureField::Kind::Sampled: return "sampled";
  }
  return "unknown";
}

}  // namespace jfs
