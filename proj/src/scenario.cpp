#include "jfs/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace jfs {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRicSamples = 2000;

// JSON has no encoding for non-finite numbers; they travel as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double read_num(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(what + ": expected a number");
}

int read_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw Error(what + ": expected an integer");
  return j.get<int>();
}

std::string read_str(const json& j, const std::string& what) {
  if (!j.is_string()) throw Error(what + ": expected a string");
  return j.get<std::string>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!key.empty() && key[0] == '_') continue;
    if (!allowed.count(key)) throw Error(where + ": unknown key '" + key + "'");
  }
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw Error(where + ": missing key '" + key + "'");
  return j.at(key);
}

json matrix_rows(const Matrixd& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json matrix_columns(const Matrixd& m) { return matrix_rows(m.transpose()); }

Matrixd matrix_from_rows(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(what + ": expected an array of rows");
  if (j.empty()) return Matrixd(0, 0);
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  Matrixd m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(what + ": row " + std::to_string(r) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) =
          read_num(j[r][c], what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

Matrixd matrix_from_columns(const json& j, const std::string& what) {
  return matrix_from_rows(j, what).transpose();
}

json vector_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

std::vector<double> vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(what + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(read_num(j[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// ---- tolerances -----------------------------------------------------------

const std::vector<std::pair<const char*, double Tolerances::*>>& tolerance_fields() {
  static const std::vector<std::pair<const char*, double Tolerances::*>> fields = {
      {"singular", &Tolerances::singular},
      {"zero", &Tolerances::zero},
      {"eig", &Tolerances::eig},
      {"self_adjoint", &Tolerances::self_adjoint},
      {"span", &Tolerances::span},
      {"orth", &Tolerances::orth},
      {"orth_abs", &Tolerances::orth_abs},
      {"curvature", &Tolerances::curvature},
      {"rigidity", &Tolerances::rigidity},
      {"comparison", &Tolerances::comparison},
      {"resolved_riccati", &Tolerances::resolved_riccati},
  };
  return fields;
}

json tolerances_json(const Tolerances& tol) {
  json out = json::object();
  for (const auto& [name, member] : tolerance_fields()) out[name] = num(tol.*member);
  return out;
}

Tolerances tolerances_from_json(const json& j) {
  Tolerances tol;
  std::set<std::string> names;
  for (const auto& [name, _] : tolerance_fields()) names.insert(name);
  check_keys(j, names, "tolerances");
  for (const auto& [name, member] : tolerance_fields()) {
    if (!j.contains(name)) continue;
    const double v = read_num(j.at(name), std::string("tolerances.") + name);
    if (!(v > 0.0)) throw Error(std::string("tolerances.") + name + ": must be positive");
    tol.*member = v;
  }
  return tol;
}

// ---- field and family -----------------------------------------------------

json field_json(const CurvatureField& f) {
  switch (f.kind()) {
    case CurvatureField::Kind::ConstantSectional:
      return {{"kind", "constant_sectional"}, {"n", f.n()}, {"c", num(f.sectional())}};
    case CurvatureField::Kind::DiagonalConstant: {
      const Vectord& e = f.eigenvalues();
      return {{"kind", "diagonal_constant"},
              {"eigenvalues", vector_json(std::vector<double>(e.data(), e.data() + e.size()))}};
    }
    case CurvatureField::Kind::Sampled: {
      json ops = json::array();
      for (const Matrixd& op : f.nodes()) {
        json flat = json::array();
        for (Index i = 0; i < op.rows(); ++i)
          for (Index j = 0; j < op.cols(); ++j) flat.push_back(num(op(i, j)));
        ops.push_back(std::move(flat));
      }
      return {{"kind", "sampled"}, {"n", f.n()}, {"grid", vector_json(f.grid())}, {"ops", ops}};
    }
  }
  throw Error("unreachable field kind");
}

CurvatureField field_from_json(const json& j) {
  const std::string where = "field";
  if (!j.is_object()) throw Error(where + ": expected an object");
  const auto kind = read_str(require(j, "kind", where), "field.kind");
  if (kind == "constant_sectional") {
    check_keys(j, {"kind", "n", "c"}, where);
    return constant_sectional(read_int(require(j, "n", where), "field.n"),
                              read_num(require(j, "c", where), "field.c"));
  }
  if (kind == "diagonal_constant") {
    check_keys(j, {"kind", "eigenvalues"}, where);
    return diagonal_constant(vector_from_json(require(j, "eigenvalues", where), "field.eigenvalues"));
  }
  if (kind == "fubini_study") {
    check_keys(j, {"kind", "n"}, where);
    return fubini_study_model(read_int(require(j, "n", where), "field.n"));
  }
  if (kind == "sampled") {
    check_keys(j, {"kind", "n", "grid", "ops"}, where);
    json inner = {{"n", require(j, "n", where)},
                  {"grid", require(j, "grid", where)},
                  {"ops", require(j, "ops", where)}};
    return sampled_field_from_json(inner.dump());
  }
  throw Error("field.kind: unknown kind '" + kind + "'");
}

// ---- checks ---------------------------------------------------------------

json check_json(const CheckSpec& c) {
  json out = {{"kind", to_string(c.kind)}};
  if (c.expect) out["expect"] = to_string(*c.expect);
  if (c.theorem) out["theorem"] = to_string(*c.theorem);
  if (c.alpha) out["alpha"] = num(*c.alpha);
  if (c.k) out["k"] = *c.k;
  if (c.dims) out["dims"] = {c.dims->first, c.dims->second};
  switch (c.kind) {
    case CheckKind::Comparison:
      if (c.anchors.empty()) out["anchor_count"] = c.anchor_count;
      else out["anchors"] = vector_json(c.anchors);
      break;
    case CheckKind::Hce:
      out["psi"] = matrix_columns(c.psi);
      out["tol"] = num(c.tol);
      if (c.rhat) out["rhat"] = num(*c.rhat);
      break;
    case CheckKind::ReducedBoundary:
      out["psi"] = matrix_columns(c.psi);
      break;
    default:
      break;
  }
  return out;
}

CheckSpec check_from_json(const json& j, std::size_t index) {
  const std::string where = "checks[" + std::to_string(index) + "]";
  check_keys(j, {"kind", "expect", "theorem", "alpha", "k", "dims", "psi", "anchors",
                 "anchor_count", "tol", "rhat"},
             where);
  CheckSpec c;
  c.kind = check_kind_from_string(read_str(require(j, "kind", where), where + ".kind"));
  c.expect.reset();
  if (j.contains("expect")) {
    const auto e = read_str(j.at("expect"), where + ".expect");
    if (e != "any") {
      c.expect = verdict_from_string(e);
      if (*c.expect == Verdict::Falsified) {
        throw Error(where + ".expect: must be verified, hypothesis-violated or any");
      }
    }
  }
  if (j.contains("theorem")) c.theorem = theorem_from_string(read_str(j.at("theorem"), where + ".theorem"));
  if (j.contains("alpha")) c.alpha = read_num(j.at("alpha"), where + ".alpha");
  if (j.contains("k")) c.k = read_int(j.at("k"), where + ".k");
  if (j.contains("dims")) {
    const auto& d = j.at("dims");
    if (!d.is_array() || d.size() != 2) throw Error(where + ".dims: expected [dim_Z, dim_P]");
    c.dims = std::pair<Index, Index>{read_int(d[0], where + ".dims"), read_int(d[1], where + ".dims")};
  }
  if (j.contains("psi")) c.psi = matrix_from_columns(j.at("psi"), where + ".psi");
  if (j.contains("anchors")) c.anchors = vector_from_json(j.at("anchors"), where + ".anchors");
  if (j.contains("anchor_count")) {
    c.anchor_count = read_int(j.at("anchor_count"), where + ".anchor_count");
    if (c.anchor_count < 1) throw Error(where + ".anchor_count: must be positive");
  }
  if (j.contains("tol")) c.tol = read_num(j.at("tol"), where + ".tol");
  if (j.contains("rhat")) c.rhat = read_num(j.at("rhat"), where + ".rhat");

  if (c.kind == CheckKind::Splitting && !c.theorem) throw Error(where + ": splitting needs theorem");
  if (c.kind == CheckKind::DualLeaf && !c.k) throw Error(where + ": dual_leaf needs k");
  if (c.kind == CheckKind::ReducedBoundary && !c.alpha) {
    throw Error(where + ": reduced_boundary needs alpha");
  }
  return c;
}

// ---- report pieces --------------------------------------------------------

json gate_json(const Gate& g) {
  json out = {{"evaluated", g.evaluated}, {"pass", g.pass}, {"value", num(g.value)}};
  if (!g.note.empty()) out["note"] = g.note;
  return out;
}

json zero_times_json(const std::vector<ZeroTime>& zeros) {
  json out = json::array();
  for (const auto& z : zeros) out.push_back({{"time", num(z.time)}, {"fields", matrix_columns(z.fields)}});
  return out;
}

json splitting_json(const SplittingReport& r) {
  json gates = json::object();
  if (r.self_adjoint) gates["self_adjoint"] = gate_json(*r.self_adjoint);
  if (r.curvature) gates["curvature"] = gate_json(*r.curvature);
  if (r.boundary) gates["boundary"] = gate_json(*r.boundary);
  if (r.dim_condition) gates["dim_condition"] = gate_json(*r.dim_condition);
  if (r.window) gates["window"] = gate_json(*r.window);
  return {{"theorem", to_string(r.theorem)},
          {"window", {{"begin", num(r.window_begin)}, {"end", num(r.window_end)}, {"open", r.window_open}}},
          {"dim_Z", r.dim_Z},
          {"dim_P", r.dim_P},
          {"Z_basis", matrix_columns(r.Z_basis)},
          {"P_basis", matrix_columns(r.P_basis)},
          {"zero_times", zero_times_json(r.zero_times)},
          {"residual_orth", num(r.residual_orth)},
          {"residual_span", num(r.residual_span)},
          {"independence", num(r.independence)},
          {"gates", gates}};
}

json rigidity_json(const RigidityReport& r) {
  json out = {{"alpha", num(r.alpha)},
              {"gates",
               {{"self_adjoint", gate_json(r.self_adjoint)},
                {"curvature", gate_json(r.curvature)},
                {"window", gate_json(r.window)},
                {"regularity", gate_json(r.regularity)},
                {"boundary", gate_json(r.boundary)}}},
              {"max_s_deviation", num(r.max_s_deviation)},
              {"max_r_deviation", num(r.max_r_deviation)},
              {"worst_time", num(r.worst_time)},
              {"nodes_checked", r.nodes_checked}};
  if (!r.reason.empty()) out["reason"] = r.reason;
  return out;
}

json comparison_json(const ComparisonReport& r) {
  json out = {{"t0", num(r.t0)},
              {"s0", num(r.model.s0)},
              {"delta", num(r.model.delta)},
              {"asymptote", r.model.asymptote ? num(*r.model.asymptote) : json(nullptr)},
              {"side", to_string(r.model.side)},
              {"hypothesis_ok", r.hypothesis_ok},
              {"r_min", num(r.r_min)},
              {"window", {num(r.window_begin), num(r.window_end)}},
              {"left_ok", r.left_ok},
              {"right_ok", r.right_ok},
              {"max_violation", num(r.max_violation)},
              {"worst_time", num(r.worst_time)},
              {"nodes", {r.nodes_left, r.nodes_right}},
              {"verdict", to_string(r.verdict())}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

Verdict worst(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::Verified: return 0;
      case Verdict::HypothesisViolated: return 1;
      case Verdict::Falsified: return 2;
    }
    return 2;
  };
  return rank(a) >= rank(b) ? a : b;
}

// ---- running --------------------------------------------------------------

struct Context {
  const Scenario& scenario;
  const JacobiTrajectory& traj;
  const Tolerances& tol;
  const RunOptions& options;
  std::optional<ScalarTrace> trace;

  const ScalarTrace& scalar_trace() {
    if (!trace) trace = scalar_traces(traj, tol);
    return *trace;
  }
};

double snap(const JacobiTrajectory& traj, double t, const std::string& what) {
  const double lo = traj.time(0);
  const double hi = traj.time(traj.size() - 1);
  if (t < lo - 0.5 * traj.step() || t > hi + 0.5 * traj.step()) {
    throw Error(what + " is outside the integration window");
  }
  return traj.time(traj.nearest_node(t));
}

Matrixd psi_for(const CheckSpec& c, Index m) {
  if (c.psi.size() == 0) return Matrixd(m, 0);
  return c.psi;
}

void write_reduced_trace(Context& ctx, std::size_t index, const ReducedSystem& rs,
                         const HceSummary* hce) {
  if (!ctx.options.trace_dir) return;
  HceSummary empty;
  if (!hce) {
    empty.per_node.assign(static_cast<std::size_t>(ctx.traj.size()),
                          std::numeric_limits<double>::quiet_NaN());
    hce = &empty;
  }
  std::ofstream os(*ctx.options.trace_dir /
                   (ctx.scenario.name + "_reduced_" + std::to_string(index) + ".csv"));
  write_reduced_csv(os, rs, *hce);
}

void run_splitting(Context& ctx, const CheckSpec& c, CheckOutcome& out) {
  SplittingParams p;
  p.k = c.k;
  if (c.alpha) p.alpha = snap(ctx.traj, *c.alpha, "alpha");
  const auto rep = check_splitting(ctx.traj, *c.theorem, p, ctx.tol);
  out.verdict = rep.verdict;
  out.details = splitting_json(rep);
  if (p.alpha) out.details["alpha"] = num(*p.alpha);
  if (c.k) {
    out.details["ric_k_floor_sampled"] =
        num(ric_k_floor_sampled(ctx.traj.field(), ctx.traj.time(0), *c.k, kRicSamples,
                                ctx.options.seed));
  }
  if (c.dims) {
    const bool dims_ok = rep.dim_Z == c.dims->first && rep.dim_P == c.dims->second;
    out.details["dims_match"] = dims_ok;
    out.match = out.match && dims_ok;
  }
}

void run_rigidity(Context& ctx, const CheckSpec& c, CheckOutcome& out) {
  const double alpha = snap(ctx.traj, c.alpha.value_or(ctx.traj.time(0)), "alpha");
  const auto rep = rigidity_check(ctx.traj, alpha, ctx.tol);
  out.verdict = rep.verdict;
  out.details = rigidity_json(rep);
}

void run_comparison(Context& ctx, const CheckSpec& c, CheckOutcome& out) {
  const auto& trace = ctx.scalar_trace();
  std::vector<double> anchors;
  if (c.anchors.empty()) {
    const std::size_t count = static_cast<std::size_t>(c.anchor_count);
    for (std::size_t j = 0; j < count; ++j) {
      anchors.push_back(trace.t[(j + 1) * trace.size() / (count + 1)]);
    }
  } else {
    for (double a : c.anchors) anchors.push_back(snap(ctx.traj, a, "anchor"));
  }
  json per_anchor = json::array();
  Verdict verdict = Verdict::Verified;
  double max_violation = -kInf;
  double r_min = kInf;
  for (double t0 : anchors) {
    const auto rep = comparison_check(trace, t0, ctx.tol);
    verdict = worst(verdict, rep.verdict());
    max_violation = std::max(max_violation, rep.max_violation);
    r_min = std::min(r_min, rep.r_min);
    per_anchor.push_back(comparison_json(rep));
  }
  out.verdict = verdict;
  out.details = {{"anchors", per_anchor}, {"max_violation", num(max_violation)}, {"r_min", num(r_min)}};
}

void run_hce(Context& ctx, const CheckSpec& c, CheckOutcome& out, std::size_t index) {
  const Gate sa = self_adjoint_gate(ctx.traj, ctx.tol);
  out.details = {{"gates", {{"self_adjoint", gate_json(sa)}}}};
  if (!sa.pass) {
    out.verdict = Verdict::HypothesisViolated;
    out.details["reason"] = "self-adjoint";
    return;
  }
  const auto rs = reduce(ctx.traj, psi_for(c, ctx.traj.dim()), ctx.tol);
  const auto hce = hce_residual(rs, ctx.tol);
  double rhat_dev = 0.0;
  double sym = 0.0;
  double aa_min = kInf;
  for (Index i = 0; i < ctx.traj.size(); ++i) {
    if (!rs.is_regular(i)) continue;
    const Matrixd sh = rs.shat_on_h(i);
    sym = std::max(sym, (sh - sh.transpose()).cwiseAbs().maxCoeff());
    const Matrixd aa = rs.A(i) * rs.A(i).transpose();
    aa_min = std::min(aa_min, min_eigenvalue(SymOperatord(0.5 * (aa + aa.transpose()))));
    if (c.rhat) {
      const Matrixd rh = rs.rhat_on_h(i);
      const Matrixd target = *c.rhat * Matrixd::Identity(rh.rows(), rh.cols());
      rhat_dev = std::max(rhat_dev, spectral_norm<double>(rh - target));
    }
  }
  const bool residual_ok = hce.max <= c.tol;
  const bool rhat_ok = !c.rhat || rhat_dev <= c.tol;
  out.verdict = residual_ok && rhat_ok ? Verdict::Verified : Verdict::Falsified;
  out.details["dim_h"] = rs.dim_h();
  out.details["regular_nodes"] = rs.regular_count();
  out.details["residual"] = {{"max", num(hce.max)},
                             {"worst_time", num(hce.worst_time)},
                             {"nodes_checked", hce.nodes_checked}};
  out.details["shat_symmetry_defect"] = num(sym);
  out.details["min_eig_AAstar"] = num(aa_min);
  if (c.rhat) out.details["rhat_deviation"] = num(rhat_dev);
  write_reduced_trace(ctx, index, rs, &hce);
}

void run_reduced_boundary(Context& ctx, const CheckSpec& c, CheckOutcome& out,
                          std::size_t index) {
  const Gate sa = self_adjoint_gate(ctx.traj, ctx.tol);
  out.details = {{"gates", {{"self_adjoint", gate_json(sa)}}}};
  if (!sa.pass) {
    out.verdict = Verdict::HypothesisViolated;
    out.details["reason"] = "self-adjoint";
    return;
  }
  const auto rs = reduce(ctx.traj, psi_for(c, ctx.traj.dim()), ctx.tol);
  const auto rep = reduced_boundary_check(rs, snap(ctx.traj, *c.alpha, "alpha"), ctx.tol);
  out.verdict = rep.pass ? Verdict::Verified : Verdict::Falsified;
  out.details["alpha"] = num(rep.alpha);
  out.details["max_eig_shat"] = num(rep.max_eig_shat);
  out.details["max_eig_s"] = num(rep.max_eig_s);
  write_reduced_trace(ctx, index, rs, nullptr);
}

void run_dual_leaf(Context& ctx, const CheckSpec& c, CheckOutcome& out) {
  const int n = ctx.traj.field().n();
  const int k = *c.k;
  if (k < 1 || k > n - 1) throw Error("dual_leaf: k out of range");
  const Gate sa = self_adjoint_gate(ctx.traj, ctx.tol);
  Gate curv = curvature_gate(ctx.traj, k, 0.0, ctx.tol);
  curv.pass = curv.value > ctx.tol.curvature;
  curv.note = curv.pass ? "" : "Ric_" + std::to_string(k) + " is not positive";
  const auto z = vanishing_span(ctx.traj, ctx.traj.time(0), ctx.traj.time(ctx.traj.size() - 1),
                                false, ctx.tol.zero);
  const Index dim_z = z.basis.cols();
  const Index bound = n - k;
  Gate window;
  window.pass = dim_z >= bound;
  window.value = static_cast<double>(dim_z - bound);
  if (!window.pass) window.note = "vanishing instants outside the integration window are not searched";
  out.details = {{"gates",
                  {{"self_adjoint", gate_json(sa)}, {"curvature", gate_json(curv)},
                   {"window", gate_json(window)}}},
                 {"k", k},
                 {"dim_Z", dim_z},
                 {"bound", bound},
                 {"zero_times", zero_times_json(z.zeros)},
                 {"ric_k_floor_sampled",
                  num(ric_k_floor_sampled(ctx.traj.field(), ctx.traj.time(0), k, kRicSamples,
                                          ctx.options.seed))}};
  if (!sa.pass) out.details["reason"] = "self-adjoint";
  else if (!curv.pass) out.details["reason"] = "curvature";
  else if (!window.pass) out.details["reason"] = "window";
  out.verdict = sa.pass && curv.pass && window.pass ? Verdict::Verified
                                                    : Verdict::HypothesisViolated;
}

CheckSpec splitting_check(Theorem th, std::optional<double> alpha, std::optional<int> k,
                          std::optional<std::pair<Index, Index>> dims, Verdict expect) {
  CheckSpec c;
  c.kind = CheckKind::Splitting;
  c.theorem = th;
  c.alpha = alpha;
  c.k = k;
  c.dims = dims;
  c.expect = expect;
  return c;
}

CheckSpec simple_check(CheckKind kind, Verdict expect, std::optional<double> alpha = std::nullopt) {
  CheckSpec c;
  c.kind = kind;
  c.expect = expect;
  c.alpha = alpha;
  return c;
}

FamilySpec family(CurvatureField field, Matrixd y0, Matrixd yd0, double alpha, double end,
                  std::string label) {
  FamilySpec f;
  f.field = std::move(field);
  f.alpha = alpha;
  f.end = end;
  f.Y0 = std::move(y0);
  f.Yd0 = std::move(yd0);
  f.label = std::move(label);
  return f;
}

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
  });
}

const std::vector<std::string>& registry_names() {
  static const std::vector<std::string> names = {
      "sphere-zero",   "flat-parallel",          "product-s2xr2",       "cp2-zero",
      "example-nonselfadjoint", "example-shifted-sine", "hopf-holonomy"};
  return names;
}

}  // namespace

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::Splitting: return "splitting";
    case CheckKind::Rigidity: return "rigidity";
    case CheckKind::Comparison: return "comparison";
    case CheckKind::Hce: return "hce";
    case CheckKind::ReducedBoundary: return "reduced_boundary";
    case CheckKind::DualLeaf: return "dual_leaf";
  }
  return "unknown";
}

CheckKind check_kind_from_string(const std::string& name) {
  for (auto kind : {CheckKind::Splitting, CheckKind::Rigidity, CheckKind::Comparison,
                    CheckKind::Hce, CheckKind::ReducedBoundary, CheckKind::DualLeaf}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error("unknown check kind '" + name + "'");
}

std::vector<std::string> list_scenarios() { return registry_names(); }

Scenario builtin_scenario(const std::string& name) {
  using V = Verdict;
  Scenario s;
  s.name = name;
  const Matrixd e1 = Vectord::Unit(2, 0);
  if (name == "sphere-zero") {
    s.description = "Unit 3-sphere, fields vanishing at t=0: the rigidity model case";
    s.family = family(constant_sectional(3, 1.0), Matrixd::Zero(2, 2), Matrixd::Identity(2, 2),
                      0.0, kPi, name);
    s.checks = {simple_check(CheckKind::Rigidity, V::Verified, 0.0),
                splitting_check(Theorem::B, 0.0, std::nullopt, std::pair<Index, Index>{0, 2}, V::Verified),
                splitting_check(Theorem::A, std::nullopt, std::nullopt, std::pair<Index, Index>{2, 0}, V::Verified),
                simple_check(CheckKind::Comparison, V::Verified)};
    CheckSpec hce = simple_check(CheckKind::Hce, V::Verified);
    hce.psi = e1;
    hce.tol = 1e-4;
    CheckSpec rb = simple_check(CheckKind::ReducedBoundary, V::Verified, 0.1);
    rb.psi = e1;
    s.checks.push_back(hce);
    s.checks.push_back(rb);
  } else if (name == "flat-parallel") {
    s.description = "Euclidean 4-space, parallel fields: Theorems A and C with everything parallel";
    s.family = family(constant_sectional(4, 0.0), Matrixd::Identity(3, 3), Matrixd::Zero(3, 3),
                      0.0, kPi, name);
    s.checks = {splitting_check(Theorem::A, std::nullopt, std::nullopt, std::pair<Index, Index>{0, 3}, V::Verified),
                splitting_check(Theorem::C, std::nullopt, 1, std::pair<Index, Index>{0, 3}, V::Verified),
                simple_check(CheckKind::Rigidity, V::HypothesisViolated, 0.0),
                simple_check(CheckKind::Comparison, V::HypothesisViolated)};
  } else if (name == "product-s2xr2") {
    s.description = "S^2 x R^2 along a geodesic of the sphere factor: one vanishing, two parallel fields";
    s.family = family(diagonal_constant({1.0, 0.0, 0.0}), Vectord{{0.0, 1.0, 1.0}}.asDiagonal(),
                      Vectord{{1.0, 0.0, 0.0}}.asDiagonal(), 0.0, kPi, name);
    s.checks = {splitting_check(Theorem::A, std::nullopt, std::nullopt, std::pair<Index, Index>{1, 2}, V::Verified),
                splitting_check(Theorem::C, std::nullopt, 2, std::pair<Index, Index>{1, 2}, V::Verified)};
  } else if (name == "cp2-zero") {
    s.description = "CP^2 with holomorphic curvature 4, fields vanishing at t=0";
    s.family = family(fubini_study_model(4), Matrixd::Zero(3, 3), Matrixd::Identity(3, 3), 0.0,
                      kPi, name);
    CheckSpec cmp = simple_check(CheckKind::Comparison, V::Verified);
    cmp.anchors = {kPi / 4};
    s.checks = {splitting_check(Theorem::B, 0.0, std::nullopt, std::pair<Index, Index>{1, 2}, V::Verified),
                splitting_check(Theorem::E, 0.0, 2, std::nullopt, V::Verified),
                simple_check(CheckKind::Rigidity, V::HypothesisViolated, 0.0), cmp};
  } else if (name == "example-nonselfadjoint") {
    s.description = "Unit 3-sphere, J1 = sin E1 + cos E2, J2 = cos E1 - sin E2: not self-adjoint";
    s.family = family(constant_sectional(3, 1.0), Matrixd{{0.0, 1.0}, {1.0, 0.0}},
                      Matrixd{{1.0, 0.0}, {0.0, -1.0}}, 0.0, kPi, name);
    s.checks = {splitting_check(Theorem::B, 0.0, std::nullopt, std::nullopt, V::HypothesisViolated),
                simple_check(CheckKind::Rigidity, V::HypothesisViolated, 0.0)};
  } else if (name == "example-shifted-sine") {
    const double eps = kPi / 12;
    s.description = "Unit 3-sphere, J_i = sin(t - pi/12) E_i on [pi/2, pi]: boundary inequality fails";
    s.family = family(constant_sectional(3, 1.0), std::sin(kPi / 2 - eps) * Matrixd::Identity(2, 2),
                      std::cos(kPi / 2 - eps) * Matrixd::Identity(2, 2), kPi / 2, kPi, name);
    s.checks = {splitting_check(Theorem::B, kPi / 2, std::nullopt, std::nullopt, V::HypothesisViolated),
                simple_check(CheckKind::Rigidity, V::HypothesisViolated, kPi / 2)};
  } else if (name == "hopf-holonomy") {
    s.description = "Unit 3-sphere with the Hopf holonomy field J1 = cos E1 + sin E2 and J2 = sin E2";
    s.family = family(constant_sectional(3, 1.0), Matrixd{{1.0, 0.0}, {0.0, 0.0}},
                      Matrixd{{0.0, 0.0}, {1.0, 1.0}}, 0.0, kPi, name);
    CheckSpec hce = simple_check(CheckKind::Hce, V::Verified);
    hce.psi = e1;
    hce.tol = 1e-3;
    hce.rhat = 4.0;
    CheckSpec leaf = simple_check(CheckKind::DualLeaf, V::Verified);
    leaf.k = 1;
    CheckSpec rb = simple_check(CheckKind::ReducedBoundary, V::Verified, 0.2);
    rb.psi = e1;
    s.checks = {hce, leaf,
                splitting_check(Theorem::B, 0.0, std::nullopt, std::pair<Index, Index>{1, 1}, V::Verified),
                rb};
  } else {
    throw Error("unknown scenario '" + name + "'");
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json checks = json::array();
  for (const auto& c : s.checks) checks.push_back(check_json(c));
  return {{"schema", kScenarioSchema},
          {"name", s.name},
          {"description", s.description},
          {"field", field_json(s.family.field)},
          {"family",
           {{"alpha", num(s.family.alpha)},
            {"end", num(s.family.end)},
            {"Y0", matrix_rows(s.family.Y0)},
            {"Yd0", matrix_rows(s.family.Yd0)},
            {"label", s.family.label}}},
          {"step", num(s.step)},
          {"tolerances", tolerances_json(s.tol)},
          {"checks", checks}};
}

Scenario scenario_from_json(const json& doc) {
  check_keys(doc, {"schema", "name", "description", "field", "family", "step", "tolerances", "checks"},
             "scenario");
  if (doc.contains("schema") && doc.at("schema") != kScenarioSchema) {
    throw Error("scenario: unsupported schema " + doc.at("schema").dump());
  }
  Scenario s;
  s.name = read_str(require(doc, "name", "scenario"), "name");
  if (!valid_name(s.name)) throw Error("name: use letters, digits, '-', '_' or '.'");
  if (doc.contains("description")) s.description = read_str(doc.at("description"), "description");
  const CurvatureField field = field_from_json(require(doc, "field", "scenario"));
  const auto& fam = require(doc, "family", "scenario");
  check_keys(fam, {"alpha", "end", "Y0", "Yd0", "label"}, "family");
  s.family.field = field;
  s.family.alpha = fam.contains("alpha") ? read_num(fam.at("alpha"), "family.alpha") : 0.0;
  s.family.end = read_num(require(fam, "end", "family"), "family.end");
  s.family.Y0 = matrix_from_rows(require(fam, "Y0", "family"), "family.Y0");
  s.family.Yd0 = matrix_from_rows(require(fam, "Yd0", "family"), "family.Yd0");
  s.family.label = fam.contains("label") ? read_str(fam.at("label"), "family.label") : s.name;
  s.family.validate();
  if (doc.contains("step")) {
    s.step = read_num(doc.at("step"), "step");
    if (!(s.step > 0.0) || !std::isfinite(s.step)) throw Error("step: must be positive");
  }
  if (doc.contains("tolerances")) s.tol = tolerances_from_json(doc.at("tolerances"));
  const auto& checks = require(doc, "checks", "scenario");
  if (!checks.is_array()) throw Error("checks: expected an array");
  for (std::size_t i = 0; i < checks.size(); ++i) s.checks.push_back(check_from_json(checks[i], i));
  for (std::size_t i = 0; i < s.checks.size(); ++i) {
    const auto& c = s.checks[i];
    if (c.psi.size() > 0 && c.psi.rows() != s.family.Y0.rows()) {
      throw Error("checks[" + std::to_string(i) + "].psi: vectors must have length " +
                  std::to_string(s.family.Y0.rows()));
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

bool RunReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.match; });
}

json report_to_json(const RunReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"kind", to_string(c.kind)},
                      {"expect", c.expect ? json(to_string(*c.expect)) : json("any")},
                      {"verdict", to_string(c.verdict)},
                      {"match", c.match},
                      {"params", c.params},
                      {"details", c.details}});
  }
  json out = {{"schema", kReportSchema},
              {"tool_version", r.tool_version},
              {"scenario", r.scenario},
              {"step", num(r.step)},
              {"seed", r.seed},
              {"ok", r.ok()},
              {"wronskian_drift", num(r.wronskian_drift)},
              {"riccati_residual",
               {{"max", num(r.riccati.max)},
                {"worst_time", num(r.riccati.worst_time)},
                {"nodes_checked", r.riccati.nodes_checked}}},
              {"checks", checks}};
  if (r.wall_time) out["wall_time_s"] = num(*r.wall_time);
  return out;
}

RunReport report_from_json(const json& doc) {
  check_keys(doc, {"schema", "tool_version", "scenario", "step", "seed", "ok", "wronskian_drift",
                   "riccati_residual", "checks", "wall_time_s"},
             "report");
  if (require(doc, "schema", "report") != kReportSchema) {
    throw Error("report: unsupported schema " + doc.at("schema").dump());
  }
  RunReport r;
  r.tool_version = read_str(require(doc, "tool_version", "report"), "tool_version");
  r.scenario = read_str(require(doc, "scenario", "report"), "scenario");
  r.step = read_num(require(doc, "step", "report"), "step");
  r.seed = require(doc, "seed", "report").get<std::uint64_t>();
  r.wronskian_drift = read_num(require(doc, "wronskian_drift", "report"), "wronskian_drift");
  const auto& ric = require(doc, "riccati_residual", "report");
  r.riccati.max = read_num(require(ric, "max", "riccati_residual"), "riccati_residual.max");
  r.riccati.worst_time = read_num(require(ric, "worst_time", "riccati_residual"), "worst_time");
  r.riccati.nodes_checked = require(ric, "nodes_checked", "riccati_residual").get<Index>();
  for (const auto& c : require(doc, "checks", "report")) {
    CheckOutcome o;
    o.kind = check_kind_from_string(read_str(require(c, "kind", "check"), "kind"));
    const auto e = read_str(require(c, "expect", "check"), "expect");
    if (e != "any") o.expect = verdict_from_string(e);
    o.verdict = verdict_from_string(read_str(require(c, "verdict", "check"), "verdict"));
    o.match = require(c, "match", "check").get<bool>();
    o.params = require(c, "params", "check");
    o.details = require(c, "details", "check");
    r.checks.push_back(std::move(o));
  }
  if (doc.contains("wall_time_s")) r.wall_time = read_num(doc.at("wall_time_s"), "wall_time_s");
  return r;
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Tolerances tol = scenario.tol;
  if (options.tol_zero) tol.zero = *options.tol_zero;
  if (options.tol_eig) tol.eig = *options.tol_eig;
  const double step = options.step.value_or(scenario.step);
  if (!(step > 0.0) || !std::isfinite(step)) throw Error("step must be positive");

  const auto traj = integrate(scenario.family, step);
  RunReport report;
  report.scenario = scenario.name;
  report.step = traj.step();
  report.seed = options.seed;
  report.wronskian_drift = wronskian_drift(traj);
  report.riccati = riccati_residual(traj, tol);

  if (options.trace_dir) std::filesystem::create_directories(*options.trace_dir);
  Context ctx{scenario, traj, tol, options, std::nullopt};
  for (std::size_t i = 0; i < scenario.checks.size(); ++i) {
    const auto& c = scenario.checks[i];
    CheckOutcome out;
    out.kind = c.kind;
    out.expect = c.expect;
    out.params = check_json(c);
    out.params.erase("kind");
    out.params.erase("expect");
    switch (c.kind) {
      case CheckKind::Splitting: run_splitting(ctx, c, out); break;
      case CheckKind::Rigidity: run_rigidity(ctx, c, out); break;
      case CheckKind::Comparison: run_comparison(ctx, c, out); break;
      case CheckKind::Hce: run_hce(ctx, c, out, i); break;
      case CheckKind::ReducedBoundary: run_reduced_boundary(ctx, c, out, i); break;
      case CheckKind::DualLeaf: run_dual_leaf(ctx, c, out); break;
    }
    const bool verdict_ok = c.expect ? out.verdict == *c.expect : out.verdict != Verdict::Falsified;
    out.match = out.match && verdict_ok;
    report.checks.push_back(std::move(out));
  }

  if (options.trace_dir) {
    const auto& dir = *options.trace_dir;
    std::ofstream traj_os(dir / (scenario.name + "_trajectory.csv"));
    write_trajectory_csv(traj_os, traj);
    try {
      std::ofstream trace_os(dir / (scenario.name + "_scalar.csv"));
      write_scalar_trace_csv(trace_os, ctx.scalar_trace());
    } catch (const Error&) {
      // no regular node, nothing to trace
    }
  }
  if (options.timing) {
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

Scenario random_scenario(std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> eig(lo, hi);
  std::uniform_real_distribution<double> start(0.0, 1.2);
  const int n = std::uniform_int_distribution<int>(3, 5)(rng);
  const Index m = n - 1;
  std::vector<double> eigs(static_cast<std::size_t>(m));
  for (auto& x : eigs) x = eig(rng);
  const double alpha = start(rng);

  Matrixd y0(m, m), yd0(m, m);
  Matrixd gauss(m, m), a(m, m);
  for (Index i = 0; i < gauss.size(); ++i) gauss(i) = g(rng);
  for (Index i = 0; i < a.size(); ++i) a(i) = g(rng);
  if (std::bernoulli_distribution(0.5)(rng)) {
    y0.setZero();
    yd0 = gauss + 2.0 * Matrixd::Identity(m, m);
  } else {
    y0 = gauss + 2.0 * Matrixd::Identity(m, m);
    yd0 = 0.5 * (a + a.transpose()) * y0;  // W = Y0^T Sym Y0 - (Sym Y0)^T Y0 = 0
  }
  Vectord psi(m);
  for (Index i = 0; i < m; ++i) psi(i) = g(rng);
  const int k = std::uniform_int_distribution<int>(1, static_cast<int>(m))(rng);

  Scenario s;
  s.name = "random-" + std::to_string(seed);
  s.description = "Random self-adjoint family over a constant diagonal field";
  s.family = family(diagonal_constant(eigs), y0, yd0, alpha, kPi, s.name);
  auto untyped = [](CheckSpec c) {
    c.expect.reset();
    return c;
  };
  CheckSpec cmp = untyped(simple_check(CheckKind::Comparison, Verdict::Verified));
  cmp.anchor_count = 5;
  CheckSpec hce = untyped(simple_check(CheckKind::Hce, Verdict::Verified));
  hce.psi = psi;
  hce.tol = 1e-3;
  s.checks = {untyped(splitting_check(Theorem::B, alpha, std::nullopt, std::nullopt, Verdict::Verified)),
              untyped(splitting_check(Theorem::E, alpha, k, std::nullopt, Verdict::Verified)),
              untyped(simple_check(CheckKind::Rigidity, Verdict::Verified, alpha)), cmp, hce};
  return s;
}

std::string report_to_csv(const RunReport& r) {
  std::ostringstream os;
  os << "scenario,check,kind,expect,verdict,match\n";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const auto& c = r.checks[i];
    os << r.scenario << "," << i << "," << to_string(c.kind) << ","
       << (c.expect ? to_string(*c.expect) : std::string("any")) << "," << to_string(c.verdict)
       << "," << (c.match ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace jfs
