#include "vfl/variational.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vfl/errors.hpp"
#include "vfl/particle.hpp"

namespace vfl {

std::string_view to_string(LagrangianKind kind) {
  switch (kind) {
    case LagrangianKind::ClassicalPoint: return "classical-point";
    case LagrangianKind::ConstrainedPoint: return "constrained-point";
    case LagrangianKind::RestFramePoint: return "rest-frame-point";
    case LagrangianKind::VacuumFreePoint: return "vacuum-free-point";
    case LagrangianKind::VacuumInteractingPoint: return "vacuum-interacting-point";
    case LagrangianKind::StringDensity: return "string-density";
  }
  return "unknown";
}

void DiscretePath::validate() const {
  if (r.size() < 5) throw PhysicsError(ErrorCode::InvalidInput, "a path needs at least 5 nodes");
  if (!(s1 > s0) || !std::isfinite(s0) || !std::isfinite(s1)) {
    throw PhysicsError(ErrorCode::InvalidInput, "path parameter range must be increasing");
  }
  if (!t.empty() && t.size() != r.size()) {
    throw PhysicsError(ErrorCode::InvalidInput, "time channel length differs from the path");
  }
  for (size_t i = 0; i < r.size(); ++i) {
    if (!is_finite(r[i]) || (!t.empty() && !std::isfinite(t[i]))) {
      throw PhysicsError(ErrorCode::InvalidInput, "non-finite path node", static_cast<int>(i));
    }
  }
}

namespace {

double checked_root(double d, const char* what) {
  if (!(d > 0.0)) throw PhysicsError(ErrorCode::DomainError, std::string(what) + " is not positive");
  return std::sqrt(d);
}

// Derivative at node i of a uniformly sampled sequence: central inside,
// second-order one-sided at the ends.
template <class T>
T node_derivative(const std::vector<T>& f, int i, double h) {
  const int n = static_cast<int>(f.size());
  if (i == 0) return (f[0] * -3.0 + f[1] * 4.0 - f[2]) * (0.5 / h);
  if (i == n - 1) return (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * (0.5 / h);
  return (f[i + 1] - f[i - 1]) * (0.5 / h);
}

struct NodeKinematics {
  Vec3 r;
  Vec3 rdot;
  double t = 0.0;
  double tdot = 1.0;
};

NodeKinematics kinematics(const DiscretePath& path, int i) {
  const double h = path.spacing();
  NodeKinematics k;
  k.r = path.r[i];
  k.rdot = node_derivative(path.r, i, h);
  if (path.has_time_channel()) {
    k.t = path.t[i];
    k.tdot = node_derivative(path.t, i, h);
  } else {
    k.t = path.parameter(i);
  }
  return k;
}

void require_point_kind(const LagrangianSpec& spec) {
  if (spec.kind == LagrangianKind::StringDensity) {
    throw PhysicsError(ErrorCode::InvalidInput, "string density is evaluated on a world sheet");
  }
}

// Fourth-order symmetric difference of f with respect to x, restoring x.
// The perturbed velocities scale like eps/h, so the second-order formula
// would let truncation grow as h shrinks.
template <class F>
double five_point_derivative(double& x, double eps, F&& f) {
  const double x0 = x;
  x = x0 + 2.0 * eps;
  const double f2 = f();
  x = x0 + eps;
  const double f1 = f();
  x = x0 - eps;
  const double m1 = f();
  x = x0 - 2.0 * eps;
  const double m2 = f();
  x = x0;
  return (8.0 * (f1 - m1) - (f2 - m2)) / (12.0 * eps);
}

double path_scale(const std::vector<Vec3>& r) {
  double m = 1e-3;
  for (const Vec3& x : r) m = std::max(m, norm(x));
  return m;
}

}  // namespace

double lagrangian_value(const LagrangianSpec& spec, const Vec3& r, const Vec3& rdot, double t,
                        double tdot) {
  const PotentialField& f = spec.field;
  if (f.is_singular_at(r, t)) throw PhysicsError(ErrorCode::SingularPoint, "path hits a point source");
  const double w = f.wbar(r, t);
  switch (spec.kind) {
    case LagrangianKind::ClassicalPoint:
      return -spec.rest_mass * checked_root(1.0 - norm2(rdot), "1 - u^2") - w +
             spec.charge * dot(f.vecpot(r, t), rdot);
    case LagrangianKind::ConstrainedPoint:
      return -spec.rest_mass - w * tdot + spec.charge * dot(f.vecpot(r, t), rdot) -
             spec.multiplier * (checked_root(tdot * tdot - norm2(rdot), "tdot^2 - rdot^2") - 1.0);
    case LagrangianKind::RestFramePoint:
      return -w * std::sqrt(1.0 + norm2(rdot)) + spec.charge * dot(f.vecpot(r, t), rdot);
    case LagrangianKind::VacuumFreePoint:
      return -w * std::sqrt(1.0 + norm2(rdot));
    case LagrangianKind::VacuumInteractingPoint: {
      const Vec3 v = rdot - f.source_velocity() * tdot;
      if (!is_finite(v)) throw PhysicsError(ErrorCode::DomainError, "relative velocity is not finite");
      return -w * std::sqrt(1.0 + norm2(v));
    }
    case LagrangianKind::StringDensity:
      break;
  }
  throw PhysicsError(ErrorCode::InvalidInput, "string density is evaluated on a world sheet");
}

double discrete_action(const LagrangianSpec& spec, const DiscretePath& path) {
  require_point_kind(spec);
  path.validate();
  const int m = path.size();
  const double h = path.spacing();
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const NodeKinematics k = kinematics(path, i);
    const double w = (i == 0 || i == m - 1) ? 0.5 * h : h;
    s += w * lagrangian_value(spec, k.r, k.rdot, k.t, k.tdot);
  }
  return s;
}

std::vector<Vec3> euler_lagrange_residual(const LagrangianSpec& spec, const DiscretePath& path) {
  require_point_kind(spec);
  path.validate();
  const int m = path.size();
  const double h = path.spacing();
  const double eps = 1e-6 * path_scale(path.r);
  std::vector<Vec3> res(m);
  DiscretePath work = path;

  auto local = [&](int k) {
    double s = 0.0;
    for (int j = k - 1; j <= k + 1; ++j) {
      const NodeKinematics kin = kinematics(work, j);
      s += h * lagrangian_value(spec, kin.r, kin.rdot, kin.t, kin.tdot);
    }
    return s;
  };

  for (int k = 3; k <= m - 4; ++k) {
    Vec3 g;
    for (int c = 0; c < 3; ++c) {
      double& x = work.r[k][c];
      g[c] = five_point_derivative(x, eps, [&] { return local(k); }) / h;
    }
    res[k] = g;
  }
  return res;
}

double max_norm(const std::vector<Vec3>& v) {
  double m = 0.0;
  for (const Vec3& x : v) m = std::max(m, norm(x));
  return m;
}

LegendreSample legendre_sample(const LagrangianSpec& spec, const Vec3& r, const Vec3& rdot,
                               double t, double tdot) {
  if (spec.kind == LagrangianKind::StringDensity) {
    throw PhysicsError(ErrorCode::DegenerateLagrangian,
                       "string density has a singular velocity Hessian");
  }
  const double delta = 1e-6 * std::max(1.0, norm(rdot));
  LegendreSample out;
  for (int c = 0; c < 3; ++c) {
    Vec3 up = rdot, dn = rdot;
    up[c] += delta;
    dn[c] -= delta;
    out.momentum[c] = (lagrangian_value(spec, r, up, t, tdot) -
                       lagrangian_value(spec, r, dn, t, tdot)) / (2.0 * delta);
  }
  const double l = lagrangian_value(spec, r, rdot, t, tdot);
  out.numeric = dot(out.momentum, rdot) - l;

  const PotentialField& f = spec.field;
  const double w = f.wbar(r, t);
  const Vec3 qa = f.vecpot(r, t) * spec.charge;
  const Vec3& big_p = out.momentum;
  switch (spec.kind) {
    case LagrangianKind::ClassicalPoint:
      out.particle = classical_hamiltonian(spec.rest_mass, w, big_p, qa);
      break;
    case LagrangianKind::ConstrainedPoint:
      out.particle = constrained_hamiltonian(spec.multiplier, spec.rest_mass, w, tdot, big_p, qa);
      break;
    case LagrangianKind::RestFramePoint:
      out.particle = vacuum_free_hamiltonian(w, big_p - qa);
      break;
    case LagrangianKind::VacuumFreePoint:
      out.particle = vacuum_free_hamiltonian(w, big_p);
      break;
    case LagrangianKind::VacuumInteractingPoint: {
      const Vec3 induced = f.source_velocity() * w;
      out.particle = interacting_hamiltonian(w, big_p - induced, induced);
      break;
    }
    case LagrangianKind::StringDensity:
      break;
  }
  return out;
}

LegendreReport legendre_transform_check(const LagrangianSpec& spec, const DiscretePath& path) {
  if (spec.kind == LagrangianKind::StringDensity) {
    throw PhysicsError(ErrorCode::DegenerateLagrangian,
                       "string density has a singular velocity Hessian");
  }
  path.validate();
  LegendreReport rep;
  for (int i = 0; i < path.size(); ++i) {
    const NodeKinematics k = kinematics(path, i);
    const LegendreSample s = legendre_sample(spec, k.r, k.rdot, k.t, k.tdot);
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(s.numeric - s.particle));
    rep.samples.push_back(s);
  }
  rep.passed = rep.max_abs_error <= kLegendreTolerance;
  return rep;
}

MultiplierReport multiplier_consistency(const DiscretePath& path, double m0, double tol) {
  path.validate();
  if (!path.has_time_channel()) {
    throw PhysicsError(ErrorCode::InvalidInput, "multiplier check needs a t(tau) channel");
  }
  if (!(m0 > 0.0)) throw PhysicsError(ErrorCode::NonpositiveMass, "rest mass must be positive");
  const int m = path.size();
  const double k = 1.0 / (12.0 * path.spacing());
  MultiplierReport rep;
  double lo = HUGE_VAL, hi = -HUGE_VAL, sum = 0.0;
  for (int i = 2; i <= m - 3; ++i) {
    const Vec3 rdot =
        (path.r[i - 2] - path.r[i - 1] * 8.0 + path.r[i + 1] * 8.0 - path.r[i + 2]) * k;
    const double tdot = (path.t[i - 2] - 8.0 * path.t[i - 1] + 8.0 * path.t[i + 1] - path.t[i + 2]) * k;
    const double lambda = m0 / checked_root(tdot * tdot - norm2(rdot), "tdot^2 - rdot^2");
    rep.lambda.push_back(lambda);
    lo = std::min(lo, lambda);
    hi = std::max(hi, lambda);
    sum += lambda;
  }
  rep.mean = sum / static_cast<double>(rep.lambda.size());
  rep.spread = hi - lo;
  rep.constant = rep.spread <= tol * std::max(1.0, std::abs(rep.mean));
  return rep;
}

void StringSheet::validate() const {
  grid.validate();
  if (rows.size() < 7) throw PhysicsError(ErrorCode::InvalidInput, "a sheet needs at least 7 rows");
  if (!(h_tau > 0.0)) throw PhysicsError(ErrorCode::InvalidInput, "sheet tau spacing must be positive");
  for (const auto& row : rows) {
    if (row.size() != static_cast<size_t>(grid.nodes)) {
      throw PhysicsError(ErrorCode::InvalidInput, "sheet row does not match the grid");
    }
  }
}

namespace {

double sheet_density(const LagrangianSpec& spec, const StringSheet& sh, int k, int i) {
  const auto& col = sh.rows;
  const int nr = static_cast<int>(col.size());
  const int n = sh.grid.nodes;
  const double hs = sh.grid.spacing();
  const auto& row = col[k];
  Vec3 rp;
  if (i == 0) rp = (row[0] * -3.0 + row[1] * 4.0 - row[2]) * (0.5 / hs);
  else if (i == n - 1) rp = (row[n - 1] * 3.0 - row[n - 2] * 4.0 + row[n - 3]) * (0.5 / hs);
  else rp = (row[i + 1] - row[i - 1]) * (0.5 / hs);
  Vec3 rd;
  const double ht = sh.h_tau;
  if (k == 0) rd = (col[0][i] * -3.0 + col[1][i] * 4.0 - col[2][i]) * (0.5 / ht);
  else if (k == nr - 1) rd = (col[nr - 1][i] * 3.0 - col[nr - 2][i] * 4.0 + col[nr - 3][i]) * (0.5 / ht);
  else rd = (col[k + 1][i] - col[k - 1][i]) * (0.5 / ht);
  const double tau = sh.tau0 + k * ht;
  const double w = spec.field.wbar(row[i], tau);
  const double c = dot(rp, rd);
  return -w * checked_root(norm2(rp) * (1.0 + norm2(rd)) - c * c, "string area element");
}

void require_string_kind(const LagrangianSpec& spec) {
  if (spec.kind != LagrangianKind::StringDensity) {
    throw PhysicsError(ErrorCode::InvalidInput, "sheet actions need the string density");
  }
}

}  // namespace

double string_sheet_action(const LagrangianSpec& spec, const StringSheet& sheet) {
  require_string_kind(spec);
  sheet.validate();
  const int nr = static_cast<int>(sheet.rows.size());
  double s = 0.0;
  for (int k = 0; k < nr; ++k) {
    const double wk = (k == 0 || k == nr - 1) ? 0.5 * sheet.h_tau : sheet.h_tau;
    for (int i = 0; i < sheet.grid.nodes; ++i) {
      s += wk * sheet.grid.weight(i) * sheet_density(spec, sheet, k, i);
    }
  }
  return s;
}

std::vector<std::vector<Vec3>> string_sheet_residual(const LagrangianSpec& spec,
                                                     const StringSheet& sheet) {
  require_string_kind(spec);
  sheet.validate();
  const int nr = static_cast<int>(sheet.rows.size());
  const int n = sheet.grid.nodes;
  StringSheet work = sheet;
  double scale = 1e-3;
  for (const auto& row : sheet.rows)
    for (const Vec3& x : row) scale = std::max(scale, norm(x));
  const double eps = 1e-6 * scale;

  auto local = [&](int k, int i) {
    return sheet_density(spec, work, k, i) + sheet_density(spec, work, k - 1, i) +
           sheet_density(spec, work, k + 1, i) + sheet_density(spec, work, k, i - 1) +
           sheet_density(spec, work, k, i + 1);
  };

  std::vector<std::vector<Vec3>> res(nr, std::vector<Vec3>(n));
  for (int k = 3; k <= nr - 4; ++k) {
    for (int i = 3; i <= n - 4; ++i) {
      for (int c = 0; c < 3; ++c) {
        double& x = work.rows[k][i][c];
        res[k][i][c] = five_point_derivative(x, eps, [&] { return local(k, i); });
      }
    }
  }
  return res;
}

}  // namespace vfl
