#include "vfl/string_model.hpp"

#include <cmath>
#include <string>

#include "vfl/errors.hpp"
#include "vfl/integrate.hpp"

namespace vfl {

void StringGrid::validate() const {
  if (nodes < 8) {
    throw PhysicsError(ErrorCode::InvalidInput,
                       "string grid needs at least 8 nodes, got " + std::to_string(nodes));
  }
  if (!std::isfinite(sigma_begin) || !std::isfinite(sigma_end) || !(sigma_end > sigma_begin)) {
    throw PhysicsError(ErrorCode::InvalidInput, "string grid bounds must be finite and increasing");
  }
}

double StringGrid::weight(int i) const {
  const double h = spacing();
  return (i == 0 || i == nodes - 1) ? 0.5 * h : h;
}

void StringState::validate() const {
  grid.validate();
  const auto n = static_cast<size_t>(grid.nodes);
  if (r.size() != n || p.size() != n) {
    throw PhysicsError(ErrorCode::InvalidInput, "string state arrays do not match the grid");
  }
  for (size_t i = 0; i < n; ++i) {
    if (!is_finite(r[i]) || !is_finite(p[i])) {
      throw PhysicsError(ErrorCode::InvalidInput, "non-finite string state", static_cast<int>(i));
    }
  }
}

namespace {

// Coefficient of f_k in the derivative stencil at node i, for the offsets
// listed by stencil().
struct StencilTerm {
  int node;
  double coeff;
};

int stencil(int i, int n, double h, StencilTerm out[3]) {
  // First-order closure: with trapezoid weights this is summation by parts,
  // so a uniformly stretched string is an exact discrete equilibrium.
  if (i == 0) {
    out[0] = {0, -1.0 / h};
    out[1] = {1, 1.0 / h};
    return 2;
  }
  if (i == n - 1) {
    out[0] = {n - 1, 1.0 / h};
    out[1] = {n - 2, -1.0 / h};
    return 2;
  }
  const double c = 0.5 / h;
  out[0] = {i + 1, c};
  out[1] = {i - 1, -c};
  return 2;
}

void require_size(const StringGrid& grid, size_t n, const char* what) {
  if (n != static_cast<size_t>(grid.nodes)) {
    throw PhysicsError(ErrorCode::InvalidInput, std::string(what) + " does not match the grid");
  }
}

}  // namespace

std::vector<Vec3> sigma_derivative(const StringGrid& grid, std::span<const Vec3> f) {
  grid.validate();
  require_size(grid, f.size(), "nodal field");
  const int n = grid.nodes;
  const double h = grid.spacing();
  std::vector<Vec3> d(f.size());
  StencilTerm st[3];
  for (int i = 0; i < n; ++i) {
    const int k = stencil(i, n, h, st);
    Vec3 acc;
    for (int m = 0; m < k; ++m) acc += f[st[m].node] * st[m].coeff;
    d[i] = acc;
  }
  return d;
}

std::vector<Vec3> string_tangents(const StringGrid& grid, std::span<const Vec3> r) {
  return sigma_derivative(grid, r);
}

std::vector<double> sample_wbar(const StringState& s, const PotentialField& f) {
  std::vector<double> w(s.r.size());
  for (size_t i = 0; i < s.r.size(); ++i) {
    if (f.is_singular_at(s.r[i], s.tau)) {
      throw PhysicsError(ErrorCode::SingularPoint, "string node sits on a point source",
                         static_cast<int>(i), s.tau);
    }
    w[i] = f.wbar(s.r[i], s.tau);
  }
  return w;
}

std::vector<Vec3> string_momentum(const StringGrid& grid, std::span<const Vec3> r,
                                  std::span<const Vec3> rdot, std::span<const double> wbar) {
  require_size(grid, rdot.size(), "velocity array");
  require_size(grid, wbar.size(), "W array");
  const std::vector<Vec3> rp = string_tangents(grid, r);
  std::vector<Vec3> p(r.size());
  for (size_t i = 0; i < r.size(); ++i) {
    const double rp2 = norm2(rp[i]);
    if (!(rp2 > 0.0)) {
      throw PhysicsError(ErrorCode::ZeroDirection, "string tangent vanishes", static_cast<int>(i));
    }
    const Vec3 nv = orthogonal_projector(rp[i]).apply(rdot[i]);
    const double c = dot(rp[i], rdot[i]);
    const double d = rp2 * (norm2(rdot[i]) + 1.0) - c * c;
    p[i] = nv * (-wbar[i] * rp2 / std::sqrt(d));
  }
  return p;
}

double transversality_defect(const StringState& s) {
  const std::vector<Vec3> rp = string_tangents(s.grid, s.r);
  double worst = 0.0;
  for (size_t i = 0; i < rp.size(); ++i) worst = std::max(worst, std::abs(dot(s.p[i], rp[i])));
  return worst;
}

std::vector<double> hamiltonian_density(const StringState& s, std::span<const double> wbar) {
  s.validate();
  require_size(s.grid, wbar.size(), "W array");
  const std::vector<Vec3> rp = string_tangents(s.grid, s.r);
  std::vector<double> h(rp.size());
  for (size_t i = 0; i < rp.size(); ++i) {
    const double d = wbar[i] * wbar[i] * norm2(rp[i]) - norm2(s.p[i]);
    if (d < 0.0) {
      throw PhysicsError(ErrorCode::EnergyDomain,
                         "(W r')^2 < p^2 at sigma = " + std::to_string(s.grid.sigma(int(i))),
                         static_cast<int>(i), s.tau);
    }
    h[i] = std::sqrt(d);
  }
  return h;
}

double string_hamiltonian(const StringState& s, std::span<const double> wbar) {
  const std::vector<double> h = hamiltonian_density(s, wbar);
  double sum = 0.0;
  for (int i = 0; i < s.grid.nodes; ++i) sum += s.grid.weight(i) * h[i];
  return sum;
}

double string_hamiltonian(const StringState& s, const PotentialField& f) {
  return string_hamiltonian(s, sample_wbar(s, f));
}

double string_hamiltonian_alt(const StringState& s, std::span<const double> wbar) {
  s.validate();
  require_size(s.grid, wbar.size(), "W array");
  const std::vector<Vec3> rp = string_tangents(s.grid, s.r);
  double sum = 0.0;
  for (int i = 0; i < s.grid.nodes; ++i) sum += s.grid.weight(i) * norm(rp[i] * wbar[i] - s.p[i]);
  return sum;
}

StringRates string_canonical_rhs(const StringState& s, const PotentialField& f) {
  s.validate();
  const int n = s.grid.nodes;
  const double h = s.grid.spacing();
  const std::vector<Vec3> rp = string_tangents(s.grid, s.r);

  std::vector<double> w(n);
  std::vector<double> root(n);
  for (int i = 0; i < n; ++i) {
    if (f.is_singular_at(s.r[i], s.tau)) {
      throw PhysicsError(ErrorCode::SingularPoint, "string node sits on a point source", i, s.tau);
    }
    w[i] = f.wbar(s.r[i], s.tau);
    const double d = w[i] * w[i] * norm2(rp[i]) - norm2(s.p[i]);
    if (!(d > kStringDomainMargin)) {
      throw PhysicsError(ErrorCode::EnergyDomain,
                         "(W r')^2 - p^2 = " + std::to_string(d) + " at sigma = " +
                             std::to_string(s.grid.sigma(i)),
                         i, s.tau);
    }
    root[i] = std::sqrt(d);
  }

  // Flux G_j = W^2 r'_j / root_j enters every node of the tangent stencil of j.
  std::vector<Vec3> grad(n);
  StencilTerm st[3];
  for (int j = 0; j < n; ++j) {
    const Vec3 g = rp[j] * (w[j] * w[j] / root[j]) * s.grid.weight(j);
    const int k = stencil(j, n, h, st);
    for (int m = 0; m < k; ++m) grad[st[m].node] += g * st[m].coeff;
  }

  StringRates rates;
  rates.dr.assign(n, Vec3{});
  rates.dp.assign(n, Vec3{});
  for (int i = 1; i < n - 1; ++i) {
    rates.dr[i] = s.p[i] / root[i];
    const Vec3 gw = f.grad_wbar(s.r[i], s.tau);
    rates.dp[i] = gw * (w[i] * norm2(rp[i]) / root[i]) + grad[i] / s.grid.weight(i);
  }
  return rates;
}

namespace {

Vec3 curl_of(const Mat3& j) {
  return {j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)};
}

struct ChargedNode {
  Vec3 rp;
  double wbar = 0.0;
  Vec3 grad_w;
  double root = 0.0;   // D_f^{1/2}
  Vec3 c;              // induced q A / W
  Vec3 flux;           // W [(1 + v^2) r' - <v, r'> v] / D_f^{1/2}
};

std::vector<ChargedNode> charged_nodes(const ChargedStringScenario& sc) {
  sc.grid.validate();
  require_size(sc.grid, sc.r.size(), "position array");
  require_size(sc.grid, sc.rdot.size(), "velocity array");
  const std::vector<Vec3> rp = string_tangents(sc.grid, sc.r);
  std::vector<ChargedNode> nodes(rp.size());
  for (size_t i = 0; i < rp.size(); ++i) {
    const int node = static_cast<int>(i);
    if (sc.field.is_singular_at(sc.r[i], sc.t)) {
      throw PhysicsError(ErrorCode::SingularPoint, "string node sits on a point source", node,
                         sc.tau);
    }
    ChargedNode& cn = nodes[i];
    cn.rp = rp[i];
    const double rp2 = norm2(rp[i]);
    if (!(rp2 > 0.0)) {
      throw PhysicsError(ErrorCode::ZeroDirection, "string tangent vanishes", node, sc.tau);
    }
    const Vec3 v = sc.rdot[i] - sc.source_velocity;
    const double vr = dot(v, rp[i]);
    const double d = rp2 * (1.0 + norm2(v)) - vr * vr;
    if (!(d > kStringDomainMargin)) {
      throw PhysicsError(ErrorCode::EnergyDomain, "relative string velocity leaves the domain",
                         node, sc.tau);
    }
    cn.root = std::sqrt(d);
    cn.wbar = sc.field.wbar(sc.r[i], sc.t);
    cn.grad_w = sc.field.grad_wbar(sc.r[i], sc.t);
    cn.c = orthogonal_projector(rp[i]).apply(sc.source_velocity) * (rp2 / cn.root);
    cn.flux = (rp[i] * (1.0 + norm2(v)) - v * vr) * (cn.wbar / cn.root);
  }
  return nodes;
}

}  // namespace

std::vector<ChargedStringTerms> charged_string_rhs(const ChargedStringScenario& sc) {
  const std::vector<ChargedNode> nodes = charged_nodes(sc);
  std::vector<Vec3> flux(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) flux[i] = nodes[i].flux;
  const std::vector<Vec3> tension = sigma_derivative(sc.grid, flux);

  const ExternalVectorPotential& ext = sc.field.external();
  const double q = sc.charge_density;
  const Vec3 qb_ext = curl_of(ext.gradient) * q;

  std::vector<ChargedStringTerms> out(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    const ChargedNode& cn = nodes[i];
    const Vec3& rdot = sc.rdot[i];
    const double rp2 = norm2(cn.rp);
    const Vec3 v = rdot - sc.source_velocity;
    const Projector3 n = orthogonal_projector(cn.rp);
    const double dt_dtau = cn.root / std::sqrt(rp2);
    const Vec3 qa_ext = (ext.offset + ext.ramp * sc.t + ext.gradient * sc.r[i]) * q;

    ChargedStringTerms& t = out[i];
    t.coupled_vecpot = cn.c * cn.wbar + qa_ext;
    t.local_momentum = n.apply(rdot) * (-cn.wbar * rp2 / cn.root);
    t.generalized_momentum = n.apply(v) * (-cn.wbar * rp2 / cn.root) + qa_ext;
    t.magnetic = cross(rdot, cross(cn.grad_w, cn.c) + qb_ext);
    t.contact = -(cn.grad_w * dot(cn.c, rdot)) - ext.gradient.transposed() * rdot * q;
    t.induction = -(cn.c * sc.field.dwbar_dt(sc.r[i], sc.t) + ext.ramp * q) * dt_dtau;
    t.potential = -(cn.grad_w * cn.root);
    t.tension = tension[i];
    t.total = t.magnetic + t.contact + t.induction + t.potential + t.tension;
  }
  return out;
}

Vec3 string_electric_field(const ChargedStringScenario& sc, int sigma_index) {
  if (sigma_index < 0 || sigma_index >= sc.grid.nodes) {
    throw PhysicsError(ErrorCode::InvalidInput, "sigma index out of range", sigma_index);
  }
  const ChargedStringTerms t = charged_string_rhs(sc)[sigma_index];
  return t.induction + t.potential + t.tension;
}

ConformalPatch ConformalPatch::make(int n_sigma, int n_s, double sigma0, double sigma1, double s0,
                                    double s1) {
  if (n_sigma < 3 || n_s < 3 || !(sigma1 > sigma0) || !(s1 > s0)) {
    throw PhysicsError(ErrorCode::InvalidInput, "conformal patch needs at least 3x3 nodes");
  }
  ConformalPatch p;
  p.n_sigma = n_sigma;
  p.n_s = n_s;
  p.sigma0 = sigma0;
  p.s0 = s0;
  p.h_sigma = (sigma1 - sigma0) / (n_sigma - 1);
  p.h_s = (s1 - s0) / (n_s - 1);
  p.xi.assign(static_cast<size_t>(n_sigma) * n_s, EuclideanEvent{});
  return p;
}

void ConformalPatch::fill(const std::function<EuclideanEvent(double, double)>& g) {
  for (int j = 0; j < n_s; ++j)
    for (int i = 0; i < n_sigma; ++i) at(i, j) = g(sigma(i), s(j));
}

void ConformalPatch::fill_boundary(const std::function<EuclideanEvent(double, double)>& g) {
  for (int j = 0; j < n_s; ++j)
    for (int i = 0; i < n_sigma; ++i)
      if (is_boundary(i, j)) at(i, j) = g(sigma(i), s(j));
}

namespace {

EuclideanEvent d_sigma(const ConformalPatch& p, int i, int j) {
  return (p.at(i + 1, j) - p.at(i - 1, j)) * (0.5 / p.h_sigma);
}

EuclideanEvent d_s(const ConformalPatch& p, int i, int j) {
  return (p.at(i, j + 1) - p.at(i, j - 1)) * (0.5 / p.h_s);
}

EuclideanEvent grad4(const PotentialField& w, const EuclideanEvent& x) {
  return {w.grad_wbar(x.r, x.tau), w.dwbar_dt(x.r, x.tau)};
}

void check_patch(const ConformalPatch& p) {
  if (p.n_sigma < 3 || p.n_s < 3 ||
      p.xi.size() != static_cast<size_t>(p.n_sigma) * static_cast<size_t>(p.n_s) ||
      !(p.h_sigma > 0.0) || !(p.h_s > 0.0)) {
    throw PhysicsError(ErrorCode::InvalidInput, "malformed conformal patch");
  }
  for (size_t k = 0; k < p.xi.size(); ++k) {
    if (!is_finite(p.xi[k].r) || !std::isfinite(p.xi[k].tau)) {
      throw PhysicsError(ErrorCode::InvalidInput, "non-finite conformal patch value",
                         static_cast<int>(k));
    }
  }
}

std::vector<double> sample_patch_wbar(const ConformalPatch& p, const PotentialField& w) {
  std::vector<double> out(p.xi.size());
  for (size_t k = 0; k < p.xi.size(); ++k) {
    const EuclideanEvent& x = p.xi[k];
    if (w.is_singular_at(x.r, x.tau)) {
      throw PhysicsError(ErrorCode::SingularPoint, "world surface hits a point source",
                         static_cast<int>(k));
    }
    out[k] = w.wbar(x.r, x.tau);
  }
  return out;
}

// Conservative five-point operator with arithmetic-mean half-point
// coefficients, split into neighbour sum and diagonal.
struct FivePoint {
  EuclideanEvent off;
  double diag = 0.0;
};

FivePoint five_point(const ConformalPatch& p, const std::vector<double>& wn, int i, int j) {
  auto w = [&](int a, int b) { return wn[static_cast<size_t>(b) * p.n_sigma + a]; };
  const double c = w(i, j);
  const double ks = 1.0 / (p.h_sigma * p.h_sigma);
  const double kt = 1.0 / (p.h_s * p.h_s);
  const double ae = 0.5 * (c + w(i + 1, j)) * ks;
  const double aw = 0.5 * (c + w(i - 1, j)) * ks;
  const double an = 0.5 * (c + w(i, j + 1)) * kt;
  const double as = 0.5 * (c + w(i, j - 1)) * kt;
  FivePoint fp;
  fp.off = p.at(i + 1, j) * ae + p.at(i - 1, j) * aw + p.at(i, j + 1) * an + p.at(i, j - 1) * as;
  fp.diag = ae + aw + an + as;
  return fp;
}

EuclideanEvent source_term(const ConformalPatch& p, const PotentialField& w,
                           const SheetForcing& forcing, int i, int j) {
  const EuclideanEvent a = d_sigma(p, i, j);
  const EuclideanEvent b = d_s(p, i, j);
  const double metric = std::sqrt(euclidean_inner(a, a) * euclidean_inner(b, b));
  EuclideanEvent s = grad4(w, p.at(i, j)) * metric;
  if (forcing) s += forcing(p.sigma(i), p.s(j));
  return s;
}

}  // namespace

GaugeResidual gauge_residual(const ConformalPatch& patch) {
  check_patch(patch);
  GaugeResidual g;
  for (int j = 1; j < patch.n_s - 1; ++j) {
    for (int i = 1; i < patch.n_sigma - 1; ++i) {
      const EuclideanEvent a = d_sigma(patch, i, j);
      const EuclideanEvent b = d_s(patch, i, j);
      g.orthogonality = std::max(g.orthogonality, std::abs(euclidean_inner(a, b)));
      g.norm_mismatch =
          std::max(g.norm_mismatch, std::abs(euclidean_inner(a, a) - euclidean_inner(b, b)));
    }
  }
  return g;
}

std::vector<EuclideanEvent> conformal_residual(const ConformalPatch& patch, const PotentialField& w,
                                               const ConformalOptions& options) {
  check_patch(patch);
  if (options.check_gauge) {
    const GaugeResidual g = gauge_residual(patch);
    if (g.orthogonality > options.gauge_tol || g.norm_mismatch > options.gauge_tol) {
      throw PhysicsError(ErrorCode::GaugeViolation,
                         "gauge residuals " + std::to_string(g.orthogonality) + ", " +
                             std::to_string(g.norm_mismatch) + " exceed " +
                             std::to_string(options.gauge_tol));
    }
  }
  const std::vector<double> wn = sample_patch_wbar(patch, w);
  std::vector<EuclideanEvent> res(patch.xi.size());
  for (int j = 1; j < patch.n_s - 1; ++j) {
    for (int i = 1; i < patch.n_sigma - 1; ++i) {
      const FivePoint fp = five_point(patch, wn, i, j);
      res[static_cast<size_t>(j) * patch.n_sigma + i] =
          fp.off - patch.at(i, j) * fp.diag - source_term(patch, w, options.forcing, i, j);
    }
  }
  return res;
}

double max_norm(std::span<const EuclideanEvent> v) {
  double m = 0.0;
  for (const EuclideanEvent& e : v) m = std::max(m, euclidean_norm(e));
  return m;
}

ConformalSolution solve_conformal(const ConformalPatch& boundary, const PotentialField& w,
                                  double tol, const ConformalSolveOptions& options) {
  check_patch(boundary);
  const int n = std::max(boundary.n_sigma, boundary.n_s);
  const double omega =
      options.omega > 0.0 ? options.omega : 2.0 / (1.0 + std::sin(M_PI / (n - 1)));

  // Coefficients and the right-hand side are frozen for the length of a sweep.
  std::vector<double> wn;
  std::vector<EuclideanEvent> rhs(boundary.xi.size());
  NodeRelaxation op;
  op.refresh = [&](const ConformalPatch& p) {
    wn = sample_patch_wbar(p, w);
    for (int j = 1; j < p.n_s - 1; ++j)
      for (int i = 1; i < p.n_sigma - 1; ++i)
        rhs[static_cast<size_t>(j) * p.n_sigma + i] = source_term(p, w, options.forcing, i, j);
  };
  op.local_solve = [&](const ConformalPatch& p, int i, int j) {
    const FivePoint fp = five_point(p, wn, i, j);
    if (fp.diag == 0.0) {
      throw PhysicsError(ErrorCode::DomainError, "W vanishes on the world surface",
                         j * p.n_sigma + i);
    }
    return (fp.off - rhs[static_cast<size_t>(j) * p.n_sigma + i]) * (1.0 / fp.diag);
  };
  ConformalOptions check;
  check.check_gauge = false;
  check.forcing = options.forcing;
  op.max_residual = [&](const ConformalPatch& p) {
    return max_norm(conformal_residual(p, w, check));
  };

  RelaxationResult r = relax_elliptic(op, boundary, tol, options.max_iters, omega);
  return {std::move(r.patch), r.iterations, r.final_residual};
}

}  // namespace vfl
