#include <cmath>
#include <random>
#include <sstream>

#include "checks_internal.hpp"
#include "vfl/integrate.hpp"
#include "vfl/string_model.hpp"

namespace vfl::checks {

namespace {

StringState straight_string(int n) {
  StringState s;
  s.grid.nodes = n;
  s.r.resize(n);
  s.p.assign(n, Vec3{});
  for (int i = 0; i < n; ++i) s.r[i] = {s.grid.sigma(i), 0.0, 0.0};
  return s;
}

double max_state_change(const StringState& a, const StringState& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.r.size(); ++i) {
    m = std::max({m, norm(a.r[i] - b.r[i]), norm(a.p[i] - b.p[i])});
  }
  return m;
}

// Exponential conformal map xi = (e^sigma cos s, e^sigma sin s, 0, 0) and its derivatives.
struct ExpMap {
  EuclideanEvent value(double a, double b) const {
    return {{std::exp(a) * std::cos(b), std::exp(a) * std::sin(b), 0.0}, 0.0};
  }
  EuclideanEvent d_sigma(double a, double b) const { return value(a, b); }
  EuclideanEvent d_s(double a, double b) const {
    return {{-std::exp(a) * std::sin(b), std::exp(a) * std::cos(b), 0.0}, 0.0};
  }
};

double solve_error(int n, const PotentialField& w, bool manufactured, long& iterations) {
  const ExpMap map;
  ConformalPatch patch = ConformalPatch::make(n, n, 0.0, 1.0, 0.0, 1.0);
  patch.fill_boundary([&](double a, double b) { return map.value(a, b); });
  ConformalSolveOptions opt;
  if (manufactured) {
    // Continuum defect of the exact map; the map is harmonic, so only the
    // coefficient-gradient and metric terms survive.
    opt.forcing = [&w, map](double a, double b) {
      const EuclideanEvent x = map.value(a, b);
      const EuclideanEvent g{w.grad_wbar(x.r, x.tau), w.dwbar_dt(x.r, x.tau)};
      const EuclideanEvent xs = map.d_sigma(a, b), xt = map.d_s(a, b);
      const double metric = std::sqrt(euclidean_inner(xs, xs) * euclidean_inner(xt, xt));
      return xs * euclidean_inner(g, xs) + xt * euclidean_inner(g, xt) - g * metric;
    };
  }
  const ConformalSolution sol = solve_conformal(patch, w, 1e-9, opt);
  iterations += sol.iterations;
  double err = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      err = std::max(err, euclidean_norm(sol.patch.at(i, j) - map.value(sol.patch.sigma(i),
                                                                         sol.patch.s(j))));
  return err;
}

}  // namespace

CriterionResult string_conservation() {
  Timer timer;
  CriterionResult r = start(8, "string equilibrium and plucked-string conservation, N = 64");
  return guarded(r, timer, [&] {
    const PotentialField w = PotentialField::uniform(-1.0);
    IntegrationParams p;
    p.step = 1e-4;
    p.n_steps = 1000;
    p.audit_every = 10;

    const StringState still = straight_string(64);
    const StringTrajectory a = integrate_string(still, w, p);
    const double moved = max_state_change(still, a.samples.back().state);

    StringState pluck = straight_string(64);
    for (int i = 1; i < 63; ++i) {
      const double z = (pluck.grid.sigma(i) - 0.5) / 0.1;
      pluck.p[i] = {0.0, 1e-3 * std::exp(-0.5 * z * z), 0.0};
    }
    const StringTrajectory b = integrate_string(pluck, w, p);
    const double h_drift = b.report.find("hamiltonian")->relative_drift;
    const double growth = b.report.find("transversality_defect")->max_abs_drift / p.horizon();
    const double secs = timer.seconds();
    r.passed = moved <= 1e-12 && h_drift < 1e-5 && growth < 1e-6 && secs < 5.0;
    std::ostringstream d;
    d << "static change " << moved << " (limit 1e-12), H drift " << h_drift
      << " (limit 1e-5), transversality growth " << growth << " per unit tau (limit 1e-6), "
      << secs << " s";
    r.detail = d.str();
  });
}

CriterionResult conformal_solver() {
  Timer timer;
  CriterionResult r = start(9, "conformal elliptic solver convergence on 17, 33, 65 grids");
  return guarded(r, timer, [&] {
    SourceSpec spec;
    spec.kind = SourceKind::CoulombStatic;
    spec.strength = 4.0 * M_PI;
    spec.position = {0.0, -3.0, 0.0};
    const PotentialField coul = build_potential(spec, 1.0);
    const PotentialField flat = PotentialField::uniform(-1.0);
    long iters = 0;
    const int sizes[] = {17, 33, 65};
    double em[3], el[3];
    for (int k = 0; k < 3; ++k) {
      em[k] = solve_error(sizes[k], coul, true, iters);
      el[k] = solve_error(sizes[k], flat, false, iters);
    }
    const double om1 = std::log2(em[0] / em[1]), om2 = std::log2(em[1] / em[2]);
    const double ol1 = std::log2(el[0] / el[1]), ol2 = std::log2(el[1] / el[2]);
    const double secs = timer.seconds();
    auto near2 = [](double o) { return std::abs(o - 2.0) <= 0.2; };
    r.passed = near2(om1) && near2(om2) && near2(ol1) && near2(ol2) && secs < 10.0;
    std::ostringstream d;
    d << "manufactured errors " << em[0] << ", " << em[1] << ", " << em[2] << " (orders " << om1
      << ", " << om2 << "); Laplace errors " << el[0] << ", " << el[1] << ", " << el[2]
      << " (orders " << ol1 << ", " << ol2 << "); " << iters << " sweeps, " << secs << " s";
    r.detail = d.str();
  });
}

CriterionResult hamiltonian_functional_gap() {
  Timer timer;
  CriterionResult r = start(10, "gap between the two string Hamiltonian functionals, 50 states");
  return guarded(r, timer, [&] {
    std::mt19937_64 rng(0x5eed0010);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), frac(0.1, 0.9), wmag(0.5, 2.0);
    double worst_identity = 0.0, min_gap = HUGE_VAL;
    for (int n = 0; n < 50; ++n) {
      StringState s = straight_string(48);
      const double a1 = 0.3 * unit(rng), a2 = 0.3 * unit(rng), a3 = 0.3 * unit(rng);
      for (int i = 0; i < s.grid.nodes; ++i) {
        const double x = s.grid.sigma(i);
        s.r[i] = {x, a1 * std::sin(M_PI * x) + a2 * std::sin(2.0 * M_PI * x),
                  a3 * std::sin(3.0 * M_PI * x)};
      }
      const std::vector<Vec3> rp = string_tangents(s.grid, s.r);
      const std::vector<double> w(s.grid.nodes, -wmag(rng));
      for (int i = 0; i < s.grid.nodes; ++i) {
        Vec3 v = orthogonal_projector(rp[i]).apply({unit(rng), unit(rng), unit(rng)});
        if (norm(v) < 1e-3) v = orthogonal_projector(rp[i]).apply({0.0, 0.0, 1.0});
        s.p[i] = v * (frac(rng) * std::abs(w[i]) * norm(rp[i]) / norm(v));
      }
      const double h = string_hamiltonian(s, w);
      const double alt = string_hamiltonian_alt(s, w);
      double identity = 0.0;
      for (int i = 0; i < s.grid.nodes; ++i) {
        identity += s.grid.weight(i) * std::sqrt(w[i] * w[i] * norm2(rp[i]) + norm2(s.p[i]));
      }
      worst_identity = std::max(worst_identity, std::abs(alt - identity) / identity);
      min_gap = std::min(min_gap, alt - h);
    }
    r.passed = min_gap > 0.0 && worst_identity < 1e-10;
    std::ostringstream d;
    d << "smallest gap " << min_gap << " (> 0), identity mismatch " << worst_identity
      << " (limit 1e-10); the two functionals are not equivalent";
    r.detail = d.str();
  });
}

}  // namespace vfl::checks
