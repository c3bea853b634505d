#include <cmath>
#include <functional>

#include "cli_internal.hpp"
#include "vfl/errors.hpp"
#include "vfl/variational.hpp"

namespace vfl::cli {

using nlohmann::json;
using detail::Csv;

namespace {

namespace fs = std::filesystem;

void run_particle(const ScenarioConfig& c, RunManifest& m, const fs::path& dir) {
  const ForceModel model = c.force_model();
  const ParticleState s0 = make_initial_state(model, c.r0, c.u0, c.t0, c.tau0);
  const Trajectory traj = integrate_particle(model, s0, c.integration);

  Csv csv("step,tau,t,rx,ry,rz,px,py,pz,wbar,energy");
  Csv lng("step,tau,t,variable,value");
  static const char* names[] = {"rx", "ry", "rz", "px", "py", "pz", "wbar", "energy"};
  for (const TrajectorySample& s : traj.samples) {
    const ParticleState& p = s.state;
    const double w = model.field.wbar(p.r, p.t);
    const double e = reported_energy(p, model);
    csv.row({double(s.step), p.tau, p.t, p.r.x, p.r.y, p.r.z, p.p.x, p.p.y, p.p.z, w, e});
    if (c.long_format) {
      const double vals[] = {p.r.x, p.r.y, p.r.z, p.p.x, p.p.y, p.p.z, w, e};
      for (int k = 0; k < 8; ++k) {
        lng.cells({std::to_string(s.step), format_double(p.tau), format_double(p.t), names[k],
                   format_double(vals[k])});
      }
    }
  }
  detail::add_output(m, dir, "trajectory.csv", csv.text);
  if (c.long_format) detail::add_output(m, dir, "trajectory_long.csv", lng.text);
  detail::add_output(m, dir, "report.csv", detail::report_csv(traj.report));
  m.report = detail::report_json(traj.report);
  m.report["model"] = std::string(to_string(c.model));
  m.report["formulation"] = std::string(to_string(c.formulation));
  m.report["rejected_steps"] = traj.rejected_steps;
}

StringState initial_string(const ScenarioConfig& c) {
  StringState s;
  s.grid = c.string.grid;
  s.grid.validate();
  const int n = s.grid.nodes;
  s.r.resize(n);
  s.p.resize(n);
  s.tau = c.tau0;
  const double span = s.grid.sigma_end - s.grid.sigma_begin;
  for (int i = 0; i < n; ++i) {
    const double sig = s.grid.sigma(i);
    s.r[i] = {c.string.length * (sig - s.grid.sigma_begin) / span, 0.0, 0.0};
    if (i > 0 && i < n - 1) {
      const double z = (sig - c.string.pluck_center) / c.string.pluck_width;
      s.p[i] = {0.0, c.string.pluck_amplitude * std::exp(-0.5 * z * z), 0.0};
    }
  }
  return s;
}

void run_string(const ScenarioConfig& c, RunManifest& m, const fs::path& dir) {
  const PotentialField field = c.field();
  const StringState s0 = initial_string(c);
  const StringTrajectory traj = integrate_string(s0, field, c.integration);

  Csv csv("tau,node,sigma,rx,ry,rz,px,py,pz,h_density");
  for (const StringSample& smp : traj.samples) {
    const StringState& s = smp.state;
    const std::vector<double> h = hamiltonian_density(s, sample_wbar(s, field));
    for (int i = 0; i < s.grid.nodes; ++i) {
      csv.row({s.tau, double(i), s.grid.sigma(i), s.r[i].x, s.r[i].y, s.r[i].z, s.p[i].x,
               s.p[i].y, s.p[i].z, h[i]});
    }
  }
  detail::add_output(m, dir, "string.csv", csv.text);
  detail::add_output(m, dir, "report.csv", detail::report_csv(traj.report));
  m.report = detail::report_json(traj.report);
  const double horizon = c.integration.horizon();
  if (const InvariantStats* t = traj.report.find("transversality_defect")) {
    m.report["transversality_growth_per_tau"] = t->max_abs_drift / horizon;
  }
}

EuclideanEvent boundary_function(const std::string& kind, double sigma, double s) {
  if (kind == "quadratic") return {{sigma * sigma - s * s, 2.0 * sigma * s, 0.0}, 0.0};
  return {{std::exp(sigma) * std::cos(s), std::exp(sigma) * std::sin(s), 0.0}, 0.0};
}

void run_conformal(const ScenarioConfig& c, RunManifest& m, const fs::path& dir) {
  const ConformalSetup& cs = c.conformal;
  const PotentialField field = c.field();
  ConformalPatch patch = ConformalPatch::make(cs.n_sigma, cs.n_s, cs.sigma0, cs.sigma1, cs.s0, cs.s1);
  auto g = [&](double a, double b) { return boundary_function(cs.boundary, a, b); };
  patch.fill_boundary(g);
  ConformalSolveOptions opt;
  opt.max_iters = cs.max_iters;
  const ConformalSolution sol = solve_conformal(patch, field, cs.tol, opt);

  ConformalOptions ro;
  ro.check_gauge = false;
  const std::vector<EuclideanEvent> res = conformal_residual(sol.patch, field, ro);
  Csv csv("i,j,sigma,s,xi_x,xi_y,xi_z,xi_tau,residual");
  double err = 0.0;
  for (int j = 0; j < sol.patch.n_s; ++j) {
    for (int i = 0; i < sol.patch.n_sigma; ++i) {
      const EuclideanEvent& x = sol.patch.at(i, j);
      const double a = sol.patch.sigma(i), b = sol.patch.s(j);
      err = std::max(err, euclidean_norm(x - g(a, b)));
      csv.row({double(i), double(j), a, b, x.r.x, x.r.y, x.r.z, x.tau,
               euclidean_norm(res[static_cast<size_t>(j) * sol.patch.n_sigma + i])});
    }
  }
  detail::add_output(m, dir, "conformal.csv", csv.text);
  const GaugeResidual gr = gauge_residual(sol.patch);
  m.report = {{"iterations", sol.iterations},
              {"final_residual", sol.final_residual},
              {"max_deviation_from_boundary_function", err},
              {"gauge_orthogonality", gr.orthogonality},
              {"gauge_norm_mismatch", gr.norm_mismatch}};
}

LagrangianKind lagrangian_for(ModelKind k) {
  switch (k) {
    case ModelKind::Classical: return LagrangianKind::ClassicalPoint;
    case ModelKind::Constrained: return LagrangianKind::ConstrainedPoint;
    case ModelKind::VacuumFree: return LagrangianKind::VacuumFreePoint;
    case ModelKind::VacuumInteracting: return LagrangianKind::VacuumInteractingPoint;
  }
  return LagrangianKind::VacuumFreePoint;
}

void run_audit(const ScenarioConfig& c, RunManifest& m, const fs::path& dir) {
  ScenarioConfig cfg = c;
  cfg.integration.audit_every = 1;
  // The classical Lagrangian is parameterized by t, the others by tau.
  cfg.integration.clock = c.model == ModelKind::Classical ? Clock::Lab : Clock::Proper;
  const ForceModel model = cfg.force_model();
  const ParticleState s0 = make_initial_state(model, cfg.r0, cfg.u0, cfg.t0, cfg.tau0);
  const Trajectory traj = integrate_particle(model, s0, cfg.integration);

  const bool by_t = cfg.integration.clock == Clock::Lab;
  DiscretePath path;
  for (const TrajectorySample& s : traj.samples) {
    path.r.push_back(s.state.r);
    if (!by_t) path.t.push_back(s.state.t);
  }
  const ParticleState& first = traj.samples.front().state;
  const ParticleState& last = traj.samples.back().state;
  path.s0 = by_t ? first.t : first.tau;
  path.s1 = by_t ? last.t : last.tau;

  LagrangianSpec spec;
  spec.kind = lagrangian_for(c.model);
  spec.rest_mass = c.rest_mass;
  spec.charge = c.charge;
  spec.multiplier = c.rest_mass;
  spec.field = model.field;

  const std::vector<Vec3> el = euler_lagrange_residual(spec, path);
  const LegendreReport leg = legendre_transform_check(spec, path);
  Csv csv("node,param,el_residual,legendre_numeric,legendre_particle");
  for (int i = 0; i < path.size(); ++i) {
    csv.row({double(i), path.parameter(i), norm(el[i]), leg.samples[i].numeric,
             leg.samples[i].particle});
  }
  detail::add_output(m, dir, "audit.csv", csv.text);
  m.report = {{"lagrangian", std::string(to_string(spec.kind))},
              {"max_el_residual", max_norm(el)},
              {"legendre_max_error", leg.max_abs_error},
              {"legendre_passed", leg.passed}};
  if (c.model == ModelKind::Constrained) {
    const MultiplierReport mr = multiplier_consistency(path, c.rest_mass);
    m.report["multiplier_mean"] = mr.mean;
    m.report["multiplier_spread"] = mr.spread;
    m.report["multiplier_constant"] = mr.constant;
  }
}

RunManifest execute(const ScenarioConfig& c, const std::function<void(RunManifest&, const fs::path&)>& body) {
  RunManifest m;
  m.name = c.name;
  m.config_hash = config_hash(c);
  m.timestamp = detail::timestamp_now();
  m.defaults = detail::defaults_json(c);
  const fs::path dir = c.out_dir;
  try {
    fs::create_directories(dir);
    body(m, dir);
  } catch (const std::exception& e) {
    m.exit_status = exit_code_for(e);
    m.error = e.what();
  }
  detail::finish(m, dir);
  return m;
}

}  // namespace

std::string_view lagrangian_name_for(ModelKind kind) { return to_string(lagrangian_for(kind)); }

RunManifest run_scenario(const ScenarioConfig& c) {
  return execute(c, [&](RunManifest& m, const fs::path& dir) {
    switch (c.kind) {
      case ScenarioKind::Particle: run_particle(c, m, dir); break;
      case ScenarioKind::String: run_string(c, m, dir); break;
      case ScenarioKind::Conformal: run_conformal(c, m, dir); break;
      case ScenarioKind::Audit: run_audit(c, m, dir); break;
    }
  });
}

RunManifest audit_scenario(const ScenarioConfig& c) {
  if (c.kind != ScenarioKind::Particle && c.kind != ScenarioKind::Audit) {
    throw ValidationError("kind", "audit needs a particle scenario");
  }
  return execute(c, [&](RunManifest& m, const fs::path& dir) { run_audit(c, m, dir); });
}

RunManifest compare_models(const std::vector<ScenarioConfig>& configs, Alignment alignment,
                           const std::string& out_dir) {
  if (configs.size() < 2) throw ValidationError("compare", "needs at least two scenarios");
  ScenarioConfig head = configs.front();
  head.out_dir = out_dir;
  std::string joined;
  for (const ScenarioConfig& c : configs) joined += config_hash(c);

  RunManifest m = execute(head, [&](RunManifest& man, const fs::path& dir) {
    const ScenarioConfig& ref = configs.front();
    for (const ScenarioConfig& c : configs) {
      if (c.kind != ScenarioKind::Particle) {
        throw ValidationError(c.name + ".kind", "compare needs particle scenarios");
      }
      if (norm(c.r0 - ref.r0) > 0.0 || norm(c.u0 - ref.u0) > 0.0 || c.t0 != ref.t0) {
        throw PhysicsError(ErrorCode::MisalignedScenarios,
                           c.name + " starts from different kinematics than " + ref.name);
      }
      if (c.integration.step != ref.integration.step ||
          c.integration.n_steps != ref.integration.n_steps ||
          c.integration.audit_every != ref.integration.audit_every) {
        throw PhysicsError(ErrorCode::MisalignedScenarios,
                           c.name + " uses a different step grid than " + ref.name);
      }
    }
    const Clock clock = alignment == Alignment::ByT ? Clock::Lab : Clock::Proper;
    std::vector<ForceModel> models;
    std::vector<Trajectory> trajs;
    for (const ScenarioConfig& c : configs) {
      ScenarioConfig cc = c;
      cc.integration.clock = clock;
      models.push_back(cc.force_model());
      const ParticleState s0 = make_initial_state(models.back(), cc.r0, cc.u0, cc.t0, cc.tau0);
      trajs.push_back(integrate_particle(models.back(), s0, cc.integration));
    }

    Csv csv("model,step,t,tau,distance,momentum_gap,fc_norm");
    json summary = json::object();
    const Trajectory& rt = trajs.front();
    for (size_t k = 0; k < trajs.size(); ++k) {
      const Trajectory& tk = trajs[k];
      if (tk.samples.size() != rt.samples.size()) {
        throw PhysicsError(ErrorCode::MisalignedScenarios, "sample counts differ");
      }
      double dmax = 0.0, gmax = 0.0, fmax = 0.0;
      for (size_t i = 0; i < tk.samples.size(); ++i) {
        const ParticleState& a = rt.samples[i].state;
        const ParticleState& b = tk.samples[i].state;
        const double pa = alignment == Alignment::ByT ? a.t : a.tau;
        const double pb = alignment == Alignment::ByT ? b.t : b.tau;
        if (std::abs(pa - pb) > 1e-9 * std::max(1.0, std::abs(pa))) {
          throw PhysicsError(ErrorCode::MisalignedScenarios, "sample parameters differ");
        }
        const PotentialField& f = models[k].field;
        const double w = f.wbar(b.r, b.t);
        const double gap = w < 0.0 && norm2(b.u) < 1.0
                               ? norm(classical_momentum(b.rest_mass, b.u) - vacuum_momentum(w, b.u))
                               : NAN;
        const double fc = norm(interaction_extra_force(models[k].charge, b.u, f, b.r, b.t));
        const double d = norm(b.r - a.r);
        dmax = std::max(dmax, d);
        if (std::isfinite(gap)) gmax = std::max(gmax, gap);
        fmax = std::max(fmax, fc);
        csv.cells({configs[k].name, std::to_string(tk.samples[i].step), format_double(b.t),
                   format_double(b.tau), format_double(d), format_double(gap), format_double(fc)});
      }
      summary[configs[k].name] = {{"max_distance", dmax}, {"max_momentum_gap", gmax},
                                  {"max_fc_norm", fmax}};
    }
    detail::add_output(man, dir, "compare.csv", csv.text);
    man.report = {{"alignment", alignment == Alignment::ByT ? "by_t" : "by_tau"},
                  {"reference", ref.name},
                  {"models", summary}};
  });
  m.name = "compare";
  m.config_hash = fnv1a64_hex(joined);
  detail::finish(m, out_dir);
  return m;
}

}  // namespace vfl::cli
