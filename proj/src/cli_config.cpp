#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vfl/cli.hpp"
#include "vfl/errors.hpp"

namespace vfl::cli {

using nlohmann::json;

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Particle: return "particle";
    case ScenarioKind::String: return "string";
    case ScenarioKind::Conformal: return "conformal";
    case ScenarioKind::Audit: return "audit";
  }
  return "unknown";
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw ValidationError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
    }
  }
}

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

json object_or_empty(const json& obj, const char* key, const std::string& where) {
  const json* m = member(obj, key);
  if (!m) return json::object();
  if (!m->is_object()) throw ValidationError(where, "must be an object");
  return *m;
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  const json* m = member(obj, key);
  if (!m) return fallback;
  if (!m->is_number()) throw ValidationError(where, "must be a number");
  const double v = m->get<double>();
  if (!std::isfinite(v)) throw ValidationError(where, "must be finite");
  return v;
}

long integer(const json& obj, const char* key, const std::string& where, long fallback) {
  const json* m = member(obj, key);
  if (!m) return fallback;
  if (!m->is_number_integer()) throw ValidationError(where, "must be an integer");
  return m->get<long>();
}

std::string text(const json& obj, const char* key, const std::string& where,
                 const std::string& fallback) {
  const json* m = member(obj, key);
  if (!m) return fallback;
  if (!m->is_string()) throw ValidationError(where, "must be a string");
  return m->get<std::string>();
}

bool flag(const json& obj, const char* key, const std::string& where, bool fallback) {
  const json* m = member(obj, key);
  if (!m) return fallback;
  if (!m->is_boolean()) throw ValidationError(where, "must be true or false");
  return m->get<bool>();
}

Vec3 vec3(const json& obj, const char* key, const std::string& where, const Vec3& fallback) {
  const json* m = member(obj, key);
  if (!m) return fallback;
  if (!m->is_array() || m->size() != 3) throw ValidationError(where, "must be an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!(*m)[i].is_number()) throw ValidationError(where, "must be an array of 3 numbers");
    v[i] = (*m)[i].get<double>();
  }
  if (!is_finite(v)) throw ValidationError(where, "must be finite");
  return v;
}

Mat3 mat3(const json& obj, const char* key, const std::string& where) {
  Mat3 m;
  const json* j = member(obj, key);
  if (!j) return m;
  if (!j->is_array() || j->size() != 3) throw ValidationError(where, "must be a 3x3 array");
  for (int r = 0; r < 3; ++r) {
    const json& row = (*j)[r];
    if (!row.is_array() || row.size() != 3) throw ValidationError(where, "must be a 3x3 array");
    for (int c = 0; c < 3; ++c) {
      if (!row[c].is_number()) throw ValidationError(where, "must be a 3x3 array");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

template <class E>
E choice(const std::string& value, const std::string& where,
         const std::vector<std::pair<std::string, E>>& allowed) {
  std::vector<std::string> names;
  for (const auto& [name, e] : allowed) {
    if (name == value) return e;
    names.push_back(name);
  }
  throw ValidationError(where, "unknown value '" + value + "'; allowed: " + join(names));
}

const std::vector<std::pair<std::string, ModelKind>> kModels = {
    {"classical", ModelKind::Classical},
    {"constrained", ModelKind::Constrained},
    {"vacuum-free", ModelKind::VacuumFree},
    {"vacuum-interacting", ModelKind::VacuumInteracting}};

const std::vector<std::pair<std::string, Formulation>> kFormulations = {
    {"force-law", Formulation::ForceLaw}, {"canonical", Formulation::Canonical}};

const std::vector<std::pair<std::string, SourceKind>> kSources = {
    {"uniform", SourceKind::Uniform},
    {"coulomb-static", SourceKind::CoulombStatic},
    {"coulomb-comoving", SourceKind::CoulombComoving}};

const std::vector<std::pair<std::string, ScenarioKind>> kKinds = {
    {"particle", ScenarioKind::Particle},
    {"string", ScenarioKind::String},
    {"conformal", ScenarioKind::Conformal},
    {"audit", ScenarioKind::Audit}};

const std::vector<std::pair<std::string, Method>> kMethods = {{"rk4", Method::RK4},
                                                              {"rk45", Method::RK45}};

const std::vector<std::pair<std::string, Clock>> kClocks = {{"lab", Clock::Lab},
                                                            {"proper", Clock::Proper}};

template <class E>
std::string name_of(E e, const std::vector<std::pair<std::string, E>>& table) {
  for (const auto& [name, v] : table)
    if (v == e) return name;
  return "unknown";
}

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json to_json(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) a.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return a;
}

void parse_model(const json& root, ScenarioConfig& c) {
  const json m = object_or_empty(root, "model", "model");
  reject_unknown(m, "model", {"kind", "formulation", "charge", "rest_mass", "field_charge"});
  c.model = choice(text(m, "kind", "model.kind", "vacuum-free"), "model.kind", kModels);
  c.formulation =
      choice(text(m, "formulation", "model.formulation", "force-law"), "model.formulation",
             kFormulations);
  c.charge = number(m, "charge", "model.charge", 1.0);
  c.rest_mass = number(m, "rest_mass", "model.rest_mass", 1.0);
  c.field_charge = number(m, "field_charge", "model.field_charge", c.charge);
  if (c.formulation == Formulation::Canonical &&
      (c.model == ModelKind::Classical || c.model == ModelKind::Constrained)) {
    throw ValidationError("model.formulation",
                          "canonical formulation exists only for vacuum-free and vacuum-interacting");
  }
  if (!(c.rest_mass > 0.0)) throw ValidationError("model.rest_mass", "must be positive");
}

void parse_source(const json& root, ScenarioConfig& c) {
  const json s = object_or_empty(root, "source", "source");
  reject_unknown(s, "source", {"kind", "strength", "position", "velocity", "softening", "external"});
  SourceSpec& spec = c.source;
  spec.kind = choice(text(s, "kind", "source.kind", "uniform"), "source.kind", kSources);
  spec.strength = number(s, "strength", "source.strength", -1.0);
  spec.position = vec3(s, "position", "source.position", {});
  spec.velocity = vec3(s, "velocity", "source.velocity", {});
  spec.softening = number(s, "softening", "source.softening", kDefaultSoftening);
  const json e = object_or_empty(s, "external", "source.external");
  reject_unknown(e, "source.external", {"offset", "ramp", "gradient"});
  spec.external.offset = vec3(e, "offset", "source.external.offset", {});
  spec.external.ramp = vec3(e, "ramp", "source.external.ramp", {});
  spec.external.gradient = mat3(e, "gradient", "source.external.gradient");
  if (spec.kind == SourceKind::Uniform && !(spec.strength < 0.0)) {
    throw ValidationError("source.strength", "uniform W must be negative");
  }
  if (spec.softening < 0.0) throw ValidationError("source.softening", "must be nonnegative");
  if (norm2(spec.velocity) >= 1.0) throw ValidationError("source.velocity", "superluminal source velocity");
}

void parse_integration(const json& root, ScenarioConfig& c) {
  const json j = object_or_empty(root, "integration", "integration");
  reject_unknown(j, "integration",
                 {"step", "n_steps", "method", "rel_tol", "abs_tol", "audit_every", "clock"});
  IntegrationParams& p = c.integration;
  p.step = number(j, "step", "integration.step", 1e-3);
  p.n_steps = integer(j, "n_steps", "integration.n_steps", 1000);
  p.method = choice(text(j, "method", "integration.method", "rk4"), "integration.method", kMethods);
  p.rel_tol = number(j, "rel_tol", "integration.rel_tol", 1e-10);
  p.abs_tol = number(j, "abs_tol", "integration.abs_tol", 1e-12);
  p.audit_every = static_cast<int>(integer(j, "audit_every", "integration.audit_every", 1));
  const std::string natural = c.formulation == Formulation::Canonical ? "proper" : "lab";
  p.clock = choice(text(j, "clock", "integration.clock", natural), "integration.clock", kClocks);
  if (!(p.step > 0.0)) throw ValidationError("integration.step", "must be positive");
  if (p.n_steps <= 0) throw ValidationError("integration.n_steps", "must be positive");
  if (p.audit_every < 1) throw ValidationError("integration.audit_every", "must be >= 1");
  if (!(p.rel_tol > 0.0) || !(p.abs_tol > 0.0)) {
    throw ValidationError("integration.rel_tol", "tolerances must be positive");
  }
}

void parse_initial(const json& root, ScenarioConfig& c) {
  const json j = object_or_empty(root, "initial", "initial");
  reject_unknown(j, "initial", {"r", "u", "t", "tau"});
  c.r0 = vec3(j, "r", "initial.r", {});
  c.u0 = vec3(j, "u", "initial.u", {});
  c.t0 = number(j, "t", "initial.t", 0.0);
  c.tau0 = number(j, "tau", "initial.tau", 0.0);
  if (norm2(c.u0) >= 1.0) throw ValidationError("initial.u", "superluminal initial velocity");
}

void parse_string(const json& root, ScenarioConfig& c) {
  const json j = object_or_empty(root, "string", "string");
  reject_unknown(j, "string", {"nodes", "sigma", "length", "pluck"});
  StringSetup& s = c.string;
  s.grid.nodes = static_cast<int>(integer(j, "nodes", "string.nodes", 64));
  if (const json* sig = member(j, "sigma")) {
    if (!sig->is_array() || sig->size() != 2 || !(*sig)[0].is_number() || !(*sig)[1].is_number()) {
      throw ValidationError("string.sigma", "must be [begin, end]");
    }
    s.grid.sigma_begin = (*sig)[0].get<double>();
    s.grid.sigma_end = (*sig)[1].get<double>();
  }
  s.length = number(j, "length", "string.length", 1.0);
  const json pl = object_or_empty(j, "pluck", "string.pluck");
  reject_unknown(pl, "string.pluck", {"amplitude", "center", "width"});
  s.pluck_amplitude = number(pl, "amplitude", "string.pluck.amplitude", 0.0);
  s.pluck_center = number(pl, "center", "string.pluck.center", 0.5);
  s.pluck_width = number(pl, "width", "string.pluck.width", 0.1);
  if (s.grid.nodes < 8) throw ValidationError("string.nodes", "must be at least 8");
  if (!(s.grid.sigma_end > s.grid.sigma_begin)) throw ValidationError("string.sigma", "must increase");
  if (!(s.length > 0.0)) throw ValidationError("string.length", "must be positive");
  if (!(s.pluck_width > 0.0)) throw ValidationError("string.pluck.width", "must be positive");
}

void parse_conformal(const json& root, ScenarioConfig& c) {
  const json j = object_or_empty(root, "conformal", "conformal");
  reject_unknown(j, "conformal", {"n_sigma", "n_s", "sigma", "s", "boundary", "tol", "max_iters"});
  ConformalSetup& s = c.conformal;
  s.n_sigma = static_cast<int>(integer(j, "n_sigma", "conformal.n_sigma", 33));
  s.n_s = static_cast<int>(integer(j, "n_s", "conformal.n_s", 33));
  for (const char* key : {"sigma", "s"}) {
    const std::string where = std::string("conformal.") + key;
    if (const json* r = member(j, key)) {
      if (!r->is_array() || r->size() != 2 || !(*r)[0].is_number() || !(*r)[1].is_number()) {
        throw ValidationError(where, "must be [begin, end]");
      }
      const double a = (*r)[0].get<double>(), b = (*r)[1].get<double>();
      if (!(b > a)) throw ValidationError(where, "must increase");
      if (key[1] == 'i') {
        s.sigma0 = a;
        s.sigma1 = b;
      } else {
        s.s0 = a;
        s.s1 = b;
      }
    }
  }
  s.boundary = text(j, "boundary", "conformal.boundary", "exp");
  if (s.boundary != "exp" && s.boundary != "quadratic") {
    throw ValidationError("conformal.boundary", "unknown value '" + s.boundary +
                                                    "'; allowed: exp, quadratic");
  }
  s.tol = number(j, "tol", "conformal.tol", 1e-10);
  s.max_iters = integer(j, "max_iters", "conformal.max_iters", 100000);
  if (s.n_sigma < 3 || s.n_s < 3) throw ValidationError("conformal.n_sigma", "must be at least 3");
  if (!(s.tol > 0.0)) throw ValidationError("conformal.tol", "must be positive");
  if (s.max_iters < 1) throw ValidationError("conformal.max_iters", "must be positive");
}

}  // namespace

ScenarioConfig parse_config_text(std::string_view text_in, const std::string& origin) {
  json root;
  try {
    root = json::parse(text_in);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError(origin + ": top level must be an object");
  reject_unknown(root, "", {"name", "kind", "model", "source", "initial", "integration", "string",
                            "conformal", "output"});
  ScenarioConfig c;
  c.name = text(root, "name", "name", "");
  if (c.name.empty()) throw ValidationError("name", "required");
  c.kind = choice(text(root, "kind", "kind", "particle"), "kind", kKinds);
  parse_model(root, c);
  parse_source(root, c);
  parse_initial(root, c);
  parse_integration(root, c);
  if (c.kind == ScenarioKind::String) parse_string(root, c);
  if (c.kind == ScenarioKind::Conformal) parse_conformal(root, c);
  const json out = object_or_empty(root, "output", "output");
  reject_unknown(out, "output", {"dir", "long_format"});
  c.out_dir = text(out, "dir", "output.dir", "out/" + c.name);
  c.long_format = flag(out, "long_format", "output.long_format", true);

  // Physics checks that need the assembled pieces.
  try {
    c.field();
  } catch (const PhysicsError& e) {
    throw ValidationError("source", e.what());
  }
  if ((c.kind == ScenarioKind::Particle || c.kind == ScenarioKind::Audit) &&
      c.model != ModelKind::Classical && c.model != ModelKind::Constrained) {
    const PotentialField f = c.field();
    if (!(f.wbar(c.r0, c.t0) < 0.0)) throw ValidationError("initial.r", "W must be negative at r0");
  }
  return c;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

void apply_overrides(ScenarioConfig& c, const Overrides& o) {
  if (o.out) c.out_dir = *o.out;
  if (o.steps) {
    if (*o.steps <= 0) throw ValidationError("--steps", "must be positive");
    c.integration.n_steps = *o.steps;
  }
  if (o.step) {
    if (!(*o.step > 0.0)) throw ValidationError("--step", "must be positive");
    c.integration.step = *o.step;
  }
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw ValidationError("--tol", "must be positive");
    c.integration.rel_tol = *o.tol;
    c.conformal.tol = *o.tol;
  }
}

PotentialField ScenarioConfig::field() const { return build_potential(source, field_charge); }

ForceModel ScenarioConfig::force_model() const {
  ForceModel m;
  m.kind = model;
  m.formulation = formulation;
  m.field = field();
  m.charge = charge;
  m.rest_mass = rest_mass;
  return m;
}

json ScenarioConfig::effective() const {
  json j;
  j["name"] = name;
  j["kind"] = std::string(to_string(kind));
  j["model"] = {{"kind", name_of(model, kModels)},
                {"formulation", name_of(formulation, kFormulations)},
                {"charge", charge},
                {"rest_mass", rest_mass},
                {"field_charge", field_charge}};
  j["source"] = {{"kind", name_of(source.kind, kSources)},
                 {"strength", source.strength},
                 {"position", to_json(source.position)},
                 {"velocity", to_json(source.velocity)},
                 {"softening", source.softening},
                 {"external",
                  {{"offset", to_json(source.external.offset)},
                   {"ramp", to_json(source.external.ramp)},
                   {"gradient", to_json(source.external.gradient)}}}};
  j["initial"] = {{"r", to_json(r0)}, {"u", to_json(u0)}, {"t", t0}, {"tau", tau0}};
  j["integration"] = {{"step", integration.step},
                      {"n_steps", integration.n_steps},
                      {"method", name_of(integration.method, kMethods)},
                      {"rel_tol", integration.rel_tol},
                      {"abs_tol", integration.abs_tol},
                      {"audit_every", integration.audit_every},
                      {"clock", name_of(integration.clock, kClocks)}};
  if (kind == ScenarioKind::String) {
    j["string"] = {{"nodes", string.grid.nodes},
                   {"sigma", json::array({string.grid.sigma_begin, string.grid.sigma_end})},
                   {"length", string.length},
                   {"pluck",
                    {{"amplitude", string.pluck_amplitude},
                     {"center", string.pluck_center},
                     {"width", string.pluck_width}}}};
  }
  if (kind == ScenarioKind::Conformal) {
    j["conformal"] = {{"n_sigma", conformal.n_sigma},
                      {"n_s", conformal.n_s},
                      {"sigma", json::array({conformal.sigma0, conformal.sigma1})},
                      {"s", json::array({conformal.s0, conformal.s1})},
                      {"boundary", conformal.boundary},
                      {"tol", conformal.tol},
                      {"max_iters", conformal.max_iters}};
  }
  j["output"] = {{"dir", out_dir}, {"long_format", long_format}};
  return j;
}

}  // namespace vfl::cli
