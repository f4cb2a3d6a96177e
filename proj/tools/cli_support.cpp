#include "cli_support.hpp"

#include "dlcorr/lindblad.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace dlcorr::cli {

namespace {

double need_number(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ConfigError(std::string(where) + ": missing numeric field '" + key + "'");
  return obj[key].get<double>();
}

double opt_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string("field '") + key + "' must be numeric");
  return obj[key].get<double>();
}

int opt_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ConfigError(std::string("field '") + key + "' must be an integer");
  return obj[key].get<int>();
}

std::ofstream open_out(const std::string& out_dir, const std::string& name) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/" + name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + out_dir + "/" + name);
  return out;
}

json params_json(const ModelParams& p) {
  json j;
  j["k1"] = p.k1;
  j["k2"] = p.k2;
  j["kprime"] = p.kprime;
  j["tau"] = p.tau;
  j["inv_temp"] = p.inv_temp;
  j["n_sys"] = p.n_sys;
  j["n_bath"] = p.n_bath;
  return j;
}

json affine_json(const AffineConstraint& c) {
  json j;
  j["coeffs"] = std::vector<double>(c.coeffs.data(), c.coeffs.data() + c.coeffs.size());
  j["constant"] = c.constant;
  return j;
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

} // namespace

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");

  Config cfg;
  try {
    cfg.schema_version = opt_int(doc, "schema_version", 1);
    if (!doc.contains("model") || !doc["model"].is_object())
      throw ConfigError("config: missing 'model' object");
    const json& m = doc["model"];
    cfg.model.k1 = need_number(m, "k1", "model");
    cfg.model.k2 = need_number(m, "k2", "model");
    cfg.model.kprime = need_number(m, "kprime", "model");
    cfg.model.tau = need_number(m, "tau", "model");
    cfg.model.inv_temp = need_number(m, "inv_temp", "model");
    cfg.model.n_sys = opt_int(m, "n_sys", 12);
    cfg.model.n_bath = opt_int(m, "n_bath", 12);

    if (doc.contains("time")) {
      const json& t = doc["time"];
      cfg.t_final = opt_number(t, "t_final", cfg.t_final);
      cfg.dt = opt_number(t, "dt", cfg.dt);
      cfg.sample_every = opt_int(t, "sample_every", cfg.sample_every);
    }
    cfg.interior_exclude = opt_int(doc, "interior_exclude", 2);
    if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();

    if (doc.contains("tolerances")) {
      const json& t = doc["tolerances"];
      cfg.monitor_limits.trace_drift =
          opt_number(t, "trace_drift", cfg.monitor_limits.trace_drift);
      cfg.monitor_limits.hermiticity =
          opt_number(t, "hermiticity", cfg.monitor_limits.hermiticity);
      cfg.monitor_limits.min_eigenvalue =
          opt_number(t, "min_eigenvalue", cfg.monitor_limits.min_eigenvalue);
    }

    if (doc.contains("sweep")) {
      const json& s = doc["sweep"];
      SweepSettings sweep;
      if (!s.contains("name") || !s["name"].is_string() || !s.contains("values") ||
          !s["values"].is_array())
        throw ConfigError("sweep: expected {name, values}");
      sweep.name = s["name"].get<std::string>();
      for (const auto& v : s["values"]) {
        if (!v.is_number()) throw ConfigError("sweep: values must be numeric");
        sweep.values.push_back(v.get<double>());
      }
      cfg.sweep = sweep;
    }

    if (doc.contains("mode")) {
      cfg.mode = doc["mode"].get<std::string>();
      if (cfg.mode != "physical" && cfg.mode != "synthetic")
        throw ConfigError("mode must be 'physical' or 'synthetic'");
    }
    cfg.synthetic_alpha = opt_number(doc, "synthetic_alpha", cfg.synthetic_alpha);
    cfg.candidate = opt_int(doc, "candidate", -1);

    if (doc.contains("evolve")) {
      const json& e = doc["evolve"];
      cfg.evolve.lindblad = e.value("lindblad", true);
      cfg.evolve.exact = e.value("exact", true);
      if (e.contains("initial")) {
        const json& ini = e["initial"];
        cfg.evolve.initial_type = ini.value("type", std::string("fock"));
        cfg.evolve.initial_n = opt_int(ini, "n", 1);
        cfg.evolve.initial_alpha =
            Complex(opt_number(ini, "alpha_re", 0.5), opt_number(ini, "alpha_im", 0.0));
        cfg.evolve.initial_inv_temp = opt_number(ini, "inv_temp", 1.0);
      }
    }

    if (doc.contains("constraints")) cfg.constraints_spec = doc["constraints"];
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }

  try {
    cfg.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config model invalid: ") + e.what());
  }
  if (!(cfg.dt > 0.0) || !(cfg.t_final >= 0.0) || cfg.sample_every < 1)
    throw ConfigError("config time grid invalid");
  return cfg;
}

ModelParams with_sweep_value(const ModelParams& base, const std::string& name, double value) {
  ModelParams p = base;
  if (name == "tau")
    p.tau = value;
  else if (name == "kprime")
    p.kprime = value;
  else if (name == "k1")
    p.k1 = value;
  else if (name == "k2")
    p.k2 = value;
  else if (name == "inv_temp")
    p.inv_temp = value;
  else
    throw ConfigError("unknown sweep axis '" + name + "'");
  p.validate();
  return p;
}

int cmd_constraints(const Config& cfg, const std::string& out_dir) {
  const json& spec = cfg.constraints_spec;
  if (!spec.is_object()) throw ConfigError("constraints: missing 'constraints' block");
  const int n_dof = opt_int(spec, "n_dof", 2);
  if (n_dof < 1) throw ConfigError("constraints: n_dof must be >= 1");
  const PhaseLayout layout = PhaseLayout::make(n_dof);

  PolyObservable h(layout);
  if (!spec.contains("hamiltonian")) throw ConfigError("constraints: missing 'hamiltonian'");
  const json& ham = spec["hamiltonian"];
  if (ham.is_object() && ham.value("coupled_oscillator", false)) {
    if (n_dof != 2) throw ConfigError("constraints: coupled_oscillator needs n_dof = 2");
    h = model_hamiltonian(cfg.model);
  } else if (ham.is_object() && ham.contains("terms") && ham["terms"].is_array()) {
    for (const auto& term : ham["terms"]) {
      if (!term.is_array() || term.size() != 2 || !term[0].is_number() || !term[1].is_array())
        throw ConfigError("constraints: hamiltonian terms must be [coeff, [exponents]]");
      std::vector<int> mono;
      for (const auto& e : term[1]) mono.push_back(e.get<int>());
      if (static_cast<int>(mono.size()) != layout.dim())
        throw ConfigError("constraints: exponent vector length must be 2 n_dof");
      h.add_term(mono, term[0].get<double>());
    }
  } else {
    throw ConfigError("constraints: hamiltonian must supply 'terms' or 'coupled_oscillator'");
  }

  std::vector<AffineConstraint> primaries;
  if (!spec.contains("primaries") || !spec["primaries"].is_array())
    throw ConfigError("constraints: missing 'primaries' array");
  for (const auto& p : spec["primaries"]) {
    if (!p.is_object() || !p.contains("coeffs") || !p["coeffs"].is_array())
      throw ConfigError("constraints: each primary needs a 'coeffs' array");
    VectorXd coeffs(layout.dim());
    if (static_cast<int>(p["coeffs"].size()) != layout.dim())
      throw ConfigError("constraints: coeffs length must be 2 n_dof");
    for (int k = 0; k < layout.dim(); ++k) coeffs[k] = p["coeffs"][k].get<double>();
    primaries.emplace_back(coeffs, opt_number(p, "constant", 0.0));
  }

  const ConstraintSystem cs = consistency_chain(h, primaries);

  json rep;
  rep["schema_version"] = 1;
  rep["n_dof"] = n_dof;
  rep["variables"] = layout.names;
  rep["primaries"] = json::array();
  for (const auto& c : cs.primaries) rep["primaries"].push_back(affine_json(c));
  rep["secondaries"] = json::array();
  for (const auto& c : cs.secondaries) rep["secondaries"].push_back(affine_json(c));
  rep["multipliers"] = json::array();
  for (const auto& lam : cs.multipliers) {
    json m;
    m["solved"] = lam.has_value();
    if (lam.has_value()) {
      json terms = json::array();
      for (const auto& [mono, coeff] : lam->terms()) {
        json t;
        t["coefficient"] = coeff;
        t["exponents"] = mono;
        terms.push_back(t);
      }
      m["terms"] = terms;
    }
    rep["multipliers"].push_back(m);
  }
  rep["c_matrix"] = matrix_json(cs.c_matrix);
  rep["d_matrix"] = matrix_json(cs.d_matrix);
  rep["first_class"] = cs.first_class_idx;
  rep["second_class"] = cs.second_class_idx;

  auto out = open_out(out_dir, "constraints_report.json");
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_gamma(const Config& cfg, const std::string& out_dir) {
  auto out = open_out(out_dir, "gamma.csv");
  out << "sweep_name,sweep_value,re_g11,im_g11,re_g22,im_g22,re_g12,im_g12,re_g21,im_g21,"
         "gamma11_limit,mismatch_rel,limit_vs_full_rel,tau_bath,tau_unitary,tau_relax\n";

  std::vector<std::pair<std::string, double>> points;
  if (cfg.sweep) {
    for (double v : cfg.sweep->values) points.emplace_back(cfg.sweep->name, v);
  } else {
    points.emplace_back("none", 0.0);
  }

  for (const auto& [name, value] : points) {
    const ModelParams p = name == "none" ? cfg.model : with_sweep_value(cfg.model, name, value);
    const MatrixXc g = model_gamma_entries(p);
    const LimitReport lim = dissipation_limit(p);
    out << name << "," << fmt17(value);
    for (const auto& entry : {g(0, 0), g(1, 1), g(0, 1), g(1, 0)})
      out << "," << fmt17(entry.real()) << "," << fmt17(entry.imag());
    out << "," << fmt17(lim.gamma11_limit) << "," << fmt17(lim.mismatch_rel) << ","
        << fmt17(lim.limit_vs_full_rel) << "," << fmt17(lim.tau_bath) << ","
        << fmt17(lim.tau_unitary) << "," << fmt17(lim.tau_relax) << "\n";
  }
  return 0;
}

namespace {

json report_json(const CorrespondenceReport& rep, const std::string& mode) {
  json j;
  j["schema_version"] = 1;
  j["mode"] = mode;
  j["degenerate"] = rep.degenerate;
  j["note"] = rep.note;
  j["params"] = params_json(rep.params);
  j["alpha_used"] = rep.alpha_used;
  j["eta_used"] = rep.eta_used;
  j["chosen_candidate"] = rep.chosen;
  json cands = json::array();
  for (const auto& c : rep.solution.candidates) {
    json cj;
    cj["source"] = c.source;
    cj["real"] = c.real;
    cj["radicand"] = std::isfinite(c.radicand) ? json(c.radicand) : json(nullptr);
    cj["alpha"] = c.real ? json(c.alpha) : json(nullptr);
    cj["eta"] = c.real ? json(c.eta) : json(nullptr);
    cj["r5"] = c.real ? json(c.r5) : json(nullptr);
    cj["r6"] = c.real ? json(c.r6) : json(nullptr);
    cj["r7"] = c.real ? json(c.r7) : json(nullptr);
    cands.push_back(cj);
  }
  j["candidates"] = cands;
  json res;
  res["c1"] = rep.c_residual[0];
  res["c2"] = rep.c_residual[1];
  res["c3"] = rep.c_residual[2];
  res["c4"] = rep.c_residual[3];
  res["c5"] = rep.c5_residual;
  res["c6"] = rep.c6_residual;
  res["c7"] = rep.c7_residual;
  res["c5c6_minus_c7sq"] = rep.c5c6_minus_c7sq;
  res["operator_gap_rel"] = rep.operator_gap_rel;
  res["gamma_limit_mismatch"] = rep.gamma_limit_mismatch;
  res["weak_term_norm"] = rep.weak_term_norm;
  res["weak_term_low_block"] = rep.weak_term_low_block;
  j["residuals"] = res;
  json ld;
  ld["residual_half_factor"] = rep.lind_dissi.residual_half_factor;
  ld["residual_full_factor"] = rep.lind_dissi.residual_full_factor;
  ld["preferred"] = rep.lind_dissi.preferred;
  j["lind_dissi"] = ld;
  return j;
}

} // namespace

int cmd_correspond(const Config& cfg, const std::string& out_dir) {
  VerifyOptions opts;
  opts.synthetic = cfg.mode == "synthetic";
  opts.synthetic_alpha = cfg.synthetic_alpha;
  opts.candidate = cfg.candidate;
  opts.n_sys = cfg.model.n_sys;
  opts.interior_exclude = cfg.interior_exclude;

  const CorrespondenceReport rep = verify(cfg.model, opts);
  auto out = open_out(out_dir, "correspondence_report.json");
  out << report_json(rep, cfg.mode).dump(2) << "\n";

  if (cfg.sweep) {
    auto csv = open_out(out_dir, "correspondence_sweep.csv");
    csv << "sweep_name,sweep_value,operator_gap_rel,c5c6_minus_c7sq,gamma_limit_mismatch,"
           "weak_term_norm,alpha_used\n";
    for (double v : cfg.sweep->values) {
      const ModelParams p = with_sweep_value(cfg.model, cfg.sweep->name, v);
      const CorrespondenceReport r = verify(p, opts);
      csv << cfg.sweep->name << "," << fmt17(v) << "," << fmt17(r.operator_gap_rel) << ","
          << fmt17(r.c5c6_minus_c7sq) << "," << fmt17(r.gamma_limit_mismatch) << ","
          << fmt17(r.weak_term_norm) << "," << fmt17(r.alpha_used) << "\n";
    }
  }
  return 0;
}

namespace {

MatrixXc initial_state(const Config& cfg) {
  const int n = cfg.model.n_sys;
  const EvolveSettings& e = cfg.evolve;
  if (e.initial_type == "fock") {
    if (e.initial_n < 0 || e.initial_n >= n)
      throw ConfigError("evolve: initial fock level out of range");
    MatrixXc rho = MatrixXc::Zero(n, n);
    rho(e.initial_n, e.initial_n) = 1.0;
    return rho;
  }
  if (e.initial_type == "coherent") {
    VectorXc psi(n);
    double log_fact = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m > 0) log_fact += std::log(static_cast<double>(m));
      psi[m] = std::pow(e.initial_alpha, m) * std::exp(-0.5 * log_fact);
    }
    psi *= std::exp(-0.5 * std::norm(e.initial_alpha));
    psi /= psi.norm();
    return psi * psi.adjoint();
  }
  if (e.initial_type == "thermal") {
    try {
      return thermal_state(cfg.model.system_spec(), 0, e.initial_inv_temp);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("evolve: ") + err.what());
    }
  }
  throw ConfigError("evolve: unknown initial state type '" + e.initial_type + "'");
}

} // namespace

int cmd_evolve(const Config& cfg, const std::string& out_dir) {
  if (!cfg.evolve.lindblad && !cfg.evolve.exact)
    throw ConfigError("evolve: at least one of lindblad/exact must be enabled");
  const MatrixXc rho0 = initial_state(cfg);
  const int n = cfg.model.n_sys;
  MatrixXc n_op = MatrixXc::Zero(n, n);
  for (int m = 0; m < n; ++m) n_op(m, m) = static_cast<double>(m);
  MatrixXc h_sys = MatrixXc::Zero(n, n);
  for (int m = 0; m < n; ++m) h_sys(m, m) = cfg.model.omega0() * (m + 0.5);

  std::vector<double> times;
  std::vector<MatrixXc> lindblad_states;
  if (cfg.evolve.lindblad) {
    GksGenerator gen = build_generator(h_sys, MatrixXc(), dissipation_matrix_model(cfg.model));
    MasterTrajectory traj = evolve_master(gen, rho0, cfg.t_final, cfg.dt, cfg.sample_every,
                                          cfg.monitor_limits);
    times = traj.times;
    lindblad_states = std::move(traj.states);
  } else {
    const int n_steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
    times.push_back(0.0);
    for (int k = 1; k <= n_steps; ++k)
      if (k % cfg.sample_every == 0 || k == n_steps) times.push_back(k * cfg.dt);
  }

  std::vector<MatrixXc> exact_states;
  if (cfg.evolve.exact) {
    ExactReducedDynamics dyn(cfg.model);
    for (double t : times) {
      const auto [ps, pb] = dyn.top_level_population(rho0, t);
      if (ps > 1e-6 || pb > 1e-6)
        throw TruncationError("evolve: top-level population breach at t = " + fmt17(t) +
                              " (system " + fmt17(ps) + ", bath " + fmt17(pb) +
                              "); increase n_sys/n_bath");
      exact_states.push_back(dyn.reduced_state(rho0, t, false));
    }
  }

  auto out = open_out(out_dir, "evolve.csv");
  out << "time,trace,purity,n_expect,min_eigenvalue,trace_distance_to_exact\n";
  for (size_t k = 0; k < times.size(); ++k) {
    const MatrixXc& state = cfg.evolve.lindblad ? lindblad_states[k] : exact_states[k];
    const InvariantReport rep = monitor_invariants(state);
    double dist = std::numeric_limits<double>::quiet_NaN();
    if (cfg.evolve.lindblad && cfg.evolve.exact)
      dist = trace_distance(lindblad_states[k], exact_states[k]);
    out << fmt17(times[k]) << "," << fmt17(rep.trace.real()) << "," << fmt17(rep.purity) << ","
        << fmt17((n_op * state).trace().real()) << "," << fmt17(rep.min_eigenvalue) << ","
        << fmt17(dist) << "\n";
  }
  return 0;
}

} // namespace dlcorr::cli
