#include "sgad/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "sgad/acshear.hpp"
#include "sgad/errors.hpp"
#include "sgad/field_io.hpp"
#include "sgad/gad.hpp"
#include "sgad/multiscale.hpp"
#include "sgad/stability.hpp"
#include "sgad/vectorfield.hpp"

namespace sgad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Files written by one run, in creation order; the manifest lists them.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    names_.push_back(name);
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
    os << std::setprecision(17);
    return os;
  }

  void json_file(const std::string& name, const json& j) { open(name) << j.dump(2) << "\n"; }

  void field(const std::string& name, const Field2D& f) {
    names_.push_back(name);
    save_field(dir_ / name, f);
  }

  void manifest(const RunConfig& cfg) {
    std::ofstream os(dir_ / "run.manifest", std::ios::binary);
    os << cfg.to_manifest(names_);
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string deterministic_model_name(const std::string& model) {
  return model == "example2-slowfast" ? "example2-effective" : model;
}

bool is_point_name(const std::string& s) {
  return s == "m1" || s == "m2" || s == "m3" || s == "s" || s == "s1" || s == "s2";
}

Vector resolve_point(const RunConfig& cfg, const std::string& key, const std::string& model) {
  const std::string text = cfg.text(key);
  if (is_point_name(text)) {
    try {
      return named_point(model, text);
    } catch (const InvalidArgument& e) {
      throw ConfigError(key, e.what());
    }
  }
  Vector x = cfg.reals(key);
  if (x.size() != 2) throw ConfigError(key, "expected 2 components, got " + std::to_string(x.size()));
  return x;
}

Vector resolve_direction(const RunConfig& cfg, const std::string& key, std::size_t dim) {
  Vector v = cfg.reals(key);
  if (v.size() != dim) throw ConfigError(key, "expected " + std::to_string(dim) + " components");
  if (norm2(v) == 0.0) throw ConfigError(key, "must be non-zero");
  return v;
}

VectorFieldModel deterministic_model(const RunConfig& cfg) {
  const std::string name = cfg.text("model");
  if (name == "example2-slowfast")
    throw ConfigError("model", "example2-slowfast is stochastic; use run-msgad or example2-effective");
  return model_by_name(name);
}

json report_saddle(const SaddleResult& r) {
  json j;
  j["x_star"] = r.x_star;
  j["dir_star"] = r.dir_star.components;
  j["residual_inf"] = r.residual;
  j["steps"] = r.steps;
  j["converged"] = r.converged;
  j["eigen_estimate"] = r.eigen_estimate;
  j["blowup_step"] = r.blowup_step ? json(*r.blowup_step) : json(nullptr);
  return j;
}

int run_gad(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
  const VectorFieldModel model = deterministic_model(cfg);
  const Dynamics dynamics = parse_dynamics(cfg.text("dynamics"));
  const Vector x0 = resolve_point(cfg, "x0", model.name);
  const Vector v0 = resolve_direction(cfg, "v0", model.dim);

  GadOptions opts;
  opts.dt = cfg.real("dt");
  opts.max_steps = cfg.count("max_steps");
  opts.residual_tol = cfg.real("residual_tol");
  opts.relaxation = cfg.real("relaxation");
  opts.kick = cfg.optional_real("kick");
  opts.record_every = cfg.count("record_every");
  opts.stop_on_blowup = dynamics == Dynamics::Hamilton;

  Stopwatch clock;
  const SaddleResult r = find_saddle(model, x0, v0, opts, dynamics);
  log << to_string(dynamics) << " on " << model.name << ": " << (r.converged ? "converged" : "not converged")
      << " after " << r.steps << " steps, x = (" << r.x_star[0] << ", " << r.x_star[1]
      << "), |b|_inf = " << r.residual << " [" << clock.seconds() << " s]\n";

  {
    auto os = out.open("trajectory.csv");
    write_trajectory_csv(os, r.trajectory, model.dim);
  }

  json j = report_saddle(r);
  j["model"] = model.name;
  j["dynamics"] = to_string(dynamics);
  j["x0"] = x0;
  j["v0"] = v0;
  if (dynamics == Dynamics::Hamilton) {
    double h_max = 0.0;
    for (const auto& row : r.trajectory)
      if (all_finite(row.x) && all_finite(row.dir))
        h_max = std::max(h_max, std::abs(reconstruct_hamiltonian(model, row.x, row.dir)));
    j["max_abs_hamiltonian"] = h_max;
  }
  if (r.converged) {
    const FixedPointReport fp = classify_fixed_point(model, r.x_star, opts.residual_tol);
    j["classification"] = to_string(fp.classification);
    j["index"] = fp.index;
  }
  out.json_file("report.json", j);
  return r.converged ? kExitOk : kExitNotConverged;
}

int run_msgad(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
  if (cfg.text("model") != "example2-slowfast")
    throw ConfigError("model", "run-msgad needs a slow-fast model (example2-slowfast)");
  const SlowFastModel model = model_example2_slowfast(cfg.real("epsilon"));
  const Vector x0 = resolve_point(cfg, "x0", "example2-slowfast");
  const Vector v0 = resolve_direction(cfg, "v0", model.dim_slow);

  HmmParams hmm = HmmParams::defaults_for(model);
  if (auto dtm = cfg.optional_real("dt_micro")) hmm.dt_micro = *dtm;
  hmm.n_burnin = cfg.count("n_burnin");
  hmm.n_average = cfg.count("n_average");
  hmm.n_replicas = cfg.count("n_replicas");
  hmm.n_batches = cfg.count("n_batches");
  hmm.seed = cfg.seed("seed");

  MsGadOptions opts;
  opts.dt = cfg.real("dt");
  opts.max_steps = cfg.count("max_steps");
  opts.residual_tol = cfg.real("residual_tol");
  opts.window = cfg.count("window");
  opts.relaxation = cfg.real("relaxation");
  opts.kick = cfg.optional_real("kick");
  opts.record_every = cfg.count("record_every");
  const MsGadVariant variant = cfg.text("variant") == "w-form" ? MsGadVariant::WForm : MsGadVariant::VForm;

  Stopwatch clock;
  const MsGadResult r = msgad_find_saddle(model, x0, v0, opts, hmm, variant);
  const SaddleResult& s = r.saddle;
  log << "msgad " << cfg.text("variant") << ": " << (s.converged ? "converged" : "not converged") << " after "
      << s.steps << " macro steps, x = (" << s.x_star[0] << ", " << s.x_star[1] << "), window residual "
      << s.residual << " [" << clock.seconds() << " s]\n";
  if (r.under_resolved)
    log << "warning: dt_micro exceeds 0.2 eps times the fast relaxation time along the run\n";

  {
    auto os = out.open("trajectory.csv");
    write_msgad_trajectory_csv(os, r.trajectory, model.dim_slow);
  }

  json j = report_saddle(s);
  j["model"] = model.name;
  j["variant"] = cfg.text("variant");
  j["x0"] = x0;
  j["v0"] = v0;
  j["seed"] = r.seed;
  j["dt_micro"] = hmm.dt_micro;
  j["under_resolved"] = r.under_resolved;
  out.json_file("report.json", j);
  return s.converged ? kExitOk : kExitNotConverged;
}

ShearConfig shear_config(const RunConfig& cfg, double gamma) {
  ShearConfig sc;
  sc.variant = parse_shear_variant(cfg.text("shear_variant"));
  sc.shear_rate = gamma;
  sc.kappa = cfg.real("kappa");
  return sc;
}

Field2D initial_field(const RunConfig& cfg, std::size_t n, double kappa) {
  const std::string s = cfg.text("phi0");
  if (s == "droplet") return droplet_seed(n, kappa);
  if (s == "stripe-horizontal") return stripe_seed(n, kappa, StripeOrientation::Horizontal);
  if (s == "stripe-vertical") return stripe_seed(n, kappa, StripeOrientation::Vertical);
  if (!fs::exists(s)) throw ConfigError("phi0", "'" + s + "' is neither a seed name nor an existing field file");
  Field2D f = load_field(s);
  if (f.n() != n) throw ConfigError("phi0", "field file has n = " + std::to_string(f.n()));
  return f;
}

Field2D initial_direction(const RunConfig& cfg, const Field2D& phi0) {
  const std::string s = cfg.text("dir0");
  if (s == "auto") return default_direction(phi0);
  if (!fs::exists(s)) throw ConfigError("dir0", "'" + s + "' is neither 'auto' nor an existing field file");
  Field2D f = load_field(s);
  if (f.n() != phi0.n()) throw ConfigError("dir0", "field file has n = " + std::to_string(f.n()));
  return f;
}

PdeGadOptions pde_options(const RunConfig& cfg) {
  PdeGadOptions o;
  o.dt = cfg.optional_real("dt");
  o.max_steps = cfg.count("max_steps");
  o.residual_tol = cfg.real("residual_tol");
  o.relaxation = cfg.real("relaxation");
  o.form = cfg.text("form") == "w" ? DirectionForm::Left : DirectionForm::Right;
  o.record_every = cfg.count("record_every");
  return o;
}

std::size_t grid_size(const RunConfig& cfg) {
  const std::size_t n = cfg.count("n");
  if (n < Field2D::kMinSize) throw ConfigError("n", "must be at least " + std::to_string(Field2D::kMinSize));
  return n;
}

int run_ac(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
  const std::size_t n = grid_size(cfg);
  const ShearConfig sc = shear_config(cfg, cfg.real("gamma_shear"));
  const Field2D phi0 = initial_field(cfg, n, sc.kappa);
  const Field2D dir0 = initial_direction(cfg, phi0);
  const PdeGadOptions opts = pde_options(cfg);

  Stopwatch clock;
  const PdeSaddleResult r = pde_find_saddle(phi0, dir0, sc, opts);
  const double xvar = x_variation(r.phi);
  const double sym = symmetry_residual(r.phi);
  log << to_string(sc.variant) << " gamma = " << sc.shear_rate << ", n = " << n << ": "
      << (r.converged ? "converged" : "not converged") << " after " << r.steps << " steps, |b|_L2 = " << r.residual
      << ", E = " << r.energy << ", <v, Jv> = " << r.rayleigh << " [" << clock.seconds() << " s]\n";

  out.field("saddle.csv", r.phi);
  out.field("saddle.fld2", r.phi);
  out.field("direction.fld2", r.dir);
  {
    auto os = out.open("trace.csv");
    os << "step,t,residual,energy,rayleigh\n";
    for (const auto& t : r.trace)
      os << t.step << ',' << t.t << ',' << t.residual << ',' << t.energy << ',' << t.rayleigh << '\n';
  }
  json j;
  j["n"] = n;
  j["shear_variant"] = to_string(sc.variant);
  j["gamma_shear"] = sc.shear_rate;
  j["kappa"] = sc.kappa;
  j["dt"] = opts.dt.value_or(default_pde_dt(n));
  j["residual_l2"] = r.residual;
  j["rayleigh"] = r.rayleigh;
  j["energy"] = r.energy;
  j["steps"] = r.steps;
  j["converged"] = r.converged;
  j["x_variation"] = xvar;
  j["symmetry_residual"] = sym;
  out.json_file("report.json", j);
  return r.converged ? kExitOk : kExitNotConverged;
}

int sweep_gamma(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
  const std::size_t n = grid_size(cfg);
  const std::vector<double> gammas = cfg.reals("gammas");
  for (std::size_t k = 1; k < gammas.size(); ++k)
    if (!(gammas[k] > gammas[k - 1])) throw ConfigError("gammas", "must be strictly ascending");
  if (gammas.front() < 0.0) throw ConfigError("gammas", "must be non-negative");
  const ShearConfig base = shear_config(cfg, 0.0);
  const Field2D phi0 = initial_field(cfg, n, base.kappa);
  std::optional<Field2D> dir0;
  if (cfg.text("dir0") != "auto") dir0 = initial_direction(cfg, phi0);

  Stopwatch clock;
  const SweepResult sweep = continuation_in_gamma(gammas, base, phi0, pde_options(cfg), dir0);

  json stages = json::array();
  for (std::size_t k = 0; k < sweep.stages.size(); ++k) {
    const SweepStage& st = sweep.stages[k];
    log << "gamma = " << st.gamma << ": " << (st.result.converged ? "converged" : "not converged") << ", steps "
        << st.result.steps << ", E = " << st.result.energy << ", x-variation " << st.x_variation << ", <v, Jv> = "
        << st.result.rayleigh << "\n";
    const std::string name = "saddle_" + std::to_string(k) + ".fld2";
    out.field(name, st.result.phi);
    stages.push_back({{"gamma", st.gamma},
                      {"converged", st.result.converged},
                      {"steps", st.result.steps},
                      {"energy", st.result.energy},
                      {"residual_l2", st.result.residual},
                      {"rayleigh", st.result.rayleigh},
                      {"x_variation", st.x_variation},
                      {"symmetry_residual", st.symmetry_residual},
                      {"field", name}});
  }
  log << "sweep " << (sweep.complete ? "complete" : "aborted") << " [" << clock.seconds() << " s]\n";
  {
    auto os = out.open("sweep.csv");
    write_sweep_csv(os, sweep);
  }
  out.json_file("report.json", {{"n", n},
                                {"shear_variant", to_string(base.variant)},
                                {"complete", sweep.complete},
                                {"stages", stages}});
  return sweep.complete ? kExitOk : kExitNotConverged;
}

int classify(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
  const VectorFieldModel model = deterministic_model(cfg);
  Vector x = resolve_point(cfg, "x", model.name);
  if (cfg.flag("refine")) x = refine_fixed_point(model, x);
  const FixedPointReport rep = classify_fixed_point(model, x, cfg.real("tol"));

  json eig = json::array();
  log << model.name << " at (" << rep.x[0] << ", " << rep.x[1] << "): " << to_string(rep.classification)
      << ", eigenvalues";
  for (const auto& l : rep.eigenvalues) {
    eig.push_back({l.real(), l.imag()});
    log << ' ' << l;
  }
  log << "\n";
  out.json_file("report.json", {{"model", model.name},
                                {"x", rep.x},
                                {"residual_inf", rep.residual},
                                {"eigenvalues", eig},
                                {"index", rep.index},
                                {"classification", to_string(rep.classification)}});
  return kExitOk;
}

int verify_theorem1(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
  const VectorFieldModel model = deterministic_model(cfg);
  std::vector<std::string> names = cfg.words("points");
  if (names.size() == 1 && names.front() == "saddles") names = saddle_names(model.name);
  const DirectionForm form = cfg.text("form") == "w" ? DirectionForm::Left : DirectionForm::Right;

  json reports = json::array();
  std::string text;
  bool all_pass = true;
  for (const auto& name : names) {
    if (!is_point_name(name)) throw ConfigError("points", "'" + name + "' is not a point name");
    Vector x;
    try {
      x = cfg.flag("refine") ? named_point(model.name, name) : reference_point(model.name, name);
    } catch (const InvalidArgument& e) {
      throw ConfigError("points", e.what());
    }
    const Theorem1Report rep = verify_theorem1_spectrum(model, x, form);
    reports.push_back(json::parse(rep.to_json()));
    text += rep.to_text() + "\n";
    all_pass = all_pass && rep.pass();
    log << name << ": " << (rep.pass() ? "PASS" : "FAIL") << "\n";
  }
  out.json_file("theorem1.json", reports);
  out.open("theorem1.txt") << text;
  return all_pass ? kExitOk : kExitNotConverged;
}

}  // namespace

Vector reference_point(const std::string& model, const std::string& name) {
  const std::string det = deterministic_model_name(model);
  const bool ex1 = det == "example1";
  const zoo::ReferencePoints pts = ex1 ? zoo::example1_points() : zoo::example2_points();
  if (name == "m1") return pts.m1;
  if (name == "m2") return pts.m2;
  if (name == "m3" && !ex1) return pts.m3;
  if (name == "s" || name == "s1") return pts.s1;
  if (name == "s2" && !ex1) return pts.s2;
  throw InvalidArgument("no point '" + name + "' in model " + det);
}

Vector named_point(const std::string& model, const std::string& name) {
  return refine_fixed_point(model_by_name(deterministic_model_name(model)), reference_point(model, name));
}

std::vector<std::string> saddle_names(const std::string& model) {
  if (deterministic_model_name(model) == "example1") return {"s"};
  return {"s1", "s2"};
}

int execute(const RunConfig& cfg, std::ostream& log) {
  OutputSet out(cfg.text("output_dir"));
  int status = kExitError;
  switch (cfg.command()) {
    case Command::RunGad: status = run_gad(cfg, out, log); break;
    case Command::RunMsGad: status = run_msgad(cfg, out, log); break;
    case Command::RunAc: status = run_ac(cfg, out, log); break;
    case Command::Classify: status = classify(cfg, out, log); break;
    case Command::VerifyTheorem1: status = verify_theorem1(cfg, out, log); break;
    case Command::SweepGamma: status = sweep_gamma(cfg, out, log); break;
  }
  out.manifest(cfg);
  return status;
}

}  // namespace sgad::cli
