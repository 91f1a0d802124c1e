#include "apt/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

namespace apt {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

double relative_l2(const Vec& a, const Vec& ref) {
  if (a.size() != ref.size()) throw ContractViolation("relative_l2: size mismatch");
  const double d = (a - ref).norm(), r = ref.norm();
  return r > 0.0 ? d / r : d;
}

ErrorMetrics compare(const TransportSolution& a, const TransportSolution& ref) {
  return {relative_l2(a.rho, ref.rho), relative_l2(a.state.j, ref.state.j)};
}

double SolveReport::contract_error() const {
  if (vs_continuous) return vs_continuous->max();
  return trajectory_error;
}

bool SolveReport::contract_ok(double tol) const {
  return contract_error() <= tol && hermiticity_defect <= 1e-12 && norm_defect <= 1e-10;
}

SolveReport run_solve(const ProblemConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(cfg);
  SolveReport rep;
  rep.cfg = cfg;
  rep.disc = build_discretization(grid_spec(cfg));
  const TransportProblem prob = transport_problem(cfg);
  const SchrodingerSettings settings = schrodinger_settings(cfg, rep.disc.nx);

  const OdeSolution* ode = nullptr;
  IterativeResult it;
  if (cfg.method == Method::iterative) {
    it = solve_transport_iterative(prob, rep.disc, settings);
    rep.schr = it.schr;
    rep.oracle = it.classical;
    rep.continuous = it.continuous;
    rep.vs_continuous = compare(it.schr, it.continuous);
    rep.continuous_vs_oracle = compare(it.continuous, it.classical);
    rep.evolution_time = rep.disc.nt;
    ode = &it.run.ode;
  } else {
    rep.steady = solve_transport_steady(prob, rep.disc, settings, cfg.layout, cfg.T_evolve);
    rep.schr = rep.steady->schr.back();
    rep.oracle = rep.steady->direct.back();
    rep.trajectory_error = relative_l2(rep.steady->y_schr, rep.steady->y_direct);
    rep.evolution_time = rep.steady->run.T;
    ode = &rep.steady->run.ode;
  }
  rep.vs_oracle = compare(rep.schr, rep.oracle);
  rep.counters = ode->counters;
  rep.hermiticity_defect = ode->hermiticity_defect;
  rep.norm_defect = ode->run.max_norm_defect;
  rep.L = ode->grid.L;
  rep.R = ode->grid.R;
  rep.p_star = ode->run.p_star;
  rep.p_used = ode->run.p_used;
  rep.modes_evolved = ode->run.modes_evolved;
  rep.modes_skipped = ode->run.modes_skipped;
  rep.warnings = ode->grid.warnings;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

json config_json(const ProblemConfig& c) {
  json j;
  j["preset"] = to_string(c.preset);
  j["method"] = to_string(c.method);
  j["domain"] = {{"x_lo", c.x_lo}, {"x_hi", c.x_hi}};
  j["discretization"] = {{"nx", c.nx},
                         {"nv", c.nv},
                         {"velocity_set", c.velocity_set == VelocitySet::s8_half ? "s8_half" : "gauss_legendre"},
                         {"tau", c.tau},
                         {"t_final", c.t_final}};
  json phys = {{"epsilon", c.epsilon}};
  auto put = [&](const char* k, const std::optional<std::vector<double>>& v) {
    if (v) phys[k] = *v;
  };
  put("sigma_S", c.sigma_S);
  put("sigma_A", c.sigma_A);
  put("Q", c.Q);
  put("F_L", c.F_L);
  put("F_R", c.F_R);
  j["physics"] = phys;
  j["schrodingerization"] = {{"np", c.Np},
                             {"profile", to_string(c.profile)},
                             {"auto_domain", c.auto_domain},
                             {"L", c.L},
                             {"R", c.R},
                             {"source_scale", c.source_scale},
                             {"evolution", to_string(c.evolution)},
                             {"tol", c.evolution_tol},
                             {"max_dim_exact", c.max_dim_exact},
                             {"recovery", c.recovery == RecoveryMode::point ? "point" : "integral"}};
  j["run"] = {{"layout", to_string(c.layout)}, {"T", c.T_evolve}, {"jobs", c.jobs}, {"seed", c.seed}};
  return j;
}

json counters_json(const ComplexityCounters& c, double t) {
  return {{"sparsity", c.sparsity}, {"max_abs", c.max_abs}, {"dim", c.dim}, {"qubits", c.qubits},
          {"evolution_time", t}, {"chi", c.chi(t)}};
}

json report_json(const SolveReport& r) {
  json j;
  j["config"] = config_json(r.cfg);
  j["discretization"] = {{"h", r.disc.h}, {"tau", r.disc.tau}, {"nt", r.disc.nt}, {"nv", r.disc.nv}};
  j["timings"] = {{"total_seconds", r.seconds}};
  j["counters"] = counters_json(r.counters, r.evolution_time);
  json e = {{"rho_vs_oracle", r.vs_oracle.rho}, {"j_vs_oracle", r.vs_oracle.j}};
  if (r.vs_continuous) {
    e["rho_vs_continuous"] = r.vs_continuous->rho;
    e["j_vs_continuous"] = r.vs_continuous->j;
    e["continuous_vs_oracle_rho"] = r.continuous_vs_oracle->rho;
    e["continuous_vs_oracle_j"] = r.continuous_vs_oracle->j;
  } else {
    e["trajectory"] = r.trajectory_error;
  }
  e["hermiticity_defect"] = r.hermiticity_defect;
  e["norm_defect"] = r.norm_defect;
  e["contract_ok"] = r.contract_ok();
  j["errors"] = e;
  j["p_grid"] = {{"L", r.L}, {"R", r.R}, {"np", r.cfg.Np}, {"p_star", r.p_star}, {"p_used", r.p_used},
                 {"modes_evolved", r.modes_evolved}, {"modes_skipped", r.modes_skipped}};
  j["warnings"] = r.warnings;
  return j;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << std::setprecision(17);
  return os;
}

const char* kPlotScript = R"(import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "solution.csv")) as f:
    rows = list(csv.DictReader(f))
x = [float(r["x"]) for r in rows]

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, key, label in ((axes[0], "rho", "mass density rho"), (axes[1], "j", "mass flux j")):
    ax.plot(x, [float(r[key + "_oracle"]) for r in rows], "k:", label="direct")
    ax.plot(x, [float(r[key + "_schr"]) for r in rows], "o", mfc="none", label="Schrodingerization")
    ax.set_xlabel("x")
    ax.set_title(label)
    ax.legend()
fig.suptitle("TITLE")
fig.tight_layout()
fig.savefig(os.path.join(here, "solution.png"), dpi=150)
)";

}  // namespace

std::vector<std::string> write_solve_outputs(const SolveReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<std::string> files;
  {
    auto os = open_out(dir / "solution.csv");
    os << "x,rho_oracle,rho_schr,j_oracle,j_schr\n";
    for (int m = 0; m < rep.disc.nx; ++m)
      os << rep.schr.x(m) << ',' << rep.oracle.rho(m) << ',' << rep.schr.rho(m) << ',' << rep.oracle.flux(m) << ','
         << rep.schr.flux(m) << '\n';
    files.push_back("solution.csv");
  }
  {
    auto os = open_out(dir / "errors.csv");
    os << "metric,value\n";
    os << "rho_vs_oracle," << rep.vs_oracle.rho << "\nj_vs_oracle," << rep.vs_oracle.j << '\n';
    if (rep.vs_continuous) {
      os << "rho_vs_continuous," << rep.vs_continuous->rho << "\nj_vs_continuous," << rep.vs_continuous->j << '\n';
      os << "continuous_vs_oracle_rho," << rep.continuous_vs_oracle->rho << "\ncontinuous_vs_oracle_j,"
         << rep.continuous_vs_oracle->j << '\n';
    } else {
      os << "trajectory," << rep.trajectory_error << '\n';
    }
    files.push_back("errors.csv");
  }
  if (rep.steady) {
    auto os = open_out(dir / "trajectory.csv");
    write_trajectory_csv(os, *rep.steady, rep.disc);
    files.push_back("trajectory.csv");
  }
  {
    std::string script = kPlotScript;
    std::ostringstream title;
    title << to_string(rep.cfg.preset) << ", " << to_string(rep.cfg.method) << ", eps = " << rep.cfg.epsilon
          << ", t = " << rep.disc.nt * rep.disc.tau;
    script.replace(script.find("TITLE"), 5, title.str());
    std::ofstream(dir / "plot.py") << script;
    files.push_back("plot.py");
  }
  files.push_back("run.json");
  json j = report_json(rep);
  j["manifest"] = files;
  std::ofstream(dir / "run.json") << j.dump(2) << '\n';
  return files;
}

BoundsLadder run_bounds_ladder(const std::vector<int>& nxs, int nv, double epsilon, std::uint64_t seed) {
  BoundsLadder out;
  out.epsilon = epsilon;
  const TransportProblem prob = problem_I();
  auto disc_for = [&](int nx, int v, int nt_override) {
    GridSpec g;
    g.nx = nx;
    g.nv = v;
    const double h = 1.0 / (nx + 1);
    g.tau = 10.0 / 11.0 * h * h;
    g.t_final = 1.0;
    g.epsilon = epsilon;
    g.method = Method::steady;
    g.require_even_nx = true;
    Discretization d = build_discretization(g);
    if (nt_override > 0) d.nt = nt_override;
    return d;
  };

  for (int nx : nxs) {
    LadderRung rung;
    const Discretization d = disc_for(nx, nv, 0);
    rung.report = matrix_2norms(reduced_blocks(d, prob), d);
    const long per_step = 2L * d.n();
    rung.check_nt = static_cast<int>(std::min<long>(d.nt, 200 / per_step));
    if (rung.check_nt >= 1) {
      const SplitSystem s = split_system(disc_for(nx, nv, rung.check_nt), prob);
      check_closed_form(rung.report, s, {0.5, 1.0, 5.0});
    }
    rung.nv_set = {2, 4, 8};
    for (int v : rung.nv_set) {
      const Discretization dv = disc_for(nx, v, 0);
      rung.A2_over_sqrt_nv.push_back(norm2(reduced_blocks(dv, prob).A2_bar) / std::sqrt(double(v)));
    }
    out.rungs.push_back(rung);
  }

  if (!out.rungs.empty()) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    out.gap_c_min = INFINITY;
    for (const auto& r : out.rungs) {
      const double x = std::log(double(r.report.nt)), y = std::log(std::max(r.report.contraction_gap, 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      out.gap_c_min = std::min(out.gap_c_min, r.report.contraction_gap * r.report.nt);
    }
    const double n = static_cast<double>(out.rungs.size());
    out.gap_slope = out.rungs.size() > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  }
  out.matrix_lemmas = weyl_and_perturbation_checks(24, 100, seed);
  for (int nx : nxs) out.lemmas.push_back(eig_lemma_checks(nx));
  return out;
}

namespace {

struct CommonFlags {
  std::string preset = "problem1";
  std::string method;
  std::optional<double> epsilon;
  std::optional<int> nx, nv, np, jobs;
  std::optional<double> t_final, T;
  std::optional<std::string> layout, smooth_init, evolution;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string config;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_epsilon) {
  app->add_option("--preset", f.preset, "problem1 | problem2 | problem3 | custom");
  app->add_option("--method", f.method, "iterative | steady");
  if (with_epsilon) app->add_option("--epsilon", f.epsilon, "mean free path");
  app->add_option("--nx", f.nx, "interior grid points");
  app->add_option("--nv", f.nv, "velocity ordinates (switches to Gauss-Legendre)");
  app->add_option("--np", f.np, "Fourier modes in p (power of two)");
  app->add_option("--t-final", f.t_final, "physical end time");
  app->add_option("--T", f.T, "steady method evolution time (default 2 N_t)");
  app->add_option("--layout", f.layout, "per_step | split_rj");
  app->add_option("--smooth-init", f.smooth_init, "smooth_r | exp_abs");
  app->add_option("--evolution", f.evolution, "auto | exact | krylov | rk");
  app->add_option("--jobs", f.jobs, "worker threads");
  app->add_option("--seed", f.seed, "seed for randomized checks");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--config", f.config, "INI file; its values override flags");
}

ProblemConfig build_config(const CommonFlags& f, double epsilon_default) {
  ProblemConfig head;
  head.preset = parse_preset(f.preset);
  head.method = f.method.empty() ? Method::iterative : parse_method(f.method);
  head.epsilon = f.epsilon.value_or(epsilon_default);
  if (!f.config.empty()) apply_ini(head, f.config);

  ProblemConfig c = preset_config(head.preset, head.method, head.epsilon);
  if (f.nx) c.nx = *f.nx;
  if (f.nv) {
    c.nv = *f.nv;
    c.velocity_set = VelocitySet::gauss_legendre;
  }
  if (f.np) c.Np = *f.np;
  if (f.t_final) c.t_final = *f.t_final;
  if (f.T) c.T_evolve = *f.T;
  if (f.layout) c.layout = parse_layout(*f.layout);
  if (f.smooth_init) c.profile = parse_profile(*f.smooth_init);
  if (f.evolution) c.evolution = parse_evolution(*f.evolution);
  if (f.jobs) c.jobs = *f.jobs;
  if (f.seed) c.seed = *f.seed;
  c.out_dir = f.out;
  if (!f.config.empty()) apply_ini(c, f.config);
  validate(c);
  return c;
}

void print_summary(std::ostream& out, const SolveReport& r) {
  out << std::setprecision(4);
  out << to_string(r.cfg.preset) << ' ' << to_string(r.cfg.method) << " eps=" << r.cfg.epsilon << " nt=" << r.disc.nt
      << " np=" << r.cfg.Np << " L=" << r.L << " R=" << r.R << '\n';
  out << "  vs oracle:     rho " << r.vs_oracle.rho << "  j " << r.vs_oracle.j << '\n';
  if (r.vs_continuous) {
    out << "  vs continuous: rho " << r.vs_continuous->rho << "  j " << r.vs_continuous->j << '\n';
    out << "  continuous vs oracle: rho " << r.continuous_vs_oracle->rho << "  j " << r.continuous_vs_oracle->j
        << '\n';
  } else {
    out << "  trajectory:    " << r.trajectory_error << '\n';
  }
  out << "  counters: sparsity " << r.counters.sparsity << ", max " << r.counters.max_abs << ", dim "
      << r.counters.dim << ", qubits " << r.counters.qubits << ", chi " << r.counters.chi(r.evolution_time) << '\n';
  for (const auto& w : r.warnings) out << "  warning: " << w << '\n';
  out << "  " << (r.contract_ok() ? "ok" : "CONTRACT FAILED") << " (" << r.seconds << " s)\n";
}

int cmd_solve(const CommonFlags& f, const std::string& positional, std::ostream& out) {
  CommonFlags g = f;
  if (!positional.empty()) g.method = positional;
  const ProblemConfig c = build_config(g, 0.1);
  const SolveReport r = run_solve(c);
  write_solve_outputs(r, c.out_dir);
  print_summary(out, r);
  return r.contract_ok() ? 0 : 1;
}

int cmd_sweep(const CommonFlags& f, std::vector<double> eps, std::ostream& out) {
  if (eps.empty()) eps = {1e-1, 1e-2, 1e-4, 1e-6, 1e-8};
  std::vector<ProblemConfig> cfgs;
  for (double e : eps) {
    CommonFlags g = f;
    g.epsilon = e;
    cfgs.push_back(build_config(g, e));
  }
  const int jobs = cfgs.front().jobs;
  std::vector<std::optional<SolveReport>> reps(cfgs.size());
  std::vector<std::string> failures(cfgs.size());
  auto work = [&](size_t i) {
    ProblemConfig c = cfgs[i];
    if (jobs > 1) c.jobs = 1;
    try {
      reps[i] = run_solve(c);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  };
  if (jobs <= 1) {
    for (size_t i = 0; i < cfgs.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (size_t i = w; i < cfgs.size(); i += jobs) work(i);
      });
    for (auto& t : pool) t.join();
  }
  for (size_t i = 0; i < failures.size(); ++i)
    if (!failures[i].empty()) throw ContractViolation("sweep member eps=" + std::to_string(eps[i]) + ": " + failures[i]);

  const fs::path dir = f.out;
  fs::create_directories(dir);
  std::vector<std::string> manifest;
  bool ok = true;
  double emin = INFINITY, emax = 0.0;
  {
    auto os = open_out(dir / "sweep.csv");
    os << "epsilon,err_rho,err_j,err_rho_continuous,err_j_continuous,trajectory_error\n";
    for (size_t i = 0; i < reps.size(); ++i) {
      const SolveReport& r = *reps[i];
      std::ostringstream sub;
      sub << "eps_" << std::scientific << std::setprecision(0) << eps[i];
      for (const auto& name : write_solve_outputs(r, dir / sub.str())) manifest.push_back(sub.str() + "/" + name);
      os << eps[i] << ',' << r.vs_oracle.rho << ',' << r.vs_oracle.j << ','
         << (r.vs_continuous ? r.vs_continuous->rho : NAN) << ',' << (r.vs_continuous ? r.vs_continuous->j : NAN)
         << ',' << r.trajectory_error << '\n';
      ok = ok && r.contract_ok();
      emin = std::min(emin, r.vs_oracle.max());
      emax = std::max(emax, r.vs_oracle.max());
    }
    manifest.push_back("sweep.csv");
  }
  json j;
  j["config"] = config_json(cfgs.front());
  j["epsilons"] = eps;
  j["uniformity_ratio"] = emax / std::max(emin, 1e-300);
  std::optional<size_t> i6, i8;
  for (size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] == 1e-6) i6 = i;
    if (eps[i] == 1e-8) i8 = i;
  }
  out << std::setprecision(4) << "eps-uniformity ratio (max/min error vs oracle): " << emax / std::max(emin, 1e-300)
      << '\n';
  if (i6 && i8) {
    const double d = relative_l2(reps[*i6]->schr.rho, reps[*i8]->schr.rho);
    const double dj = relative_l2(reps[*i6]->schr.state.j, reps[*i8]->schr.state.j);
    j["saturation"] = {{"rho", d}, {"j", dj}};
    out << "eps 1e-6 vs 1e-8: rho " << d << "  j " << dj << '\n';
  }
  for (size_t i = 0; i < reps.size(); ++i)
    out << "  eps " << eps[i] << ": rho " << reps[i]->vs_oracle.rho << "  j " << reps[i]->vs_oracle.j
        << (reps[i]->contract_ok() ? "" : "  CONTRACT FAILED") << '\n';
  manifest.push_back("sweep.json");
  j["manifest"] = manifest;
  std::ofstream(dir / "sweep.json") << j.dump(2) << '\n';
  return ok ? 0 : 1;
}

int cmd_bounds(const std::vector<int>& ladder, int nv, double eps, std::uint64_t seed, const std::string& out_dir,
               std::ostream& out) {
  const BoundsLadder b = run_bounds_ladder(ladder, nv, eps, seed);
  const fs::path dir = out_dir;
  fs::create_directories(dir);
  bool ok = true;
  json rungs = json::array();
  {
    auto os = open_out(dir / "bounds.csv");
    os << "nx,nv,nt,norm_A1_bar,norm_A2_bar,gap,gap_times_nt,lower_A1,upper_A1_formula,T_estimate,two_nt,"
          "closed_form_error\n";
    for (const auto& r : b.rungs) {
      const BoundReport& p = r.report;
      os << p.nx << ',' << p.nv << ',' << p.nt << ',' << p.norm_A1_bar << ',' << p.norm_A2_bar << ','
         << p.contraction_gap << ',' << p.contraction_gap * p.nt << ',' << p.lower_A1 << ',' << p.upper_A1_formula
         << ',' << p.T_estimate << ',' << 2 * p.nt << ','
         << (p.closed_form_checked ? p.closed_form_error : NAN) << '\n';
      const double ratio = *std::max_element(r.A2_over_sqrt_nv.begin(), r.A2_over_sqrt_nv.end()) /
                           *std::min_element(r.A2_over_sqrt_nv.begin(), r.A2_over_sqrt_nv.end());
      ok = ok && p.contraction && p.lower_ok && (!p.closed_form_checked || p.closed_form_ok) && ratio <= 3.0;
      rungs.push_back({{"nx", p.nx},
                       {"nt", p.nt},
                       {"norm_A1_bar", p.norm_A1_bar},
                       {"norm_A2_bar", p.norm_A2_bar},
                       {"contraction", p.contraction},
                       {"lower_A1", p.lower_A1},
                       {"lower_ok", p.lower_ok},
                       {"upper_A1_formula", p.upper_A1_formula},
                       {"upper_formula_holds", p.upper_formula_holds},
                       {"closed_form_checked", p.closed_form_checked},
                       {"closed_form_ok", p.closed_form_ok},
                       {"closed_form_check_nt", r.check_nt},
                       {"T_estimate", p.T_estimate},
                       {"two_nt", 2 * p.nt},
                       {"A2_over_sqrt_nv", r.A2_over_sqrt_nv},
                       {"A2_ratio", ratio}});
    }
  }
  const auto& a = b.matrix_lemmas;
  ok = ok && b.gap_slope >= -1.3 && b.gap_slope <= -0.7 && b.gap_c_min > 0.0;
  ok = ok && a.weyl_violations == 0 && a.block_norm_violations == 0 && std::abs(a.perturbation_order - 2.0) <= 0.1;
  json lemmas = json::array();
  for (const auto& l : b.lemmas) {
    ok = ok && l.load_bearing_ok();
    lemmas.push_back({{"nx", l.nx},
                      {"stated_formula_L", l.stated_formula_L},
                      {"classical_formula_L", l.classical_formula_L},
                      {"stated_formula_D", l.stated_formula_D},
                      {"classical_formula_D", l.classical_formula_D},
                      {"D2_display_matches", l.D2_display_matches},
                      {"load_bearing_ok", l.load_bearing_ok()}});
  }
  json j;
  j["epsilon"] = eps;
  j["rungs"] = rungs;
  j["gap_slope"] = b.gap_slope;
  j["gap_c_min"] = b.gap_c_min;
  j["matrix_lemmas"] = {{"seed", seed},
                     {"trials", a.trials},
                     {"weyl_violations", a.weyl_violations},
                     {"perturbation_order", a.perturbation_order},
                     {"block_norm_violations", a.block_norm_violations}};
  j["lemmas"] = lemmas;
  j["ok"] = ok;
  j["manifest"] = {"bounds.csv", "bounds.json"};
  std::ofstream(dir / "bounds.json") << j.dump(2) << '\n';

  out << std::setprecision(4);
  for (const auto& r : b.rungs)
    out << "nx " << r.report.nx << ": |A1| " << r.report.norm_A1_bar << "  gap*nt " << r.report.contraction_gap * r.report.nt
        << "  |A2| " << r.report.norm_A2_bar << "  T_est " << r.report.T_estimate << " (2nt " << 2 * r.report.nt
        << ")\n";
  out << "gap slope " << b.gap_slope << ", Weyl violations " << a.weyl_violations << ", perturbation order "
      << a.perturbation_order << ", block-norm violations " << a.block_norm_violations << '\n';
  out << (ok ? "ok" : "CHECK FAILED") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schrodingerized solvers for the slab transport equation"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string positional;
  auto* solve = app.add_subcommand("solve", "run one configuration against its classical oracle");
  solve->add_option("pipeline", positional, "iterative | steady (same as --method)");
  add_common(solve, solve_flags, true);

  CommonFlags sweep_flags;
  std::vector<double> eps_list;
  auto* sweep = app.add_subcommand("sweep", "repeat solve over a list of epsilon values");
  sweep->add_option("--epsilons", eps_list, "epsilon values")->delimiter(',');
  add_common(sweep, sweep_flags, false);

  std::vector<int> ladder = {4, 8, 16, 32};
  int bounds_nv = 4;
  double bounds_eps = 1e-8;
  std::uint64_t bounds_seed = 12345;
  std::string bounds_out = "out";
  auto* bounds = app.add_subcommand("bounds", "matrix-norm and evolution-time checks over a grid ladder");
  bounds->add_option("--ladder", ladder, "even N_x values")->delimiter(',');
  bounds->add_option("--nv", bounds_nv, "velocity ordinates (Gauss-Legendre)");
  bounds->add_option("--epsilon", bounds_eps, "mean free path");
  bounds->add_option("--seed", bounds_seed, "seed for the randomized checks");
  bounds->add_option("--out", bounds_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_flags, positional, out);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, eps_list, out);
    if (bounds->parsed()) return cmd_bounds(ladder, bounds_nv, bounds_eps, bounds_seed, bounds_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace apt
