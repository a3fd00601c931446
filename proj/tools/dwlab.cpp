// Experiment runner: binds INI configs to the library and emits the CSV/JSON
// artifacts consumed by the verification suites.
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dwlab/config.hpp"
#include "dwlab/decay.hpp"
#include "dwlab/energetics.hpp"
#include "dwlab/inequalities.hpp"
#include "dwlab/model.hpp"
#include "dwlab/report_io.hpp"
#include "dwlab/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace dwlab;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;       // < 0: keep the config's seed
  std::string threads = "auto";
};

std::string default_out_dir() {
  const char* env = std::getenv("DWLAB_OUT");
  return (env && *env) ? env : "out";
}

void apply_threads(const std::string& spec) {
  if (spec == "auto") return;
  int count = 0;
  try {
    count = std::stoi(spec);
  } catch (const std::exception&) {
    throw std::invalid_argument("--threads expects an integer or 'auto'");
  }
  if (count < 1) throw std::invalid_argument("--threads must be >= 1");
#ifdef _OPENMP
  omp_set_num_threads(count);
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

ExperimentConfig load_config(const CommonOpts& opts) {
  ExperimentConfig c = parse_config_file(opts.config_path);
  if (opts.seed >= 0) c.data_seed = static_cast<std::uint64_t>(opts.seed);
  return c;
}

void ensure_out_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

json meta_json(const ExperimentConfig& c, const RunConfig& rc,
               const Trajectory* traj, const std::string& note) {
  json m{{"spacing", rc.grid.spacing()},
         {"npoints", rc.grid.npoints()},
         {"stability_dt", stability_dt(rc.grid)},
         {"threads", thread_count()},
         {"seed", c.data_seed}};
  if (!note.empty()) m["note"] = note;
  if (traj) {
    m["dt"] = traj->dt;
    m["nsteps"] = traj->nsteps;
    m["samples"] = traj->samples.size();
    m["max_cfl_eff"] = traj->max_cfl_eff;
    m["max_e_l0"] = traj->max_e_l0;
    m["max_identity_residual"] = traj->max_identity_residual;
    m["max_edge_fraction"] = traj->max_edge_fraction;
    m["smallness_ok"] = traj->smallness_ok;
  }
  return m;
}

Field forcing_profile(const Field& u0, const Field& u1,
                      const DampingSpec& spec) {
  Field f(u0.grid());
  if (!spec.is_zero()) {
    const DampingField b(spec, u0.grid());
    b.matvec(u0, f);
  }
  f += u1;
  return f;
}

std::vector<int> tracked_mu(const ExperimentConfig& c, const RunConfig& rc) {
  const int top = std::min(c.mu_max, rc.L - rc.L0());
  std::vector<int> mu;
  for (int m = 1; m <= top; ++m) mu.push_back(m);
  return mu;
}

int cmd_simulate(const CommonOpts& opts, bool fits_only) {
  ExperimentConfig c = load_config(opts);
  if (fits_only) c.run_ledger = false;
  const RunConfig rc = to_run_config(c);
  const InitialData data = make_initial_data(c, rc.grid);
  const HypothesisReport hyp =
      classify_data(data.u0, data.u1, rc.damping, 0.5, data.odd_certificate);
  const bool h_data = hyp.best() != DataHypothesis::none;

  const Trajectory traj = simulate(rc, State(data.u0, data.u1));

  std::optional<Ledger> led;
  if (c.run_ledger) {
    const FunctionalParams params = make_functional_params(rc, c.c1);
    led = build_ledger(traj, rc, params, tracked_mu(c, rc), h_data);
  }

  std::vector<DecayFit> fits;
  std::string note;
  if (c.run_fits) {
    const double t_end = traj.samples.back().t;
    const double t2 = c.window_t2 > 0 ? c.window_t2 : t_end;
    const double t1 = c.window_t1 > 0 ? c.window_t1 : std::max(1.0, t2 / 10);
    std::size_t in_window = 0;
    for (const Sample& s : traj.samples)
      if (s.t >= t1 && s.t <= t2) ++in_window;
    if (t2 > t1 && in_window >= 20) {
      fits = verify_rates(traj, rc, std::min(c.mu_max, rc.L - rc.L0()), h_data,
                          RateWindow{c.window_t1, c.window_t2, c.slack});
    } else {
      note = "fit window infeasible for this run; fits skipped";
    }
  }

  ensure_out_dir(opts.out_dir);
  if (led) write_text_atomic(join_path(opts.out_dir, "series.csv"),
                             ledger_csv(*led));
  for (const DecayFit& f : fits)
    write_text_atomic(join_path(opts.out_dir, "fit_" + f.quantity + ".csv"),
                      fit_csv(f));

  json constants = json::object();
  if (led) {
    constants["C0"] = led->params.C0;
    constants["C1"] = led->params.C1;
    constants["eps_num"] = led->eps_num;
    for (const LedgerEntry& e : led->entries)
      constants[e.tag + "_measured"] = e.measured;
  }
  const json report =
      assemble_report(c, &hyp, led ? &*led : nullptr, &fits, constants,
                      meta_json(c, rc, &traj, note));
  write_text_atomic(join_path(opts.out_dir, "report.json"), dump_json(report));

  bool ok = true;
  if (led) {
    for (const LedgerEntry& e : led->entries) {
      if (!e.applicable) continue;
      std::cout << "[ledger] " << e.tag << " "
                << (e.pass ? "PASS" : "FAIL") << "  measured="
                << format_double(e.measured);
      if (e.budget > 0) std::cout << " budget=" << format_double(e.budget);
      std::cout << "\n";
      ok = ok && e.pass;
    }
  }
  for (const DecayFit& f : fits) {
    std::cout << "[fit] " << f.quantity << " "
              << (f.pass ? "PASS" : "FAIL") << "  slope="
              << format_double(f.slope)
              << " target=" << format_double(f.target + f.slack)
              << (f.trivial ? " (trivial)" : "") << "\n";
    ok = ok && f.pass;
  }
  if (!note.empty()) std::cout << "[note] " << note << "\n";
  std::cout << "RESULT " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

int cmd_verify_inequalities(const CommonOpts& opts) {
  ExperimentConfig c = load_config(opts);
  const Grid g = make_grid(c.dim, c.n, c.half_width, c.stencil_order);
  const DampingSpec damping =
      c.b0 > 0 ? make_damping(parse_damping_profile(c.profile), c.dim, c.b0,
                              c.r0, c.R, c.eps, c.dir)
               : make_damping(DampingProfile::uniform, c.dim, 0, c.r0, c.R);

  std::vector<std::string> selected;
  if (c.checks == "auto") {
    selected = c.dim == 3
                   ? std::vector<std::string>{"sobolev", "gnm", "gn", "hardy",
                                              "pairing"}
                   : std::vector<std::string>{"sobolev", "gnm", "poincare",
                                              "pairing"};
  } else {
    std::istringstream in(c.checks);
    std::string token;
    while (in >> token) selected.push_back(token);
    if (selected.empty())
      throw std::invalid_argument("config: suite.checks selects nothing");
  }

  const std::uint64_t seed = c.data_seed;
  const int ns = c.samples;
  std::vector<InequalityReport> reports;
  for (const std::string& name : selected) {
    if (name == "sobolev") {
      reports.push_back(sobolev_check(g, ns, seed));
    } else if (name == "gnm") {
      reports.push_back(gnm_check(g, 2, ns, seed));
    } else if (name == "poincare") {
      const double sweep[] = {1.0, 0.5, 0.25};
      reports.push_back(poincare_check(damping, g, sweep, ns, seed));
    } else if (name == "hardy") {
      reports.push_back(hardy_check(g, ns, seed));
    } else if (name == "gn") {
      reports.push_back(gn_check(g, 6, 2, ns, seed));
    } else if (name == "pairing") {
      const InitialData data = make_initial_data(c, g);
      const HypothesisReport hyp =
          classify_data(data.u0, data.u1, damping, 0.5, data.odd_certificate);
      const DataHypothesis branch = hyp.best();
      if (branch == DataHypothesis::none)
        throw std::invalid_argument(
            "pairing check needs data satisfying a decay hypothesis");
      const Field f = forcing_profile(data.u0, data.u1, damping);
      reports.push_back(
          pairing_check(f, branch, data.odd_certificate, ns, seed));
    } else {
      throw std::invalid_argument("config: unknown check '" + name + "'");
    }
  }

  ensure_out_dir(opts.out_dir);
  json checks = json::object();
  json constants = json::object();
  bool ok = true;
  for (const InequalityReport& rep : reports) {
    checks[rep.name] = inequality_json(rep);
    constants[rep.name + "_constant"] = rep.constant;
    if (rep.name == "poincare") constants["C1"] = rep.constant;
    std::cout << "[check] " << rep.name << " "
              << (rep.pass ? "PASS" : "FAIL")
              << "  constant=" << format_double(rep.constant)
              << " drift=" << format_double(rep.refinement_drift) << "\n";
    ok = ok && rep.pass;
  }
  json doc{{"config", config_json(c)},
           {"checks", checks},
           {"constants", constants},
           {"meta",
            {{"spacing", g.spacing()},
             {"npoints", g.npoints()},
             {"threads", thread_count()},
             {"seed", seed}}}};
  write_text_atomic(join_path(opts.out_dir, "inequalities.json"),
                    dump_json(doc));
  std::cout << "RESULT " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

int cmd_rescaling_test(const CommonOpts& opts) {
  ExperimentConfig c = load_config(opts);
  const double lambda = c.lambda;
  ExperimentConfig base = c;
  base.lambda = 1;
  if (!(lambda > 0) || lambda > 1)
    throw std::invalid_argument("config: run.lambda must lie in (0, 1]");
  const RunConfig rc = to_run_config(base);
  const InitialData data = make_initial_data(base, rc.grid);
  const RescaleReport rep =
      rescaling_roundtrip(rc, State(data.u0, data.u1), lambda);

  const bool ok = rep.max_rel_l2_diff <= 1e-2 && rep.inequality_holds;
  ensure_out_dir(opts.out_dir);
  json doc{{"lambda", rep.lambda},
           {"max_rel_l2_diff", rep.max_rel_l2_diff},
           {"data_norm", rep.data_norm},
           {"data_norm_rescaled", rep.data_norm_rescaled},
           {"nominal_factor", rep.nominal_factor},
           {"ratio", rep.ratio},
           {"inequality_holds", rep.inequality_holds},
           {"matched_grids", rep.matched_grids},
           {"pass", ok},
           {"config", config_json(c)}};
  write_text_atomic(join_path(opts.out_dir, "rescaling.json"), dump_json(doc));
  std::cout << "[rescaling] " << (ok ? "PASS" : "FAIL")
            << "  max_rel_l2_diff=" << format_double(rep.max_rel_l2_diff)
            << " ratio=" << format_double(rep.ratio)
            << " nominal=" << format_double(rep.nominal_factor) << "\n";
  std::cout << "RESULT " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override the data seed");
  cmd->add_option("--threads", opts.threads, "worker threads or 'auto'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for damped quasilinear waves"};
  app.require_subcommand(1);

  CommonOpts opts;
  opts.out_dir = default_out_dir();

  auto* sim = app.add_subcommand("simulate", "run + ledger + decay fits");
  add_common(sim, opts);
  auto* dec = app.add_subcommand("verify-decay", "run with fits-only output");
  add_common(dec, opts);
  auto* ineq =
      app.add_subcommand("verify-inequalities", "sampled inequality suite");
  add_common(ineq, opts);
  auto* resc =
      app.add_subcommand("rescaling-test", "matched-run rescaling roundtrip");
  add_common(resc, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help/error text
    return rc == 0 ? 0 : 2;     // any command-line failure is a config error
  }

  try {
    apply_threads(opts.threads);
    if (sim->parsed()) return cmd_simulate(opts, false);
    if (dec->parsed()) return cmd_simulate(opts, true);
    if (ineq->parsed()) return cmd_verify_inequalities(opts);
    if (resc->parsed()) return cmd_rescaling_test(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
