// hwlab: command-line front end.
//
//   hwlab solve     --config run.cfg --out DIR [--input u0.hwf]
//   hwlab norms     --config norm.cfg [--input f.hwf]
//   hwlab exponents --config exp.cfg
//   hwlab exp NAME  --config NAME.cfg --out DIR [--seed N] [--threads N]
//
// Every command also accepts --set key=value (repeatable) on top of the file.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "hwlab/config.hpp"
#include "hwlab/evolution.hpp"
#include "hwlab/experiments.hpp"
#include "hwlab/io.hpp"
#include "hwlab/norms.hpp"

using namespace hwlab;

namespace {

const std::vector<std::string> kGrid = {"d", "n", "L"};
const std::vector<std::string> kProfile = {"sigma", "amplitude"};

std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::map<std::string, std::vector<std::string>>& command_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"solve", join({kGrid, kProfile,
                      {"nu", "mu", "delta", "T", "dt", "stride", "gammas", "ceiling", "linear", "snapshots"}})},
      {"norms", join({kGrid, kProfile, {"gamma", "q", "homogeneous", "besov", "k"}})},
      {"exponents", {"d", "nu", "gamma"}},
      {"small-dispersion", join({kGrid, kProfile,
                                 {"nu", "mu", "delta_list", "dt", "t_eval", "k", "weighted", "decay_guard",
                                  "fit_min", "fit_max"}})},
      {"norm-scaling", join({kGrid, kProfile, {"nu", "mu", "gamma", "delta_list", "moment_order", "refine"}})},
      {"inflation", join({kGrid, kProfile, {"nu", "mu", "gamma", "delta", "dt", "t_list", "n_fine",
                                            "t_inner_list"}})},
      {"decoherence", join({kGrid, kProfile, {"nu", "mu", "delta", "dt", "a", "a_prime", "t_eval"}})},
      {"negative-gamma", join({kGrid, kProfile, {"nu", "mu", "gamma", "dt", "moment_order", "log2_s_list"}})},
      {"scattering", join({kGrid, {"sigma", "nu", "mu", "eps0", "ladder", "dt", "linear"}})},
      {"strichartz", join({kGrid, {"p", "q", "gamma", "T", "nodes", "samples"}})},
      {"dependence", join({kGrid, {"sigma", "nu", "mu", "gamma", "T", "dt", "eta_list", "eps", "linear"}})},
  };
  return keys;
}

Schema schema_for(const std::string& command) {
  const auto& names = command_keys().at(command);
  Schema out;
  for (const auto& spec : known_keys()) {
    if (std::find(names.begin(), names.end(), spec.key) != names.end()) out.push_back(spec);
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Common {
  std::string config;
  std::string out;
  std::string input;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> sets;
};

RunConfig load(const std::string& command, const Common& c) {
  const Schema schema = schema_for(command);
  RunConfig cfg = c.config.empty() ? RunConfig{} : parse_config(read_text(c.config), schema);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.key == key; });
    if (it == schema.end()) {
      const std::string best = nearest_key(key, schema);
      throw Error("--set: unknown key '" + key + "' for " + command +
                  (best.empty() ? "" : " (did you mean '" + best + "'?)"));
    }
    cfg.set(*it, kv.substr(eq + 1));
  }
  cfg.command = command;
  cfg.input_path = c.input;
  cfg.output_dir = c.out.empty() ? "out/" + command : c.out;
  cfg.seed = c.seed;
  cfg.threads = c.threads > 0 ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  return cfg;
}

GridSpec grid_from(const RunConfig& c, int d, int n, double L) {
  GridSpec g = make_grid(static_cast<int>(c.integer("d", d)), static_cast<int>(c.integer("n", n)),
                         c.real("L", L));
  return g;
}

Field profile_from(const RunConfig& c, const GridSpec& g) {
  if (!c.input_path.empty()) return to_space(read_field(c.input_path), Space::physical);
  return synthesize(g, GaussianRecipe{c.real("sigma", 1.0), c.real("amplitude", 1.0), {}});
}

SweepConfig sweep_from(const RunConfig& c, const std::string& name, double gamma) {
  SweepConfig s = default_sweep(name, gamma);
  s.grid = grid_from(c, s.grid.dim, s.grid.n, s.grid.box_length);
  s.setup.dim = s.grid.dim;
  s.setup.nu = c.real("nu", s.setup.nu);
  s.setup.mu = static_cast<int>(c.integer("mu", s.setup.mu));
  s.dt = c.real("dt", s.dt);
  s.sigma = c.real("sigma", s.sigma);
  s.amplitude = c.real("amplitude", s.amplitude);
  s.fit_min = c.real("fit_min", s.fit_min);
  s.fit_max = c.real("fit_max", s.fit_max);
  s.deltas = c.reals("delta_list", s.deltas);
  if (c.has("delta")) s.deltas = {c.real("delta", 0.0)};
  s.threads = c.threads;
  return s;
}

ExperimentReport run_experiment(const std::string& name, const RunConfig& c) {
  if (name == "small-dispersion") {
    const bool weighted = c.boolean("weighted", false);
    auto s = sweep_from(c, weighted ? "weighted" : name, 0.0);
    const double t = c.real("t_eval", 1.0);
    const int k = static_cast<int>(c.integer("k", 1));
    return weighted ? weighted_small_dispersion_check(s, t, k, c.real("decay_guard", 1e-2))
                    : small_dispersion_sweep(s, t, k);
  }
  if (name == "norm-scaling") {
    const double gamma = c.real("gamma", 0.0);
    NormScalingOptions o;
    o.moment_order = static_cast<int>(c.integer("moment_order", 0));
    o.refine = static_cast<int>(c.integer("refine", 2));
    return initial_norm_scaling(sweep_from(c, name, gamma), gamma, o);
  }
  if (name == "inflation") {
    const double gamma = c.real("gamma", 0.1);
    InflationOptions o;
    o.t_list = c.reals("t_list", {});
    o.n_fine = static_cast<int>(c.integer("n_fine", o.n_fine));
    o.t_inner = c.reals("t_inner_list", {});
    return norm_inflation_run(sweep_from(c, name, gamma), gamma, o);
  }
  if (name == "decoherence") {
    DecoherenceOptions o;
    o.t_inner = c.real("t_eval", o.t_inner);
    return decoherence_run(sweep_from(c, name, 0.0), c.real("a", 1.0), c.real("a_prime", 1.05), o);
  }
  if (name == "negative-gamma") {
    const double gamma = c.real("gamma", -1.0);
    NegativeGammaOptions o;
    o.moment_order = static_cast<int>(c.integer("moment_order", 1));
    o.log2_s = c.reals("log2_s_list", {});
    return negative_gamma_run(sweep_from(c, name, gamma), gamma, o);
  }
  if (name == "scattering") {
    ScatteringOptions o;
    o.grid = grid_from(c, o.grid.dim, o.grid.n, o.grid.box_length);
    o.nu = c.real("nu", o.nu);
    o.mu = static_cast<int>(c.integer("mu", o.mu));
    o.eps0 = c.real("eps0", o.eps0);
    o.sigma = c.real("sigma", o.sigma);
    o.ladder = c.reals("ladder", o.ladder);
    o.dt = c.real("dt", o.dt);
    o.nonlinear = !c.boolean("linear", false);
    return scattering_probe(o);
  }
  if (name == "strichartz") {
    StrichartzOptions o;
    o.grid = grid_from(c, o.grid.dim, o.grid.n, o.grid.box_length);
    o.p = parse_exponent(c.string("p", o.p.str()));
    o.q = parse_exponent(c.string("q", o.q.str()));
    o.gamma = c.real("gamma", o.gamma);
    o.T = c.real("T", o.T);
    o.nodes = static_cast<int>(c.integer("nodes", o.nodes));
    o.samples = static_cast<int>(c.integer("samples", o.samples));
    o.seed = c.seed;
    o.threads = c.threads;
    return strichartz_probe(o);
  }
  if (name == "dependence") {
    DependenceOptions o;
    o.grid = grid_from(c, o.grid.dim, o.grid.n, o.grid.box_length);
    o.nu = c.real("nu", o.nu);
    o.mu = static_cast<int>(c.integer("mu", o.mu));
    o.gamma = c.real("gamma", o.gamma);
    o.T = c.real("T", o.T);
    o.dt = c.real("dt", o.dt);
    o.etas = c.reals("eta_list", o.etas);
    o.eps = c.real("eps", o.eps);
    o.sigma = c.real("sigma", o.sigma);
    o.nonlinear = !c.boolean("linear", false);
    o.threads = c.threads;
    return continuous_dependence_probe(o);
  }
  throw Error("unknown experiment '" + name + "'");
}

int cmd_solve(const RunConfig& c) {
  const GridSpec g = grid_from(c, 1, 1024, 40.0);
  const Field u0 = profile_from(c, g);
  EquationParams p;
  p.nu = c.real("nu", 3.0);
  p.mu = static_cast<int>(c.integer("mu", 1));
  p.delta = c.real("delta", 1.0);
  p.nonlinear = !c.boolean("linear", false);
  MonitorSpec m;
  m.stride = static_cast<int>(c.integer("stride", 10));
  m.gammas = c.reals("gammas", {});
  m.ceiling_factor = c.real("ceiling", m.ceiling_factor);
  const bool snapshots = c.boolean("snapshots", false);
  m.keep_states = snapshots;
  const Trajectory tr = evolve(u0, c.real("T", 1.0), c.real("dt", 1e-3), p, m);

  const std::filesystem::path dir = c.output_dir;
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "trajectory.csv");
  if (!csv) throw Error("cannot write " + (dir / "trajectory.csv").string());
  csv << "t,mass,energy,linf,nonlinear_integral";
  for (double gm : m.gammas) csv << ",norm_h" << gm;
  csv << "\n" << std::setprecision(17);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& s = tr.monitors[i];
    csv << tr.times[i] << ',' << s.mass << ',' << s.energy << ',' << s.linf << ',' << s.nonlinear_integral;
    for (double v : s.norms) csv << ',' << v;
    csv << "\n";
  }
  if (snapshots) {
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      std::ostringstream name;
      name << "state_" << std::setw(5) << std::setfill('0') << i << ".hwf";
      write_field(dir / name.str(), tr.states[i]);
    }
  }
  if (tr.halted) {
    std::cerr << "halted: " << tr.halt_reason << "\n";
    return exit_inconclusive;
  }
  write_field(dir / "final.hwf", tr.states.back());
  const auto& first = tr.monitors.front();
  const auto& last = tr.monitors.back();
  std::cout << std::setprecision(10) << "samples " << tr.times.size() << "\nmass drift "
            << std::abs(last.mass - first.mass) / first.mass << "\nenergy drift "
            << std::abs(last.energy - first.energy) / std::abs(first.energy) << "\n";
  return exit_pass;
}

int cmd_norms(const RunConfig& c) {
  const GridSpec g = grid_from(c, 1, 1024, 40.0);
  const Field f = profile_from(c, g);
  std::cout << std::setprecision(15);
  if (c.has("k")) {
    std::cout << "H^{k,k} " << weighted_norm_hkk(f, static_cast<int>(c.integer("k", 1))) << "\n";
    return exit_pass;
  }
  NormSpec spec;
  spec.gamma = c.real("gamma", 0.0);
  spec.q = parse_exponent(c.string("q", "2"));
  spec.homogeneous = c.boolean("homogeneous", false);
  spec.besov = c.boolean("besov", false);
  std::cout << (spec.besov ? "besov" : "sobolev") << (spec.homogeneous ? " homogeneous" : "")
            << " gamma=" << spec.gamma << " q=" << spec.q.str() << ": " << evaluate_norm(f, spec) << "\n";
  return exit_pass;
}

int cmd_exponents(const RunConfig& c) {
  const int d = static_cast<int>(c.integer("d", 2));
  const double nu = c.real("nu", 3.0);
  std::cout << exponent_table(d, nu);
  if (c.has("gamma")) {
    const ProblemSetup s{d, nu, 1, c.real("gamma", 0.0)};
    if (d >= 2) {
      const auto v = subcritical_check(s);
      std::cout << "subcritical: " << (v.holds ? "yes" : "no") << " (" << v.reason << ")\n";
    }
    const auto ill = illposed_range_check(s);
    std::cout << "ill-posed range: " << (ill.in_range ? "yes" : "no") << " (" << ill.reason << ")\n";
  }
  return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hwlab: half-wave equation numerics"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "key = value config file");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--threads", common.threads, "worker threads (default: all cores)");
    sub->add_option("--set", common.sets, "override a config key (key=value)");
  };
  auto* solve = app.add_subcommand("solve", "evolve the equation and record monitors");
  add_common(solve);
  solve->add_option("--input", common.input, "HWF1 initial field");
  auto* norms = app.add_subcommand("norms", "evaluate a norm of a field");
  add_common(norms);
  norms->add_option("--input", common.input, "HWF1 field");
  auto* expo = app.add_subcommand("exponents", "exponent table and range checks");
  add_common(expo);
  auto* exp = app.add_subcommand("exp", "run an experiment and write report.json + series.csv");
  add_common(exp);
  std::string name;
  exp->add_option("name", name, "experiment")
      ->required()
      ->check(CLI::IsMember({"small-dispersion", "norm-scaling", "inflation", "decoherence", "negative-gamma",
                             "scattering", "strichartz", "dependence"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return cmd_solve(load("solve", common));
    if (norms->parsed()) return cmd_norms(load("norms", common));
    if (expo->parsed()) return cmd_exponents(load("exponents", common));
    const RunConfig cfg = load(name, common);
    const ExperimentReport rep = run_experiment(name, cfg);
    const int code = emit_report(rep, cfg.output_dir);
    std::cout << rep.name << ": " << to_string(rep.verdict) << " (margin " << rep.margin << ")";
    if (!rep.inconclusive_reason.empty()) std::cout << " - " << rep.inconclusive_reason;
    std::cout << "\nwrote " << cfg.output_dir << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  }
}
