#include "ergm_varest/cli.hpp"

#include "ergm_varest/errors.hpp"
#include "ergm_varest/estimation.hpp"
#include "ergm_varest/experiments.hpp"
#include "ergm_varest/graphon.hpp"
#include "ergm_varest/io.hpp"
#include "ergm_varest/meanfield.hpp"
#include "ergm_varest/parallel.hpp"
#include "ergm_varest/sampler.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace ergm::cli {

using io::json;

std::string file_digest(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InvalidInput("cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize k = 0; k < in.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

namespace {

std::ifstream open_in(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InvalidInput("cannot open " + path);
  return in;
}

json read_json_file(const std::string &path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

/// Every file a run writes goes through here so the manifest can list it.
class Outputs {
public:
  std::ofstream open(const std::string &path) {
    std::ofstream f(path);
    if (!f)
      throw InvalidInput("cannot write " + path);
    paths_.push_back(path);
    return f;
  }
  const std::vector<std::string> &paths() const { return paths_; }

private:
  std::vector<std::string> paths_;
};

/// Model given either as a params JSON file or as parametric flags.
struct ModelArgs {
  std::string params_file;
  double edge = 0.0;
  double match = 0.0;
  double beta = 0.0;
  std::string types_file;
  int groups = 2;
  int n = 0;

  void add_to(CLI::App &app, bool need_n) {
    app.add_option("--params", params_file, "JSON params file (overrides --edge/--match/--beta)");
    app.add_option("--edge", edge, "theta_edge of the parametric alpha");
    app.add_option("--match", match, "theta_match of the parametric alpha");
    app.add_option("--beta", beta, "two-star coefficient");
    app.add_option("--types", types_file, "node type labels, one per line");
    app.add_option("--groups", groups, "balanced groups when --types is absent")
        ->check(CLI::PositiveNumber);
    auto *o = app.add_option("--n", n, "number of nodes (taken from --types when given)");
    if (need_n)
      o->check(CLI::PositiveNumber);
  }

  ModelParams params() const {
    if (!params_file.empty())
      return io::params_from_json(read_json_file(params_file));
    return parametric_params(edge, match, beta);
  }

  NodeTypes types() const {
    if (!types_file.empty()) {
      auto in = open_in(types_file);
      auto t = io::read_types(in);
      if (n > 0 && t.size() != n)
        throw InvalidInput("--types has " + std::to_string(t.size()) + " labels but --n is " +
                           std::to_string(n));
      return t;
    }
    if (n < 1)
      throw InvalidInput("--n is required when --types is absent");
    return NodeTypes::balanced(n, groups);
  }

  json describe() const {
    json j = {{"params", io::to_json(params())}};
    if (!types_file.empty())
      j["types_file"] = types_file;
    else
      j["groups"] = groups;
    return j;
  }
};

struct Context {
  Context(std::ostream &o, std::ostream &e) : out(o), err(e) {}

  std::ostream &out;
  std::ostream &err;
  Outputs outputs;
  json config;
  std::uint64_t seed = 0;
  bool nonconverged = false; ///< some reported result did not converge
};

void emit_json(Context &ctx, const json &j, const std::string &path) {
  if (path.empty()) {
    ctx.out << j.dump(2) << '\n';
    return;
  }
  auto f = ctx.outputs.open(path);
  f << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  ModelArgs model;
  int count = 1;
  std::optional<long long> burn_in;
  std::optional<long long> thin;
  std::uint64_t seed = 0;
  std::string initial = "empty";
  double p = 0.5;
  std::string out;
  std::string trace;
  std::string types_out;
};

void run_simulate(Context &ctx, const SimulateArgs &a) {
  const auto types = a.model.types();
  const int n = types.size();
  ChainConfig chain;
  chain.burn_in = a.burn_in;
  chain.thin = a.thin;
  chain.seed = a.seed;
  chain.initial = io::chain_from_json({{"initial", a.initial}, {"p", a.p}}).initial;
  const auto params = a.model.params();
  const auto run = sample_chain(chain, UniformMeeting{}, types, params, n, a.count);
  for (int k = 0; k < a.count; ++k) {
    auto f = ctx.outputs.open(a.count == 1 ? a.out : a.out + "." + std::to_string(k));
    io::write_graph_tsv(f, run.samples[k]);
  }
  if (!a.trace.empty()) {
    auto f = ctx.outputs.open(a.trace);
    f << "step,edges,match_edges,twostar_sum\n";
    for (const auto &r : run.trace)
      f << r.step << ',' << r.edges << ',' << r.match_edges << ',' << r.twostar_sum << '\n';
  }
  if (!a.types_out.empty()) {
    auto f = ctx.outputs.open(a.types_out);
    io::write_types(f, types);
  }
  ctx.seed = a.seed;
  ctx.config = a.model.describe();
  ctx.config["n"] = n;
  ctx.config["count"] = a.count;
  ctx.config["chain"] = io::to_json(chain);
  ctx.config["burn_in_steps"] = chain.burn_in_for(n);
  ctx.config["thin_steps"] = chain.thin_for(n);
}

// --------------------------------------------------------------- meanfield

struct MeanfieldArgs {
  ModelArgs model;
  int restarts = 5;
  double tol = 1e-10;
  int max_sweeps = 10000;
  std::uint64_t seed = 0;
  std::string form = "exact";
  bool matrix = false;
  std::string out;
};

void run_meanfield(Context &ctx, const MeanfieldArgs &a) {
  const auto types = a.model.types();
  auto o = io::meanfield_options_from_json(
      {{"restarts", a.restarts}, {"tol", a.tol}, {"max_sweeps", a.max_sweeps},
       {"seed", a.seed}, {"form", a.form}});
  o.keep_trace = false;
  const auto r = solve_mf(types, a.model.params(), types.size(), o);
  json j = io::to_json(r, a.matrix);
  j["n"] = types.size();
  emit_json(ctx, j, a.out);
  ctx.seed = a.seed;
  ctx.config = a.model.describe();
  ctx.config["n"] = types.size();
  ctx.config["options"] = io::to_json(o);
  if (!r.converged)
    ctx.nonconverged = true;
}

// ------------------------------------------------------------------- exact

struct ExactArgs {
  ModelArgs model;
  bool chain = false;
  std::string out;
};

void run_exact(Context &ctx, const ExactArgs &a) {
  const auto types = a.model.types();
  const auto params = a.model.params();
  const int n = types.size();
  json j = {{"n", n}, {"psi", exact_psi(n, types, params)}};
  if (a.chain) {
    const auto s = exact_stationary_distribution(n, UniformMeeting{}, types, params);
    j["stationary_max_discrepancy"] = s.max_discrepancy;
    j["stationary"] = s.from_transition;
  }
  emit_json(ctx, j, a.out);
  ctx.config = a.model.describe();
  ctx.config["n"] = n;
  ctx.config["chain"] = a.chain;
}

// ------------------------------------------------------------- solve2group

struct TwoGroupArgs {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta = 0.0;
  std::string out;
};

void run_solve2group(Context &ctx, const TwoGroupArgs &a) {
  json j = io::to_json(two_group_solve(a.alpha1, a.alpha2, a.beta));
  j["alpha1"] = a.alpha1;
  j["alpha2"] = a.alpha2;
  j["beta"] = a.beta;
  emit_json(ctx, j, a.out);
  ctx.config = {{"alpha1", a.alpha1}, {"alpha2", a.alpha2}, {"beta", a.beta}};
}

// ------------------------------------------------------------- phase-sweep

struct SweepArgs {
  double dmin = -4.0, dmax = 4.0;
  int dsteps = 50;
  double bmin = 0.0, bmax = 8.0;
  int bsteps = 50;
  std::string out;
};

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1)
    throw InvalidInput("grid needs at least one point");
  if (steps == 1)
    return {lo};
  std::vector<double> g(steps);
  for (int k = 0; k < steps; ++k)
    g[k] = lo + (hi - lo) * k / (steps - 1);
  return g;
}

void run_sweep(Context &ctx, const SweepArgs &a) {
  const auto points =
      phase_diagram_sweep(linspace(a.dmin, a.dmax, a.dsteps), linspace(a.bmin, a.bmax, a.bsteps));
  auto f = ctx.outputs.open(a.out);
  write_phase_csv(f, points);
  ctx.config = {{"alpha_diff", {a.dmin, a.dmax, a.dsteps}}, {"beta", {a.bmin, a.bmax, a.bsteps}}};
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string graph;
  std::string types;
  int groups = 2;
  std::string method = "mple";
  std::uint64_t seed = 0;
  std::string out;
  int samples = 1000;
  std::vector<double> theta0;
  std::optional<double> fixed_beta;
};

void run_estimate(Context &ctx, const EstimateArgs &a) {
  auto gin = open_in(a.graph);
  const Graph g = io::read_graph_tsv(gin);
  NodeTypes types = NodeTypes::balanced(g.size(), a.groups);
  if (!a.types.empty()) {
    auto tin = open_in(a.types);
    types = io::read_types(tin);
  }
  const Method m = parse_method(a.method);
  EstimationResult r;
  json cfg = {{"graph", a.graph}, {"method", to_string(m)}, {"n", g.size()}};
  switch (m) {
  case Method::kMPLE:
    r = mple(g, types);
    break;
  case Method::kMFMLE: {
    MfMleOptions o;
    o.inner.seed = a.seed;
    o.inner.keep_trace = false;
    o.fixed_beta = a.fixed_beta;
    r = mf_mle(g, types, o);
    cfg["inner"] = io::to_json(o.inner);
    cfg["bound"] = o.bound;
    break;
  }
  case Method::kMCMLE: {
    McMleOptions o;
    o.samples = a.samples;
    o.chain.seed = a.seed;
    Theta theta0;
    if (a.theta0.empty()) {
      theta0 = mple(g, types).theta_hat;
    } else if (a.theta0.size() == 3) {
      theta0 = Theta(a.theta0[0], a.theta0[1], a.theta0[2]);
    } else {
      throw InvalidInput("--theta0 takes three values");
    }
    r = mc_mle(g, types, theta0, o);
    cfg["samples"] = a.samples;
    cfg["theta0"] = {theta0[0], theta0[1], theta0[2]};
    cfg["chain"] = io::to_json(o.chain);
    break;
  }
  }
  emit_json(ctx, io::to_json(r), a.out);
  if (!a.types.empty())
    cfg["types_file"] = a.types;
  ctx.config = cfg;
  ctx.seed = a.seed;
  if (!r.converged)
    ctx.nonconverged = true;
}

// -------------------------------------------------------------- montecarlo

struct MonteCarloArgs {
  std::string config;
  std::string out;
  std::string json_out;
};

void run_montecarlo(Context &ctx, const MonteCarloArgs &a) {
  const auto config = io::experiment_from_json(read_json_file(a.config));
  const auto table = run_experiment(config);
  {
    auto f = ctx.outputs.open(a.out);
    write_percentile_csv(f, table);
  }
  if (!a.json_out.empty()) {
    json runs = json::object();
    for (const auto &s : table.methods) {
      json list = json::array();
      for (const auto &r : s.runs)
        list.push_back(io::to_json(r));
      runs[to_string(s.method)] = list;
    }
    emit_json(ctx, {{"table", io::to_json(table)}, {"runs", runs}}, a.json_out);
  }
  ctx.config = io::to_json(config);
  ctx.seed = config.seed;
  for (const auto &s : table.methods)
    if (s.nonconverged > 0)
      ctx.nonconverged = true;
}

void write_manifest(Context &ctx, const std::string &subcommand, const std::string &path,
                    double seconds) {
  json digests = json::object();
  for (const auto &p : ctx.outputs.paths())
    digests[p] = file_digest(p);
  const json manifest = {{"subcommand", subcommand},
                         {"config", ctx.config},
                         {"seed", ctx.seed},
                         {"artifact_version", kVersion},
                         {"threads", max_threads()},
                         {"wall_time_seconds", seconds},
                         {"output_digests_fnv1a64", digests}};
  std::ofstream f(path);
  if (!f)
    throw InvalidInput("cannot write manifest " + path);
  f << manifest.dump(2) << '\n';
}

} // namespace

int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Network formation ERGM: simulation, mean-field approximation, estimation",
               "ergm_varest"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  unsigned threads = 0;
  std::string manifest;
  bool strict = false;
  app.add_option("--threads", threads, "worker cap (default: ERGM_VAREST_THREADS or all cores)");
  app.add_option("--manifest", manifest,
                 "run manifest path (default: <first output>.manifest.json)");
  app.add_flag("--strict", strict, "exit with code 4 when a result did not converge");

  SimulateArgs sim;
  auto *c_sim = app.add_subcommand("simulate", "sample networks with the Glauber chain");
  sim.model.add_to(*c_sim, true);
  c_sim->add_option("--count", sim.count, "networks to keep")->check(CLI::PositiveNumber);
  c_sim->add_option("--burn-in", sim.burn_in, "burn-in steps (default 500 n^2)");
  c_sim->add_option("--thin", sim.thin, "steps between kept networks (default 100 n^2)");
  c_sim->add_option("--seed", sim.seed);
  c_sim->add_option("--init", sim.initial, "empty | full | random");
  c_sim->add_option("--init-p", sim.p, "link probability for --init random");
  c_sim->add_option("--out", sim.out, "graph TSV (suffix .k when --count > 1)")->required();
  c_sim->add_option("--trace", sim.trace, "CSV of sufficient statistics per kept network");
  c_sim->add_option("--types-out", sim.types_out, "write the node types used");

  MeanfieldArgs mf;
  auto *c_mf = app.add_subcommand("meanfield", "solve the mean-field problem");
  mf.model.add_to(*c_mf, true);
  c_mf->add_option("--restarts", mf.restarts)->check(CLI::PositiveNumber);
  c_mf->add_option("--tol", mf.tol);
  c_mf->add_option("--max-sweeps", mf.max_sweeps)->check(CLI::PositiveNumber);
  c_mf->add_option("--seed", mf.seed);
  c_mf->add_option("--form", mf.form, "exact | squared two-star expectation");
  c_mf->add_flag("--matrix", mf.matrix, "include the marginal matrix");
  c_mf->add_option("--out", mf.out, "JSON output (default stdout)");

  ExactArgs ex;
  auto *c_ex = app.add_subcommand("exact", "psi by enumeration (n <= 6)");
  ex.model.add_to(*c_ex, true);
  c_ex->add_flag("--chain", ex.chain, "also compare the chain's stationary law (n <= 4)");
  c_ex->add_option("--out", ex.out, "JSON output (default stdout)");

  TwoGroupArgs tg;
  auto *c_tg = app.add_subcommand("solve2group", "two equal groups graphon problem");
  c_tg->add_option("--alpha1", tg.alpha1, "within-group alpha")->required();
  c_tg->add_option("--alpha2", tg.alpha2, "across-group alpha")->required();
  c_tg->add_option("--beta", tg.beta)->required();
  c_tg->add_option("--out", tg.out, "JSON output (default stdout)");

  SweepArgs sw;
  auto *c_sw = app.add_subcommand("phase-sweep", "maximizer count on alpha1 + alpha2 + beta = 0");
  c_sw->add_option("--dmin", sw.dmin);
  c_sw->add_option("--dmax", sw.dmax);
  c_sw->add_option("--dsteps", sw.dsteps)->check(CLI::PositiveNumber);
  c_sw->add_option("--bmin", sw.bmin);
  c_sw->add_option("--bmax", sw.bmax);
  c_sw->add_option("--bsteps", sw.bsteps)->check(CLI::PositiveNumber);
  c_sw->add_option("--out", sw.out, "CSV output")->required();

  EstimateArgs est;
  auto *c_est = app.add_subcommand("estimate", "estimate (theta_edge, theta_match, beta)");
  c_est->add_option("--graph", est.graph, "graph TSV")->required();
  c_est->add_option("--types", est.types, "node types (default: balanced --groups)");
  c_est->add_option("--groups", est.groups)->check(CLI::PositiveNumber);
  c_est->add_option("--method", est.method, "mple | mfmle | mcmle");
  c_est->add_option("--seed", est.seed);
  c_est->add_option("--samples", est.samples, "mcmle draws")->check(CLI::PositiveNumber);
  c_est->add_option("--theta0", est.theta0, "mcmle reference point (default: MPLE)")
      ->expected(3);
  c_est->add_option("--fixed-beta", est.fixed_beta, "mfmle: hold beta fixed");
  c_est->add_option("--out", est.out, "JSON output (default stdout)");

  MonteCarloArgs mc;
  auto *c_mc = app.add_subcommand("montecarlo", "replicated estimation experiment");
  c_mc->add_option("--config", mc.config, "experiment JSON")->required();
  c_mc->add_option("--out", mc.out, "percentile CSV")->required();
  c_mc->add_option("--json", mc.json_out, "table and per-replication results as JSON");

  if (args.empty()) {
    out << app.help();
    return kInvalidInput;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  Context ctx{out, err};
  const auto t0 = std::chrono::steady_clock::now();
  std::string name;
  try {
    if (threads > 0)
      set_max_threads(threads);
    if (c_sim->parsed()) {
      name = "simulate";
      run_simulate(ctx, sim);
    } else if (c_mf->parsed()) {
      name = "meanfield";
      run_meanfield(ctx, mf);
    } else if (c_ex->parsed()) {
      name = "exact";
      run_exact(ctx, ex);
    } else if (c_tg->parsed()) {
      name = "solve2group";
      run_solve2group(ctx, tg);
    } else if (c_sw->parsed()) {
      name = "phase-sweep";
      run_sweep(ctx, sw);
    } else if (c_est->parsed()) {
      name = "estimate";
      run_estimate(ctx, est);
    } else if (c_mc->parsed()) {
      name = "montecarlo";
      run_montecarlo(ctx, mc);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (manifest.empty())
      manifest = ctx.outputs.paths().empty() ? std::string("ergm_varest_manifest.json")
                                             : ctx.outputs.paths().front() + ".manifest.json";
    write_manifest(ctx, name, manifest, seconds);
  } catch (const InvalidInput &e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const SeparationError &e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ResourceLimit &e) {
    err << "error: " << e.what() << '\n';
    return kResourceLimit;
  } catch (const NonConvergence &e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  }
  if (ctx.nonconverged) {
    err << "warning: " << name << " result did not converge\n";
    if (strict)
      return kNonConvergence;
  }
  return kOk;
}

} // namespace ergm::cli
