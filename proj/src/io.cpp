#include "ergm_varest/io.hpp"

#include "ergm_varest/errors.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace ergm::io {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool skip_line(const std::string &line) { return line.empty() || line[0] == '#'; }

/// Reads key with the given type, keeping `fallback` when absent.
template <class T> T value_or(const json &j, const char *key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null())
    return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw InvalidInput(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

Eigen::MatrixXd matrix_from_json(const json &rows, const char *what) {
  if (!rows.is_array() || rows.empty())
    throw InvalidInput(std::string(what) + " must be a non-empty array of rows");
  const auto r = rows.size();
  const auto c = rows.front().is_array() ? rows.front().size() : 0;
  Eigen::MatrixXd m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (!rows[i].is_array() || rows[i].size() != c)
      throw InvalidInput(std::string(what) + " rows must have equal length");
    for (std::size_t k = 0; k < c; ++k) {
      if (!rows[i][k].is_number())
        throw InvalidInput(std::string(what) + " entries must be numbers");
      m(i, k) = rows[i][k].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vec3(const Eigen::Vector3d &v) { return json::array({v[0], v[1], v[2]}); }

json point_json(const TwoGroupPoint &p) {
  return {{"gamma", p.gamma}, {"u", p.u}, {"v", p.v}, {"value", p.value},
          {"hessian", to_string(p.hessian)}};
}

} // namespace

void write_graph_tsv(std::ostream &out, const Graph &g) {
  out << "n=" << g.size() << '\n';
  for (const auto &[i, j] : g.edge_list())
    out << i << '\t' << j << '\n';
}

Graph read_graph_tsv(std::istream &in) {
  std::string line;
  int n = -1;
  while (std::getline(in, line)) {
    line = trim(line);
    if (skip_line(line))
      continue;
    if (line.rfind("n=", 0) != 0)
      throw InvalidInput("graph file must start with a line n=<nodes>");
    try {
      std::size_t used = 0;
      n = std::stoi(line.substr(2), &used);
      if (used != line.size() - 2)
        throw InvalidInput("");
    } catch (const std::exception &) {
      throw InvalidInput("bad node count line: " + line);
    }
    break;
  }
  if (n < 1)
    throw InvalidInput("graph file has no valid n=<nodes> header");
  Graph g(n);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (skip_line(line))
      continue;
    std::istringstream fields(line);
    long long i = -1, j = -1;
    std::string extra;
    if (!(fields >> i >> j) || (fields >> extra))
      throw InvalidInput("edge line " + std::to_string(lineno) + " is not 'i<TAB>j': " + line);
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw InvalidInput("edge line " + std::to_string(lineno) + " has an invalid pair");
    g.set_edge(static_cast<int>(i), static_cast<int>(j), true);
  }
  return g;
}

void write_types(std::ostream &out, const NodeTypes &types) {
  for (int l : types.labels)
    out << l << '\n';
}

NodeTypes read_types(std::istream &in) {
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (skip_line(line))
      continue;
    try {
      std::size_t used = 0;
      labels.push_back(std::stoi(line, &used));
      if (used != line.size())
        throw InvalidInput("");
    } catch (const std::exception &) {
      throw InvalidInput("type label is not an integer: " + line);
    }
  }
  return NodeTypes(std::move(labels));
}

ModelParams params_from_json(const json &j) {
  if (!j.is_object() || !j.contains("alpha"))
    throw InvalidInput("params need an \"alpha\" object");
  ModelParams p;
  p.beta = value_or(j, "beta", 0.0);
  const json &a = j.at("alpha");
  const auto kind = value_or<std::string>(a, "kind", "parametric");
  if (kind == "parametric") {
    p.alpha = ParametricAlpha{value_or(a, "edge", 0.0), value_or(a, "match", 0.0)};
  } else if (kind == "full") {
    if (!a.contains("values"))
      throw InvalidInput("full alpha needs \"values\"");
    p.alpha = FullAlpha{matrix_from_json(a.at("values"), "alpha values")};
  } else if (kind == "block") {
    if (!a.contains("values") || !a.contains("boundaries"))
      throw InvalidInput("block alpha needs \"boundaries\" and \"values\"");
    p.alpha = BlockAlpha{value_or<std::vector<double>>(a, "boundaries", {}),
                         matrix_from_json(a.at("values"), "alpha values")};
  } else {
    throw InvalidInput("unknown alpha kind: " + kind);
  }
  validate(p.alpha);
  return p;
}

json to_json(const ModelParams &p) {
  json a;
  if (const auto *x = std::get_if<ParametricAlpha>(&p.alpha))
    a = {{"kind", "parametric"}, {"edge", x->edge}, {"match", x->match}};
  else if (const auto *x = std::get_if<FullAlpha>(&p.alpha))
    a = {{"kind", "full"}, {"values", matrix_to_json(x->values)}};
  else if (const auto *x = std::get_if<BlockAlpha>(&p.alpha))
    a = {{"kind", "block"}, {"boundaries", x->boundaries}, {"values", matrix_to_json(x->values)}};
  return {{"alpha", a}, {"beta", p.beta}};
}

ChainConfig chain_from_json(const json &j) {
  ChainConfig c;
  if (j.is_null())
    return c;
  if (j.contains("burn_in") && !j.at("burn_in").is_null())
    c.burn_in = value_or<long long>(j, "burn_in", 0);
  if (j.contains("thin") && !j.at("thin").is_null())
    c.thin = value_or<long long>(j, "thin", 0);
  c.seed = value_or<std::uint64_t>(j, "seed", 0);
  const auto init = value_or<std::string>(j, "initial", "empty");
  if (init == "empty")
    c.initial = InitialState::empty();
  else if (init == "full")
    c.initial = InitialState::full();
  else if (init == "random")
    c.initial = InitialState::random(value_or(j, "p", 0.5));
  else
    throw InvalidInput("initial state must be empty, full or random, got " + init);
  return c;
}

json to_json(const ChainConfig &c) {
  json j;
  j["burn_in"] = c.burn_in ? json(*c.burn_in) : json(nullptr);
  j["thin"] = c.thin ? json(*c.thin) : json(nullptr);
  j["seed"] = c.seed;
  switch (c.initial.kind) {
  case InitialState::Kind::kEmpty:
    j["initial"] = "empty";
    break;
  case InitialState::Kind::kFull:
    j["initial"] = "full";
    break;
  case InitialState::Kind::kRandom:
    j["initial"] = "random";
    j["p"] = c.initial.p;
    break;
  case InitialState::Kind::kGraph:
    j["initial"] = "graph";
    break;
  }
  return j;
}

MeanFieldOptions meanfield_options_from_json(const json &j) {
  MeanFieldOptions o;
  if (j.is_null())
    return o;
  o.restarts = value_or(j, "restarts", o.restarts);
  o.tol = value_or(j, "tol", o.tol);
  o.max_sweeps = value_or(j, "max_sweeps", o.max_sweeps);
  o.seed = value_or(j, "seed", o.seed);
  const auto form = value_or<std::string>(j, "form", "exact");
  if (form == "exact")
    o.form = TwoStarForm::kExact;
  else if (form == "squared")
    o.form = TwoStarForm::kSquared;
  else
    throw InvalidInput("two-star form must be exact or squared, got " + form);
  return o;
}

json to_json(const MeanFieldOptions &o) {
  return {{"restarts", o.restarts},
          {"tol", o.tol},
          {"max_sweeps", o.max_sweeps},
          {"seed", o.seed},
          {"form", o.form == TwoStarForm::kExact ? "exact" : "squared"}};
}

ExperimentConfig experiment_from_json(const json &j) {
  if (!j.is_object())
    throw InvalidInput("experiment config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("true_theta")) {
    const auto t = value_or<std::vector<double>>(j, "true_theta", {});
    if (t.size() != 3)
      throw InvalidInput("true_theta must have three entries");
    c.true_theta = Theta(t[0], t[1], t[2]);
  }
  c.n = value_or(j, "n", c.n);
  c.replications = value_or(j, "replications", c.replications);
  c.seed = value_or(j, "seed", c.seed);
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto &m : value_or<std::vector<std::string>>(j, "methods", {}))
      c.methods.push_back(parse_method(m));
  }
  if (j.contains("chain"))
    c.chain = chain_from_json(j.at("chain"));
  if (j.contains("mf")) {
    const json &m = j.at("mf");
    if (m.contains("inner"))
      c.mf.inner = meanfield_options_from_json(m.at("inner"));
    c.mf.bound = value_or(m, "bound", c.mf.bound);
    c.mf.max_iterations = value_or(m, "max_iterations", c.mf.max_iterations);
    c.mf.simplex_tol = value_or(m, "simplex_tol", c.mf.simplex_tol);
  }
  if (j.contains("mc")) {
    const json &m = j.at("mc");
    c.mc.samples = value_or(m, "samples", c.mc.samples);
    c.mc.min_ess_fraction = value_or(m, "min_ess_fraction", c.mc.min_ess_fraction);
    if (m.contains("chain"))
      c.mc.chain = chain_from_json(m.at("chain"));
  }
  c.mf.inner.keep_trace = false;
  c.validate();
  return c;
}

json to_json(const ExperimentConfig &c) {
  json methods = json::array();
  for (Method m : c.methods)
    methods.push_back(to_string(m));
  return {{"true_theta", vec3(c.true_theta)},
          {"n", c.n},
          {"replications", c.replications},
          {"methods", methods},
          {"seed", c.seed},
          {"chain", to_json(c.chain)},
          {"mf",
           {{"inner", to_json(c.mf.inner)},
            {"bound", c.mf.bound},
            {"max_iterations", c.mf.max_iterations},
            {"simplex_tol", c.mf.simplex_tol}}},
          {"mc",
           {{"samples", c.mc.samples},
            {"min_ess_fraction", c.mc.min_ess_fraction},
            {"chain", to_json(c.mc.chain)}}}};
}

json to_json(const EstimationResult &r) {
  json theta = vec3(r.theta_hat);
  for (auto &v : theta)
    if (!std::isfinite(v.get<double>()))
      v = nullptr;
  return {{"theta_hat", theta},
          {"objective_at_opt", std::isfinite(r.objective) ? json(r.objective) : json(nullptr)},
          {"method", to_string(r.method)},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"diagnostics", r.diagnostics},
          {"message", r.message}};
}

json to_json(const MFResult &r, bool include_matrix) {
  json j = {{"psi_mf", r.psi_mf},
            {"iterations", r.iterations},
            {"restarts_used", r.restarts_used},
            {"best_restart", r.best_restart},
            {"converged", r.converged},
            {"restart_objectives", r.restart_objectives}};
  if (include_matrix)
    j["mu_star"] = matrix_to_json(r.mu_star.matrix());
  return j;
}

json to_json(const TwoGroupSolution &s) {
  json stationary = json::array();
  for (const auto &p : s.stationary_points)
    stationary.push_back(point_json(p));
  json maxima = json::array();
  for (const auto &p : s.global_maximizers)
    maxima.push_back(point_json(p));
  return {{"gamma_roots", s.gamma_roots},
          {"stationary_points", stationary},
          {"global_maximizers", maxima},
          {"psi", s.psi},
          {"phase_transition", s.phase_transition},
          {"beta_threshold", s.beta_threshold}};
}

json to_json(const PercentileTable &t) {
  static const char *names[] = {"theta_edge", "theta_match", "beta"};
  json out = json::array();
  for (const auto &s : t.methods) {
    json params;
    for (int c = 0; c < 3; ++c) {
      const auto &p = s.params[c];
      params[names[c]] = {{"median", p.median}, {"p5", p.p5}, {"p25", p.p25},
                          {"p75", p.p75},       {"p95", p.p95}};
    }
    out.push_back({{"method", to_string(s.method)},
                   {"converged", s.converged},
                   {"n_nonconverged", s.nonconverged},
                   {"params", params}});
  }
  return out;
}

} // namespace ergm::io
