#include "ergm_varest/errors.hpp"
#include "ergm_varest/estimation.hpp"
#include "ergm_varest/experiments.hpp"
#include "ergm_varest/graphon.hpp"
#include "ergm_varest/io.hpp"
#include "ergm_varest/meanfield.hpp"
#include "ergm_varest/model.hpp"
#include "ergm_varest/parallel.hpp"
#include "ergm_varest/sampler.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ergm;

namespace {

/// Python dict <-> nlohmann json through the json module; configs are small.
io::json to_cpp_json(const py::object &obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return io::json::parse(text);
}

py::object to_py(const io::json &j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

ModelParams make_params(const py::object &alpha, double beta) {
  if (py::isinstance<py::dict>(alpha))
    return io::params_from_json({{"alpha", to_cpp_json(alpha)}, {"beta", beta}});
  ModelParams p;
  p.alpha = FullAlpha{alpha.cast<Eigen::MatrixXd>()};
  p.beta = beta;
  validate(p.alpha);
  return p;
}

py::dict result_dict(const EstimationResult &r) {
  py::dict d = to_py(io::to_json(r));
  d["theta_hat"] = Eigen::Vector3d(r.theta_hat);
  return d;
}

TwoStarForm parse_form(const std::string &f) {
  if (f == "exact")
    return TwoStarForm::kExact;
  if (f == "squared")
    return TwoStarForm::kSquared;
  throw InvalidInput("form must be 'exact' or 'squared'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Network formation ERGM with covariates: simulation, mean-field approximation, "
            "graphon solvers and estimation";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_RuntimeError);
  py::register_exception<SeparationError>(m, "SeparationError", PyExc_RuntimeError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);

  py::class_<Graph>(m, "Graph")
      .def(py::init<int>(), py::arg("n"))
      .def_static(
          "from_edges",
          [](int n, const std::vector<std::pair<int, int>> &edges) {
            return Graph::from_edges(n, edges);
          },
          py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &Graph::size)
      .def("has_edge", &Graph::has_edge)
      .def("set_edge", &Graph::set_edge)
      .def("degree", &Graph::degree)
      .def("edge_count", &Graph::edge_count)
      .def("edges", &Graph::edge_list)
      .def("adjacency",
           [](const Graph &g) {
             Eigen::MatrixXi a = Eigen::MatrixXi::Zero(g.size(), g.size());
             for (const auto &[i, j] : g.edge_list())
               a(i, j) = a(j, i) = 1;
             return a;
           })
      .def("__eq__", [](const Graph &a, const Graph &b) { return a == b; })
      .def("__repr__", [](const Graph &g) {
        return "<Graph n=" + std::to_string(g.size()) +
               " edges=" + std::to_string(g.edge_count()) + ">";
      });

  py::class_<NodeTypes>(m, "NodeTypes")
      .def(py::init<std::vector<int>>(), py::arg("labels"))
      .def_static("balanced", &NodeTypes::balanced, py::arg("n"), py::arg("groups") = 2)
      .def_static("uniform", &NodeTypes::uniform, py::arg("n"))
      .def_readonly("labels", &NodeTypes::labels)
      .def("__len__", &NodeTypes::size);

  py::class_<ModelParams>(m, "ModelParams")
      .def_readwrite("beta", &ModelParams::beta)
      .def("to_dict", [](const ModelParams &p) { return to_py(io::to_json(p)); });

  m.def("parametric_params", py::overload_cast<double, double, double>(&parametric_params),
        py::arg("edge"), py::arg("match"), py::arg("beta"));
  m.def("model_params", &make_params, py::arg("alpha"), py::arg("beta"),
        "alpha is an n x n array or a dict such as {'kind': 'block', 'boundaries': [...], "
        "'values': [[...]]}");

  m.def("potential", py::overload_cast<const Graph &, const NodeTypes &, const ModelParams &>(
                         &potential));
  m.def("potential_difference",
        py::overload_cast<const Graph &, int, int, const NodeTypes &, const ModelParams &>(
            &potential_difference));
  m.def("sufficient_stats", [](const Graph &g, const NodeTypes &t) {
    const auto s = sufficient_stats(g, t);
    return py::dict(py::arg("edges") = s.edges, py::arg("match_edges") = s.match_edges,
                    py::arg("twostar_sum") = s.twostar_sum);
  });
  m.def("exact_psi", &exact_psi, py::arg("n"), py::arg("types"), py::arg("params"));

  m.def(
      "solve_mf",
      [](const NodeTypes &types, const ModelParams &params, int n, int restarts,
         std::uint64_t seed, double tol, const std::string &form) {
        MeanFieldOptions o;
        o.restarts = restarts;
        o.seed = seed;
        o.tol = tol;
        o.form = parse_form(form);
        MFResult r;
        {
          py::gil_scoped_release release;
          r = solve_mf(types, params, n, o);
        }
        py::dict d = to_py(io::to_json(r, false));
        d["mu_star"] = r.mu_star.matrix();
        d["objective_trace"] = r.objective_trace;
        return d;
      },
      py::arg("types"), py::arg("params"), py::arg("n"), py::arg("restarts") = 5,
      py::arg("seed") = 0, py::arg("tol") = 1e-10, py::arg("form") = "exact");

  m.def(
      "sample_chain",
      [](const NodeTypes &types, const ModelParams &params, int n, int count, std::uint64_t seed,
         std::optional<long long> burn_in, std::optional<long long> thin) {
        ChainConfig c;
        c.seed = seed;
        c.burn_in = burn_in;
        c.thin = thin;
        py::gil_scoped_release release;
        return sample_chain(c, UniformMeeting{}, types, params, n, count).samples;
      },
      py::arg("types"), py::arg("params"), py::arg("n"), py::arg("count") = 1,
      py::arg("seed") = 0, py::arg("burn_in") = py::none(), py::arg("thin") = py::none());

  m.def("two_group_solve", [](double a1, double a2, double beta) {
    return to_py(io::to_json(two_group_solve(a1, a2, beta)));
  });
  m.def("phase_threshold", &phase_threshold, py::arg("alpha_diff"));
  m.def("univariate_solver", [](double alpha, double beta) {
    const auto s = univariate_solver(alpha, beta);
    return py::dict(py::arg("x_star") = s.x_star, py::arg("value") = s.value);
  });
  m.def(
      "block_bounds",
      [](const std::vector<double> &boundaries, const Eigen::MatrixXd &values, double beta,
         int multistarts, std::uint64_t seed) {
        const auto b = block_bounds(BlockAlpha{boundaries, values}, beta, multistarts, seed);
        return py::dict(py::arg("lower") = b.lower, py::arg("upper") = b.upper,
                        py::arg("argmax_lower") = b.argmax_lower.values);
      },
      py::arg("boundaries"), py::arg("values"), py::arg("beta"), py::arg("multistarts") = 16,
      py::arg("seed") = 0);
  m.def("phase_diagram_sweep",
        [](const std::vector<double> &diffs, const std::vector<double> &betas) {
          py::list out;
          for (const auto &p : phase_diagram_sweep(diffs, betas)) {
            py::list maxima;
            for (const auto &x : p.maximizers)
              maxima.append(py::make_tuple(x.u, x.v));
            out.append(py::dict(py::arg("alpha_diff") = p.alpha_diff, py::arg("beta") = p.beta,
                                py::arg("threshold") = p.threshold, py::arg("psi") = p.psi,
                                py::arg("maximizers") = maxima));
          }
          return out;
        });

  m.def("change_stat", &change_stat);
  m.def("potential_stats", &potential_stats);
  m.def("mple", [](const Graph &g, const NodeTypes &t) { return result_dict(mple(g, t)); });
  m.def(
      "mf_mle",
      [](const Graph &g, const NodeTypes &t, std::optional<Eigen::Vector3d> start,
         std::optional<double> fixed_beta, std::uint64_t seed, int restarts) {
        MfMleOptions o;
        if (start)
          o.start = *start;
        o.fixed_beta = fixed_beta;
        o.inner.seed = seed;
        o.inner.restarts = restarts;
        o.inner.keep_trace = false;
        EstimationResult r;
        {
          py::gil_scoped_release release;
          r = mf_mle(g, t, o);
        }
        return result_dict(r);
      },
      py::arg("graph"), py::arg("types"), py::arg("start") = py::none(),
      py::arg("fixed_beta") = py::none(), py::arg("seed") = 0, py::arg("restarts") = 5);
  m.def(
      "mc_mle",
      [](const Graph &g, const NodeTypes &t, const Eigen::Vector3d &theta0, int samples,
         std::uint64_t seed, std::optional<long long> burn_in, std::optional<long long> thin) {
        McMleOptions o;
        o.samples = samples;
        o.chain.seed = seed;
        o.chain.burn_in = burn_in;
        o.chain.thin = thin;
        EstimationResult r;
        {
          py::gil_scoped_release release;
          r = mc_mle(g, t, theta0, o);
        }
        return result_dict(r);
      },
      py::arg("graph"), py::arg("types"), py::arg("theta0"), py::arg("samples") = 1000,
      py::arg("seed") = 0, py::arg("burn_in") = py::none(), py::arg("thin") = py::none());

  m.def(
      "run_experiment",
      [](const py::dict &config) {
        const auto c = io::experiment_from_json(to_cpp_json(config));
        PercentileTable t;
        {
          py::gil_scoped_release release;
          t = run_experiment(c);
        }
        return to_py(io::to_json(t));
      },
      py::arg("config"));

  m.def("set_max_threads", &set_max_threads, py::arg("threads"));
  m.def("max_threads", &max_threads);
}
