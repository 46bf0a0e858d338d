#pragma once

#include "ergm_varest/estimation.hpp"
#include "ergm_varest/experiments.hpp"
#include "ergm_varest/graph.hpp"
#include "ergm_varest/meanfield.hpp"
#include "ergm_varest/model.hpp"
#include "ergm_varest/sampler.hpp"

#include <json.hpp>

#include <iosfwd>

namespace ergm::io {

using nlohmann::json;

/// Edge list: a first line "n=<nodes>", then one "i<TAB>j" line per edge
/// with i < j, in lexicographic order. Blank lines and '#' comments are
/// skipped when reading. Throws InvalidInput on malformed input.
void write_graph_tsv(std::ostream &out, const Graph &g);
Graph read_graph_tsv(std::istream &in);

/// One integer label per line.
void write_types(std::ostream &out, const NodeTypes &types);
NodeTypes read_types(std::istream &in);

/// {"beta": b, "alpha": {"kind": "parametric", "edge": e, "match": m}}
/// or kind "full" with "values" (n x n rows) or kind "block" with
/// "boundaries" and "values".
ModelParams params_from_json(const json &j);
json to_json(const ModelParams &p);

/// {"burn_in", "thin", "seed", "initial": "empty"|"full"|"random", "p"}; all optional.
ChainConfig chain_from_json(const json &j);
json to_json(const ChainConfig &c);

/// {"restarts", "tol", "max_sweeps", "seed", "form": "exact"|"squared"}; all optional.
MeanFieldOptions meanfield_options_from_json(const json &j);
json to_json(const MeanFieldOptions &o);

/// {"true_theta": [e, m, b], "n", "replications", "methods": [...], "seed",
///  "chain": {...}, "mf": {"inner": {...}, "bound", "max_iterations"},
///  "mc": {"samples", "chain": {...}}}; missing keys keep the defaults.
ExperimentConfig experiment_from_json(const json &j);
json to_json(const ExperimentConfig &c);

json to_json(const EstimationResult &r);
/// include_matrix adds mu_star as rows.
json to_json(const MFResult &r, bool include_matrix);
json to_json(const TwoGroupSolution &s);
json to_json(const PercentileTable &t);

} // namespace ergm::io
