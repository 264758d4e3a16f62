#include "gdpp/bench.hpp"

#include <json.hpp>

namespace gdpp {

using nlohmann::json;

std::string sample_set_to_json(const SampleSet& s, std::string_view method, std::uint64_t seed) {
  return json{{"method", method}, {"seed", seed}, {"nodes", s.nodes}}.dump();
}

LabeledSampleSet parse_sample_set_json(std::string_view text) {
  const json j = json::parse(text);
  LabeledSampleSet out;
  if (j.is_array()) {
    out.sample.nodes = j.get<std::vector<Index>>();
    return out;
  }
  out.sample.nodes = j.at("nodes").get<std::vector<Index>>();
  out.method = j.value("method", "");
  out.seed = j.value("seed", std::uint64_t{0});
  return out;
}

std::string filter_spec_to_json(const ChebyshevFilter<double>& f) {
  return json{{"lambda_k", f.cutoff}, {"lambda_max", f.lambda_max}, {"r", f.degree()}, {"jackson", f.jackson}}.dump();
}

ChebyshevFilter<double> filter_from_json(std::string_view text) {
  const json j = json::parse(text);
  return fit_ideal_lowpass(j.at("lambda_k").get<double>(), j.at("lambda_max").get<double>(), j.at("r").get<Index>(),
                           j.value("jackson", true));
}

namespace {

CutoffSource cutoff_from_string(const std::string& s) {
  if (s == "estimated") return CutoffSource::Estimated;
  if (s == "exact") return CutoffSource::Exact;
  throw std::invalid_argument("lambda_k must be \"estimated\" or \"exact\"");
}

}  // namespace

BenchConfig parse_bench_config(std::string_view json_text) {
  const json j = json::parse(json_text);
  BenchConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.sbm.seed = cfg.seed;
  if (j.contains("graph")) {
    const auto& g = j.at("graph");
    const std::string type = g.value("type", g.contains("path") ? "file" : "sbm");
    if (type == "file") {
      cfg.graph_path = g.at("path").get<std::string>();
    } else if (type == "sbm") {
      cfg.sbm.n_nodes = g.value("n_nodes", cfg.sbm.n_nodes);
      cfg.sbm.n_communities = g.value("n_communities", cfg.sbm.n_communities);
      cfg.sbm.epsilon_ratio = g.value("epsilon_ratio", cfg.sbm.epsilon_ratio);
      cfg.sbm.average_degree = g.value("average_degree", cfg.sbm.average_degree);
      cfg.sbm.seed = g.value("seed", cfg.sbm.seed);
    } else {
      throw std::invalid_argument("graph.type must be \"sbm\" or \"file\"");
    }
  }
  cfg.k = j.value("k", cfg.k);
  if (j.contains("m_grid")) cfg.m_grid = j.at("m_grid").get<std::vector<Index>>();
  cfg.n_signals = j.value("n_signals", cfg.n_signals);
  cfg.noise_std = j.value("noise_std", cfg.noise_std);
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods")) cfg.methods.push_back(method_from_string(m.get<std::string>()));
  }
  cfg.r = j.value("r", cfg.r);
  cfg.n_probes = j.value("n_probes", cfg.n_probes);
  cfg.jackson = j.value("jackson", cfg.jackson);
  if (j.contains("lambda_k")) cfg.cutoff = cutoff_from_string(j.at("lambda_k").get<std::string>());
  cfg.validate();
  return cfg;
}

std::string bench_config_to_json(const BenchConfig& cfg) {
  json graph;
  if (cfg.graph_path) {
    graph = {{"type", "file"}, {"path", cfg.graph_path->string()}};
  } else {
    graph = {{"type", "sbm"},
             {"n_nodes", cfg.sbm.n_nodes},
             {"n_communities", cfg.sbm.n_communities},
             {"epsilon_ratio", cfg.sbm.epsilon_ratio},
             {"average_degree", cfg.sbm.average_degree},
             {"seed", cfg.sbm.seed}};
  }
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  return json{{"graph", graph},
              {"k", cfg.k},
              {"m_grid", cfg.m_grid},
              {"n_signals", cfg.n_signals},
              {"noise_std", cfg.noise_std},
              {"methods", methods},
              {"r", cfg.r},
              {"n_probes", cfg.n_probes},
              {"jackson", cfg.jackson},
              {"lambda_k", cfg.cutoff == CutoffSource::Exact ? "exact" : "estimated"},
              {"seed", cfg.seed}}
      .dump(2);
}

}  // namespace gdpp
