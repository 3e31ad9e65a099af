#pragma once

// Builders and random generators shared by the unit and acceptance tests.

#include <cstdint>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include "sgaug/core_model.hpp"
#include "sgaug/dataset.hpp"
#include "sgaug/rng.hpp"

namespace sgaug::testing {

inline std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline Vocabulary make_vocab(std::size_t objects, std::size_t predicates) {
  return Vocabulary(numbered("obj", objects), numbered("pred", predicates));
}

// Node i gets box [i, i, i+1, i+1] so boxes are distinct and valid.
inline SceneGraph make_graph(const std::string& id, const std::vector<CategoryId>& cats,
                             const std::vector<Relationship>& edges) {
  std::vector<ObjectNode> nodes;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const double d = static_cast<double>(i);
    nodes.push_back({cats[i], {d, d, d + 1.0, d + 1.0}});
  }
  return SceneGraph(id, 100.0, 100.0, std::move(nodes), edges);
}

// Random graph with 1..max_nodes nodes and up to max_edges edges (no self-loops).
inline SceneGraph random_graph(const std::string& id, Rng& rng, std::size_t num_objects,
                               std::size_t num_predicates, std::size_t max_nodes,
                               std::size_t max_edges) {
  const std::size_t n = 1 + rng.uniform_index(max_nodes);
  std::vector<CategoryId> cats;
  for (std::size_t i = 0; i < n; ++i) {
    cats.push_back(static_cast<CategoryId>(rng.uniform_index(num_objects)));
  }
  std::vector<Relationship> edges;
  if (n >= 2) {
    const std::size_t m = rng.uniform_index(max_edges + 1);
    for (std::size_t e = 0; e < m; ++e) {
      const NodeIndex s = rng.uniform_index(n);
      NodeIndex o = rng.uniform_index(n - 1);
      if (o >= s) ++o;
      edges.push_back({s, static_cast<PredicateId>(rng.uniform_index(num_predicates)), o});
    }
  }
  return make_graph(id, cats, edges);
}

inline Dataset random_dataset(const Vocabulary& vocab, std::size_t count, std::uint64_t seed,
                              std::size_t max_nodes = 6, std::size_t max_edges = 8,
                              const std::string& prefix = "img") {
  Rng rng(seed);
  Dataset ds{vocab, {}};
  for (std::size_t i = 0; i < count; ++i) {
    ds.graphs.push_back(random_graph(prefix + std::to_string(i), rng, vocab.num_objects(),
                                     vocab.num_predicates(), max_nodes, max_edges));
  }
  return ds;
}

// Drops repeated (subject, predicate, object) edges, keeping the first.
inline Dataset without_duplicate_edges(const Dataset& ds) {
  Dataset out{ds.vocab, {}};
  for (const auto& g : ds.graphs) {
    std::set<std::tuple<NodeIndex, PredicateId, NodeIndex>> seen;
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      const auto& e = g.edges()[k];
      if (seen.insert({e.subject, e.predicate, e.object}).second) keep.push_back(k);
    }
    out.graphs.push_back(g.with_edges(keep));
  }
  return out;
}

// Pearson chi-square statistic of observed counts against expected probabilities.
inline double chi_square(const std::vector<double>& observed,
                         const std::vector<double>& probs, double trials) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * trials;
    stat += (observed[i] - e) * (observed[i] - e) / e;
  }
  return stat;
}

// Upper 0.001 quantiles of the chi-square distribution by degrees of freedom.
inline double chi_square_critical_001(std::size_t dof) {
  static const double table[] = {0.0,    10.828, 13.816, 16.266, 18.467, 20.515,
                                 22.458, 24.322, 26.124, 27.877, 29.588, 31.264};
  return dof < std::size(table) ? table[dof] : 0.0;
}

}  // namespace sgaug::testing
