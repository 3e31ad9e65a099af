#include "sgaug/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "sgaug/errors.hpp"
#include "sgaug/parallel.hpp"

namespace sgaug {
namespace {

using nlohmann::json;

std::vector<std::size_t> edges_touching(const SceneGraph& graph,
                                        const std::vector<NodeChange>& changes) {
  std::vector<std::size_t> out;
  for (const auto& c : changes) {
    auto inc = incident_edges(graph, c.node);
    out.insert(out.end(), inc.begin(), inc.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PerturbedGraph finish(const SceneGraph& original, std::vector<NodeChange> changes) {
  SceneGraph result = original;
  for (const auto& c : changes) result = result.relabeled(c.node, c.new_category);
  PerturbationRecord record{original.image_id(), std::move(changes), {}};
  record.affected_edges = edges_touching(original, record.changes);
  return {std::move(result), std::move(record)};
}

// Ranked neighbours of `category`: similarity descending, then id ascending.
std::vector<CategoryId> rank_by_similarity(const EmbeddingTable& emb,
                                           CategoryId category) {
  const std::size_t n = emb.num_categories();
  if (category >= n) throw InvalidArgument("category id out of embedding range");
  std::vector<std::pair<double, CategoryId>> scored;
  scored.reserve(n - 1);
  for (CategoryId c = 0; c < n; ++c) {
    if (c != category) scored.emplace_back(emb.cosine(category, c), c);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<CategoryId> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.second);
  return out;
}

void check_top_k(std::size_t k, std::size_t num_categories) {
  if (k >= num_categories) {
    throw InvalidArgument("top_k " + std::to_string(k) +
                          " must be smaller than the number of categories (" +
                          std::to_string(num_categories) + ")");
  }
}

// Candidate categories for `node` from one incident edge, as (category, count).
const std::vector<TripletIndex::Entry>& edge_candidates(const SceneGraph& graph,
                                                        NodeIndex node,
                                                        const Relationship& e,
                                                        const TripletIndex& index) {
  if (e.subject == node) {
    return index.subjects_for(e.predicate, graph.category(e.object));
  }
  return index.objects_for(graph.category(e.subject), e.predicate);
}

struct Prepared {
  std::optional<NeighborIndex> neighbors;
  std::optional<TripletIndex> zs_index;
};

Prepared prepare(const PerturbationConfig& cfg, const PerturbResources& res) {
  Prepared p;
  if (cfg.method == PerturbMethod::kNeigh || cfg.method == PerturbMethod::kGraphN) {
    p.neighbors.emplace(*res.embeddings);
  }
  if (cfg.method == PerturbMethod::kOracleZs) {
    std::map<Triplet, std::uint64_t> ones;
    for (const auto& t : *res.zs_triplets) ones[t] = 1;
    p.zs_index.emplace(ones);
  }
  return p;
}

PerturbedGraph dispatch(const SceneGraph& graph, const PerturbationConfig& cfg,
                        const Vocabulary& vocab, const PerturbResources& res,
                        const Prepared& prep, Rng& rng) {
  switch (cfg.method) {
    case PerturbMethod::kRand:
      return perturb_rand(graph, cfg, vocab, rng);
    case PerturbMethod::kNeigh:
      return perturb_neigh(graph, cfg, vocab, *prep.neighbors, rng);
    case PerturbMethod::kGraphN:
      return perturb_graphn(graph, cfg, vocab, *prep.neighbors, *res.table, rng);
    case PerturbMethod::kOracleZs:
      return perturb_oracle_zs(graph, cfg, *prep.zs_index, rng);
  }
  throw InvalidArgument("unknown perturbation method");
}

}  // namespace

const char* method_name(PerturbMethod method) {
  switch (method) {
    case PerturbMethod::kRand: return "rand";
    case PerturbMethod::kNeigh: return "neigh";
    case PerturbMethod::kGraphN: return "graphn";
    case PerturbMethod::kOracleZs: return "oracle_zs";
  }
  return "?";
}

std::optional<PerturbMethod> parse_method(const std::string& name) {
  for (auto m : {PerturbMethod::kRand, PerturbMethod::kNeigh, PerturbMethod::kGraphN,
                 PerturbMethod::kOracleZs}) {
    if (name == method_name(m)) return m;
  }
  return std::nullopt;
}

void PerturbationConfig::validate() const {
  if (!(intensity >= 0.0 && intensity <= 1.0)) {
    throw InvalidArgument("intensity must lie in [0, 1]");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be a finite value >= 0");
  }
  if (method == PerturbMethod::kNeigh && top_k < 1) {
    throw InvalidArgument("neigh requires top_k >= 1");
  }
}

std::vector<NodeIndex> sample_nodes(const SceneGraph& graph, double intensity,
                                    Rng& rng) {
  if (!(intensity >= 0.0 && intensity <= 1.0)) {
    throw InvalidArgument("sample_nodes: intensity must lie in [0, 1]");
  }
  const std::size_t n = graph.num_nodes();
  if (intensity == 0.0 || n == 0) return {};
  const auto wanted = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(intensity * static_cast<double>(n))));
  const std::size_t count = std::min(wanted, n);

  std::vector<double> weights(n);
  for (NodeIndex i = 0; i < n; ++i) weights[i] = static_cast<double>(degree(graph, i));
  std::vector<bool> taken(n, false);
  std::vector<NodeIndex> out;
  out.reserve(count);
  while (out.size() < count) {
    const double remaining = std::accumulate(weights.begin(), weights.end(), 0.0);
    NodeIndex pick;
    if (remaining > 0.0) {
      pick = rng.weighted_index(weights);
    } else {
      std::vector<NodeIndex> free;
      for (NodeIndex i = 0; i < n; ++i) {
        if (!taken[i]) free.push_back(i);
      }
      pick = free[rng.uniform_index(free.size())];
    }
    taken[pick] = true;
    weights[pick] = 0.0;
    out.push_back(pick);
  }
  return out;
}

PerturbedGraph perturb_rand(const SceneGraph& graph, const PerturbationConfig& cfg,
                            const Vocabulary& vocab, Rng& rng) {
  const std::size_t num_categories = vocab.num_objects();
  if (num_categories < 2) {
    throw CannotPerturb("rand needs at least two object categories");
  }
  std::vector<NodeChange> changes;
  for (NodeIndex node : sample_nodes(graph, cfg.intensity, rng)) {
    const CategoryId current = graph.category(node);
    auto draw = static_cast<CategoryId>(rng.uniform_index(num_categories - 1));
    if (draw >= current) ++draw;
    changes.push_back({node, current, draw});
  }
  return finish(graph, std::move(changes));
}

std::vector<CategoryId> semantic_neighbors(const EmbeddingTable& emb,
                                           CategoryId category, std::size_t k) {
  check_top_k(k, emb.num_categories());
  auto ranked = rank_by_similarity(emb, category);
  ranked.resize(k);
  return ranked;
}

NeighborIndex::NeighborIndex(const EmbeddingTable& emb) {
  ranking_.reserve(emb.num_categories());
  for (CategoryId c = 0; c < emb.num_categories(); ++c) {
    ranking_.push_back(rank_by_similarity(emb, c));
  }
}

std::vector<CategoryId> NeighborIndex::neighbors(CategoryId category,
                                                 std::size_t k) const {
  check_top_k(k, ranking_.size());
  const auto& r = ranking_.at(category);
  return {r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k)};
}

PerturbedGraph perturb_neigh(const SceneGraph& graph, const PerturbationConfig& cfg,
                             const Vocabulary& vocab, const NeighborIndex& neighbors,
                             Rng& rng) {
  if (vocab.num_objects() < 2) {
    throw CannotPerturb("neigh needs at least two object categories");
  }
  if (cfg.top_k < 1) throw InvalidArgument("neigh requires top_k >= 1");
  std::vector<NodeChange> changes;
  for (NodeIndex node : sample_nodes(graph, cfg.intensity, rng)) {
    const CategoryId current = graph.category(node);
    const auto pool = neighbors.neighbors(current, cfg.top_k);
    changes.push_back({node, current, pool[rng.uniform_index(pool.size())]});
  }
  return finish(graph, std::move(changes));
}

std::vector<GraphNCandidate> graphn_candidates(const SceneGraph& graph, NodeIndex node,
                                               const TripletFrequencyTable& table,
                                               double alpha) {
  const CategoryId current = graph.category(node);
  std::map<CategoryId, std::pair<double, std::size_t>> support;  // sum, n
  for (const auto& e : graph.edges()) {
    if (e.subject != node && e.object != node) continue;
    for (const auto& entry : edge_candidates(graph, node, e, table.index())) {
      if (entry.category == current) continue;
      auto& s = support[entry.category];
      s.first += static_cast<double>(entry.count);
      ++s.second;
    }
  }
  std::vector<GraphNCandidate> out;
  double norm = 0.0;
  for (const auto& [c, s] : support) {
    const double mean = s.first / static_cast<double>(s.second);
    if (mean < alpha) continue;
    out.push_back({c, mean, 1.0 / mean});
    norm += 1.0 / mean;
  }
  for (auto& cand : out) cand.probability /= norm;
  return out;
}

PerturbedGraph perturb_graphn(const SceneGraph& graph, const PerturbationConfig& cfg,
                              [[maybe_unused]] const Vocabulary& vocab,
                              const NeighborIndex& neighbors,
                              const TripletFrequencyTable& table, Rng& rng) {
  SceneGraph current = graph;
  std::vector<NodeChange> changes;
  std::vector<double> weights;
  for (NodeIndex node : sample_nodes(graph, cfg.intensity, rng)) {
    const auto cands = graphn_candidates(current, node, table, cfg.alpha);
    if (cands.empty()) continue;
    weights.clear();
    for (const auto& c : cands) weights.push_back(c.probability);
    const CategoryId anchor = cands[rng.weighted_index(weights)].category;

    std::vector<CategoryId> pool{anchor};
    if (cfg.top_k > 0) {
      const auto near = neighbors.neighbors(anchor, cfg.top_k);
      pool.insert(pool.end(), near.begin(), near.end());
    }
    const CategoryId chosen = pool[rng.uniform_index(pool.size())];
    const CategoryId before = current.category(node);
    if (chosen == before) continue;
    changes.push_back({node, before, chosen});
    current = current.relabeled(node, chosen);
  }
  return finish(graph, std::move(changes));
}

PerturbedGraph perturb_oracle_zs(const SceneGraph& graph, const PerturbationConfig& cfg,
                                 const TripletIndex& zs_index, Rng& rng) {
  SceneGraph current = graph;
  std::vector<NodeChange> changes;
  for (NodeIndex node : sample_nodes(graph, cfg.intensity, rng)) {
    const CategoryId before = current.category(node);
    std::vector<CategoryId> allowed;
    bool first = true;
    for (const auto& e : current.edges()) {
      if (e.subject != node && e.object != node) continue;
      std::vector<CategoryId> here;
      for (const auto& entry : edge_candidates(current, node, e, zs_index)) {
        here.push_back(entry.category);
      }
      if (first) {
        allowed = std::move(here);
        first = false;
      } else {
        std::vector<CategoryId> both;
        std::set_intersection(allowed.begin(), allowed.end(), here.begin(), here.end(),
                              std::back_inserter(both));
        allowed = std::move(both);
      }
      if (allowed.empty()) break;
    }
    std::erase(allowed, before);
    if (allowed.empty()) continue;
    const CategoryId chosen = allowed[rng.uniform_index(allowed.size())];
    changes.push_back({node, before, chosen});
    current = current.relabeled(node, chosen);
  }
  return finish(graph, std::move(changes));
}

PerturbedGraph perturb_oracle_zs(const SceneGraph& graph, const PerturbationConfig& cfg,
                                 const TripletSet& zs_triplets, Rng& rng) {
  if (zs_triplets.empty()) throw InvalidArgument("oracle_zs: zero-shot set is empty");
  std::map<Triplet, std::uint64_t> ones;
  for (const auto& t : zs_triplets) ones[t] = 1;
  return perturb_oracle_zs(graph, cfg, TripletIndex(ones), rng);
}

void check_resources(const PerturbationConfig& cfg, const Vocabulary& vocab,
                     const PerturbResources& res) {
  cfg.validate();
  const bool needs_emb =
      cfg.method == PerturbMethod::kNeigh || cfg.method == PerturbMethod::kGraphN;
  if (needs_emb) {
    if (!res.embeddings) {
      throw InvalidArgument(std::string(method_name(cfg.method)) +
                            " requires word embeddings");
    }
    if (res.embeddings->num_categories() != vocab.num_objects()) {
      throw InvalidArgument("embedding table does not cover the vocabulary");
    }
    check_top_k(cfg.top_k, vocab.num_objects());
  }
  if (cfg.method == PerturbMethod::kGraphN && !res.table) {
    throw InvalidArgument("graphn requires a triplet frequency table");
  }
  if (cfg.method == PerturbMethod::kOracleZs &&
      (!res.zs_triplets || res.zs_triplets->empty())) {
    throw InvalidArgument("oracle_zs requires a non-empty zero-shot triplet set");
  }
  if ((cfg.method == PerturbMethod::kRand || cfg.method == PerturbMethod::kNeigh) &&
      vocab.num_objects() < 2) {
    throw CannotPerturb(std::string(method_name(cfg.method)) +
                        " needs at least two object categories");
  }
}

PerturbedGraph perturb_graph(const SceneGraph& graph, const PerturbationConfig& cfg,
                             const Vocabulary& vocab, const PerturbResources& res,
                             Rng& rng) {
  check_resources(cfg, vocab, res);
  return dispatch(graph, cfg, vocab, res, prepare(cfg, res), rng);
}

PerturbedDataset perturb_dataset(const Dataset& dataset, const PerturbationConfig& cfg,
                                 const PerturbResources& res, std::size_t jobs) {
  check_resources(cfg, dataset.vocab, res);
  const Prepared prep = prepare(cfg, res);
  const std::size_t n = dataset.graphs.size();
  std::vector<std::optional<PerturbedGraph>> results(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const SceneGraph& g = dataset.graphs[i];
    Rng rng(image_seed(g.image_id(), cfg.master_seed));
    try {
      results[i] = dispatch(g, cfg, dataset.vocab, res, prep, rng);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("image '" + g.image_id() + "': " + e.what());
    } catch (const CannotPerturb& e) {
      throw CannotPerturb("image '" + g.image_id() + "': " + e.what());
    }
  });
  PerturbedDataset out{{dataset.vocab, {}}, {}};
  out.dataset.graphs.reserve(n);
  out.records.reserve(n);
  for (auto& r : results) {
    out.dataset.graphs.push_back(std::move(r->graph));
    out.records.push_back(std::move(r->record));
  }
  return out;
}

std::string record_to_json_line(const PerturbationRecord& record) {
  json changes = json::array();
  for (const auto& c : record.changes) {
    changes.push_back({{"node", c.node}, {"old", c.old_category}, {"new", c.new_category}});
  }
  json doc = {{"image_id", record.image_id},
              {"changes", std::move(changes)},
              {"affected_edges", record.affected_edges}};
  return doc.dump();
}

void write_records(std::ostream& out, const std::vector<PerturbationRecord>& records) {
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

std::vector<PerturbationRecord> parse_records(std::istream& in,
                                              const std::string& source) {
  std::vector<PerturbationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    try {
      const json doc = json::parse(line);
      PerturbationRecord r;
      r.image_id = doc.at("image_id").get<std::string>();
      for (const auto& c : doc.at("changes")) {
        r.changes.push_back({c.at("node").get<NodeIndex>(),
                             c.at("old").get<CategoryId>(),
                             c.at("new").get<CategoryId>()});
      }
      r.affected_edges = doc.at("affected_edges").get<std::vector<std::size_t>>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(where + ": invalid perturbation record: " + e.what());
    }
  }
  return out;
}

std::vector<PerturbationRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_records(in, path.string());
}

}  // namespace sgaug
