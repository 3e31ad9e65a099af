#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgaug/core_model.hpp"
#include "sgaug/dataset.hpp"
#include "sgaug/ingest.hpp"
#include "sgaug/rng.hpp"
#include "sgaug/stats.hpp"

namespace sgaug {

enum class PerturbMethod { kRand, kNeigh, kGraphN, kOracleZs };

const char* method_name(PerturbMethod method);
std::optional<PerturbMethod> parse_method(const std::string& name);

struct PerturbationConfig {
  PerturbMethod method = PerturbMethod::kGraphN;
  double intensity = 0.2;  // fraction L of nodes to perturb
  std::size_t top_k = 5;   // semantic neighbours (neigh, graphn)
  double alpha = 2.0;      // graphn frequency threshold
  std::uint64_t master_seed = 0;

  // Range checks independent of resources.
  void validate() const;
};

struct NodeChange {
  NodeIndex node = 0;
  CategoryId old_category = 0;
  CategoryId new_category = 0;

  bool operator==(const NodeChange&) const = default;
};

/// Per-graph ledger of replaced nodes and the edges whose compositions changed.
struct PerturbationRecord {
  std::string image_id;
  std::vector<NodeChange> changes;
  std::vector<std::size_t> affected_edges;  // sorted, unique

  bool operator==(const PerturbationRecord&) const = default;
};

struct PerturbedGraph {
  SceneGraph graph;
  PerturbationRecord record;
};

// max(1, round(L * n)) nodes (capped at n), or none when L == 0, drawn without
// replacement with probability proportional to degree. Once every remaining
// node has degree 0 the remaining draws are uniform.
std::vector<NodeIndex> sample_nodes(const SceneGraph& graph, double intensity,
                                    Rng& rng);

PerturbedGraph perturb_rand(const SceneGraph& graph, const PerturbationConfig& cfg,
                            const Vocabulary& vocab, Rng& rng);

// Top-k categories by cosine similarity to `category`, excluding it; ties go
// to the lower category id. Requires k < number of categories.
std::vector<CategoryId> semantic_neighbors(const EmbeddingTable& emb,
                                           CategoryId category, std::size_t k);

/// Full similarity ranking of every category, computed once so repeated
/// neighbour queries are a prefix lookup. Agrees with semantic_neighbors.
class NeighborIndex {
 public:
  explicit NeighborIndex(const EmbeddingTable& emb);

  std::size_t num_categories() const { return ranking_.size(); }
  std::vector<CategoryId> neighbors(CategoryId category, std::size_t k) const;

 private:
  std::vector<std::vector<CategoryId>> ranking_;
};

PerturbedGraph perturb_neigh(const SceneGraph& graph, const PerturbationConfig& cfg,
                             const Vocabulary& vocab, const NeighborIndex& neighbors,
                             Rng& rng);

struct GraphNCandidate {
  CategoryId category = 0;
  double mean_count = 0.0;   // n_c
  double probability = 0.0;  // p_c, proportional to 1 / n_c

  bool operator==(const GraphNCandidate&) const = default;
};

// Replacement categories for `node` supported by at least one training
// composition along its incident edges (role preserved). Sorted by category.
// Empty when nothing survives the alpha threshold.
std::vector<GraphNCandidate> graphn_candidates(const SceneGraph& graph, NodeIndex node,
                                               const TripletFrequencyTable& table,
                                               double alpha);

// Sequential: each sampled node sees the categories already replaced in this
// graph. Nodes without candidates, or whose final draw equals their current
// category, are left unchanged and not recorded.
PerturbedGraph perturb_graphn(const SceneGraph& graph, const PerturbationConfig& cfg,
                              const Vocabulary& vocab, const NeighborIndex& neighbors,
                              const TripletFrequencyTable& table, Rng& rng);

// Replacement categories must turn every incident edge into a composition of
// `zs_index`. Isolated or unsatisfiable nodes are skipped.
PerturbedGraph perturb_oracle_zs(const SceneGraph& graph, const PerturbationConfig& cfg,
                                 const TripletIndex& zs_index, Rng& rng);
PerturbedGraph perturb_oracle_zs(const SceneGraph& graph, const PerturbationConfig& cfg,
                                 const TripletSet& zs_triplets, Rng& rng);

/// Borrowed inputs a method may need; which ones are required depends on the
/// method (see check_resources).
struct PerturbResources {
  const EmbeddingTable* embeddings = nullptr;
  const TripletFrequencyTable* table = nullptr;
  const TripletSet* zs_triplets = nullptr;
};

void check_resources(const PerturbationConfig& cfg, const Vocabulary& vocab,
                     const PerturbResources& res);

PerturbedGraph perturb_graph(const SceneGraph& graph, const PerturbationConfig& cfg,
                             const Vocabulary& vocab, const PerturbResources& res,
                             Rng& rng);

struct PerturbedDataset {
  Dataset dataset;
  std::vector<PerturbationRecord> records;  // one per graph, same order
};

// Each graph uses Rng(image_seed(image_id, master_seed)); `jobs` workers.
PerturbedDataset perturb_dataset(const Dataset& dataset, const PerturbationConfig& cfg,
                                 const PerturbResources& res, std::size_t jobs = 1);

std::string record_to_json_line(const PerturbationRecord& record);
void write_records(std::ostream& out, const std::vector<PerturbationRecord>& records);
std::vector<PerturbationRecord> parse_records(std::istream& in,
                                              const std::string& source);
std::vector<PerturbationRecord> load_records(const std::filesystem::path& path);

}  // namespace sgaug
