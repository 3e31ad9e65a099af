#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgaug/core_model.hpp"
#include "sgaug/dataset.hpp"
#include "sgaug/perturb.hpp"
#include "sgaug/rng.hpp"
#include "sgaug/stats.hpp"

namespace sgaug {

struct HitRate {
  double percent = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t total = 0;  // M, perturbed triplet instances
  bool empty = false;       // no perturbed triplets; percent reported as 0
};

// Percentage of perturbed edge instances whose composition is in `reference`.
// Records are joined to graphs by image_id.
HitRate hit_rate(const std::vector<PerturbationRecord>& records,
                 const Dataset& perturbed, const TripletSet& reference);

inline constexpr const char* kDefaultMaskToken = "[MASK]";

/// Masked-LM query: all edge phrases in random order, one node occurrence masked.
struct PlausibilityQuery {
  std::string text;
  std::string target;       // category name of the masked node
  Triplet masked_triplet;   // composition of the edge carrying the mask
  NodeIndex masked_node = 0;
};

PlausibilityQuery build_query(const SceneGraph& graph, NodeIndex masked_node,
                              const Vocabulary& vocab, Rng& rng,
                              const std::string& mask_token = kDefaultMaskToken);

/// Scores a query; higher means more plausible. Implementations must be safe
/// to call concurrently.
class PlausibilityScorer {
 public:
  virtual ~PlausibilityScorer() = default;
  virtual double score(const PlausibilityQuery& query) = 0;
};

// Offline stand-in: ln(1 + training count of the masked composition).
class FrequencyStubScorer : public PlausibilityScorer {
 public:
  explicit FrequencyStubScorer(const TripletFrequencyTable& table) : table_(table) {}
  double score(const PlausibilityQuery& query) override;

 private:
  const TripletFrequencyTable& table_;
};

struct HttpScorerOptions {
  std::string endpoint;  // e.g. http://localhost:8000
  std::string path = "/score";
  std::chrono::milliseconds timeout{10000};
  int max_attempts = 3;
  std::chrono::milliseconds retry_backoff{200};
};

// POST {path} {"text", "target"} -> {"score"}.
class HttpPlausibilityScorer : public PlausibilityScorer {
 public:
  explicit HttpPlausibilityScorer(HttpScorerOptions options);
  double score(const PlausibilityQuery& query) override;

 private:
  HttpScorerOptions options_;
  std::string scheme_host_port_;
};

// Wire helpers, shared by the client and test servers.
std::string score_request_body(const PlausibilityQuery& query);
double parse_score_response(const std::string& body);

struct GraphScore {
  std::string image_id;
  double score = 0.0;
};

struct PlausibilityReport {
  double mean = 0.0;
  std::vector<GraphScore> per_graph;  // dataset order
  std::size_t skipped = 0;            // graphs with no maskable node
};

// Masks one node per graph: a uniformly chosen perturbed node when `records`
// is given, otherwise a uniformly chosen non-isolated node. Each graph draws
// from Rng(image_seed(image_id, seed)).
PlausibilityReport score_graphs(PlausibilityScorer& scorer, const Dataset& dataset,
                                const std::vector<PerturbationRecord>* records,
                                std::uint64_t seed, std::size_t jobs = 1,
                                const std::string& mask_token = kDefaultMaskToken);

}  // namespace sgaug
