#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgaug/core_model.hpp"

namespace sgaug {

struct PairScores {
  NodeIndex subject = 0;
  NodeIndex object = 0;
  std::vector<double> predicate_scores;  // one entry per predicate id
};

/// Model output for one image. PredCls is expressed through one-hot
/// object_scores rows.
struct PredictedGraph {
  std::string image_id;
  std::vector<std::vector<double>> object_scores;  // n x |C|, row-stochastic
  std::vector<PairScores> pairs;
  std::optional<std::vector<BoundingBox>> boxes;  // SGGen only

  std::size_t num_nodes() const { return object_scores.size(); }
};

// Checks row sums, pair uniqueness, index ranges and vector lengths.
void validate(const PredictedGraph& pred, std::size_t num_objects,
              std::size_t num_predicates);

}  // namespace sgaug
