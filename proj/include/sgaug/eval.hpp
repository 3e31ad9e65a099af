#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgaug/core_model.hpp"
#include "sgaug/dataset.hpp"
#include "sgaug/predicted_graph.hpp"
#include "sgaug/stats.hpp"

namespace sgaug {

// Multiplies every predicate score s_r by (1 / f_r)^x. Scores are not
// renormalised; x == 0 returns the input unchanged.
std::vector<PairScores> reweight_scores(const std::vector<PairScores>& pairs,
                                        const std::vector<double>& predicate_freq,
                                        double x);

// Same ranking as reweight_scores, with weights (min f / f_r)^x instead. The
// two differ by one constant factor, but here a class at the minimum
// frequency keeps weight exactly 1, so uniform f_r leaves scores bit-for-bit
// unchanged and float rounding cannot reorder tied triplets. Evaluation uses
// this form.
std::vector<PairScores> reweight_for_ranking(const std::vector<PairScores>& pairs,
                                             const std::vector<double>& predicate_freq,
                                             double x);

struct RankedTriplet {
  NodeIndex subject = 0;
  NodeIndex object = 0;
  CategoryId subject_label = 0;
  PredicateId predicate = 0;
  CategoryId object_label = 0;
  double score = 0.0;

  bool operator==(const RankedTriplet&) const = default;
};

// Top-K triplets scored s_subj * s_obj * s_pred, labels taken as row argmax.
// With the graph constraint only each pair's best predicate competes. Ties
// are ordered by (subject, object, predicate) ascending.
std::vector<RankedTriplet> rank_triplets(const PredictedGraph& pred,
                                         bool graph_constraint, std::size_t k);

double iou(const BoundingBox& a, const BoundingBox& b);

enum class EvalMode { kSgCls, kPredCls, kSgGen };
enum class RecallAggregate { kImage, kTriplet };

const char* mode_name(EvalMode mode);
std::optional<EvalMode> parse_mode(const std::string& name);

inline constexpr double kSgGenIouThreshold = 0.5;

struct RecallOptions {
  std::size_t k = 50;
  EvalMode mode = EvalMode::kPredCls;
  bool graph_constraint = true;
  const TripletSet* subset_filter = nullptr;  // keep only these GT compositions
  double reweight_x = 0.0;
  const std::vector<double>* predicate_freq = nullptr;  // required when x != 0
  RecallAggregate aggregate = RecallAggregate::kImage;
};

struct ImageRecall {
  std::string image_id;
  std::size_t matched = 0;
  std::size_t total = 0;  // filtered GT instances
  std::vector<std::size_t> matched_by_predicate;
  std::vector<std::size_t> total_by_predicate;

  double recall() const {
    return total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total);
  }
};

struct RecallReport {
  double value = 0.0;  // percentage
  std::vector<ImageRecall> per_image;  // eligible images, GT order
};

struct MeanRecallReport {
  double value = 0.0;  // percentage over predicates with GT support
  std::vector<std::optional<double>> per_predicate;  // percentage, or none
  std::vector<ImageRecall> per_image;
};

// Per-image greedy matching of top-K triplets against GT instances.
std::vector<ImageRecall> match_images(const std::vector<PredictedGraph>& predictions,
                                      const Dataset& gt, const RecallOptions& opts);

RecallReport recall_at_k(const std::vector<PredictedGraph>& predictions,
                         const Dataset& gt, const RecallOptions& opts);

MeanRecallReport mean_recall(const std::vector<PredictedGraph>& predictions,
                             const Dataset& gt, const RecallOptions& opts);

}  // namespace sgaug
