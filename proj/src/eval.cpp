#include "sgaug/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <utility>

#include "sgaug/errors.hpp"

namespace sgaug {
namespace {

// First index of the maximum; ties keep the lowest id.
std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

bool ranked_before(const RankedTriplet& a, const RankedTriplet& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.subject != b.subject) return a.subject < b.subject;
  if (a.object != b.object) return a.object < b.object;
  return a.predicate < b.predicate;
}

}  // namespace

void validate(const PredictedGraph& pred, std::size_t num_objects,
              std::size_t num_predicates) {
  const std::string where = "prediction '" + pred.image_id + "': ";
  const std::size_t n = pred.object_scores.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = pred.object_scores[i];
    if (row.size() != num_objects) {
      throw InvalidArgument(where + "object_scores row " + std::to_string(i) +
                            " has wrong length");
    }
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument(where + "object_scores row " + std::to_string(i) +
                              " has a value outside [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw InvalidArgument(where + "object_scores row " + std::to_string(i) +
                            " does not sum to 1");
    }
  }
  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (std::size_t k = 0; k < pred.pairs.size(); ++k) {
    const auto& p = pred.pairs[k];
    const std::string field = where + "pairs[" + std::to_string(k) + "] ";
    if (p.subject >= n || p.object >= n) throw InvalidArgument(field + "index out of range");
    if (p.subject == p.object) throw InvalidArgument(field + "has subject == object");
    if (!seen.emplace(p.subject, p.object).second) {
      throw InvalidArgument(field + "duplicates an earlier pair");
    }
    if (p.predicate_scores.size() != num_predicates) {
      throw InvalidArgument(field + "predicate_scores has wrong length");
    }
    for (double v : p.predicate_scores) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument(field + "predicate score outside [0, 1]");
      }
    }
  }
  if (pred.boxes) {
    if (pred.boxes->size() != n) {
      throw InvalidArgument(where + "boxes count differs from object count");
    }
    for (const auto& b : *pred.boxes) {
      if (!b.is_valid()) throw InvalidArgument(where + "degenerate predicted box");
    }
  }
}

namespace {

std::vector<PairScores> apply_weights(const std::vector<PairScores>& pairs,
                                      const std::vector<double>& predicate_freq,
                                      const std::vector<double>& weight) {
  std::vector<PairScores> out = pairs;
  for (auto& p : out) {
    if (p.predicate_scores.size() != predicate_freq.size()) {
      throw InvalidArgument("reweight: predicate score length differs from f_r");
    }
    for (std::size_t r = 0; r < p.predicate_scores.size(); ++r) {
      if (p.predicate_scores[r] == 0.0) continue;
      if (!(predicate_freq[r] > 0.0)) {
        throw InvalidArgument("reweight: predicate " + std::to_string(r) +
                              " has frequency 0 but a non-zero score");
      }
      p.predicate_scores[r] *= weight[r];
    }
  }
  return out;
}

void check_exponent(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw InvalidArgument("reweight exponent must be finite and >= 0");
  }
}

}  // namespace

std::vector<PairScores> reweight_scores(const std::vector<PairScores>& pairs,
                                        const std::vector<double>& predicate_freq,
                                        double x) {
  check_exponent(x);
  if (x == 0.0) return pairs;
  std::vector<double> weight(predicate_freq.size());
  for (std::size_t r = 0; r < predicate_freq.size(); ++r) {
    weight[r] = predicate_freq[r] > 0.0 ? std::pow(1.0 / predicate_freq[r], x) : 0.0;
  }
  return apply_weights(pairs, predicate_freq, weight);
}

std::vector<PairScores> reweight_for_ranking(const std::vector<PairScores>& pairs,
                                             const std::vector<double>& predicate_freq,
                                             double x) {
  check_exponent(x);
  if (x == 0.0) return pairs;
  double min_f = 0.0;
  for (double f : predicate_freq) {
    if (f > 0.0 && (min_f == 0.0 || f < min_f)) min_f = f;
  }
  std::vector<double> weight(predicate_freq.size());
  for (std::size_t r = 0; r < predicate_freq.size(); ++r) {
    // min_f / f_r is exactly 1 wherever f_r == min_f.
    weight[r] = predicate_freq[r] > 0.0 ? std::pow(min_f / predicate_freq[r], x) : 0.0;
  }
  return apply_weights(pairs, predicate_freq, weight);
}

std::vector<RankedTriplet> rank_triplets(const PredictedGraph& pred,
                                         bool graph_constraint, std::size_t k) {
  const std::size_t n = pred.object_scores.size();
  std::vector<CategoryId> label(n);
  std::vector<double> label_score(n);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = static_cast<CategoryId>(argmax(pred.object_scores[i]));
    label_score[i] = pred.object_scores[i][label[i]];
  }
  std::vector<RankedTriplet> cands;
  for (const auto& p : pred.pairs) {
    const double pair_score = label_score[p.subject] * label_score[p.object];
    auto add = [&](std::size_t r) {
      cands.push_back({p.subject, p.object, label[p.subject],
                       static_cast<PredicateId>(r), label[p.object],
                       pair_score * p.predicate_scores[r]});
    };
    if (p.predicate_scores.empty()) continue;
    if (graph_constraint) {
      add(argmax(p.predicate_scores));
    } else {
      for (std::size_t r = 0; r < p.predicate_scores.size(); ++r) add(r);
    }
  }
  if (cands.size() > k) {
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k),
                      cands.end(), ranked_before);
    cands.resize(k);
  } else {
    std::sort(cands.begin(), cands.end(), ranked_before);
  }
  return cands;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

const char* mode_name(EvalMode mode) {
  switch (mode) {
    case EvalMode::kSgCls: return "sgcls";
    case EvalMode::kPredCls: return "predcls";
    case EvalMode::kSgGen: return "sggen";
  }
  return "?";
}

std::optional<EvalMode> parse_mode(const std::string& name) {
  for (auto m : {EvalMode::kSgCls, EvalMode::kPredCls, EvalMode::kSgGen}) {
    if (name == mode_name(m)) return m;
  }
  return std::nullopt;
}

std::vector<ImageRecall> match_images(const std::vector<PredictedGraph>& predictions,
                                      const Dataset& gt, const RecallOptions& opts) {
  const std::size_t num_predicates = gt.vocab.num_predicates();
  if (opts.reweight_x != 0.0 &&
      (!opts.predicate_freq || opts.predicate_freq->size() != num_predicates)) {
    throw InvalidArgument("reweighting requires predicate frequencies for every predicate");
  }

  std::unordered_map<std::string, const PredictedGraph*> by_id;
  std::set<std::string> gt_ids;
  for (const auto& g : gt.graphs) gt_ids.insert(g.image_id());
  for (const auto& p : predictions) {
    if (!gt_ids.count(p.image_id)) {
      throw InvalidArgument("prediction for unknown image '" + p.image_id + "'");
    }
    if (!by_id.emplace(p.image_id, &p).second) {
      throw InvalidArgument("duplicate prediction for image '" + p.image_id + "'");
    }
  }

  std::vector<ImageRecall> out;
  std::vector<std::string> missing;
  for (const auto& g : gt.graphs) {
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      if (!opts.subset_filter || opts.subset_filter->count(g.triplet(k))) kept.push_back(k);
    }
    if (kept.empty()) continue;
    auto it = by_id.find(g.image_id());
    if (it == by_id.end()) {
      missing.push_back(g.image_id());
      continue;
    }
    PredictedGraph pred = *it->second;
    const std::string where = "image '" + g.image_id() + "': ";
    if (opts.mode == EvalMode::kSgGen) {
      if (!pred.boxes) throw InvalidArgument(where + "sggen needs predicted boxes");
    } else if (pred.num_nodes() != g.num_nodes()) {
      throw InvalidArgument(where + "prediction has " + std::to_string(pred.num_nodes()) +
                            " objects, ground truth has " + std::to_string(g.num_nodes()));
    }
    if (opts.reweight_x != 0.0) {
      pred.pairs = reweight_for_ranking(pred.pairs, *opts.predicate_freq, opts.reweight_x);
    }
    const auto ranked = rank_triplets(pred, opts.graph_constraint, opts.k);

    ImageRecall ir;
    ir.image_id = g.image_id();
    ir.total = kept.size();
    ir.matched_by_predicate.assign(num_predicates, 0);
    ir.total_by_predicate.assign(num_predicates, 0);
    for (std::size_t k : kept) ++ir.total_by_predicate.at(g.edges()[k].predicate);

    std::vector<bool> used(kept.size(), false);
    for (const auto& rt : ranked) {
      for (std::size_t j = 0; j < kept.size(); ++j) {
        if (used[j]) continue;
        const auto& e = g.edges()[kept[j]];
        if (rt.predicate != e.predicate ||
            rt.subject_label != g.category(e.subject) ||
            rt.object_label != g.category(e.object)) {
          continue;
        }
        bool nodes_match;
        if (opts.mode == EvalMode::kSgGen) {
          const auto& boxes = *pred.boxes;
          nodes_match =
              iou(boxes[rt.subject], g.nodes()[e.subject].box) >= kSgGenIouThreshold &&
              iou(boxes[rt.object], g.nodes()[e.object].box) >= kSgGenIouThreshold;
        } else {
          nodes_match = rt.subject == e.subject && rt.object == e.object;
        }
        if (!nodes_match) continue;
        used[j] = true;
        ++ir.matched;
        ++ir.matched_by_predicate[e.predicate];
        break;
      }
    }
    out.push_back(std::move(ir));
  }
  if (!missing.empty()) {
    std::string msg = "missing predictions for " + std::to_string(missing.size()) +
                      " image(s):";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw InvalidArgument(msg);
  }
  return out;
}

RecallReport recall_at_k(const std::vector<PredictedGraph>& predictions,
                         const Dataset& gt, const RecallOptions& opts) {
  RecallReport report;
  report.per_image = match_images(predictions, gt, opts);
  if (report.per_image.empty()) return report;
  if (opts.aggregate == RecallAggregate::kImage) {
    double sum = 0.0;
    for (const auto& ir : report.per_image) sum += ir.recall();
    report.value = 100.0 * sum / static_cast<double>(report.per_image.size());
  } else {
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto& ir : report.per_image) {
      matched += ir.matched;
      total += ir.total;
    }
    report.value = 100.0 * static_cast<double>(matched) / static_cast<double>(total);
  }
  return report;
}

MeanRecallReport mean_recall(const std::vector<PredictedGraph>& predictions,
                             const Dataset& gt, const RecallOptions& opts) {
  MeanRecallReport report;
  report.per_image = match_images(predictions, gt, opts);
  const std::size_t num_predicates = gt.vocab.num_predicates();
  report.per_predicate.assign(num_predicates, std::nullopt);
  double class_sum = 0.0;
  std::size_t classes = 0;
  for (std::size_t r = 0; r < num_predicates; ++r) {
    double image_sum = 0.0;
    std::size_t images = 0;
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto& ir : report.per_image) {
      const std::size_t t = ir.total_by_predicate[r];
      if (t == 0) continue;
      const std::size_t m = ir.matched_by_predicate[r];
      image_sum += static_cast<double>(m) / static_cast<double>(t);
      ++images;
      matched += m;
      total += t;
    }
    if (images == 0) continue;
    const double recall = opts.aggregate == RecallAggregate::kImage
                              ? image_sum / static_cast<double>(images)
                              : static_cast<double>(matched) / static_cast<double>(total);
    report.per_predicate[r] = 100.0 * recall;
    class_sum += recall;
    ++classes;
  }
  if (classes > 0) report.value = 100.0 * class_sum / static_cast<double>(classes);
  return report;
}

}  // namespace sgaug
