#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sgaug/core_model.hpp"

// Forward values of the augmentation pipeline's training objectives. These
// are plain calculators: inputs are probabilities (not logits), nothing is
// differentiated or learned. Callers clamp probabilities to [1e-12, 1].

namespace sgaug::losses {

inline constexpr double kDefaultGamma = 5.0;

/// Probability rows with one integer target per row.
struct ProbTable {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> targets;

  // Rows sum to 1 within 1e-6, entries lie in [0, 1], targets are in range.
  void validate() const;
};

// Mean of -ln p[target] over rows. Throws if a target has probability 0.
double node_loss(const ProbTable& probs);

enum class EdgeLossMode {
  kMeanAnnotated,      // mean over annotated edges of the whole batch
  kDensityNormalized,  // per graph: sum over all n(n-1) ordered pairs / n(n-1)
};

struct GraphEdges {
  ProbTable pairs;        // background (label 0) on unannotated pairs when normalised
  std::size_t num_nodes;  // n_g
};

double edge_loss(const std::vector<GraphEdges>& graphs,
                 EdgeLossMode mode = EdgeLossMode::kDensityNormalized);

// Node plus edge cross-entropy.
double cls_loss(const ProbTable& nodes, const std::vector<GraphEdges>& edges,
                EdgeLossMode mode = EdgeLossMode::kDensityNormalized);

// Same arithmetic as cls_loss, evaluated against the perturbed node labels.
// In training this term updates only the classifier, never the generator.
double rec_loss(const ProbTable& perturbed_nodes, const std::vector<GraphEdges>& edges,
                EdgeLossMode mode = EdgeLossMode::kDensityNormalized);

// mean(ln D(real)) + mean(ln(1 - D(fake))); outputs must lie in (0, 1).
double adv_d_loss(const std::vector<double>& real_outputs,
                  const std::vector<double>& fake_outputs);

// mean(ln D(fake)).
double adv_g_loss(const std::vector<double>& fake_outputs);

struct DiscriminatorOutputs {
  std::vector<double> real;
  std::vector<double> fake;
};

// Sums over the node, edge and global discriminators: {L^D, L^G}.
std::pair<double, double> adv_totals(const DiscriminatorOutputs& node,
                                     const DiscriminatorOutputs& edge,
                                     const DiscriminatorOutputs& global);

// cls + rec - gamma * (adv_d + adv_g)
double total_loss(double cls, double rec, double adv_d, double adv_g,
                  double gamma = kDefaultGamma);

// min(0.5 S, max(0.05 S, |pred - gt|_1)) with S the maximum box coordinate.
double box_margin_l1(const BoundingBox& pred, const BoundingBox& gt, double max_coord);

}  // namespace sgaug::losses
