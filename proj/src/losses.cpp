#include "sgaug/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgaug/errors.hpp"

namespace sgaug::losses {
namespace {

double target_nll(const ProbTable& t, std::size_t row) {
  const double p = t.rows[row][t.targets[row]];
  if (!(p > 0.0)) {
    throw InvalidArgument("zero probability at target of row " + std::to_string(row));
  }
  return -std::log(p);
}

double mean_log(const std::vector<double>& v, bool complement, const char* what) {
  if (v.empty()) throw InvalidArgument(std::string(what) + " outputs are empty");
  double sum = 0.0;
  for (double x : v) {
    if (!(x > 0.0 && x < 1.0)) {
      throw InvalidArgument(std::string(what) + " outputs must lie in (0, 1)");
    }
    sum += std::log(complement ? 1.0 - x : x);
  }
  return sum / static_cast<double>(v.size());
}

}  // namespace

void ProbTable::validate() const {
  if (rows.size() != targets.size()) {
    throw InvalidArgument("prob table: rows and targets differ in length");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double sum = 0.0;
    for (double p : rows[i]) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("prob table: row " + std::to_string(i) +
                              " has an entry outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw InvalidArgument("prob table: row " + std::to_string(i) + " does not sum to 1");
    }
    if (targets[i] >= rows[i].size()) {
      throw InvalidArgument("prob table: target of row " + std::to_string(i) +
                            " out of range");
    }
  }
}

double node_loss(const ProbTable& probs) {
  probs.validate();
  if (probs.rows.empty()) throw InvalidArgument("node_loss: no rows");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.rows.size(); ++i) sum += target_nll(probs, i);
  return sum / static_cast<double>(probs.rows.size());
}

double edge_loss(const std::vector<GraphEdges>& graphs, EdgeLossMode mode) {
  if (graphs.empty()) throw InvalidArgument("edge_loss: empty batch");
  if (mode == EdgeLossMode::kMeanAnnotated) {
    double sum = 0.0;
    std::size_t rows = 0;
    for (const auto& g : graphs) {
      g.pairs.validate();
      for (std::size_t i = 0; i < g.pairs.rows.size(); ++i) sum += target_nll(g.pairs, i);
      rows += g.pairs.rows.size();
    }
    if (rows == 0) throw InvalidArgument("edge_loss: no annotated edges");
    return sum / static_cast<double>(rows);
  }
  double batch = 0.0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto& g = graphs[gi];
    g.pairs.validate();
    const std::size_t pairs = g.num_nodes * (g.num_nodes > 0 ? g.num_nodes - 1 : 0);
    if (pairs == 0) {
      throw InvalidArgument("edge_loss: graph " + std::to_string(gi) +
                            " needs at least 2 nodes in density-normalized mode");
    }
    if (g.pairs.rows.size() != pairs) {
      throw InvalidArgument("edge_loss: graph " + std::to_string(gi) + " has " +
                            std::to_string(g.pairs.rows.size()) + " pair rows, expected n(n-1) = " +
                            std::to_string(pairs));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < g.pairs.rows.size(); ++i) sum += target_nll(g.pairs, i);
    batch += sum / static_cast<double>(pairs);
  }
  return batch / static_cast<double>(graphs.size());
}

double cls_loss(const ProbTable& nodes, const std::vector<GraphEdges>& edges,
                EdgeLossMode mode) {
  return node_loss(nodes) + edge_loss(edges, mode);
}

double rec_loss(const ProbTable& perturbed_nodes, const std::vector<GraphEdges>& edges,
                EdgeLossMode mode) {
  return cls_loss(perturbed_nodes, edges, mode);
}

double adv_d_loss(const std::vector<double>& real_outputs,
                  const std::vector<double>& fake_outputs) {
  return mean_log(real_outputs, false, "real discriminator") +
         mean_log(fake_outputs, true, "fake discriminator");
}

double adv_g_loss(const std::vector<double>& fake_outputs) {
  return mean_log(fake_outputs, false, "fake discriminator");
}

std::pair<double, double> adv_totals(const DiscriminatorOutputs& node,
                                     const DiscriminatorOutputs& edge,
                                     const DiscriminatorOutputs& global) {
  const double d = adv_d_loss(node.real, node.fake) + adv_d_loss(edge.real, edge.fake) +
                   adv_d_loss(global.real, global.fake);
  const double g = adv_g_loss(node.fake) + adv_g_loss(edge.fake) + adv_g_loss(global.fake);
  return {d, g};
}

double total_loss(double cls, double rec, double adv_d, double adv_g, double gamma) {
  return cls + rec - gamma * (adv_d + adv_g);
}

double box_margin_l1(const BoundingBox& pred, const BoundingBox& gt, double max_coord) {
  if (!(max_coord > 0.0)) throw InvalidArgument("box_margin_l1: S must be positive");
  const double l1 = std::abs(pred.x1 - gt.x1) + std::abs(pred.y1 - gt.y1) +
                    std::abs(pred.x2 - gt.x2) + std::abs(pred.y2 - gt.y2);
  return std::min(0.5 * max_coord, std::max(0.05 * max_coord, l1));
}

}  // namespace sgaug::losses
