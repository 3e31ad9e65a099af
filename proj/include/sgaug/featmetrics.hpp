#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgaug/feature_set.hpp"

namespace sgaug {

inline constexpr int kDefaultNeighborhood = 5;

// Euclidean distance from each row to its k-th nearest other row.
Eigen::VectorXd knn_radii(const FeatureSet& features, int k);

struct ManifoldMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double density = 0.0;
  double coverage = 0.0;

  double average() const { return (precision + recall + density + coverage) / 4.0; }
};

// k-NN ball metrics of `fake` against the reference set `real`. Exact O(N^2);
// features are used as given (no normalisation).
ManifoldMetrics precision_recall_density_coverage(const FeatureSet& real,
                                                  const FeatureSet& fake, int k);

// |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)) of Gaussian fits with unbiased
// covariances.
double frechet_distance(const FeatureSet& real, const FeatureSet& fake);

struct FeatureReportRow {
  std::string label;
  ManifoldMetrics metrics;
  double average = 0.0;          // unrounded mean of the four metrics
  double shown_average = 0.0;    // rounded to the report precision
  double drop_percent = 0.0;     // vs. the first row, from shown averages
  long long drop_rounded = 0;    // drop_percent rounded to an integer
};

struct FeatureReport {
  std::string group;  // e.g. "nodes", "edges", "global"
  std::vector<FeatureReportRow> rows;
};

// Averages each row and the relative drop 100 * (avg_0 - avg_i) / avg_0 against
// the first row. Averages are rounded to `decimals` places before the drop is
// computed, so the report's numbers are consistent with each other as printed.
FeatureReport summarize_feature_report(const std::string& group,
                                       const std::vector<std::string>& labels,
                                       const std::vector<ManifoldMetrics>& metrics,
                                       int decimals = 2);

}  // namespace sgaug
