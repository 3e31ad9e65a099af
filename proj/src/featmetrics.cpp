#include "sgaug/featmetrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "sgaug/errors.hpp"

namespace sgaug {
namespace {

double distance(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                Eigen::Index j) {
  double sq = 0.0;
  for (Eigen::Index d = 0; d < a.cols(); ++d) {
    const double diff = a(i, d) - b(j, d);
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

void require_knn_size(const FeatureSet& x, int k, const char* name) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (x.size() <= k) {
    throw InvalidArgument(std::string(name) + " set has " + std::to_string(x.size()) +
                          " rows; k-NN metrics need more than k = " + std::to_string(k));
  }
  if (x.dim() < 1) throw InvalidArgument(std::string(name) + " set has no columns");
}

// Symmetric PSD square root; negative eigenvalues from round-off are clamped.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

}  // namespace

FeatureSet::FeatureSet(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (!rows_.allFinite()) throw InvalidArgument("feature matrix has non-finite values");
}

Eigen::VectorXd knn_radii(const FeatureSet& features, int k) {
  require_knn_size(features, k, "feature");
  const auto& x = features.rows();
  const Eigen::Index n = x.rows();
  Eigen::VectorXd radii(n);
  std::vector<double> dist(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) dist[m++] = distance(x, i, x, j);
    }
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    radii(i) = dist[static_cast<std::size_t>(k - 1)];
  }
  return radii;
}

ManifoldMetrics precision_recall_density_coverage(const FeatureSet& real,
                                                  const FeatureSet& fake, int k) {
  require_knn_size(real, k, "real");
  require_knn_size(fake, k, "fake");
  if (real.dim() != fake.dim()) {
    throw InvalidArgument("real and fake feature dimensions differ");
  }
  const Eigen::VectorXd real_radii = knn_radii(real, k);
  const Eigen::VectorXd fake_radii = knn_radii(fake, k);
  const auto& r = real.rows();
  const auto& f = fake.rows();
  const Eigen::Index nr = r.rows();
  const Eigen::Index nf = f.rows();

  // d(i, j) between real row i and fake row j.
  Eigen::MatrixXd d(nr, nf);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nf; ++j) d(i, j) = distance(r, i, f, j);
  }

  std::size_t precise = 0;
  std::size_t inside_total = 0;
  for (Eigen::Index j = 0; j < nf; ++j) {
    std::size_t inside = 0;
    for (Eigen::Index i = 0; i < nr; ++i) {
      if (d(i, j) <= real_radii(i)) ++inside;
    }
    inside_total += inside;
    if (inside > 0) ++precise;
  }
  std::size_t recalled = 0;
  std::size_t covered = 0;
  for (Eigen::Index i = 0; i < nr; ++i) {
    bool in_fake_ball = false;
    bool has_fake_in_ball = false;
    for (Eigen::Index j = 0; j < nf; ++j) {
      if (d(i, j) <= fake_radii(j)) in_fake_ball = true;
      if (d(i, j) <= real_radii(i)) has_fake_in_ball = true;
    }
    if (in_fake_ball) ++recalled;
    if (has_fake_in_ball) ++covered;
  }
  ManifoldMetrics m;
  m.precision = static_cast<double>(precise) / static_cast<double>(nf);
  m.recall = static_cast<double>(recalled) / static_cast<double>(nr);
  m.density = static_cast<double>(inside_total) / (static_cast<double>(k) * static_cast<double>(nf));
  m.coverage = static_cast<double>(covered) / static_cast<double>(nr);
  return m;
}

double frechet_distance(const FeatureSet& real, const FeatureSet& fake) {
  if (real.size() < 2 || fake.size() < 2) {
    throw InvalidArgument("frechet_distance needs at least 2 rows per set");
  }
  if (real.dim() != fake.dim()) {
    throw InvalidArgument("real and fake feature dimensions differ");
  }
  auto fit = [](const Eigen::MatrixXd& x) {
    Eigen::RowVectorXd mu = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mu;
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
    return std::pair{mu, cov};
  };
  const auto [mu1, cov1] = fit(real.rows());
  const auto [mu2, cov2] = fit(fake.rows());

  // Tr((S1 S2)^(1/2)) = Tr((S1^(1/2) S2 S1^(1/2))^(1/2)); the inner product is
  // symmetric PSD, so a self-adjoint eigensolver applies.
  const Eigen::MatrixXd s1_half = psd_sqrt(cov1);
  Eigen::MatrixXd inner = s1_half * cov2 * s1_half;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner, Eigen::EigenvaluesOnly);
  const double tr_sqrt = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  const double mean_term = (mu1 - mu2).squaredNorm();
  const double trace_term = cov1.trace() + cov2.trace() - 2.0 * tr_sqrt;
  return mean_term + std::max(0.0, trace_term);
}

FeatureReport summarize_feature_report(const std::string& group,
                                       const std::vector<std::string>& labels,
                                       const std::vector<ManifoldMetrics>& metrics,
                                       int decimals) {
  if (labels.size() != metrics.size()) {
    throw InvalidArgument("summarize_feature_report: labels and metrics differ in length");
  }
  if (metrics.empty()) {
    throw InvalidArgument("summarize_feature_report: no conditions given");
  }
  FeatureReport report{group, {}};
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    FeatureReportRow row;
    row.label = labels[i];
    row.metrics = metrics[i];
    row.average = metrics[i].average();
    row.shown_average = round_to(row.average, decimals);
    report.rows.push_back(std::move(row));
  }
  const double base = report.rows.front().shown_average;
  for (auto& row : report.rows) {
    row.drop_percent = base == 0.0 ? 0.0 : 100.0 * (base - row.shown_average) / base;
    row.drop_rounded = std::llround(row.drop_percent);
  }
  return report;
}

}  // namespace sgaug
