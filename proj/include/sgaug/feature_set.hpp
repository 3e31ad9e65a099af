#pragma once

#include <Eigen/Core>

namespace sgaug {

/// N x D matrix of finite reals, one sample per row.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(Eigen::MatrixXd rows);

  Eigen::Index size() const { return rows_.rows(); }
  Eigen::Index dim() const { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const { return rows_; }
  auto row(Eigen::Index i) const { return rows_.row(i); }

 private:
  Eigen::MatrixXd rows_;
};

}  // namespace sgaug
