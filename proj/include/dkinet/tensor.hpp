#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace dkinet {

using Eigen::Index;
using ArrayX = Eigen::ArrayXd;
using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class TensorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dense float64 value with row-major storage. Rank 0 (scalar), 1 (vector)
/// or 2 (matrix). Every dimension is >= 1 and every entry is finite; both
/// are enforced at construction.
class Tensor {
public:
  Tensor() : shape_{}, data_(1) { data_[0] = 0.0; }

  Tensor(std::vector<Index> shape, ArrayX data);

  static Tensor scalar(double v);
  static Tensor zeros(const std::vector<Index>& shape);
  static Tensor full(const std::vector<Index>& shape, double v);
  static Tensor vector(const std::vector<double>& v);
  static Tensor matrix(Index rows, Index cols, const std::vector<double>& row_major);
  static Tensor from_eigen(const Eigen::MatrixXd& m);
  static Tensor identity(Index n);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<Index>& shape() const { return shape_; }
  Index size() const { return data_.size(); }

  Index rows() const;
  Index cols() const;

  /// Scalar read; requires size() == 1.
  double value() const;

  double operator()(Index i) const { return data_[i]; }
  double& operator()(Index i) { return data_[i]; }
  double operator()(Index i, Index j) const { return data_[i * cols() + j]; }
  double& operator()(Index i, Index j) { return data_[i * cols() + j]; }

  const ArrayX& array() const { return data_; }
  ArrayX& array() { return data_; }

  /// Rank-2 matrix view over the flat storage.
  Eigen::Map<const MatrixRM> mat() const;
  Eigen::Map<MatrixRM> mat();

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_str() const;

  /// Throws TensorError mentioning `context` if any entry is NaN/Inf.
  void ensure_finite(const std::string& context) const;

private:
  std::vector<Index> shape_;
  ArrayX data_;
};

std::string shape_to_string(const std::vector<Index>& shape);

}  // namespace dkinet
