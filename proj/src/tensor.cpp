#include "dkinet/tensor.hpp"

#include <sstream>

namespace dkinet {

std::string shape_to_string(const std::vector<Index>& shape) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

Tensor::Tensor(std::vector<Index> shape, ArrayX data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.size() > 2) {
    throw TensorError("tensor rank " + std::to_string(shape_.size()) + " not supported");
  }
  Index expect = 1;
  for (Index d : shape_) {
    if (d <= 0) throw TensorError("non-positive dimension in shape " + shape_to_string(shape_));
    expect *= d;
  }
  if (expect != data_.size()) {
    throw TensorError("data length " + std::to_string(data_.size()) +
                      " does not match shape " + shape_to_string(shape_));
  }
  if (!data_.allFinite()) {
    throw TensorError("non-finite entry in tensor of shape " + shape_to_string(shape_));
  }
}

Tensor Tensor::scalar(double v) { return Tensor({}, ArrayX::Constant(1, v)); }

Tensor Tensor::zeros(const std::vector<Index>& shape) {
  Index n = 1;
  for (Index d : shape) n *= d;
  return Tensor(shape, ArrayX::Zero(n));
}

Tensor Tensor::full(const std::vector<Index>& shape, double v) {
  Index n = 1;
  for (Index d : shape) n *= d;
  return Tensor(shape, ArrayX::Constant(n, v));
}

Tensor Tensor::vector(const std::vector<double>& v) {
  ArrayX a(static_cast<Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) a[static_cast<Index>(i)] = v[i];
  return Tensor({static_cast<Index>(v.size())}, std::move(a));
}

Tensor Tensor::matrix(Index rows, Index cols, const std::vector<double>& row_major) {
  ArrayX a(static_cast<Index>(row_major.size()));
  for (size_t i = 0; i < row_major.size(); ++i) a[static_cast<Index>(i)] = row_major[i];
  return Tensor({rows, cols}, std::move(a));
}

Tensor Tensor::from_eigen(const Eigen::MatrixXd& m) {
  Tensor t = Tensor::zeros({m.rows(), m.cols()});
  t.mat() = m;
  return t;
}

Tensor Tensor::identity(Index n) {
  Tensor t = Tensor::zeros({n, n});
  for (Index i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

Index Tensor::rows() const {
  if (rank() == 2) return shape_[0];
  if (rank() == 1) return shape_[0];
  return 1;
}

Index Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  if (rank() == 1) return shape_[0];
  return 1;
}

double Tensor::value() const {
  if (size() != 1) throw TensorError("value() on non-scalar tensor " + shape_str());
  return data_[0];
}

Eigen::Map<const MatrixRM> Tensor::mat() const {
  if (rank() != 2) throw TensorError("mat() on rank-" + std::to_string(rank()) + " tensor");
  return Eigen::Map<const MatrixRM>(data_.data(), shape_[0], shape_[1]);
}

Eigen::Map<MatrixRM> Tensor::mat() {
  if (rank() != 2) throw TensorError("mat() on rank-" + std::to_string(rank()) + " tensor");
  return Eigen::Map<MatrixRM>(data_.data(), shape_[0], shape_[1]);
}

std::string Tensor::shape_str() const { return shape_to_string(shape_); }

void Tensor::ensure_finite(const std::string& context) const {
  if (!data_.allFinite()) {
    throw TensorError("non-finite value in " + context);
  }
}

}  // namespace dkinet
