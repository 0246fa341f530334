#pragma once

#include "dkinet/param_store.hpp"
#include "dkinet/tensor.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dkinet::ag {

class Tape;

/// Handle to a node on a tape.
struct Value {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Tensor& tensor() const;
};

using GradMap = std::map<std::string, Tensor>;
using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

/// Recorded dynamic computation graph. Ops append nodes during the forward
/// pass; backward() walks the record in reverse once. A tape optionally
/// binds a ParamStore so parameter leaves can be pulled in by name and
/// untouched parameters report zero gradients.
class Tape {
public:
  Tape() = default;
  explicit Tape(const ParamStore& store) : store_(&store) {}

  /// Leaf bound to a named parameter of the attached store (memoized, so
  /// repeated uses of one parameter accumulate into one gradient).
  Value param(const std::string& name);

  /// Free-standing named leaf; gradient reported under `name`.
  Value leaf(const std::string& name, Tensor t);

  /// Non-differentiable input.
  Value constant(Tensor t);

  /// Generic node; `backward` receives the tape and the output gradient and
  /// is responsible for calling accumulate() on the inputs it cares about.
  Value record(Tensor value, const std::vector<int>& inputs, BackwardFn backward);

  const Tensor& value(int id) const { return nodes_[id].value; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }

  /// Adds `g` into the gradient accumulator of node `id` (no-op for nodes
  /// that do not require gradients).
  void accumulate(int id, const Tensor& g);

  /// Reverse sweep from a scalar loss. Returns one gradient per known
  /// parameter name; parameters never touched by the forward pass get
  /// zeros of their shape. One backward per tape.
  GradMap backward(Value loss);

  std::size_t num_nodes() const { return nodes_.size(); }

private:
  struct Node {
    Tensor value;
    BackwardFn backward;
    bool needs_grad = false;
  };

  const ParamStore* store_ = nullptr;
  std::vector<Node> nodes_;
  std::map<std::string, int> param_nodes_;
  std::vector<Tensor> grads_;
  std::vector<char> has_grad_;
  bool backward_done_ = false;
};

Value detach(Value v);

// Elementwise (shapes must agree exactly).
Value add(Value a, Value b);
Value sub(Value a, Value b);
Value mul(Value a, Value b);
Value divide(Value a, Value b);
Value neg(Value a);

Value add_scalar(Value a, double c);
Value mul_scalar(Value a, double c);

Value log_el(Value a);
Value sqrt_el(Value a);
Value abs_el(Value a);
Value sigmoid(Value a);
Value clamp(Value a, double lo, double hi);
Value clamp_min(Value a, double lo);

// Linear algebra.
Value matmul(Value a, Value b);
/// a [m,k] * b^T for b [n,k] -> [m,n], without materializing the transpose.
Value matmul_nt(Value a, Value b);
Value transpose(Value a);
Value reshape(Value a, const std::vector<Index>& shape);
Value concat(const std::vector<Value>& parts, int axis);
Value slice(Value a, int axis, Index start, Index len);
Value gather_rows(Value table, const std::vector<int>& ids);

// Reductions.
Value reduce_sum(Value a);
Value reduce_sum_axis(Value a, int axis);

/// Max-subtracted softmax along `axis` (rank-1: the only axis; rank-2:
/// 0 = down columns, 1 = across rows).
Value softmax(Value a, int axis = -1);

// Broadcast adds for [m,n] matrices.
Value add_rowvec(Value m, Value v);
Value add_colvec(Value m, Value v);

Value diag_sum(Value m);

// Distance-correlation building blocks.
Value pairwise_abs_diff(Value x);
Value double_center(Value m);

// Compositions.
Value dot(Value a, Value b);
Value mean_all(Value a);
Value stack_rows(const std::vector<Value>& rows);
/// x [n] * W [n,m] + b [m] -> [m]
Value affine(Value x, Value w, Value b);

inline Value operator+(Value a, Value b) { return add(a, b); }
inline Value operator-(Value a, Value b) { return sub(a, b); }
inline Value operator*(Value a, Value b) { return mul(a, b); }
inline Value operator*(Value a, double c) { return mul_scalar(a, c); }
inline Value operator*(double c, Value a) { return mul_scalar(a, c); }
inline Value operator-(Value a) { return neg(a); }

}  // namespace dkinet::ag
