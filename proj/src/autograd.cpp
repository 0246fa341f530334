#include "dkinet/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dkinet::ag {

const Tensor& Value::tensor() const {
  if (!valid()) throw TensorError("use of empty Value handle");
  return tape->value(id);
}

Value Tape::param(const std::string& name) {
  auto it = param_nodes_.find(name);
  if (it != param_nodes_.end()) return {this, it->second};
  if (store_ == nullptr) throw TensorError("tape has no parameter store for '" + name + "'");
  return leaf(name, store_->at(name));
}

Value Tape::leaf(const std::string& name, Tensor t) {
  if (param_nodes_.count(name)) throw TensorError("duplicate leaf '" + name + "'");
  nodes_.push_back(Node{std::move(t), nullptr, true});
  int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_[name] = id;
  return {this, id};
}

Value Tape::constant(Tensor t) {
  nodes_.push_back(Node{std::move(t), nullptr, false});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Value Tape::record(Tensor value, const std::vector<int>& inputs, BackwardFn backward) {
  bool needs = false;
  for (int i : inputs) needs = needs || nodes_[i].needs_grad;
  nodes_.push_back(Node{std::move(value), needs ? std::move(backward) : nullptr, needs});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(int id, const Tensor& g) {
  if (!nodes_[id].needs_grad) return;
  if (!has_grad_[id]) {
    grads_[id] = Tensor::zeros(nodes_[id].value.shape());
    has_grad_[id] = 1;
  }
  grads_[id].array() += g.array();
}

GradMap Tape::backward(Value loss) {
  if (loss.tape != this) throw TensorError("loss was not produced under this tape");
  if (backward_done_) throw TensorError("backward already ran on this tape");
  if (nodes_[loss.id].value.size() != 1) {
    throw TensorError("backward requires a scalar loss, got shape " +
                      nodes_[loss.id].value.shape_str());
  }
  backward_done_ = true;

  grads_.assign(nodes_.size(), Tensor());
  has_grad_.assign(nodes_.size(), 0);
  grads_[loss.id] = Tensor::full(nodes_[loss.id].value.shape(), 1.0);
  has_grad_[loss.id] = 1;

  for (int i = loss.id; i >= 0; --i) {
    if (!has_grad_[i] || !nodes_[i].backward) continue;
    nodes_[i].backward(*this, grads_[i]);
  }

  GradMap out;
  for (const auto& [name, id] : param_nodes_) {
    out[name] = has_grad_[id] ? grads_[id] : Tensor::zeros(nodes_[id].value.shape());
  }
  if (store_ != nullptr) {
    for (const auto& [name, t] : *store_) {
      if (!out.count(name)) out[name] = Tensor::zeros(t.shape());
    }
  }
  return out;
}

namespace {

void check_same_tape(Value a, Value b, const char* op) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw TensorError(std::string(op) + ": operands from different tapes");
  }
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw TensorError(std::string(op) + " shape mismatch: " + a.shape_str() + " vs " +
                      b.shape_str());
  }
}

MatrixRM centered(const Eigen::Map<const MatrixRM>& m) {
  const Index n = m.rows();
  Eigen::VectorXd row_mean = m.rowwise().mean();
  Eigen::RowVectorXd col_mean = m.colwise().mean();
  double grand = m.mean();
  MatrixRM out = m;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean;
  out.array() += grand;
  (void)n;
  return out;
}

}  // namespace

Value detach(Value v) { return v.tape->constant(v.tensor()); }

Value add(Value a, Value b) {
  check_same_tape(a, b, "add");
  check_same_shape(a.tensor(), b.tensor(), "add");
  Tensor out(a.tensor().shape(), a.tensor().array() + b.tensor().array());
  int ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, const Tensor& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, g);
  });
}

Value sub(Value a, Value b) {
  check_same_tape(a, b, "sub");
  check_same_shape(a.tensor(), b.tensor(), "sub");
  Tensor out(a.tensor().shape(), a.tensor().array() - b.tensor().array());
  int ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, const Tensor& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, Tensor(g.shape(), -g.array()));
  });
}

Value mul(Value a, Value b) {
  check_same_tape(a, b, "mul");
  check_same_shape(a.tensor(), b.tensor(), "mul");
  Tensor out(a.tensor().shape(), a.tensor().array() * b.tensor().array());
  int ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, const Tensor& g) {
    t.accumulate(ia, Tensor(g.shape(), g.array() * t.value(ib).array()));
    t.accumulate(ib, Tensor(g.shape(), g.array() * t.value(ia).array()));
  });
}

Value divide(Value a, Value b) {
  check_same_tape(a, b, "divide");
  check_same_shape(a.tensor(), b.tensor(), "divide");
  Tensor out(a.tensor().shape(), a.tensor().array() / b.tensor().array());
  int ia = a.id, ib = b.id, io = static_cast<int>(a.tape->num_nodes());
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib, io](Tape& t, const Tensor& g) {
    t.accumulate(ia, Tensor(g.shape(), g.array() / t.value(ib).array()));
    t.accumulate(ib, Tensor(g.shape(),
                            -g.array() * t.value(io).array() / t.value(ib).array()));
  });
}

Value neg(Value a) {
  Tensor out(a.tensor().shape(), -a.tensor().array());
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia](Tape& t, const Tensor& g) {
    t.accumulate(ia, Tensor(g.shape(), -g.array()));
  });
}

Value add_scalar(Value a, double c) {
  Tensor out(a.tensor().shape(), a.tensor().array() + c);
  int ia = a.id;
  return a.tape->record(std::move(out), {ia},
                        [ia](Tape& t, const Tensor& g) { t.accumulate(ia, g); });
}

Value mul_scalar(Value a, double c) {
  Tensor out(a.tensor().shape(), a.tensor().array() * c);
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia, c](Tape& t, const Tensor& g) {
    t.accumulate(ia, Tensor(g.shape(), g.array() * c));
  });
}

Value log_el(Value a) {
  Tensor out(a.tensor().shape(), a.tensor().array().log());
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia](Tape& t, const Tensor& g) {
    t.accumulate(ia, Tensor(g.shape(), g.array() / t.value(ia).array()));
  });
}

Value sqrt_el(Value a) {
  Tensor out(a.tensor().shape(), a.tensor().array().sqrt());
  int ia = a.id, io = static_cast<int>(a.tape->num_nodes());
  return a.tape->record(std::move(out), {ia}, [ia, io](Tape& t, const Tensor& g) {
    const ArrayX& y = t.value(io).array();
    // derivative left at 0 where the root vanishes
    ArrayX d = (y > 1e-154).select(g.array() / (2.0 * y), ArrayX::Zero(y.size()));
    t.accumulate(ia, Tensor(g.shape(), std::move(d)));
  });
}

Value abs_el(Value a) {
  Tensor out(a.tensor().shape(), a.tensor().array().abs());
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia](Tape& t, const Tensor& g) {
    const ArrayX& x = t.value(ia).array();
    ArrayX s = (x > 0.0).select(ArrayX::Constant(x.size(), 1.0),
                                (x < 0.0).select(ArrayX::Constant(x.size(), -1.0),
                                                 ArrayX::Zero(x.size())));
    t.accumulate(ia, Tensor(g.shape(), g.array() * s));
  });
}

Value sigmoid(Value a) {
  const ArrayX& x = a.tensor().array();
  ArrayX y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    double v = x[i];
    y[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  Tensor out(a.tensor().shape(), std::move(y));
  int ia = a.id, io = static_cast<int>(a.tape->num_nodes());
  return a.tape->record(std::move(out), {ia}, [ia, io](Tape& t, const Tensor& g) {
    const ArrayX& s = t.value(io).array();
    t.accumulate(ia, Tensor(g.shape(), g.array() * s * (1.0 - s)));
  });
}

Value clamp(Value a, double lo, double hi) {
  if (lo > hi) throw TensorError("clamp: lo > hi");
  const ArrayX& x = a.tensor().array();
  Tensor out(a.tensor().shape(), x.max(lo).min(hi));
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia, lo, hi](Tape& t, const Tensor& g) {
    const ArrayX& x = t.value(ia).array();
    ArrayX mask = (x >= lo && x <= hi).select(ArrayX::Constant(x.size(), 1.0),
                                              ArrayX::Zero(x.size()));
    t.accumulate(ia, Tensor(g.shape(), g.array() * mask));
  });
}

Value clamp_min(Value a, double lo) {
  return clamp(a, lo, std::numeric_limits<double>::max());
}

Value matmul(Value a, Value b) {
  check_same_tape(a, b, "matmul");
  const Tensor& ta = a.tensor();
  const Tensor& tb = b.tensor();
  if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.rows()) {
    throw TensorError("matmul shape mismatch: " + ta.shape_str() + " x " + tb.shape_str());
  }
  Tensor out = Tensor::zeros({ta.rows(), tb.cols()});
  out.mat() = ta.mat() * tb.mat();
  int ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, const Tensor& g) {
    const Tensor& va = t.value(ia);
    const Tensor& vb = t.value(ib);
    if (t.needs_grad(ia)) {
      Tensor ga = Tensor::zeros(va.shape());
      ga.mat() = g.mat() * vb.mat().transpose();
      t.accumulate(ia, ga);
    }
    if (t.needs_grad(ib)) {
      Tensor gb = Tensor::zeros(vb.shape());
      gb.mat() = va.mat().transpose() * g.mat();
      t.accumulate(ib, gb);
    }
  });
}

Value matmul_nt(Value a, Value b) {
  check_same_tape(a, b, "matmul_nt");
  const Tensor& ta = a.tensor();
  const Tensor& tb = b.tensor();
  if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.cols()) {
    throw TensorError("matmul_nt shape mismatch: " + ta.shape_str() + " x " +
                      tb.shape_str() + "^T");
  }
  Tensor out = Tensor::zeros({ta.rows(), tb.rows()});
  out.mat() = ta.mat() * tb.mat().transpose();
  int ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, const Tensor& g) {
    const Tensor& va = t.value(ia);
    const Tensor& vb = t.value(ib);
    if (t.needs_grad(ia)) {
      Tensor ga = Tensor::zeros(va.shape());
      ga.mat() = g.mat() * vb.mat();
      t.accumulate(ia, ga);
    }
    if (t.needs_grad(ib)) {
      Tensor gb = Tensor::zeros(vb.shape());
      gb.mat() = g.mat().transpose() * va.mat();
      t.accumulate(ib, gb);
    }
  });
}

Value transpose(Value a) {
  const Tensor& ta = a.tensor();
  if (ta.rank() != 2) throw TensorError("transpose needs rank-2, got " + ta.shape_str());
  Tensor out = Tensor::zeros({ta.cols(), ta.rows()});
  out.mat() = ta.mat().transpose();
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia](Tape& t, const Tensor& g) {
    Tensor gt = Tensor::zeros(t.value(ia).shape());
    gt.mat() = g.mat().transpose();
    t.accumulate(ia, gt);
  });
}

Value reshape(Value a, const std::vector<Index>& shape) {
  Tensor out(shape, a.tensor().array());
  int ia = a.id;
  std::vector<Index> in_shape = a.tensor().shape();
  return a.tape->record(std::move(out), {ia}, [ia, in_shape](Tape& t, const Tensor& g) {
    t.accumulate(ia, Tensor(in_shape, g.array()));
  });
}

Value concat(const std::vector<Value>& parts, int axis) {
  if (parts.empty()) throw TensorError("concat of zero tensors");
  Tape* tape = parts[0].tape;
  std::vector<int> ids;
  for (Value v : parts) {
    check_same_tape(parts[0], v, "concat");
    ids.push_back(v.id);
  }
  const int rank = parts[0].tensor().rank();
  if ((rank == 1 && axis != 0) || (rank == 2 && axis != 0 && axis != 1) || rank == 0) {
    throw TensorError("concat: invalid axis " + std::to_string(axis) + " for rank " +
                      std::to_string(rank));
  }

  Tensor out;
  std::vector<Index> extents;
  if (rank == 1) {
    Index total = 0;
    for (Value v : parts) {
      if (v.tensor().rank() != 1) throw TensorError("concat: mixed ranks");
      extents.push_back(v.tensor().size());
      total += v.tensor().size();
    }
    ArrayX data(total);
    Index off = 0;
    for (Value v : parts) {
      data.segment(off, v.tensor().size()) = v.tensor().array();
      off += v.tensor().size();
    }
    out = Tensor({total}, std::move(data));
  } else {
    Index other = axis == 0 ? parts[0].tensor().cols() : parts[0].tensor().rows();
    Index total = 0;
    for (Value v : parts) {
      const Tensor& tv = v.tensor();
      if (tv.rank() != 2) throw TensorError("concat: mixed ranks");
      Index o = axis == 0 ? tv.cols() : tv.rows();
      if (o != other) {
        throw TensorError("concat shape mismatch: " + parts[0].tensor().shape_str() +
                          " vs " + tv.shape_str());
      }
      extents.push_back(axis == 0 ? tv.rows() : tv.cols());
      total += extents.back();
    }
    out = axis == 0 ? Tensor::zeros({total, other}) : Tensor::zeros({other, total});
    Index off = 0;
    for (size_t p = 0; p < parts.size(); ++p) {
      if (axis == 0) {
        out.mat().middleRows(off, extents[p]) = parts[p].tensor().mat();
      } else {
        out.mat().middleCols(off, extents[p]) = parts[p].tensor().mat();
      }
      off += extents[p];
    }
  }

  return tape->record(std::move(out), ids,
                      [ids, extents, axis, rank](Tape& t, const Tensor& g) {
    Index off = 0;
    for (size_t p = 0; p < ids.size(); ++p) {
      if (rank == 1) {
        t.accumulate(ids[p], Tensor({extents[p]}, g.array().segment(off, extents[p])));
      } else {
        Tensor gp = Tensor::zeros(t.value(ids[p]).shape());
        if (axis == 0) {
          gp.mat() = g.mat().middleRows(off, extents[p]);
        } else {
          gp.mat() = g.mat().middleCols(off, extents[p]);
        }
        t.accumulate(ids[p], gp);
      }
      off += extents[p];
    }
  });
}

Value slice(Value a, int axis, Index start, Index len) {
  const Tensor& ta = a.tensor();
  const int rank = ta.rank();
  Index extent = rank == 1 ? ta.size() : (axis == 0 ? ta.rows() : ta.cols());
  if (rank == 0 || (rank == 1 && axis != 0) || (rank == 2 && axis != 0 && axis != 1)) {
    throw TensorError("slice: invalid axis for " + ta.shape_str());
  }
  if (start < 0 || len < 1 || start + len > extent) {
    throw TensorError("slice out of range for " + ta.shape_str());
  }
  Tensor out;
  if (rank == 1) {
    out = Tensor({len}, ta.array().segment(start, len));
  } else if (axis == 0) {
    out = Tensor::zeros({len, ta.cols()});
    out.mat() = ta.mat().middleRows(start, len);
  } else {
    out = Tensor::zeros({ta.rows(), len});
    out.mat() = ta.mat().middleCols(start, len);
  }
  int ia = a.id;
  return a.tape->record(std::move(out), {ia},
                        [ia, axis, start, len, rank](Tape& t, const Tensor& g) {
    Tensor gp = Tensor::zeros(t.value(ia).shape());
    if (rank == 1) {
      gp.array().segment(start, len) = g.array();
    } else if (axis == 0) {
      gp.mat().middleRows(start, len) = g.mat();
    } else {
      gp.mat().middleCols(start, len) = g.mat();
    }
    t.accumulate(ia, gp);
  });
}

Value gather_rows(Value table, const std::vector<int>& ids) {
  const Tensor& tt = table.tensor();
  if (tt.rank() != 2) throw TensorError("gather_rows needs rank-2, got " + tt.shape_str());
  if (ids.empty()) throw TensorError("gather_rows with empty id list");
  for (int id : ids) {
    if (id < 0 || id >= tt.rows()) {
      throw TensorError("gather_rows: row " + std::to_string(id) + " out of range for " +
                        tt.shape_str());
    }
  }
  Tensor out = Tensor::zeros({static_cast<Index>(ids.size()), tt.cols()});
  for (size_t i = 0; i < ids.size(); ++i) out.mat().row(static_cast<Index>(i)) = tt.mat().row(ids[i]);
  int it = table.id;
  return table.tape->record(std::move(out), {it}, [it, ids](Tape& t, const Tensor& g) {
    Tensor gt = Tensor::zeros(t.value(it).shape());
    for (size_t i = 0; i < ids.size(); ++i) {
      gt.mat().row(ids[i]) += g.mat().row(static_cast<Index>(i));
    }
    t.accumulate(it, gt);
  });
}

Value reduce_sum(Value a) {
  Tensor out = Tensor::scalar(a.tensor().array().sum());
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia](Tape& t, const Tensor& g) {
    t.accumulate(ia, Tensor::full(t.value(ia).shape(), g.value()));
  });
}

Value reduce_sum_axis(Value a, int axis) {
  const Tensor& ta = a.tensor();
  if (ta.rank() != 2 || (axis != 0 && axis != 1)) {
    throw TensorError("reduce_sum_axis needs rank-2 and axis 0/1, got " + ta.shape_str());
  }
  Tensor out = axis == 0 ? Tensor::zeros({ta.cols()}) : Tensor::zeros({ta.rows()});
  if (axis == 0) {
    Eigen::Map<Eigen::RowVectorXd>(out.array().data(), ta.cols()) = ta.mat().colwise().sum();
  } else {
    Eigen::Map<Eigen::VectorXd>(out.array().data(), ta.rows()) = ta.mat().rowwise().sum();
  }
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia, axis](Tape& t, const Tensor& g) {
    Tensor gt = Tensor::zeros(t.value(ia).shape());
    if (axis == 0) {
      gt.mat().rowwise() = Eigen::Map<const Eigen::RowVectorXd>(g.array().data(), g.size());
    } else {
      gt.mat().colwise() = Eigen::Map<const Eigen::VectorXd>(g.array().data(), g.size());
    }
    t.accumulate(ia, gt);
  });
}

namespace {

// softmax of one contiguous strided slice
void softmax_slice(const double* x, double* y, Index n, Index stride) {
  double mx = x[0];
  for (Index i = 1; i < n; ++i) mx = std::max(mx, x[i * stride]);
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    double e = std::exp(x[i * stride] - mx);
    y[i * stride] = e;
    sum += e;
  }
  for (Index i = 0; i < n; ++i) y[i * stride] /= sum;
}

void softmax_grad_slice(const double* y, const double* g, double* gx, Index n, Index stride) {
  double dot = 0.0;
  for (Index i = 0; i < n; ++i) dot += y[i * stride] * g[i * stride];
  for (Index i = 0; i < n; ++i) gx[i * stride] += y[i * stride] * (g[i * stride] - dot);
}

}  // namespace

Value softmax(Value a, int axis) {
  const Tensor& ta = a.tensor();
  const int rank = ta.rank();
  if (rank == 0) throw TensorError("softmax on a scalar");
  if (axis == -1) axis = rank - 1;
  if (axis < 0 || axis >= rank) {
    throw TensorError("softmax: axis " + std::to_string(axis) + " out of range for " +
                      ta.shape_str());
  }
  Tensor out = Tensor::zeros(ta.shape());
  if (rank == 1) {
    softmax_slice(ta.array().data(), out.array().data(), ta.size(), 1);
  } else {
    Index rows = ta.rows(), cols = ta.cols();
    if (axis == 1) {
      for (Index r = 0; r < rows; ++r) {
        softmax_slice(ta.array().data() + r * cols, out.array().data() + r * cols, cols, 1);
      }
    } else {
      for (Index c = 0; c < cols; ++c) {
        softmax_slice(ta.array().data() + c, out.array().data() + c, rows, cols);
      }
    }
  }
  int ia = a.id, io = static_cast<int>(a.tape->num_nodes());
  return a.tape->record(std::move(out), {ia}, [ia, io, axis, rank](Tape& t, const Tensor& g) {
    const Tensor& y = t.value(io);
    Tensor gx = Tensor::zeros(y.shape());
    if (rank == 1) {
      softmax_grad_slice(y.array().data(), g.array().data(), gx.array().data(), y.size(), 1);
    } else {
      Index rows = y.rows(), cols = y.cols();
      if (axis == 1) {
        for (Index r = 0; r < rows; ++r) {
          softmax_grad_slice(y.array().data() + r * cols, g.array().data() + r * cols,
                             gx.array().data() + r * cols, cols, 1);
        }
      } else {
        for (Index c = 0; c < cols; ++c) {
          softmax_grad_slice(y.array().data() + c, g.array().data() + c,
                             gx.array().data() + c, rows, cols);
        }
      }
    }
    t.accumulate(ia, gx);
  });
}

Value add_rowvec(Value m, Value v) {
  check_same_tape(m, v, "add_rowvec");
  const Tensor& tm = m.tensor();
  const Tensor& tv = v.tensor();
  if (tm.rank() != 2 || tv.rank() != 1 || tv.size() != tm.cols()) {
    throw TensorError("add_rowvec shape mismatch: " + tm.shape_str() + " vs " + tv.shape_str());
  }
  Tensor out = Tensor::zeros(tm.shape());
  out.mat() = tm.mat();
  out.mat().rowwise() += Eigen::Map<const Eigen::RowVectorXd>(tv.array().data(), tv.size());
  int im = m.id, iv = v.id;
  return m.tape->record(std::move(out), {im, iv}, [im, iv](Tape& t, const Tensor& g) {
    t.accumulate(im, g);
    Tensor gv = Tensor::zeros(t.value(iv).shape());
    Eigen::Map<Eigen::RowVectorXd>(gv.array().data(), gv.size()) = g.mat().colwise().sum();
    t.accumulate(iv, gv);
  });
}

Value add_colvec(Value m, Value v) {
  check_same_tape(m, v, "add_colvec");
  const Tensor& tm = m.tensor();
  const Tensor& tv = v.tensor();
  if (tm.rank() != 2 || tv.rank() != 1 || tv.size() != tm.rows()) {
    throw TensorError("add_colvec shape mismatch: " + tm.shape_str() + " vs " + tv.shape_str());
  }
  Tensor out = Tensor::zeros(tm.shape());
  out.mat() = tm.mat();
  out.mat().colwise() += Eigen::Map<const Eigen::VectorXd>(tv.array().data(), tv.size());
  int im = m.id, iv = v.id;
  return m.tape->record(std::move(out), {im, iv}, [im, iv](Tape& t, const Tensor& g) {
    t.accumulate(im, g);
    Tensor gv = Tensor::zeros(t.value(iv).shape());
    Eigen::Map<Eigen::VectorXd>(gv.array().data(), gv.size()) = g.mat().rowwise().sum();
    t.accumulate(iv, gv);
  });
}

Value diag_sum(Value m) {
  const Tensor& tm = m.tensor();
  if (tm.rank() != 2 || tm.rows() != tm.cols()) {
    throw TensorError("diag_sum needs a square matrix, got " + tm.shape_str());
  }
  Tensor out = Tensor::scalar(tm.mat().trace());
  int im = m.id;
  return m.tape->record(std::move(out), {im}, [im](Tape& t, const Tensor& g) {
    Tensor gm = Tensor::zeros(t.value(im).shape());
    gm.mat().diagonal().setConstant(g.value());
    t.accumulate(im, gm);
  });
}

Value pairwise_abs_diff(Value x) {
  const Tensor& tx = x.tensor();
  if (tx.rank() != 1) throw TensorError("pairwise_abs_diff needs rank-1, got " + tx.shape_str());
  const Index n = tx.size();
  Tensor out = Tensor::zeros({n, n});
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) out(k, l) = std::abs(tx(k) - tx(l));
  }
  int ix = x.id;
  return x.tape->record(std::move(out), {ix}, [ix, n](Tape& t, const Tensor& g) {
    const Tensor& v = t.value(ix);
    Tensor gx = Tensor::zeros({n});
    for (Index k = 0; k < n; ++k) {
      double acc = 0.0;
      for (Index l = 0; l < n; ++l) {
        double d = v(k) - v(l);
        double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        acc += (g(k, l) + g(l, k)) * s;
      }
      gx(k) = acc;
    }
    t.accumulate(ix, gx);
  });
}

Value double_center(Value m) {
  const Tensor& tm = m.tensor();
  if (tm.rank() != 2 || tm.rows() != tm.cols()) {
    throw TensorError("double_center needs a square matrix, got " + tm.shape_str());
  }
  Tensor out = Tensor::zeros(tm.shape());
  out.mat() = centered(tm.mat());
  int im = m.id;
  // centering is a self-adjoint linear map, so the pullback is itself
  return m.tape->record(std::move(out), {im}, [im](Tape& t, const Tensor& g) {
    Tensor gm = Tensor::zeros(g.shape());
    gm.mat() = centered(g.mat());
    t.accumulate(im, gm);
  });
}

Value dot(Value a, Value b) { return reduce_sum(mul(a, b)); }

Value mean_all(Value a) {
  return mul_scalar(reduce_sum(a), 1.0 / static_cast<double>(a.tensor().size()));
}

Value stack_rows(const std::vector<Value>& rows) {
  if (rows.empty()) throw TensorError("stack_rows of zero vectors");
  std::vector<Value> as_rows;
  as_rows.reserve(rows.size());
  for (Value v : rows) as_rows.push_back(reshape(v, {1, v.tensor().size()}));
  if (as_rows.size() == 1) return as_rows[0];
  return concat(as_rows, 0);
}

Value affine(Value x, Value w, Value b) {
  Value row = reshape(x, {1, x.tensor().size()});
  Value y = matmul(row, w);
  Value flat = reshape(y, {y.tensor().cols()});
  return add(flat, b);
}

}  // namespace dkinet::ag
