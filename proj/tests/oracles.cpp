#include "oracles.hpp"

#include "dkinet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

using dkinet::Rng;
using dkinet::ag::Tape;
using dkinet::ag::Value;

FdReport fd_check(ParamStore& store, const std::vector<std::string>& names,
                  const LossBuilder& build, int num_coords, std::uint64_t seed, double h) {
  Tape tape(store);
  Value loss = build(tape);
  auto grads = tape.backward(loss);

  auto eval = [&]() {
    Tape t(store);
    return build(t).tensor().value();
  };

  Rng rng(seed);
  FdReport report;
  for (int k = 0; k < num_coords; ++k) {
    const std::string& name = names[static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(names.size())))];
    Tensor& p = store.at_mut(name);
    Index i = static_cast<Index>(rng.uniform_int(p.size()));
    double keep = p(i);

    p(i) = keep + h;
    double fp = eval();
    p(i) = keep - h;
    double fm = eval();
    p(i) = keep;

    double numeric = (fp - fm) / (2.0 * h);
    double analytic = grads.at(name)(i);
    double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-3});
    double rel = std::abs(numeric - analytic) / denom;
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_coord = name + "[" + std::to_string(i) + "]";
    }
  }
  return report;
}

double dcor_brute(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto dist = [&](const std::vector<double>& v) {
    std::vector<double> d(n * n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) d[k * n + l] = std::abs(v[k] - v[l]);
    return d;
  };
  auto center = [&](std::vector<double> d) {
    std::vector<double> row(n, 0.0), col(n, 0.0);
    double grand = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        row[k] += d[k * n + l];
        col[l] += d[k * n + l];
        grand += d[k * n + l];
      }
    for (auto& v : row) v /= static_cast<double>(n);
    for (auto& v : col) v /= static_cast<double>(n);
    grand /= static_cast<double>(n * n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) d[k * n + l] += grand - row[k] - col[l];
    return d;
  };

  auto A = center(dist(x));
  auto B = center(dist(y));
  double cov2 = 0.0, varx2 = 0.0, vary2 = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) {
    cov2 += A[i] * B[i];
    varx2 += A[i] * A[i];
    vary2 += B[i] * B[i];
  }
  cov2 /= static_cast<double>(n * n);
  varx2 /= static_cast<double>(n * n);
  vary2 /= static_cast<double>(n * n);

  double dvarx = std::sqrt(varx2);
  double dvary = std::sqrt(vary2);
  if (dvarx < 1e-12 || dvary < 1e-12) return 0.0;
  return std::sqrt(std::max(cov2, 0.0)) / std::sqrt(dvarx * dvary);
}

double average_precision_brute(const std::vector<double>& scores,
                               const std::vector<int>& labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  int total_pos = 0;
  for (int l : labels) total_pos += l;
  if (total_pos == 0) return 0.0;

  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    int hits = 0;
    for (std::size_t j = 0; j < k; ++j) hits += labels[order[j]];
    double precision = static_cast<double>(hits) / static_cast<double>(k);
    double recall = static_cast<double>(hits) / static_cast<double>(total_pos);
    ap += precision * (recall - prev_recall);
    prev_recall = recall;
  }
  return ap;
}

Tensor filter_embeddings_brute(const Tensor& filter_w, const Tensor& relation_table) {
  const Index F = filter_w.rows();
  const Index R = relation_table.rows();
  const Index dim = relation_table.cols();
  Tensor out = Tensor::zeros({F, dim});
  for (Index f = 0; f < F; ++f) {
    double mx = filter_w(f, 0);
    for (Index r = 1; r < R; ++r) mx = std::max(mx, filter_w(f, r));
    double denom = 0.0;
    for (Index r = 0; r < R; ++r) denom += std::exp(filter_w(f, r) - mx);
    for (Index r = 0; r < R; ++r) {
      double w = std::exp(filter_w(f, r) - mx) / denom;
      for (Index d = 0; d < dim; ++d) out(f, d) += w * relation_table(r, d);
    }
  }
  return out;
}

AggregationResult aggregate_brute(const AggregationInputs& in,
                                  const dkinet::KnowledgeGraph& kg,
                                  const dkinet::FilterGraph& fg, int layers) {
  const Index dim = in.concept_table.cols();
  const Index F = in.filter_w.rows();
  Tensor filt = filter_embeddings_brute(in.filter_w, in.relation_table);

  Tensor concepts = in.concept_table;
  Tensor codes = in.code_table;
  for (int layer = 1; layer <= layers; ++layer) {
    // relation-path pass over the concept graph
    Tensor next_concepts = Tensor::zeros(concepts.shape());
    for (Index h = 0; h < concepts.rows(); ++h) {
      int count = 0;
      for (const auto& t : kg.triples) {
        if (t.head != h) continue;
        ++count;
        for (Index d = 0; d < dim; ++d) {
          next_concepts(h, d) += in.relation_table(t.rel, d) * concepts(t.tail, d);
        }
      }
      if (count == 0) {
        for (Index d = 0; d < dim; ++d) next_concepts(h, d) = concepts(h, d);
      } else {
        for (Index d = 0; d < dim; ++d) next_concepts(h, d) /= static_cast<double>(count);
      }
    }

    // attention-weighted filter pass over the code graph
    Tensor next_codes = Tensor::zeros(codes.shape());
    for (Index c = 0; c < codes.rows(); ++c) {
      int count = 0;
      for (const auto& [code, f, u] : fg.triples) {
        if (code != c) continue;
        ++count;
        double logit_max = -1e300;
        for (Index fp = 0; fp < F; ++fp) {
          double l = 0.0;
          for (Index d = 0; d < dim; ++d) l += filt(fp, d) * codes(c, d);
          logit_max = std::max(logit_max, l);
        }
        double denom = 0.0, num = 0.0;
        for (Index fp = 0; fp < F; ++fp) {
          double l = 0.0;
          for (Index d = 0; d < dim; ++d) l += filt(fp, d) * codes(c, d);
          denom += std::exp(l - logit_max);
          if (fp == f) num = std::exp(l - logit_max);
        }
        double att = num / denom;
        for (Index d = 0; d < dim; ++d) {
          next_codes(c, d) += att * filt(f, d) * concepts(u, d);
        }
      }
      if (count == 0) {
        for (Index d = 0; d < dim; ++d) next_codes(c, d) = codes(c, d);
      } else {
        for (Index d = 0; d < dim; ++d) next_codes(c, d) /= static_cast<double>(count);
      }
    }

    concepts = next_concepts;
    codes = next_codes;
  }
  return {concepts, codes};
}

}  // namespace oracle
