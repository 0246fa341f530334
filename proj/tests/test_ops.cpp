#include "dkinet/autograd.hpp"
#include "dkinet/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace dkinet;
using namespace dkinet::ag;

TEST_CASE("matmul identity and hand product") {
  Tape t;
  Value eye = t.constant(Tensor::identity(2));
  Value col = t.constant(Tensor::matrix(2, 1, {3, 4}));
  Value out = matmul(eye, col);
  CHECK(out.tensor()(0, 0) == 3.0);
  CHECK(out.tensor()(1, 0) == 4.0);

  Value row = t.constant(Tensor::matrix(1, 2, {1, 2}));
  Value prod = matmul(row, col);
  CHECK(prod.tensor()(0, 0) == 11.0);
}

TEST_CASE("matmul rejects mismatched inner dimensions naming both shapes") {
  Tape t;
  Value a = t.constant(Tensor::zeros({2, 3}));
  Value b = t.constant(Tensor::zeros({2, 2}));
  CHECK_THROWS_WITH_AS(matmul(a, b), "matmul shape mismatch: [2x3] x [2x2]", TensorError);
}

TEST_CASE("softmax of equal logits is uniform") {
  Tape t;
  Value x = t.constant(Tensor::vector({0, 0}));
  Value y = softmax(x);
  CHECK(y.tensor()(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(y.tensor()(1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("softmax stays stable under huge logits") {
  Tape t;
  Value x = t.constant(Tensor::vector({1000, 0}));
  Value y = softmax(x);
  CHECK(std::abs(y.tensor()(0) - 1.0) < 1e-12);
  CHECK(std::abs(y.tensor()(1)) < 1e-12);
}

TEST_CASE("softmax of log-ratios recovers the ratios") {
  Tape t;
  Value x = t.constant(Tensor::vector({std::log(1.0), std::log(2.0), std::log(3.0)}));
  Value y = softmax(x);
  CHECK(y.tensor()(0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(y.tensor()(1) == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
  CHECK(y.tensor()(2) == doctest::Approx(3.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("softmax sums to one and is shift invariant") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    Tensor x = Tensor::zeros({6});
    for (Index i = 0; i < 6; ++i) x(i) = rng.uniform(-5, 5);
    Tensor shifted = x;
    shifted.array() += 123.456;

    Tape t;
    Value a = softmax(t.constant(x));
    Value b = softmax(t.constant(shifted));
    CHECK(std::abs(a.tensor().array().sum() - 1.0) <= 1e-12);
    for (Index i = 0; i < 6; ++i) {
      CHECK(std::abs(a.tensor()(i) - b.tensor()(i)) <= 1e-12);
    }
  }
}

TEST_CASE("softmax rejects a scalar and bad axes") {
  Tape t;
  CHECK_THROWS_AS(softmax(t.constant(Tensor::scalar(1.0))), TensorError);
  CHECK_THROWS_AS(softmax(t.constant(Tensor::vector({1, 2})), 1), TensorError);
}

TEST_CASE("sigmoid at zero") {
  Tape t;
  Value y = sigmoid(t.constant(Tensor::vector({0})));
  CHECK(y.tensor()(0) == 0.5);
}

TEST_CASE("elementwise multiply") {
  Tape t;
  Value a = t.constant(Tensor::vector({2, 0}));
  Value b = t.constant(Tensor::vector({1, 3}));
  Value y = mul(a, b);
  CHECK(y.tensor()(0) == 2.0);
  CHECK(y.tensor()(1) == 0.0);
  CHECK_THROWS_AS(mul(a, t.constant(Tensor::vector({1, 2, 3}))), TensorError);
}

TEST_CASE("concat along the feature axis") {
  Tape t;
  Value a = t.constant(Tensor::matrix(2, 1, {1, 2}));
  Value b = t.constant(Tensor::matrix(2, 1, {3, 4}));
  Value y = concat({a, b}, 1);
  CHECK(y.tensor().shape() == std::vector<Index>{2, 2});
  CHECK(y.tensor()(0, 0) == 1.0);
  CHECK(y.tensor()(0, 1) == 3.0);
  CHECK(y.tensor()(1, 0) == 2.0);
  CHECK(y.tensor()(1, 1) == 4.0);
}

TEST_CASE("concat then slice recovers the inputs exactly") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Index n1 = 1 + rng.uniform_int(5);
    Index n2 = 1 + rng.uniform_int(5);
    Tensor a = seeded_init({n1}, rng.next_u64());
    Tensor b = seeded_init({n2}, rng.next_u64());
    Tape t;
    Value joined = concat({t.constant(a), t.constant(b)}, 0);
    Value sa = slice(joined, 0, 0, n1);
    Value sb = slice(joined, 0, n1, n2);
    CHECK((sa.tensor().array() == a.array()).all());
    CHECK((sb.tensor().array() == b.array()).all());
  }
}

TEST_CASE("reduce_sum over axes") {
  Tape t;
  Value m = t.constant(Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  CHECK(reduce_sum(m).tensor().value() == 21.0);
  Value cols = reduce_sum_axis(m, 0);
  CHECK(cols.tensor()(0) == 5.0);
  CHECK(cols.tensor()(2) == 9.0);
  Value rows = reduce_sum_axis(m, 1);
  CHECK(rows.tensor()(0) == 6.0);
  CHECK(rows.tensor()(1) == 15.0);
}

TEST_CASE("gather_rows bounds checking") {
  Tape t;
  Value m = t.constant(Tensor::matrix(2, 2, {1, 2, 3, 4}));
  Value g = gather_rows(m, {1, 0, 1});
  CHECK(g.tensor()(0, 0) == 3.0);
  CHECK(g.tensor()(2, 1) == 4.0);
  CHECK_THROWS_AS(gather_rows(m, {2}), TensorError);
}
