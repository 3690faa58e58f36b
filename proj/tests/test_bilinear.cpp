#include <doctest.h>

#include "core/bilinear.hpp"
#include "core/rng.hpp"

using namespace zsml;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("identity model reduces to the inner product") {
  const BilinearModel model{Matrix::identity(3)};
  const Vector x{1.0, -2.0, 0.5};
  const Vector lambda{2.0, 1.0, 4.0};
  CHECK(score(model, x, lambda) == dot(x, lambda));
}

TEST_CASE("hand-computed score and its sign") {
  const BilinearModel model{Matrix{{1, 0, 0}, {0, 1, 0}}};
  const Vector x{2.0, 3.0, 5.0};
  const Vector lambda{1.0, -1.0};
  CHECK(score(model, x, lambda) == -1.0);
  CHECK(predict(model, x, lambda) == -1);
}

TEST_CASE("score is bilinear: doubling x doubles the score") {
  Rng rng(5);
  const BilinearModel model{random_matrix(4, 6, rng)};
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(6), x2(6), lambda(4);
    for (std::size_t i = 0; i < 6; ++i) {
      x[i] = rng.normal();
      x2[i] = 2.0 * x[i];
    }
    for (std::size_t i = 0; i < 4; ++i) lambda[i] = rng.normal();
    CHECK(score(model, x2, lambda) == 2.0 * score(model, x, lambda));
  }
}

TEST_CASE("zero model predicts -1 everywhere (tie rule)") {
  const BilinearModel model{Matrix(2, 3)};
  Rng rng(6);
  const Matrix features = random_matrix(10, 3, rng);
  const Matrix labels = random_matrix(5, 2, rng);
  const Matrix scores = score_all(model, features, labels);
  for (double v : scores.entries()) CHECK(v == 0.0);
  const AnnotationMatrix pred = predict_all(model, features, labels);
  for (std::int8_t v : pred.values) CHECK(v == -1);
}

TEST_CASE("score_all matches per-pair score calls bit-exactly") {
  Rng rng(7);
  const BilinearModel model{random_matrix(2, 3, rng)};
  const Matrix features = random_matrix(4, 3, rng);
  const Matrix labels = random_matrix(5, 2, rng);
  const Matrix scores = score_all(model, features, labels);
  REQUIRE(scores.rows() == 4);
  REQUIRE(scores.cols() == 5);
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t l = 0; l < 5; ++l)
      CHECK(scores(m, l) ==
            score(model, matrix_row(features, m), matrix_row(labels, l)));

  // singleton batch reduces to one score call
  const Matrix one = score_all(model, select_rows(features, {0}),
                               select_rows(labels, {0}));
  CHECK(one(0, 0) == scores(0, 0));
}

TEST_CASE("predictions are invariant to positive scaling of V") {
  Rng rng(8);
  const Matrix v = random_matrix(3, 4, rng);
  Matrix v2 = v, v3 = v;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      v2(i, j) *= 2.0;   // exact power-of-two scaling
      v3(i, j) *= 0.37;  // arbitrary positive scaling
    }
  const Matrix features = random_matrix(50, 4, rng);
  const Matrix labels = random_matrix(20, 3, rng);
  const AnnotationMatrix base = predict_all(BilinearModel{v}, features, labels);
  CHECK(predict_all(BilinearModel{v2}, features, labels).values == base.values);
  CHECK(predict_all(BilinearModel{v3}, features, labels).values == base.values);
}

TEST_CASE("dimension mismatches are contract errors") {
  const BilinearModel model{Matrix(2, 3)};
  CHECK_THROWS_AS(score(model, Vector{1.0, 2.0}, Vector{1.0, 2.0}),
                  ContractError);
  CHECK_THROWS_AS(score(model, Vector{1.0, 2.0, 3.0}, Vector{1.0, 2.0, 3.0}),
                  ContractError);
  CHECK_THROWS_AS(score_all(model, Matrix(4, 2), Matrix(5, 2)), ContractError);
}
