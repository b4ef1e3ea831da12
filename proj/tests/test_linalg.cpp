#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "multiscale/linalg.hpp"

using namespace multiscale;

namespace {

Mat make(int r, int c, std::vector<double> vals) {
  Mat m(r, c);
  m.a = std::move(vals);
  return m;
}

}  // namespace

TEST_CASE("matrix product, difference, transpose, trace") {
  Mat a = make(2, 2, {1, 2, 3, 4});
  Mat b = make(2, 2, {5, 6, 7, 8});
  Mat p = a * b;
  CHECK(p(0, 0) == 19);
  CHECK(p(0, 1) == 22);
  CHECK(p(1, 0) == 43);
  CHECK(p(1, 1) == 50);
  Mat d = a - b;
  CHECK(d(1, 1) == -4);
  Mat t = transpose(a);
  CHECK(t(0, 1) == 3);
  CHECK(trace(a) == 5);
  Mat i = Mat::identity(3);
  CHECK(i(2, 2) == 1);
  CHECK(i(0, 2) == 0);
}

TEST_CASE("vector products") {
  Mat a = make(2, 2, {1, 2, 3, 4});
  std::vector<double> x = {1, 1};
  std::vector<double> l = left_multiply(x, a);
  CHECK(l[0] == 4);
  CHECK(l[1] == 6);
  std::vector<double> r = right_multiply(a, x);
  CHECK(r[0] == 3);
  CHECK(r[1] == 7);
}

TEST_CASE("spectral radius on small nonnegative matrices") {
  CHECK(spectral_radius(make(1, 1, {2.0})) == doctest::Approx(2.0).epsilon(1e-12));
  // row-stochastic => radius exactly 1
  Mat v = make(2, 2, {0.3, 0.7, 0.5, 0.5});
  CHECK(std::abs(spectral_radius(v) - 1.0) <= 1e-11);
  // periodic (bipartite) spectrum {1, -1}: the shift escalation has to kick in
  Mat perm = make(2, 2, {0.0, 1.0, 1.0, 0.0});
  CHECK(std::abs(spectral_radius(perm) - 1.0) <= 1e-11);
  Mat scaled = make(2, 2, {0.0, 2.0, 0.5, 0.0});
  CHECK(std::abs(spectral_radius(scaled) - 1.0) <= 1e-11);
  Mat ones = make(2, 2, {1, 1, 1, 1});
  CHECK(std::abs(spectral_radius(ones) - 2.0) <= 1e-11);
}

TEST_CASE("spectral radius rejects defective reducible input") {
  // Jordan block at 1: power iteration ratios close like 1/k, never to 1e-13
  Mat jordan = make(2, 2, {1.0, 0.0, 1.0, 1.0});
  CHECK_THROWS_AS(spectral_radius(jordan), std::runtime_error);
}

TEST_CASE("perron eigenvectors of a stochastic matrix") {
  Mat v = make(2, 2, {0.3, 0.7, 0.5, 0.5});
  std::vector<double> left = left_pf_eigenvector(v);
  REQUIRE(left.size() == 2);
  CHECK(left[0] == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK(left[1] == doctest::Approx(7.0 / 12.0).epsilon(1e-12));
  CHECK(left[0] + left[1] == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> right = right_pf_eigenvector(v);
  CHECK(right[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(right[1] == doctest::Approx(1.0).epsilon(1e-12));

  // radius != 1 violates the contract
  Mat two = make(2, 2, {1, 1, 1, 1});
  CHECK_THROWS_AS(left_pf_eigenvector(two), std::runtime_error);
}

TEST_CASE("determinant by LU") {
  CHECK(determinant(make(2, 2, {1, 2, 3, 4})) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::abs(determinant(make(2, 2, {1, 2, 2, 4}))) <= 1e-12);
  Mat m3 = make(3, 3, {2, 0, 1, 1, 3, 2, 1, 1, 1});
  // det = 2(3-2) - 0 + 1(1-3) = 0
  CHECK(std::abs(determinant(m3)) <= 1e-12);
  Mat m3b = make(3, 3, {2, 0, 1, 1, 3, 2, 1, 1, 4});
  // det = 2(12-2) + 1(1-3) = 18
  CHECK(determinant(m3b) == doctest::Approx(18.0).epsilon(1e-12));
}

TEST_CASE("adjugate matches the cofactor identities") {
  Mat one = adjugate(make(1, 1, {7.0}));
  CHECK(one(0, 0) == 1.0);  // det of the empty minor

  Mat a = make(2, 2, {1, 2, 3, 4});
  Mat adj = adjugate(a);
  CHECK(adj(0, 0) == doctest::Approx(4.0));
  CHECK(adj(0, 1) == doctest::Approx(-2.0));
  CHECK(adj(1, 0) == doctest::Approx(-3.0));
  CHECK(adj(1, 1) == doctest::Approx(1.0));

  // A adj(A) = det(A) I, including for a 3x3
  Mat b = make(3, 3, {2, 0, 1, 1, 3, 2, 1, 1, 4});
  Mat prod = b * adjugate(b);
  double det = determinant(b);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(prod(i, j) == doctest::Approx(i == j ? det : 0.0).epsilon(1e-12));

  // the singular case stays well-defined: adj(I - V) for stochastic V
  Mat v = make(2, 2, {0.3, 0.7, 0.5, 0.5});
  Mat iv = Mat::identity(2) - v;
  Mat adj_iv = adjugate(iv);
  CHECK(adj_iv(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(adj_iv(0, 1) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(adj_iv(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(adj_iv(1, 1) == doctest::Approx(0.7).epsilon(1e-14));
}
