#include <doctest.h>

#include <cstring>

#include "gcca/matkit.hpp"
#include "gcca/prng.hpp"
#include "support/oracles.hpp"

using namespace gcca;
using test::random_matrix;
using test::random_spd;

namespace {

bool bit_identical(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

}  // namespace

TEST_CASE("sym_inv_sqrt identity and diagonal cases") {
  CHECK((sym_inv_sqrt(Mat::Identity(3, 3)) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);

  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const Mat r = sym_inv_sqrt(d);
  CHECK(r(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(r(0, 1)) < 1e-15);
}

TEST_CASE("sym_inv_sqrt inverts a random SPD matrix") {
  Prng rng(42);
  const Mat m = random_spd(8, rng);
  const Mat r = sym_inv_sqrt(m);
  CHECK((r * m * r - Mat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sym_inv_sqrt error paths") {
  Mat asym(2, 2);
  asym << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(sym_inv_sqrt(asym), NotSymmetricError);

  Mat singular = Mat::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(sym_inv_sqrt(singular), SingularMatrixError);
  CHECK_NOTHROW(sym_inv_sqrt(singular, 1e-3));

  Mat indefinite = Mat::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(sym_inv_sqrt(indefinite), SingularMatrixError);
}

TEST_CASE("sym_inv_sqrt property: R M R = I over random sizes") {
  Prng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(49));
    const Mat m = random_spd(n, rng);
    const Mat r = sym_inv_sqrt(m);
    CHECK((r * m * r - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("top_d_svd diagonal and rank-1 cases") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const TruncatedSvd svd = top_d_svd(d, 1);
  CHECK(svd.singulars(0) == doctest::Approx(3.0));
  CHECK(svd.left(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(svd.left(1, 0)) < 1e-14);
  CHECK(svd.right(0, 0) == doctest::Approx(1.0));

  Prng rng(3);
  Vec a = random_matrix(5, 1, rng).col(0).normalized();
  Vec b = random_matrix(4, 1, rng).col(0).normalized();
  const TruncatedSvd rank1 = top_d_svd(a * b.transpose(), 1);
  CHECK(rank1.singulars(0) == doctest::Approx(1.0).epsilon(1e-12));
  const Mat rebuilt = rank1.left * rank1.singulars.asDiagonal() * rank1.right.transpose();
  CHECK((rebuilt - a * b.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("top_d_svd matches the Gram eigendecomposition oracle") {
  Prng rng(11);
  const Mat c = random_matrix(6, 4, rng);
  const TruncatedSvd svd = top_d_svd(c, 4);

  // Oracle: eigenvalues of C^T C are squared singular values, eigenvectors the
  // right singular vectors; left vectors recovered as C v / sigma.
  const SymEigResult gram = sym_eig(c.transpose() * c);
  for (Index i = 0; i < 4; ++i) {
    const double sigma = std::sqrt(std::max(gram.eigenvalues(i), 0.0));
    CHECK(svd.singulars(i) == doctest::Approx(sigma).epsilon(1e-9));
    CHECK(std::abs(std::abs(svd.right.col(i).dot(gram.eigenvectors.col(i))) - 1.0) < 1e-9);
    const Vec left = (c * gram.eigenvectors.col(i)) / sigma;
    CHECK(std::abs(std::abs(svd.left.col(i).dot(left)) - 1.0) < 1e-9);
  }

  // Objective identity: the sum of the top singular values is Tr(L^T C R).
  const double objective = (svd.left.transpose() * c * svd.right).trace();
  CHECK(objective == doctest::Approx(svd.singulars.sum()).epsilon(1e-9));

  CHECK_THROWS_AS(top_d_svd(c, 5), RankTooLargeError);
}

TEST_CASE("top_d_svd factors are orthonormal with descending nonnegative singulars") {
  Prng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Index rows = 2 + static_cast<Index>(rng.below(10));
    const Index cols = 2 + static_cast<Index>(rng.below(10));
    const Index d = 1 + static_cast<Index>(rng.below(std::min(rows, cols)));
    const TruncatedSvd svd = top_d_svd(random_matrix(rows, cols, rng), d);
    CHECK((svd.left.transpose() * svd.left - Mat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((svd.right.transpose() * svd.right - Mat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    for (Index i = 0; i < d; ++i) {
      CHECK(svd.singulars(i) >= 0.0);
      if (i > 0) CHECK(svd.singulars(i) <= svd.singulars(i - 1) + 1e-12);
    }
  }
}

TEST_CASE("generalized_eig_spd reduces to standard eig for B = I") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 1.0;
  const SymEigResult eig = generalized_eig_spd(a, Mat::Identity(2, 2));
  CHECK(eig.eigenvalues(0) == doctest::Approx(2.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(eig.eigenvectors(0, 0) == doctest::Approx(1.0));
  CHECK(eig.eigenvectors(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("generalized_eig_spd gives unit eigenvalues for A = B") {
  Prng rng(13);
  const Mat m = random_spd(5, rng);
  const SymEigResult eig = generalized_eig_spd(m, m);
  for (Index i = 0; i < 5; ++i) CHECK(eig.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("generalized_eig_spd residuals and B-orthonormality") {
  Prng rng(17);
  const Mat a = random_spd(6, rng);
  const Mat b = random_spd(6, rng);
  const SymEigResult eig = generalized_eig_spd(a, b);
  for (Index i = 0; i < 6; ++i) {
    const Vec w = eig.eigenvectors.col(i);
    CHECK((a * w - eig.eigenvalues(i) * (b * w)).cwiseAbs().maxCoeff() < 1e-9);
  }
  const Mat gram = eig.eigenvectors.transpose() * b * eig.eigenvectors;
  CHECK((gram - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-9);

  CHECK_THROWS_AS(generalized_eig_spd(a, Mat::Identity(4, 4)), DimensionMismatchError);
  Mat asym = a;
  asym(0, 1) += 1.0;
  CHECK_THROWS_AS(generalized_eig_spd(asym, b), NotSymmetricError);
  CHECK_THROWS_AS(generalized_eig_spd(a, Mat::Zero(6, 6)), SingularMatrixError);
}

TEST_CASE("generalized_eig_spd eigenvalues are congruence invariant") {
  Prng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 3 + static_cast<Index>(rng.below(5));
    const Mat a0 = random_matrix(n, n, rng);
    const Mat a = 0.5 * (a0 + a0.transpose());
    const Mat b = random_spd(n, rng);
    Mat t = random_matrix(n, n, rng);
    t.diagonal().array() += 3.0;  // keep T comfortably invertible

    const SymEigResult plain = generalized_eig_spd(a, b);
    const Mat at0 = t.transpose() * a * t;
    const Mat bt0 = t.transpose() * b * t;
    const Mat at = 0.5 * (at0 + at0.transpose());
    const Mat bt = 0.5 * (bt0 + bt0.transpose());
    const SymEigResult congruent = generalized_eig_spd(at, bt);

    const double scale = std::max(1.0, plain.eigenvalues.cwiseAbs().maxCoeff());
    CHECK((plain.eigenvalues - congruent.eigenvalues).cwiseAbs().maxCoeff() / scale < 1e-8);
  }
}

TEST_CASE("decompositions are deterministic within a build") {
  Prng rng(23);
  const Mat m = random_spd(12, rng);
  CHECK(bit_identical(sym_inv_sqrt(m), sym_inv_sqrt(m)));

  const Mat c = random_matrix(9, 6, rng);
  const TruncatedSvd s1 = top_d_svd(c, 4);
  const TruncatedSvd s2 = top_d_svd(c, 4);
  CHECK(bit_identical(s1.left, s2.left));
  CHECK(bit_identical(s1.right, s2.right));
  CHECK(std::memcmp(s1.singulars.data(), s2.singulars.data(), sizeof(double) * 4) == 0);

  const Mat a = random_spd(7, rng);
  const Mat b = random_spd(7, rng);
  CHECK(bit_identical(generalized_eig_spd(a, b).eigenvectors,
                      generalized_eig_spd(a, b).eigenvectors));
}
