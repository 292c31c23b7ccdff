#include "gcca/matkit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace gcca {

double asymmetry(const Mat& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Mat symmetrized(const Mat& m, const char* who) {
  if (m.rows() != m.cols())
    throw NotSymmetricError(std::string(who) + ": matrix is not square (" +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
  const double a = asymmetry(m);
  if (a > kSymTol)
    throw NotSymmetricError(std::string(who) + ": relative asymmetry " + std::to_string(a) +
                            " exceeds tolerance");
  return 0.5 * (m + m.transpose());
}

bool fix_column_sign(Eigen::Ref<Mat> holder, Index col) {
  Index best = 0;
  double best_mag = -1.0;
  for (Index i = 0; i < holder.rows(); ++i) {
    const double mag = std::abs(holder(i, col));
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  if (holder(best, col) < 0.0) {
    holder.col(col) *= -1.0;
    return true;
  }
  return false;
}

SymEigResult sym_eig(const Mat& m) {
  const Mat s = symmetrized(m, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Mat> solver(s);
  if (solver.info() != Eigen::Success)
    throw SingularMatrixError("sym_eig: eigendecomposition failed to converge");

  const Index n = s.rows();
  SymEigResult out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Index j = 0; j < n; ++j) fix_column_sign(out.eigenvectors, j);
  return out;
}

namespace {

// Spectral map f applied to a symmetric matrix through one eigendecomposition.
template <typename F>
Mat spectral_apply(const SymEigResult& eig, F f) {
  Vec mapped(eig.eigenvalues.size());
  for (Index i = 0; i < mapped.size(); ++i) mapped(i) = f(eig.eigenvalues(i));
  Mat out = eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

Mat sym_inv_sqrt(const Mat& m, double jitter) {
  Mat s = symmetrized(m, "sym_inv_sqrt");
  if (jitter != 0.0) s.diagonal().array() += jitter;
  const SymEigResult eig = sym_eig(s);
  const double lmax = eig.eigenvalues(0);
  const double floor = kRankTol * std::max(lmax, 0.0);
  const double lmin = eig.eigenvalues(eig.eigenvalues.size() - 1);
  if (lmax <= 0.0 || lmin <= floor)
    throw SingularMatrixError("sym_inv_sqrt: matrix is singular or indefinite (min eigenvalue " +
                              std::to_string(lmin) + ")");
  return spectral_apply(eig, [](double l) { return 1.0 / std::sqrt(l); });
}

Mat sym_sqrt_psd(const Mat& m) {
  const SymEigResult eig = sym_eig(m);
  const double floor = kRankTol * std::max(eig.eigenvalues(0), 0.0);
  return spectral_apply(eig, [floor](double l) { return l > floor ? std::sqrt(l) : 0.0; });
}

Mat sym_pinv_sqrt(const Mat& m) {
  const SymEigResult eig = sym_eig(m);
  const double floor = kRankTol * std::max(eig.eigenvalues(0), 0.0);
  return spectral_apply(eig, [floor](double l) { return l > floor ? 1.0 / std::sqrt(l) : 0.0; });
}

TruncatedSvd top_d_svd(const Mat& c, Index d) {
  const Index minmn = std::min(c.rows(), c.cols());
  if (d < 0 || d > minmn)
    throw RankTooLargeError("top_d_svd: requested rank " + std::to_string(d) +
                            " exceeds min dimension " + std::to_string(minmn));

  Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.left = svd.matrixU().leftCols(d);
  out.singulars = svd.singularValues().head(d);
  out.right = svd.matrixV().leftCols(d);
  for (Index j = 0; j < d; ++j) {
    if (fix_column_sign(out.left, j)) out.right.col(j) *= -1.0;
  }
  return out;
}

SymEigResult generalized_eig_spd(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatchError("generalized_eig_spd: A is " + std::to_string(a.rows()) + "x" +
                                 std::to_string(a.cols()) + ", B is " + std::to_string(b.rows()) +
                                 "x" + std::to_string(b.cols()));
  const Mat sa = symmetrized(a, "generalized_eig_spd(A)");
  const Mat rb = sym_inv_sqrt(b);  // throws SingularMatrixError when B is not SPD

  const SymEigResult inner = sym_eig(rb * sa * rb);
  SymEigResult out;
  out.eigenvalues = inner.eigenvalues;
  out.eigenvectors = rb * inner.eigenvectors;
  for (Index j = 0; j < out.eigenvectors.cols(); ++j) fix_column_sign(out.eigenvectors, j);
  return out;
}

Index numerical_rank(const Vec& eigenvalues_descending) {
  if (eigenvalues_descending.size() == 0) return 0;
  const double floor = kRankTol * std::max(eigenvalues_descending(0), 0.0);
  Index rank = 0;
  for (Index i = 0; i < eigenvalues_descending.size(); ++i)
    if (eigenvalues_descending(i) > floor) ++rank;
  return rank;
}

}  // namespace gcca
