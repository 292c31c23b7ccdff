#pragma once

#include "gcca/errors.hpp"
#include "gcca/types.hpp"

namespace gcca {

// Relative eigenvalue threshold below which a matrix is treated as rank
// deficient.
inline constexpr double kRankTol = 1e-12;

// Relative asymmetry tolerated in inputs declared symmetric.
inline constexpr double kSymTol = 1e-10;

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending,
/// eigenvectors orthonormal in the columns.
struct SymEigResult {
  Vec eigenvalues;
  Mat eigenvectors;
};

/// Rank-d factorization C ~ left * diag(singulars) * right^T with orthonormal
/// columns and singular values sorted descending.
struct TruncatedSvd {
  Mat left;
  Vec singulars;
  Mat right;
};

/// Max relative asymmetry |M - M^T| / max(1, |M|_max).
double asymmetry(const Mat& m);

/// (M + M^T) / 2 after checking asymmetry stays within kSymTol.
/// Throws NotSymmetricError otherwise.
Mat symmetrized(const Mat& m, const char* who);

// Flips the column sign so the largest-magnitude entry is positive; magnitude
// ties go to the lowest index. Returns true if the column was flipped.
bool fix_column_sign(Eigen::Ref<Mat> column_holder, Index col);

/// Symmetric eigendecomposition, descending order, columns sign-fixed.
SymEigResult sym_eig(const Mat& m);

/// Inverse square root R of a symmetric positive-definite M (+ jitter * I),
/// i.e. R * M * R = I with R symmetric. Throws SingularMatrixError when the
/// smallest eigenvalue after jitter falls below the relative rank tolerance.
Mat sym_inv_sqrt(const Mat& m, double jitter = 0.0);

/// Principal square root of a symmetric positive-semidefinite matrix.
/// Eigenvalues below the rank tolerance are treated as zero.
Mat sym_sqrt_psd(const Mat& m);

/// Pseudo-inverse square root: inverts the square root on the numerically
/// nonzero eigenspace (relative tolerance kRankTol) and annihilates the rest.
Mat sym_pinv_sqrt(const Mat& m);

/// Top-d singular triplets of a rectangular matrix. Signs are anchored on the
/// left vectors (largest-magnitude entry positive) and the paired right vector
/// is flipped along with its left partner so the factorization is preserved.
TruncatedSvd top_d_svd(const Mat& c, Index d);

/// Solves A w = lambda B w for symmetric A and SPD B; eigenvalues descending,
/// eigenvectors B-orthonormal (W^T B W = I) and sign-fixed.
SymEigResult generalized_eig_spd(const Mat& a, const Mat& b);

/// Numerical rank: count of eigenvalues above kRankTol * max eigenvalue.
Index numerical_rank(const Vec& eigenvalues_descending);

}  // namespace gcca
