#pragma once

#include "gcca/graph.hpp"
#include "gcca/matkit.hpp"
#include "gcca/types.hpp"

namespace gcca {

/// Two views of the same N entities, columns are samples, rows are features.
/// Stored centered, with the removed row means kept for projection time.
struct PairedViews {
  Mat x;  // Dx x N
  Mat y;  // Dy x N
  Vec x_mean;
  Vec y_mean;
  Index n = 0;

  Index dx() const { return x.rows(); }
  Index dy() const { return y.rows(); }
};

/// Removes the per-row means of both views. Throws DimensionMismatchError when
/// the sample counts differ.
PairedViews center(const Mat& x_raw, const Mat& y_raw);

/// Sample covariances of centered views: sxx = XX^T/N, syy = YY^T/N,
/// sxy = XY^T/N.
struct CovarianceSet {
  Mat sxx;
  Mat syy;
  Mat sxy;
};

CovarianceSet covariances(const PairedViews& views);

/// Canonical matrices for the primal solvers. Columns of u and v are ordered
/// by descending singular value and satisfy u^T sxx u = I, v^T syy v = I.
struct GccaModel {
  Mat u;  // Dx x d
  Mat v;  // Dy x d
  double gamma = 0.0;
  Index d = 0;
  Vec singulars;
  Vec x_mean;
  Vec y_mean;
};

/// Precomputes everything that does not depend on gamma so a hyperparameter
/// sweep pays for the covariance factorizations once.
class GccaSolver {
 public:
  GccaSolver(const PairedViews& views, const SourceGraph& graph, double jitter = 0.0);

  // Plain CCA: skips the graph term entirely.
  GccaSolver(const PairedViews& views, double jitter = 0.0);

  GccaModel fit(double gamma, Index d) const;

  Index max_rank() const { return std::min(sxy_.rows(), sxy_.cols()); }

 private:
  Mat inv_sqrt_x_;   // sxx^{-1/2}
  Mat inv_sqrt_y_;   // syy^{-1/2}
  Mat sxy_;          // cross covariance
  Mat graph_term_;   // X L Y^T, empty when no graph was given
  Vec x_mean_, y_mean_;
};

/// Standard CCA. Singular values are the canonical correlations.
GccaModel fit_cca(const PairedViews& views, Index d, double jitter = 0.0);

/// Graph-regularized CCA: whitened SVD of sxy - gamma * X L Y^T.
GccaModel fit_gcca(const PairedViews& views, const SourceGraph& graph, double gamma, Index d,
                   double jitter = 0.0);

/// Tr(U^T sxy V) - gamma * Tr(U^T X L Y^T V), evaluated for any (U, V) pair
/// carried by the model, feasible or not.
double gcca_objective(const GccaModel& model, const PairedViews& views, const SourceGraph& graph);

/// Graph-term value Tr(U^T X L Y^T V) on its own.
double graph_term_value(const GccaModel& model, const PairedViews& views,
                        const SourceGraph& graph);

/// Subtracts the stored training mean and applies U^T (resp. V^T).
Mat project_x(const GccaModel& model, const Mat& x_new);
Mat project_y(const GccaModel& model, const Mat& y_new);

}  // namespace gcca
