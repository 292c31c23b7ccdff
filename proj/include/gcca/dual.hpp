#pragma once

#include "gcca/cca.hpp"
#include "gcca/graph.hpp"
#include "gcca/kernel.hpp"
#include "gcca/types.hpp"

namespace gcca {

/// Dual-space model: u = X a, v = Y b for the centered training views, with
/// the Tikhonov-regularized constraints A^T ((X^T X)^2 + eps X^T X) A = I and
/// the Y counterpart. eigvals holds the squared coupling eigenvalues in
/// descending order.
struct DualModel {
  Mat a;  // N x d
  Mat b;  // N x d
  double gamma = 0.0;
  double epsilon = 0.0;
  Vec eigvals;
  Vec x_mean;
  Vec y_mean;
  Mat train_x;  // centered training views, kept to realize u = X a lazily
  Mat train_y;

  Index n() const { return a.rows(); }
  Index d() const { return a.cols(); }
};

/// Builds the linear Gram matrices of the centered views once and serves any
/// (gamma, epsilon) cell.
class GdccaSolver {
 public:
  GdccaSolver(const PairedViews& views, const SourceGraph& graph);

  DualModel fit(double gamma, double epsilon, Index d) const;

  /// Scale-aware ridge default 1e-3 Tr(X^T X) / N for this dataset.
  double default_epsilon() const { return default_epsilon_; }

 private:
  GkccaSolver core_;
  Mat train_x_, train_y_;
  Vec x_mean_, y_mean_;
  double default_epsilon_ = 0.0;
};

DualModel fit_gdcca(const PairedViews& views, const SourceGraph& graph, double gamma,
                    double epsilon, Index d);

/// Tr(A^T X^T X Y^T Y B) - gamma * Tr(A^T X^T X L Y^T Y B) for any (A, B)
/// carried by the model.
double gdcca_objective(const DualModel& model, const PairedViews& views, const SourceGraph& graph);

/// Projects new raw data through u = X a without materializing U.
Mat dual_project_x(const DualModel& model, const Mat& x_new);
Mat dual_project_y(const DualModel& model, const Mat& y_new);

}  // namespace gcca
