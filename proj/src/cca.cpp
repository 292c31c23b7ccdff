#include "gcca/cca.hpp"

#include <string>

namespace gcca {

PairedViews center(const Mat& x_raw, const Mat& y_raw) {
  if (x_raw.cols() != y_raw.cols())
    throw DimensionMismatchError("center: views have " + std::to_string(x_raw.cols()) + " and " +
                                 std::to_string(y_raw.cols()) + " samples");
  PairedViews views;
  views.n = x_raw.cols();
  views.x_mean = x_raw.rowwise().mean();
  views.y_mean = y_raw.rowwise().mean();
  views.x = x_raw.colwise() - views.x_mean;
  views.y = y_raw.colwise() - views.y_mean;
  return views;
}

CovarianceSet covariances(const PairedViews& views) {
  const double inv_n = 1.0 / static_cast<double>(views.n);
  CovarianceSet cov;
  cov.sxx = inv_n * (views.x * views.x.transpose());
  cov.syy = inv_n * (views.y * views.y.transpose());
  cov.sxy = inv_n * (views.x * views.y.transpose());
  cov.sxx = (0.5 * (cov.sxx + cov.sxx.transpose())).eval();
  cov.syy = (0.5 * (cov.syy + cov.syy.transpose())).eval();
  return cov;
}

GccaSolver::GccaSolver(const PairedViews& views, const SourceGraph& graph, double jitter)
    : GccaSolver(views, jitter) {
  if (graph.n != views.n)
    throw GraphSizeMismatchError("graph has " + std::to_string(graph.n) + " nodes for " +
                                 std::to_string(views.n) + " samples");
  graph_term_ = views.x * graph.laplacian * views.y.transpose();
}

GccaSolver::GccaSolver(const PairedViews& views, double jitter)
    : x_mean_(views.x_mean), y_mean_(views.y_mean) {
  const CovarianceSet cov = covariances(views);
  inv_sqrt_x_ = sym_inv_sqrt(cov.sxx, jitter);
  inv_sqrt_y_ = sym_inv_sqrt(cov.syy, jitter);
  sxy_ = cov.sxy;
}

GccaModel GccaSolver::fit(double gamma, Index d) const {
  if (d < 1 || d > max_rank())
    throw RankTooLargeError("fit: d = " + std::to_string(d) + " not in [1, " +
                            std::to_string(max_rank()) + "]");
  Mat core = sxy_;
  if (graph_term_.size() > 0 && gamma != 0.0) core -= gamma * graph_term_;
  const TruncatedSvd svd = top_d_svd(inv_sqrt_x_ * core * inv_sqrt_y_, d);

  GccaModel model;
  model.u = inv_sqrt_x_ * svd.left;
  model.v = inv_sqrt_y_ * svd.right;
  // Sign convention on the returned pair: anchor on the canonical x-vector,
  // flip its partner in tandem so the objective is preserved.
  for (Index j = 0; j < d; ++j) {
    if (fix_column_sign(model.u, j)) model.v.col(j) *= -1.0;
  }
  model.gamma = gamma;
  model.d = d;
  model.singulars = svd.singulars;
  model.x_mean = x_mean_;
  model.y_mean = y_mean_;
  return model;
}

GccaModel fit_cca(const PairedViews& views, Index d, double jitter) {
  return GccaSolver(views, jitter).fit(0.0, d);
}

GccaModel fit_gcca(const PairedViews& views, const SourceGraph& graph, double gamma, Index d,
                   double jitter) {
  return GccaSolver(views, graph, jitter).fit(gamma, d);
}

namespace {

void check_model_dims(const GccaModel& model, const PairedViews& views, const char* who) {
  if (model.u.rows() != views.dx() || model.v.rows() != views.dy() ||
      model.u.cols() != model.v.cols())
    throw DimensionMismatchError(std::string(who) + ": model is " + std::to_string(model.u.rows()) +
                                 "/" + std::to_string(model.v.rows()) + "-dimensional, views are " +
                                 std::to_string(views.dx()) + "/" + std::to_string(views.dy()));
}

}  // namespace

double gcca_objective(const GccaModel& model, const PairedViews& views, const SourceGraph& graph) {
  check_model_dims(model, views, "gcca_objective");
  const double inv_n = 1.0 / static_cast<double>(views.n);
  const Mat ux = model.u.transpose() * views.x;  // d x N
  const Mat vy = model.v.transpose() * views.y;
  const double fidelity = inv_n * (ux * vy.transpose()).trace();
  if (model.gamma == 0.0) return fidelity;
  return fidelity - model.gamma * (ux * graph.laplacian * vy.transpose()).trace();
}

double graph_term_value(const GccaModel& model, const PairedViews& views,
                        const SourceGraph& graph) {
  check_model_dims(model, views, "graph_term_value");
  if (graph.n != views.n)
    throw GraphSizeMismatchError("graph has " + std::to_string(graph.n) + " nodes for " +
                                 std::to_string(views.n) + " samples");
  const Mat ux = model.u.transpose() * views.x;
  const Mat vy = model.v.transpose() * views.y;
  return (ux * graph.laplacian * vy.transpose()).trace();
}

namespace {

Mat project(const Mat& basis, const Vec& mean, const Mat& data, const char* who) {
  if (data.rows() != basis.rows())
    throw DimensionMismatchError(std::string(who) + ": data has " + std::to_string(data.rows()) +
                                 " rows, model expects " + std::to_string(basis.rows()));
  return basis.transpose() * (data.colwise() - mean);
}

}  // namespace

Mat project_x(const GccaModel& model, const Mat& x_new) {
  return project(model.u, model.x_mean, x_new, "project_x");
}

Mat project_y(const GccaModel& model, const Mat& y_new) {
  return project(model.v, model.y_mean, y_new, "project_y");
}

}  // namespace gcca
