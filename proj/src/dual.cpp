#include "gcca/dual.hpp"

#include <string>

namespace gcca {

GdccaSolver::GdccaSolver(const PairedViews& views, const SourceGraph& graph)
    : core_(views.x.transpose() * views.x, views.y.transpose() * views.y, graph),
      train_x_(views.x),
      train_y_(views.y),
      x_mean_(views.x_mean),
      y_mean_(views.y_mean) {
  default_epsilon_ = 1e-3 * train_x_.squaredNorm() / static_cast<double>(views.n);
}

DualModel GdccaSolver::fit(double gamma, double epsilon, Index d) const {
  const DualPair pair = core_.fit(gamma, epsilon, d);
  DualModel model;
  model.a = pair.a;
  model.b = pair.b;
  model.gamma = gamma;
  model.epsilon = epsilon;
  model.eigvals = pair.singulars.array().square();
  model.x_mean = x_mean_;
  model.y_mean = y_mean_;
  model.train_x = train_x_;
  model.train_y = train_y_;
  return model;
}

DualModel fit_gdcca(const PairedViews& views, const SourceGraph& graph, double gamma,
                    double epsilon, Index d) {
  return GdccaSolver(views, graph).fit(gamma, epsilon, d);
}

double gdcca_objective(const DualModel& model, const PairedViews& views, const SourceGraph& graph) {
  if (model.n() != views.n)
    throw DimensionMismatchError("gdcca_objective: model is over " + std::to_string(model.n()) +
                                 " samples, views carry " + std::to_string(views.n));
  if (graph.n != views.n)
    throw GraphSizeMismatchError("gdcca_objective: graph has " + std::to_string(graph.n) +
                                 " nodes for " + std::to_string(views.n) + " samples");
  // K_x A and K_y B assembled as X^T (X A) to stay linear in the view sizes.
  const Mat kxa = views.x.transpose() * (views.x * model.a);
  const Mat kyb = views.y.transpose() * (views.y * model.b);
  const double fidelity = (kxa.transpose() * kyb).trace();
  if (model.gamma == 0.0) return fidelity;
  return fidelity - model.gamma * (kxa.transpose() * graph.laplacian * kyb).trace();
}

namespace {

Mat dual_project(const Mat& dual, const Mat& train, const Vec& mean, const Mat& data,
                 const char* who) {
  if (data.rows() != train.rows())
    throw DimensionMismatchError(std::string(who) + ": data has " + std::to_string(data.rows()) +
                                 " rows, model expects " + std::to_string(train.rows()));
  return dual.transpose() * (train.transpose() * (data.colwise() - mean));
}

}  // namespace

Mat dual_project_x(const DualModel& model, const Mat& x_new) {
  return dual_project(model.a, model.train_x, model.x_mean, x_new, "dual_project_x");
}

Mat dual_project_y(const DualModel& model, const Mat& y_new) {
  return dual_project(model.b, model.train_y, model.y_mean, y_new, "dual_project_y");
}

}  // namespace gcca
