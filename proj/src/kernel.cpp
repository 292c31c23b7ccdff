#include "gcca/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace gcca {

KernelSpec parse_kernel(const std::string& kind, const std::string& bandwidth) {
  if (kind == "linear") return KernelSpec::linear();
  if (kind != "gaussian") throw Error("unknown kernel kind '" + kind + "'");
  if (bandwidth == "median" || bandwidth == "median-heuristic" || bandwidth.empty())
    return KernelSpec::gaussian_median();
  char* end = nullptr;
  const double sigma = std::strtod(bandwidth.c_str(), &end);
  if (end != bandwidth.c_str() + bandwidth.size())
    throw Error("bad kernel bandwidth '" + bandwidth + "'");
  return KernelSpec::gaussian(sigma);
}

std::string to_string(const KernelSpec& spec) {
  if (spec.kind == KernelSpec::Kind::Linear) return "linear";
  if (spec.median_heuristic) return "gaussian median";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "gaussian %.17g", spec.bandwidth);
  return buf;
}

double median_bandwidth(const Mat& data) {
  const Index n = data.cols();
  if (n < 2) throw DegenerateDataError("median_bandwidth: need at least two points");
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) dist.push_back((data.col(i) - data.col(j)).norm());
  const std::size_t mid = (dist.size() - 1) / 2;  // lower median for even counts
  std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
  const double median = dist[mid];
  if (median <= 0.0)
    throw DegenerateDataError("median_bandwidth: median pairwise distance is zero");
  return median;
}

KernelSpec resolve_bandwidth(const KernelSpec& spec, const Mat& data) {
  KernelSpec out = spec;
  if (spec.kind == KernelSpec::Kind::Gaussian && spec.median_heuristic) {
    out.bandwidth = median_bandwidth(data);
    out.median_heuristic = false;
  }
  return out;
}

namespace {

void require_resolved(const KernelSpec& spec, const char* who) {
  if (spec.kind != KernelSpec::Kind::Gaussian) return;
  if (spec.median_heuristic)
    throw BandwidthNonPositiveError(std::string(who) + ": bandwidth not resolved yet");
  if (!(spec.bandwidth > 0.0))
    throw BandwidthNonPositiveError(std::string(who) + ": bandwidth must be positive, got " +
                                    std::to_string(spec.bandwidth));
}

}  // namespace

Mat gram(const Mat& data, const KernelSpec& spec) {
  require_resolved(spec, "gram");
  if (spec.kind == KernelSpec::Kind::Linear) return data.transpose() * data;

  const Index n = data.cols();
  const Vec sq = data.colwise().squaredNorm();
  const double scale = -0.5 / (spec.bandwidth * spec.bandwidth);
  Mat k(n, n);
  for (Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d2 = std::max(sq(i) + sq(j) - 2.0 * data.col(i).dot(data.col(j)), 0.0);
      k(i, j) = k(j, i) = std::exp(scale * d2);
    }
  }
  return k;
}

Mat gram_cross(const Mat& a, const Mat& b, const KernelSpec& spec) {
  require_resolved(spec, "gram_cross");
  if (a.rows() != b.rows())
    throw DimensionMismatchError("gram_cross: feature dimensions differ (" +
                                 std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) +
                                 ")");
  if (spec.kind == KernelSpec::Kind::Linear) return a.transpose() * b;

  const double scale = -0.5 / (spec.bandwidth * spec.bandwidth);
  const Vec sqa = a.colwise().squaredNorm();
  const Vec sqb = b.colwise().squaredNorm();
  Mat k(a.cols(), b.cols());
  for (Index t = 0; t < a.cols(); ++t)
    for (Index i = 0; i < b.cols(); ++i) {
      const double d2 = std::max(sqa(t) + sqb(i) - 2.0 * a.col(t).dot(b.col(i)), 0.0);
      k(t, i) = std::exp(scale * d2);
    }
  return k;
}

Mat center_kernel(const Mat& kbar) {
  KernelCenterStats stats;
  return center_kernel(kbar, stats);
}

Mat center_kernel(const Mat& kbar, KernelCenterStats& stats_out) {
  const Mat k = symmetrized(kbar, "center_kernel");
  stats_out.col_means = k.colwise().mean();
  stats_out.grand_mean = stats_out.col_means.mean();
  Mat centered = k;
  centered.rowwise() -= stats_out.col_means.transpose();
  centered.colwise() -= stats_out.col_means;
  centered.array() += stats_out.grand_mean;
  return 0.5 * (centered + centered.transpose());
}

Mat center_cross(const Mat& cross, const KernelCenterStats& stats) {
  if (cross.cols() != stats.col_means.size())
    throw DimensionMismatchError("center_cross: block has " + std::to_string(cross.cols()) +
                                 " columns, stats expect " +
                                 std::to_string(stats.col_means.size()));
  Mat centered = cross;
  const Vec row_means = cross.rowwise().mean();
  centered.colwise() -= row_means;
  centered.rowwise() -= stats.col_means.transpose();
  centered.array() += stats.grand_mean;
  return centered;
}

Mat combine_kernels(const MultiKernelSpec& spec, const Mat& data) {
  bool any_positive = false;
  for (const auto& c : spec.components) {
    if (c.weight < 0.0) throw Error("combine_kernels: negative weight");
    if (c.weight > 0.0) any_positive = true;
  }
  if (spec.components.empty() || !any_positive)
    throw EmptyDictionaryError("combine_kernels: no positive-weight components");

  const Index n = data.cols();
  Mat out = Mat::Zero(n, n);
  for (const auto& c : spec.components) {
    if (c.weight == 0.0) continue;
    out += c.weight * gram(data, resolve_bandwidth(c.kernel, data));
  }
  return out;
}

GkccaSolver::GkccaSolver(const Mat& kx_centered, const Mat& ky_centered, const SourceGraph& graph,
                         double jitter) {
  Mat kx = symmetrized(kx_centered, "gkcca(K_x)");
  Mat ky = symmetrized(ky_centered, "gkcca(K_y)");
  if (kx.rows() != ky.rows())
    throw DimensionMismatchError("gkcca: kernel sizes differ (" + std::to_string(kx.rows()) +
                                 " vs " + std::to_string(ky.rows()) + ")");
  if (graph.n != kx.rows())
    throw GraphSizeMismatchError("gkcca: graph has " + std::to_string(graph.n) + " nodes for " +
                                 std::to_string(kx.rows()) + " samples");
  if (jitter != 0.0) {
    kx.diagonal().array() += jitter;
    ky.diagonal().array() += jitter;
  }
  ex_ = sym_eig(kx);
  ey_ = sym_eig(ky);
  rank_x_ = numerical_rank(ex_.eigenvalues);
  rank_y_ = numerical_rank(ey_.eigenvalues);
  coupling_ = ex_.eigenvectors.transpose() * ey_.eigenvectors;
  coupling_graph_ = ex_.eigenvectors.transpose() * graph.laplacian * ey_.eigenvectors;
}

DualPair GkccaSolver::fit(double gamma, double epsilon, Index d) const {
  if (!(epsilon > 0.0))
    throw EpsilonNonPositiveError("gkcca: epsilon must be positive, got " +
                                  std::to_string(epsilon));
  if (d < 1 || d > n())
    throw RankTooLargeError("gkcca: d = " + std::to_string(d) + " not in [1, " +
                            std::to_string(n()) + "]");
  if (d > std::min(rank_x_, rank_y_))
    throw SingularKernelError("gkcca: kernel numerical ranks (" + std::to_string(rank_x_) + ", " +
                              std::to_string(rank_y_) + ") cannot support d = " +
                              std::to_string(d));

  // In the shared eigenbasis the coupling matrix is
  //   C = Ux diag(cx) (coupling - gamma * coupling_graph) diag(cy) Uy^T
  // with c = sqrt(l) / sqrt(l + eps), and the dual matrices come back through
  // g = 1 / sqrt(l (l + eps)) on the numerically nonzero eigenspace.
  const Index m = n();
  Vec cx(m), cy(m), gx(m), gy(m);
  const double floor_x = kRankTol * std::max(ex_.eigenvalues(0), 0.0);
  const double floor_y = kRankTol * std::max(ey_.eigenvalues(0), 0.0);
  for (Index i = 0; i < m; ++i) {
    const double lx = std::max(ex_.eigenvalues(i), 0.0);
    const double ly = std::max(ey_.eigenvalues(i), 0.0);
    cx(i) = std::sqrt(lx) / std::sqrt(lx + epsilon);
    cy(i) = std::sqrt(ly) / std::sqrt(ly + epsilon);
    gx(i) = ex_.eigenvalues(i) > floor_x ? 1.0 / std::sqrt(lx * (lx + epsilon)) : 0.0;
    gy(i) = ey_.eigenvalues(i) > floor_y ? 1.0 / std::sqrt(ly * (ly + epsilon)) : 0.0;
  }

  Mat compressed = coupling_;
  if (gamma != 0.0) compressed -= gamma * coupling_graph_;
  compressed = cx.asDiagonal() * compressed * cy.asDiagonal();

  const TruncatedSvd svd = top_d_svd(compressed, d);

  DualPair pair;
  pair.a = ex_.eigenvectors * (gx.asDiagonal() * svd.left);
  pair.b = ey_.eigenvectors * (gy.asDiagonal() * svd.right);
  for (Index j = 0; j < d; ++j) {
    if (fix_column_sign(pair.a, j)) pair.b.col(j) *= -1.0;
  }
  pair.singulars = svd.singulars;
  pair.gamma = gamma;
  pair.epsilon = epsilon;
  return pair;
}

KernelModel fit_gkcca(const Mat& kx_centered, const Mat& ky_centered, const SourceGraph& graph,
                      double gamma, double epsilon, Index d, double jitter) {
  const GkccaSolver solver(kx_centered, ky_centered, graph, jitter);
  const DualPair pair = solver.fit(gamma, epsilon, d);
  KernelModel model;
  model.a = pair.a;
  model.b = pair.b;
  model.gamma = gamma;
  model.epsilon = epsilon;
  model.singulars = pair.singulars;
  return model;
}

KernelModel fit_gkcca_views(const Mat& x_raw, const Mat& y_raw, const KernelSpec& kernel_x,
                            const KernelSpec& kernel_y, const SourceGraph& graph, double gamma,
                            double epsilon, Index d, double jitter) {
  if (x_raw.cols() != y_raw.cols())
    throw DimensionMismatchError("fit_gkcca_views: views have " + std::to_string(x_raw.cols()) +
                                 " and " + std::to_string(y_raw.cols()) + " samples");
  const KernelSpec kx_spec = resolve_bandwidth(kernel_x, x_raw);
  const KernelSpec ky_spec = resolve_bandwidth(kernel_y, y_raw);
  KernelCenterStats stats_x, stats_y;
  const Mat kx = center_kernel(gram(x_raw, kx_spec), stats_x);
  const Mat ky = center_kernel(gram(y_raw, ky_spec), stats_y);

  KernelModel model = fit_gkcca(kx, ky, graph, gamma, epsilon, d, jitter);
  model.kernel_x = kx_spec;
  model.kernel_y = ky_spec;
  model.train_x = x_raw;
  model.train_y = y_raw;
  model.stats_x = stats_x;
  model.stats_y = stats_y;
  return model;
}

namespace {

Mat project_kernel(const Mat& dual, const Mat& train, const KernelSpec& spec,
                   const KernelCenterStats& stats, const Mat& data, const char* who) {
  if (train.size() == 0)
    throw ModelStateError(std::string(who) + ": model carries no training data");
  if (data.rows() != train.rows())
    throw DimensionMismatchError(std::string(who) + ": data has " + std::to_string(data.rows()) +
                                 " rows, training data has " + std::to_string(train.rows()));
  const Mat cross = center_cross(gram_cross(data, train, spec), stats);
  return (cross * dual).transpose();
}

}  // namespace

Mat project_kernel_x(const KernelModel& model, const Mat& x_new) {
  return project_kernel(model.a, model.train_x, model.kernel_x, model.stats_x, x_new,
                        "project_kernel_x");
}

Mat project_kernel_y(const KernelModel& model, const Mat& y_new) {
  return project_kernel(model.b, model.train_y, model.kernel_y, model.stats_y, y_new,
                        "project_kernel_y");
}

double default_epsilon(const Mat& gram) {
  if (gram.rows() == 0) return 1e-3;
  return 1e-3 * gram.trace() / static_cast<double>(gram.rows());
}

}  // namespace gcca
