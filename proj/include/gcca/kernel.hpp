#pragma once

#include <string>
#include <vector>

#include "gcca/graph.hpp"
#include "gcca/matkit.hpp"
#include "gcca/types.hpp"

namespace gcca {

struct KernelSpec {
  enum class Kind { Linear, Gaussian };

  Kind kind = Kind::Linear;
  double bandwidth = 0.0;         // Gaussian sigma, meaningful once resolved
  bool median_heuristic = false;  // resolve sigma from the data at hand

  static KernelSpec linear() { return {Kind::Linear, 0.0, false}; }
  static KernelSpec gaussian(double sigma) { return {Kind::Gaussian, sigma, false}; }
  static KernelSpec gaussian_median() { return {Kind::Gaussian, 0.0, true}; }
};

KernelSpec parse_kernel(const std::string& kind, const std::string& bandwidth);
std::string to_string(const KernelSpec& spec);

/// Lower median of the N(N-1)/2 pairwise Euclidean distances between columns.
/// Throws DegenerateDataError when there are fewer than two points or the
/// median distance is zero.
double median_bandwidth(const Mat& data);

/// Replaces the median-heuristic tag with the concrete bandwidth for `data`.
KernelSpec resolve_bandwidth(const KernelSpec& spec, const Mat& data);

/// Uncentered Gram matrix over the columns of data. The Gaussian kernel is
/// exp(-|x - x'|^2 / (2 sigma^2)) with unit diagonal; the linear kernel is
/// exactly data^T data. Requires a resolved bandwidth.
Mat gram(const Mat& data, const KernelSpec& spec);

/// Cross-kernel block: entry (t, i) = kappa(a.col(t), b.col(i)); result is
/// a.cols() x b.cols().
Mat gram_cross(const Mat& a, const Mat& b, const KernelSpec& spec);

/// Row/column statistics of an uncentered training Gram, kept so new points
/// can be centered consistently with the training feature space.
struct KernelCenterStats {
  Vec col_means;
  double grand_mean = 0.0;
};

/// Doubly centered kernel: K(i,j) = Kbar(i,j) - rowmean_i - colmean_j + grand.
Mat center_kernel(const Mat& kbar);
Mat center_kernel(const Mat& kbar, KernelCenterStats& stats_out);

/// Centers an out-of-sample cross-kernel block against the training
/// statistics: subtract the block's own row means and the training column
/// means, add the training grand mean.
Mat center_cross(const Mat& cross, const KernelCenterStats& stats);

struct MultiKernelSpec {
  struct Component {
    KernelSpec kernel;
    double weight = 0.0;
  };
  std::vector<Component> components;
};

/// Fixed-weight combination sum_m theta_m K_m over a kernel dictionary.
/// Throws EmptyDictionaryError when no positive-weight component exists.
Mat combine_kernels(const MultiKernelSpec& spec, const Mat& data);

/// Dual solution pair shared by the dual and kernel solvers: columns of a and
/// b satisfy a^T (K^2 + eps K) a = I per view, ordered by descending singular
/// value of the compressed coupling matrix.
struct DualPair {
  Mat a;  // N x d
  Mat b;  // N x d
  Vec singulars;
  double gamma = 0.0;
  double epsilon = 0.0;
};

/// Factorizes the two centered Gram matrices once and solves for any
/// (gamma, epsilon) cell cheaply; the coupling with the graph Laplacian is
/// also precomputed. Rank-deficient kernels are handled with a pseudo-inverse
/// square root on the numerically nonzero eigenspace; requesting more
/// components than the smaller numerical rank raises SingularKernelError.
class GkccaSolver {
 public:
  GkccaSolver(const Mat& kx_centered, const Mat& ky_centered, const SourceGraph& graph,
              double jitter = 0.0);

  DualPair fit(double gamma, double epsilon, Index d) const;

  Index n() const { return ex_.eigenvalues.size(); }
  Index rank_x() const { return rank_x_; }
  Index rank_y() const { return rank_y_; }

 private:
  SymEigResult ex_, ey_;
  Mat coupling_;        // Ux^T Uy
  Mat coupling_graph_;  // Ux^T L Uy
  Index rank_x_ = 0, rank_y_ = 0;
};

/// Kernel CCA model with everything needed for out-of-sample projection.
/// train_x / train_y hold the raw training views; models fitted directly from
/// kernel matrices carry no projection context.
struct KernelModel {
  Mat a;
  Mat b;
  double gamma = 0.0;
  double epsilon = 0.0;
  Vec singulars;
  KernelSpec kernel_x, kernel_y;
  Mat train_x, train_y;
  KernelCenterStats stats_x, stats_y;

  bool has_projection_context() const { return train_x.size() > 0; }
};

/// Solves the graph-regularized kernel CCA problem for centered kernel
/// matrices. The result has no projection context.
KernelModel fit_gkcca(const Mat& kx_centered, const Mat& ky_centered, const SourceGraph& graph,
                      double gamma, double epsilon, Index d, double jitter = 0.0);

/// Convenience fit from raw views: resolves bandwidths on the training data,
/// builds and centers the Grams, fits, and attaches the projection context.
KernelModel fit_gkcca_views(const Mat& x_raw, const Mat& y_raw, const KernelSpec& kernel_x,
                            const KernelSpec& kernel_y, const SourceGraph& graph, double gamma,
                            double epsilon, Index d, double jitter = 0.0);

/// Embeds new x-view points: builds the cross-kernel against the training
/// points, centers it with the training statistics, and applies A^T.
Mat project_kernel_x(const KernelModel& model, const Mat& x_new);
Mat project_kernel_y(const KernelModel& model, const Mat& y_new);

/// Scale-aware ridge default: 1e-3 * Tr(K) / N.
double default_epsilon(const Mat& gram);

}  // namespace gcca
