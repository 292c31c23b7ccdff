#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gcca/cca.hpp"
#include "gcca/dual.hpp"
#include "gcca/graph.hpp"
#include "gcca/kernel.hpp"
#include "gcca/types.hpp"

namespace gcca {

/// Per-class train/tune/test split sizes. The remainder after drawing
/// n_train_per_class training samples is divided by the two fractions, with
/// at least one sample per class kept in each partition.
struct SplitPlan {
  int n_train_per_class = 1;
  double tune_fraction = 0.5;
  double test_fraction = 0.5;
  std::uint64_t seed = 0;
};

struct Partition {
  std::vector<Index> train, tune, test;
};

/// Seeded, deterministic per-class partition. Throws ClassTooSmallError when a
/// class cannot supply n_train_per_class + 2 samples.
Partition partition(const std::vector<int>& labels, const SplitPlan& plan);

/// Cuts a stacked feature matrix into the first dx rows and the rest.
std::pair<Mat, Mat> split_views(const Mat& vectors, Index dx);

/// Majority vote over the k Euclidean-nearest training embeddings. Vote ties
/// go to the tied class with the nearest member; distance ties to the lower
/// training index.
std::vector<int> knn_classify(const Mat& train_emb, const std::vector<int>& train_labels,
                              const Mat& test_emb, int k);

struct HyperGrid {
  std::vector<double> gamma_values;
  std::vector<double> epsilon_values;

  static std::vector<double> log_space(double lo, double hi, int count);
  /// 30 logarithmically spaced values in [1e-3, 1e3] on both axes.
  static HyperGrid log_default();
};

enum class Variant { Cca, Gcca, Gdcca, Gkcca };

Variant parse_variant(const std::string& text);
std::string to_string(Variant variant);

struct GraphSpec {
  enum class Mode { BuildCosine, BuildKernel, Import };
  Mode mode = Mode::BuildCosine;
  int k = 0;  // 0 = one less than the per-class training count
  KernelSpec source_kernel = KernelSpec::gaussian_median();
  Mat imported_weights;
};

struct SolveOptions {
  double jitter = 0.0;
  KernelSpec kernel_x = KernelSpec::gaussian_median();
  KernelSpec kernel_y = KernelSpec::gaussian_median();
  int threads = 1;
};

struct CellResult {
  double gamma = 0.0;
  double epsilon = 0.0;
  double tune_accuracy = 0.0;
  bool chosen = false;
};

struct EvalReport {
  Variant variant = Variant::Cca;
  double accuracy = 0.0;  // test accuracy of the chosen cell
  std::vector<int> class_ids;
  std::vector<double> per_class_accuracy;
  double chosen_gamma = 0.0;
  double chosen_epsilon = 0.0;
  Index d = 0;
  int knn_k = 0;
  double runtime_seconds = 0.0;
  std::vector<CellResult> cells;
};

/// Chosen-cell model refit on the training split, for callers that want to
/// keep or serialize it. Only the member matching `variant` is populated.
struct FittedModel {
  Variant variant = Variant::Cca;
  GccaModel primal;
  DualModel dual;
  KernelModel kernel;
};

/// Full single-run protocol: partition, fit every grid cell on the training
/// split, score each cell on the tuning split using only the x view, pick the
/// best cell (ties to smaller gamma, then smaller epsilon), refit it and
/// report test accuracy. Test columns are not read until after selection.
EvalReport grid_search(Variant variant, const Mat& x0, const Mat& y0,
                       const std::vector<int>& labels, const GraphSpec& graph_spec,
                       const HyperGrid& grid, const SplitPlan& plan, Index d, int knn_k,
                       const SolveOptions& opts = {}, FittedModel* chosen_model = nullptr);

struct McOptions {
  int runs = 1;
  int classes_per_run = 0;  // 0 = use every class each run
};

struct McSummary {
  std::vector<EvalReport> runs;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation across runs
};

/// Called with every run's refit chosen-cell model.
using ModelSink = std::function<void(int run, const FittedModel& model)>;

/// Repeats grid_search over seeded Monte-Carlo runs; run r uses seed + r, and
/// optionally draws a fresh class subset per run.
McSummary evaluate_mc(Variant variant, const Mat& x0, const Mat& y0,
                      const std::vector<int>& labels, const GraphSpec& graph_spec,
                      const HyperGrid& grid, const SplitPlan& plan, Index d, int knn_k,
                      const McOptions& mc, const SolveOptions& opts = {},
                      const ModelSink& sink = {});

/// Draws `count` distinct class ids, seeded.
std::vector<int> select_classes(const std::vector<int>& labels, int count, std::uint64_t seed);

/// Line-delimited report: one record per (run, cell) with the tuning accuracy,
/// the test accuracy only on the chosen cell, and a closing summary record.
/// Runtime is deliberately left out so identical runs emit identical bytes.
void write_report(std::ostream& out, const McSummary& summary);

struct CurvePoint {
  int n_train = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

/// Plain "n_train mean std" triples for external plotting.
void write_curve(std::ostream& out, const std::vector<CurvePoint>& points);

}  // namespace gcca
