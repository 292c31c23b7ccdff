#include "gcca/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <thread>

#include "gcca/format.hpp"
#include "gcca/prng.hpp"

namespace gcca {

Partition partition(const std::vector<int>& labels, const SplitPlan& plan) {
  if (plan.n_train_per_class < 1) throw Error("partition: n_train_per_class must be >= 1");
  if (std::abs(plan.tune_fraction + plan.test_fraction - 1.0) > 1e-9)
    throw Error("partition: tune and test fractions must sum to 1");

  std::map<int, std::vector<Index>> groups;
  for (Index i = 0; i < static_cast<Index>(labels.size()); ++i) groups[labels[i]].push_back(i);

  Prng rng(plan.seed);
  Partition part;
  for (auto& [cls, members] : groups) {
    const long need = plan.n_train_per_class + 2;
    if (static_cast<long>(members.size()) < need)
      throw ClassTooSmallError(cls, static_cast<long>(members.size()), need);

    rng.shuffle(members);
    const long n_train = plan.n_train_per_class;
    const long rest = static_cast<long>(members.size()) - n_train;
    long n_tune = std::llround(plan.tune_fraction * static_cast<double>(rest));
    n_tune = std::clamp(n_tune, 1L, rest - 1);

    part.train.insert(part.train.end(), members.begin(), members.begin() + n_train);
    part.tune.insert(part.tune.end(), members.begin() + n_train,
                     members.begin() + n_train + n_tune);
    part.test.insert(part.test.end(), members.begin() + n_train + n_tune, members.end());
  }
  return part;
}

std::pair<Mat, Mat> split_views(const Mat& vectors, Index dx) {
  if (dx <= 0 || dx >= vectors.rows())
    throw BadSplitPointError("split_views: dx = " + std::to_string(dx) + " must be in (0, " +
                             std::to_string(vectors.rows()) + ")");
  return {vectors.topRows(dx), vectors.bottomRows(vectors.rows() - dx)};
}

std::vector<int> knn_classify(const Mat& train_emb, const std::vector<int>& train_labels,
                              const Mat& test_emb, int k) {
  const Index nt = train_emb.cols();
  if (static_cast<Index>(train_labels.size()) != nt)
    throw DimensionMismatchError("knn_classify: " + std::to_string(train_labels.size()) +
                                 " labels for " + std::to_string(nt) + " embeddings");
  if (train_emb.rows() != test_emb.rows())
    throw DimensionMismatchError("knn_classify: embedding dimensions differ");
  if (k < 1 || k > nt)
    throw KTooLargeError("knn_classify: k = " + std::to_string(k) + " not in [1, " +
                         std::to_string(nt) + "]");

  std::vector<int> out(test_emb.cols());
  std::vector<std::pair<double, Index>> ranked(nt);
  for (Index t = 0; t < test_emb.cols(); ++t) {
    for (Index i = 0; i < nt; ++i)
      ranked[i] = {(train_emb.col(i) - test_emb.col(t)).squaredNorm(), i};
    // Lexicographic order makes distance ties fall to the lower index.
    std::sort(ranked.begin(), ranked.end());

    std::map<int, int> votes;
    for (int r = 0; r < k; ++r) ++votes[train_labels[ranked[r].second]];
    int best_count = 0;
    for (const auto& [cls, count] : votes) best_count = std::max(best_count, count);
    // Among tied classes the one holding the nearest neighbor wins.
    for (int r = 0; r < k; ++r) {
      const int cls = train_labels[ranked[r].second];
      if (votes[cls] == best_count) {
        out[t] = cls;
        break;
      }
    }
  }
  return out;
}

std::vector<double> HyperGrid::log_space(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo))
    throw Error("log_space: need count >= 1 and 0 < lo <= hi");
  std::vector<double> values(count);
  if (count == 1) {
    values[0] = lo;
    return values;
  }
  const double step = (std::log10(hi) - std::log10(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) values[i] = std::pow(10.0, std::log10(lo) + step * i);
  values.front() = lo;
  values.back() = hi;
  return values;
}

HyperGrid HyperGrid::log_default() {
  HyperGrid grid;
  grid.gamma_values = log_space(1e-3, 1e3, 30);
  grid.epsilon_values = log_space(1e-3, 1e3, 30);
  return grid;
}

Variant parse_variant(const std::string& text) {
  if (text == "cca") return Variant::Cca;
  if (text == "gcca") return Variant::Gcca;
  if (text == "gdcca") return Variant::Gdcca;
  if (text == "gkcca") return Variant::Gkcca;
  throw Error("unknown variant '" + text + "' (expected cca, gcca, gdcca, gkcca)");
}

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::Cca: return "cca";
    case Variant::Gcca: return "gcca";
    case Variant::Gdcca: return "gdcca";
    case Variant::Gkcca: return "gkcca";
  }
  return "?";
}

namespace {

Mat take_columns(const Mat& m, const std::vector<Index>& idx) {
  Mat out(m.rows(), static_cast<Index>(idx.size()));
  for (Index j = 0; j < out.cols(); ++j) out.col(j) = m.col(idx[j]);
  return out;
}

std::vector<int> take_labels(const std::vector<int>& labels, const std::vector<Index>& idx) {
  std::vector<int> out(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) out[j] = labels[idx[j]];
  return out;
}

double accuracy_of(const std::vector<int>& predicted, const std::vector<int>& truth) {
  int correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

void check_grid(const std::vector<double>& values, const char* name, bool allow_zero) {
  if (values.empty()) throw Error(std::string("grid_search: empty ") + name + " grid");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0 || (!allow_zero && values[i] == 0.0))
      throw Error(std::string("grid_search: ") + name + " grid values must be " +
                  (allow_zero ? ">= 0" : "> 0"));
    if (i > 0 && values[i] < values[i - 1])
      throw Error(std::string("grid_search: ") + name + " grid must be sorted ascending");
  }
}

SourceGraph build_graph(const GraphSpec& spec, const PairedViews& views,
                        const std::vector<int>& train_labels, int n_train_per_class,
                        const std::vector<Index>& train_idx, Index n_total) {
  const int k = spec.k > 0 ? spec.k : n_train_per_class - 1;
  switch (spec.mode) {
    case GraphSpec::Mode::BuildCosine: {
      Mat stacked(views.dx() + views.dy(), views.n);
      stacked.topRows(views.dx()) = views.x;
      stacked.bottomRows(views.dy()) = views.y;
      return cosine_class_graph(stacked, train_labels, k);
    }
    case GraphSpec::Mode::BuildKernel: {
      Mat stacked(views.dx() + views.dy(), views.n);
      stacked.topRows(views.dx()) = views.x;
      stacked.bottomRows(views.dy()) = views.y;
      const KernelSpec resolved = resolve_bandwidth(spec.source_kernel, stacked);
      return kernel_class_graph(center_kernel(gram(stacked, resolved)), train_labels, k);
    }
    case GraphSpec::Mode::Import: {
      // A full-dataset graph is cut down to the run's training block; a
      // training-sized graph is taken as-is.
      if (spec.imported_weights.rows() == n_total && n_total != views.n) {
        Mat sub(views.n, views.n);
        for (Index i = 0; i < views.n; ++i)
          for (Index j = 0; j < views.n; ++j)
            sub(i, j) = spec.imported_weights(train_idx[i], train_idx[j]);
        return laplacian(sub);
      }
      if (spec.imported_weights.rows() != views.n)
        throw GraphSizeMismatchError("imported graph has " +
                                     std::to_string(spec.imported_weights.rows()) +
                                     " nodes for " + std::to_string(views.n) +
                                     " training samples (" + std::to_string(n_total) +
                                     " total)");
      return laplacian(spec.imported_weights);
    }
  }
  throw Error("grid_search: bad graph mode");
}

template <typename Fn>
void for_each_cell(std::size_t count, int threads, Fn body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const int workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

EvalReport grid_search(Variant variant, const Mat& x0, const Mat& y0,
                       const std::vector<int>& labels, const GraphSpec& graph_spec,
                       const HyperGrid& grid, const SplitPlan& plan, Index d, int knn_k,
                       const SolveOptions& opts, FittedModel* chosen_model) {
  const auto t0 = std::chrono::steady_clock::now();
  if (x0.cols() != y0.cols() || static_cast<Index>(labels.size()) != x0.cols())
    throw DimensionMismatchError("grid_search: views and labels disagree on the sample count");

  const Partition part = partition(labels, plan);
  const Mat xtr = take_columns(x0, part.train);
  const Mat ytr = take_columns(y0, part.train);
  const Mat xtu = take_columns(x0, part.tune);
  const std::vector<int> labels_tr = take_labels(labels, part.train);
  const std::vector<int> labels_tu = take_labels(labels, part.tune);

  const PairedViews views = center(xtr, ytr);

  // Grid cells in selection order: gamma ascending, epsilon inner ascending.
  std::vector<std::pair<double, double>> cells;
  const bool dual_like = variant == Variant::Gdcca || variant == Variant::Gkcca;
  if (variant == Variant::Cca) {
    cells.emplace_back(0.0, 0.0);
  } else {
    check_grid(grid.gamma_values, "gamma", /*allow_zero=*/true);
    if (dual_like) {
      check_grid(grid.epsilon_values, "epsilon", /*allow_zero=*/false);
      for (double g : grid.gamma_values)
        for (double e : grid.epsilon_values) cells.emplace_back(g, e);
    } else {
      for (double g : grid.gamma_values) cells.emplace_back(g, 0.0);
    }
  }

  // Variant-specific fit-and-embed closures over the training split. The
  // returned matrices are d x n embeddings of the training and query columns.
  std::function<std::pair<Mat, Mat>(double, double, const Mat&)> embed;

  SourceGraph graph;
  if (variant != Variant::Cca)
    graph = build_graph(graph_spec, views, labels_tr, plan.n_train_per_class, part.train,
                        x0.cols());

  std::shared_ptr<GccaSolver> primal;
  std::shared_ptr<GdccaSolver> dual;
  std::shared_ptr<GkccaSolver> kernel;
  Mat kx;  // gkcca: centered training kernel
  KernelCenterStats stats_x, stats_y;
  KernelSpec kx_spec, ky_spec;

  switch (variant) {
    case Variant::Cca:
      primal = std::make_shared<GccaSolver>(views, opts.jitter);
      break;
    case Variant::Gcca:
      primal = std::make_shared<GccaSolver>(views, graph, opts.jitter);
      break;
    case Variant::Gdcca:
      dual = std::make_shared<GdccaSolver>(views, graph);
      break;
    case Variant::Gkcca: {
      kx_spec = resolve_bandwidth(opts.kernel_x, xtr);
      ky_spec = resolve_bandwidth(opts.kernel_y, ytr);
      kx = center_kernel(gram(xtr, kx_spec), stats_x);
      const Mat ky = center_kernel(gram(ytr, ky_spec), stats_y);
      kernel = std::make_shared<GkccaSolver>(kx, ky, graph, opts.jitter);
      break;
    }
  }

  // `capture` receives the refit model on the final call only.
  FittedModel* capture = nullptr;
  if (primal) {
    embed = [&, capture0 = &capture](double g, double /*e*/, const Mat& query) {
      const GccaModel model = primal->fit(g, d);
      if (*capture0) (*capture0)->primal = model;
      return std::make_pair(Mat(model.u.transpose() * views.x), project_x(model, query));
    };
  } else if (dual) {
    embed = [&, capture0 = &capture](double g, double e, const Mat& query) {
      const DualModel model = dual->fit(g, e, d);
      if (*capture0) (*capture0)->dual = model;
      const Mat train_emb = (views.x.transpose() * (views.x * model.a)).transpose();
      return std::make_pair(train_emb, dual_project_x(model, query));
    };
  } else {
    embed = [&, capture0 = &capture](double g, double e, const Mat& query) {
      const DualPair pair = kernel->fit(g, e, d);
      if (*capture0) {
        KernelModel& model = (*capture0)->kernel;
        model.a = pair.a;
        model.b = pair.b;
        model.gamma = pair.gamma;
        model.epsilon = pair.epsilon;
        model.singulars = pair.singulars;
        model.kernel_x = kx_spec;
        model.kernel_y = ky_spec;
        model.train_x = xtr;
        model.train_y = ytr;
        model.stats_x = stats_x;
        model.stats_y = stats_y;
      }
      const Mat train_emb = (kx * pair.a).transpose();
      const Mat cross = center_cross(gram_cross(query, xtr, kx_spec), stats_x);
      return std::make_pair(train_emb, Mat((cross * pair.a).transpose()));
    };
  }

  // Tuning pass; the test split stays untouched until a cell is chosen.
  std::vector<CellResult> results(cells.size());
  for_each_cell(cells.size(), opts.threads, [&](std::size_t i) {
    const auto [g, e] = cells[i];
    const auto [train_emb, tune_emb] = embed(g, e, xtu);
    const std::vector<int> predicted = knn_classify(train_emb, labels_tr, tune_emb, knn_k);
    results[i] = {g, e, accuracy_of(predicted, labels_tu), false};
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].tune_accuracy > results[best].tune_accuracy) best = i;
  results[best].chosen = true;

  // Final refit on the chosen cell, evaluated on the test split.
  const Mat xte = take_columns(x0, part.test);
  const std::vector<int> labels_te = take_labels(labels, part.test);
  if (chosen_model) {
    chosen_model->variant = variant;
    capture = chosen_model;
  }
  const auto [train_emb, test_emb] = embed(cells[best].first, cells[best].second, xte);
  capture = nullptr;
  const std::vector<int> predicted = knn_classify(train_emb, labels_tr, test_emb, knn_k);

  EvalReport report;
  report.variant = variant;
  report.accuracy = accuracy_of(predicted, labels_te);
  report.chosen_gamma = cells[best].first;
  report.chosen_epsilon = cells[best].second;
  report.d = d;
  report.knn_k = knn_k;
  report.cells = std::move(results);

  std::set<int> class_set(labels.begin(), labels.end());
  for (int cls : class_set) {
    int total = 0, correct = 0;
    for (std::size_t i = 0; i < labels_te.size(); ++i) {
      if (labels_te[i] == cls) {
        ++total;
        correct += predicted[i] == cls;
      }
    }
    report.class_ids.push_back(cls);
    report.per_class_accuracy.push_back(total > 0 ? static_cast<double>(correct) / total : 0.0);
  }

  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                               .count();
  return report;
}

std::vector<int> select_classes(const std::vector<int>& labels, int count, std::uint64_t seed) {
  std::set<int> unique(labels.begin(), labels.end());
  std::vector<int> classes(unique.begin(), unique.end());
  if (count < 1 || count > static_cast<int>(classes.size()))
    throw Error("select_classes: cannot draw " + std::to_string(count) + " of " +
                std::to_string(classes.size()) + " classes");
  Prng rng(seed ^ 0xda3e39cb94b95bdbULL);
  rng.shuffle(classes);
  classes.resize(count);
  std::sort(classes.begin(), classes.end());
  return classes;
}

McSummary evaluate_mc(Variant variant, const Mat& x0, const Mat& y0,
                      const std::vector<int>& labels, const GraphSpec& graph_spec,
                      const HyperGrid& grid, const SplitPlan& plan, Index d, int knn_k,
                      const McOptions& mc, const SolveOptions& opts, const ModelSink& sink) {
  if (mc.runs < 1) throw Error("evaluate_mc: runs must be >= 1");
  McSummary summary;
  for (int run = 0; run < mc.runs; ++run) {
    SplitPlan child = plan;
    child.seed = plan.seed + static_cast<std::uint64_t>(run);

    if (mc.classes_per_run > 0) {
      const std::vector<int> chosen = select_classes(labels, mc.classes_per_run, child.seed);
      std::vector<Index> keep;
      for (Index i = 0; i < static_cast<Index>(labels.size()); ++i)
        if (std::binary_search(chosen.begin(), chosen.end(), labels[i])) keep.push_back(i);
      FittedModel model;
      summary.runs.push_back(grid_search(variant, take_columns(x0, keep), take_columns(y0, keep),
                                         take_labels(labels, keep), graph_spec, grid, child, d,
                                         knn_k, opts, sink ? &model : nullptr));
      if (sink) sink(run, model);
    } else {
      FittedModel model;
      summary.runs.push_back(grid_search(variant, x0, y0, labels, graph_spec, grid, child, d,
                                         knn_k, opts, sink ? &model : nullptr));
      if (sink) sink(run, model);
    }
  }

  double sum = 0.0;
  for (const auto& run : summary.runs) sum += run.accuracy;
  summary.mean_accuracy = sum / summary.runs.size();
  double ss = 0.0;
  for (const auto& run : summary.runs) {
    const double dev = run.accuracy - summary.mean_accuracy;
    ss += dev * dev;
  }
  summary.std_accuracy =
      summary.runs.size() > 1 ? std::sqrt(ss / (summary.runs.size() - 1)) : 0.0;
  return summary;
}

void write_report(std::ostream& out, const McSummary& summary) {
  if (!summary.runs.empty()) {
    const EvalReport& first = summary.runs.front();
    out << "# variant=" << to_string(first.variant) << " d=" << first.d << " knn_k=" << first.knn_k
        << " runs=" << summary.runs.size() << "\n";
  }
  for (std::size_t run = 0; run < summary.runs.size(); ++run) {
    const EvalReport& report = summary.runs[run];
    for (const CellResult& cell : report.cells) {
      out << "record run=" << run << " gamma=" << fmt_g17(cell.gamma)
          << " epsilon=" << fmt_g17(cell.epsilon) << " tune_acc=" << fmt_g17(cell.tune_accuracy)
          << " test_acc=" << (cell.chosen ? fmt_g17(report.accuracy) : "nan") << "\n";
    }
  }
  out << "summary mean_test_acc=" << fmt_g17(summary.mean_accuracy)
      << " std_test_acc=" << fmt_g17(summary.std_accuracy) << " runs=" << summary.runs.size()
      << "\n";
}

void write_curve(std::ostream& out, const std::vector<CurvePoint>& points) {
  for (const CurvePoint& p : points)
    out << p.n_train << " " << fmt_g17(p.mean_accuracy) << " " << fmt_g17(p.std_accuracy) << "\n";
}

}  // namespace gcca
