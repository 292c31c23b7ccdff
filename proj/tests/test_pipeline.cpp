#include <doctest.h>

#include <map>
#include <sstream>

#include "gcca/digits.hpp"
#include "gcca/pipeline.hpp"
#include "gcca/prng.hpp"
#include "support/oracles.hpp"

using namespace gcca;
using test::random_matrix;

namespace {

struct TinyProblem {
  Mat x, y;
  std::vector<int> labels;
};

TinyProblem tiny_problem(int classes, int per_class, Index dx, Index dy, std::uint64_t seed) {
  Prng rng(seed);
  TinyProblem p;
  const Index n = static_cast<Index>(classes) * per_class;
  p.x.resize(dx, n);
  p.y.resize(dy, n);
  Index col = 0;
  for (int c = 0; c < classes; ++c) {
    const Mat cx = random_matrix(dx, 1, rng);
    const Mat cy = random_matrix(dy, 1, rng);
    for (int s = 0; s < per_class; ++s, ++col) {
      p.x.col(col) = 2.0 * cx.col(0) + 0.7 * random_matrix(dx, 1, rng).col(0);
      p.y.col(col) = 2.0 * cy.col(0) + 0.7 * random_matrix(dy, 1, rng).col(0);
      p.labels.push_back(c);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("split_views cuts by row index") {
  Mat counting(4, 3);
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 3; ++c) counting(r, c) = static_cast<double>(10 * r + c);
  const auto [top, bottom] = split_views(counting, 2);
  CHECK(top.rows() == 2);
  CHECK(bottom.rows() == 2);
  CHECK(top(1, 2) == 12.0);
  CHECK(bottom(0, 0) == 20.0);

  const auto [most, one] = split_views(counting, 3);
  CHECK(one.rows() == 1);

  const Mat wide = Mat::Zero(1200, 5);
  const auto [x, y] = split_views(wide, 300);
  CHECK(x.rows() == 300);
  CHECK(y.rows() == 900);

  CHECK_THROWS_AS(split_views(counting, 0), BadSplitPointError);
  CHECK_THROWS_AS(split_views(counting, 4), BadSplitPointError);
}

TEST_CASE("partition draws per-class splits deterministically") {
  std::vector<int> single(10, 7);
  const Partition p = partition(single, {6, 0.5, 0.5, 99});
  CHECK(p.train.size() == 6);
  CHECK(p.tune.size() == 2);
  CHECK(p.test.size() == 2);

  // Disjoint and exhaustive.
  std::vector<bool> seen(10, false);
  for (auto idx_list : {p.train, p.tune, p.test})
    for (Index i : idx_list) {
      CHECK(!seen[i]);
      seen[i] = true;
    }
  for (bool b : seen) CHECK(b);

  const Partition again = partition(single, {6, 0.5, 0.5, 99});
  CHECK(again.train == p.train);
  CHECK(again.tune == p.tune);
  CHECK(again.test == p.test);
  const Partition other_seed = partition(single, {6, 0.5, 0.5, 100});
  CHECK(other_seed.train != p.train);

  std::vector<int> five_classes;
  for (int c = 0; c < 5; ++c)
    for (int s = 0; s < 26; ++s) five_classes.push_back(c);
  const Partition p5 = partition(five_classes, {10, 0.5, 0.5, 1});
  CHECK(p5.train.size() == 50);
  CHECK(p5.tune.size() == 40);
  CHECK(p5.test.size() == 40);

  CHECK_THROWS_AS(partition(std::vector<int>(7, 0), SplitPlan{6, 0.5, 0.5, 1}),
                  ClassTooSmallError);
}

TEST_CASE("knn_classify matches hand cases and the exhaustive oracle") {
  Mat train(2, 7);
  train << 0.0, 1.0, 2.0, 10.0, 11.0, 12.0, 5.0,
           0.0, 0.0, 0.0,  0.0,  0.0,  0.0, 0.0;
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1, 1};

  // k = 1 on an exact training point returns its label.
  Mat probe(2, 1);
  probe << 10.0, 0.0;
  CHECK(knn_classify(train, labels, probe, 1)[0] == 1);

  // k = Nt returns the global majority everywhere.
  probe << -100.0, 0.0;
  CHECK(knn_classify(train, labels, probe, 7)[0] == 1);

  // k = 3 around x = 5: neighbors {5, 2, 1} -> classes {1, 0, 0}.
  probe << 4.4, 0.0;
  CHECK(knn_classify(train, labels, probe, 3)[0] == 0);

  CHECK_THROWS_AS(knn_classify(train, labels, probe, 8), KTooLargeError);
  CHECK_THROWS_AS(knn_classify(train, labels, probe, 0), KTooLargeError);

  Prng rng(251);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.below(5));
    const Index nt = 5 + static_cast<Index>(rng.below(46));
    const Index m = 1 + static_cast<Index>(rng.below(10));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(nt)));
    const Mat tr = random_matrix(d, nt, rng);
    const Mat te = random_matrix(d, m, rng);
    std::vector<int> lab(nt);
    for (Index i = 0; i < nt; ++i) lab[i] = static_cast<int>(rng.below(4));
    CHECK(knn_classify(tr, lab, te, k) == test::brute_knn(tr, lab, te, k));
  }
}

TEST_CASE("default hyperparameter grid is 30 log-spaced values per axis") {
  const HyperGrid grid = HyperGrid::log_default();
  REQUIRE(grid.gamma_values.size() == 30);
  REQUIRE(grid.epsilon_values.size() == 30);
  CHECK(grid.gamma_values.front() == doctest::Approx(1e-3));
  CHECK(grid.gamma_values.back() == doctest::Approx(1e3));
  for (std::size_t i = 1; i < 30; ++i) {
    CHECK(grid.gamma_values[i] > grid.gamma_values[i - 1]);
    const double ratio = grid.gamma_values[i] / grid.gamma_values[i - 1];
    CHECK(ratio == doctest::Approx(grid.gamma_values[1] / grid.gamma_values[0]).epsilon(1e-10));
  }
  CHECK(HyperGrid::log_space(0.5, 2.0, 1) == std::vector<double>{0.5});
}

TEST_CASE("grid_search with one cell equals a manual fit and evaluation") {
  const TinyProblem p = tiny_problem(3, 12, 6, 5, 301);
  const SplitPlan plan{4, 0.5, 0.5, 17};
  HyperGrid grid;
  grid.gamma_values = {0.25};
  GraphSpec gspec;
  gspec.mode = GraphSpec::Mode::BuildCosine;

  const EvalReport report =
      grid_search(Variant::Gcca, p.x, p.y, p.labels, gspec, grid, plan, 2, 3);
  CHECK(report.chosen_gamma == 0.25);
  CHECK(report.cells.size() == 1);

  // Manual protocol for the same seed.
  const Partition part = partition(p.labels, plan);
  Mat xtr(6, part.train.size()), ytr(5, part.train.size()), xte(6, part.test.size());
  std::vector<int> ltr, lte;
  for (std::size_t i = 0; i < part.train.size(); ++i) {
    xtr.col(i) = p.x.col(part.train[i]);
    ytr.col(i) = p.y.col(part.train[i]);
    ltr.push_back(p.labels[part.train[i]]);
  }
  for (std::size_t i = 0; i < part.test.size(); ++i) {
    xte.col(i) = p.x.col(part.test[i]);
    lte.push_back(p.labels[part.test[i]]);
  }
  const PairedViews views = center(xtr, ytr);
  Mat stacked(11, views.n);
  stacked.topRows(6) = views.x;
  stacked.bottomRows(5) = views.y;
  const SourceGraph graph = cosine_class_graph(stacked, ltr, 3);
  const GccaModel model = fit_gcca(views, graph, 0.25, 2);
  const std::vector<int> predicted =
      knn_classify(model.u.transpose() * views.x, ltr, project_x(model, xte), 3);
  int correct = 0;
  for (std::size_t i = 0; i < lte.size(); ++i) correct += predicted[i] == lte[i];
  CHECK(report.accuracy ==
        doctest::Approx(static_cast<double>(correct) / lte.size()).epsilon(1e-12));

  // Per-class accuracies average back to the overall accuracy.
  double weighted = 0.0;
  int total = 0;
  for (std::size_t c = 0; c < report.class_ids.size(); ++c) {
    int count = 0;
    for (int label : lte) count += label == report.class_ids[c];
    weighted += report.per_class_accuracy[c] * count;
    total += count;
  }
  CHECK(weighted / total == doctest::Approx(report.accuracy).epsilon(1e-12));
}

TEST_CASE("on a graph-free problem every gamma matches plain CCA") {
  const TinyProblem p = tiny_problem(3, 10, 5, 4, 302);
  const SplitPlan plan{4, 0.5, 0.5, 23};
  GraphSpec imported;
  imported.mode = GraphSpec::Mode::Import;
  imported.imported_weights = Mat::Zero(12, 12);

  HyperGrid grid;
  grid.gamma_values = HyperGrid::log_space(1e-3, 1e3, 5);
  const EvalReport gcca_report =
      grid_search(Variant::Gcca, p.x, p.y, p.labels, imported, grid, plan, 2, 3);
  const EvalReport cca_report =
      grid_search(Variant::Cca, p.x, p.y, p.labels, imported, grid, plan, 2, 3);
  CHECK(gcca_report.accuracy == cca_report.accuracy);
  CHECK(gcca_report.chosen_gamma == 1e-3);  // all cells tie, smallest gamma wins
  for (const CellResult& cell : gcca_report.cells)
    CHECK(cell.tune_accuracy == gcca_report.cells.front().tune_accuracy);
}

TEST_CASE("default grid shapes: 30 cells for gcca, 900 for the dual variants") {
  const TinyProblem p = tiny_problem(2, 8, 4, 3, 303);
  const SplitPlan plan{3, 0.5, 0.5, 5};
  GraphSpec gspec;

  const EvalReport gcca_report = grid_search(Variant::Gcca, p.x, p.y, p.labels, gspec,
                                             HyperGrid::log_default(), plan, 2, 3);
  CHECK(gcca_report.cells.size() == 30);

  const EvalReport gdcca_report = grid_search(Variant::Gdcca, p.x, p.y, p.labels, gspec,
                                              HyperGrid::log_default(), plan, 2, 3);
  CHECK(gdcca_report.cells.size() == 900);
}

TEST_CASE("selection never reads the test columns") {
  const TinyProblem p = tiny_problem(3, 12, 5, 4, 304);
  const SplitPlan plan{4, 0.5, 0.5, 31};
  HyperGrid grid;
  grid.gamma_values = HyperGrid::log_space(1e-2, 1e2, 4);
  GraphSpec gspec;

  const EvalReport clean = grid_search(Variant::Gcca, p.x, p.y, p.labels, gspec, grid, plan, 2, 3);

  // Poison the test partition; selection must be unaffected.
  const Partition part = partition(p.labels, plan);
  TinyProblem poisoned = p;
  Prng noise(99);
  for (Index idx : part.test) {
    poisoned.x.col(idx) = 50.0 * random_matrix(5, 1, noise).col(0);
    poisoned.y.col(idx) = 50.0 * random_matrix(4, 1, noise).col(0);
  }
  const EvalReport dirty =
      grid_search(Variant::Gcca, poisoned.x, poisoned.y, poisoned.labels, gspec, grid, plan, 2, 3);

  CHECK(dirty.chosen_gamma == clean.chosen_gamma);
  REQUIRE(dirty.cells.size() == clean.cells.size());
  for (std::size_t i = 0; i < clean.cells.size(); ++i)
    CHECK(dirty.cells[i].tune_accuracy == clean.cells[i].tune_accuracy);
  CHECK(dirty.accuracy != clean.accuracy);  // the test split did change
}

TEST_CASE("reports are byte-identical across repeated seeded runs") {
  const TinyProblem p = tiny_problem(3, 10, 5, 4, 305);
  const SplitPlan plan{3, 0.5, 0.5, 77};
  HyperGrid grid;
  grid.gamma_values = HyperGrid::log_space(1e-3, 1e3, 4);
  grid.epsilon_values = HyperGrid::log_space(1e-2, 1e2, 3);
  GraphSpec gspec;
  McOptions mc;
  mc.runs = 3;

  std::ostringstream first, second;
  write_report(first,
               evaluate_mc(Variant::Gdcca, p.x, p.y, p.labels, gspec, grid, plan, 2, 3, mc));
  write_report(second,
               evaluate_mc(Variant::Gdcca, p.x, p.y, p.labels, gspec, grid, plan, 2, 3, mc));
  CHECK(first.str() == second.str());
  CHECK(first.str().find("summary mean_test_acc=") != std::string::npos);

  // Threaded evaluation produces the same bytes.
  SolveOptions threaded;
  threaded.threads = 3;
  std::ostringstream third;
  write_report(third, evaluate_mc(Variant::Gdcca, p.x, p.y, p.labels, gspec, grid, plan, 2, 3, mc,
                                  threaded));
  CHECK(third.str() == first.str());
}

TEST_CASE("evaluate_mc derives child seeds and can subsample classes") {
  const TinyProblem p = tiny_problem(6, 10, 5, 4, 306);
  const SplitPlan plan{3, 0.5, 0.5, 11};
  HyperGrid grid;
  grid.gamma_values = {0.1};
  GraphSpec gspec;
  McOptions mc;
  mc.runs = 4;
  mc.classes_per_run = 3;

  const McSummary summary =
      evaluate_mc(Variant::Gcca, p.x, p.y, p.labels, gspec, grid, plan, 2, 3, mc);
  REQUIRE(summary.runs.size() == 4);
  for (const EvalReport& run : summary.runs) CHECK(run.class_ids.size() == 3);

  double mean = 0.0;
  for (const auto& run : summary.runs) mean += run.accuracy;
  mean /= 4.0;
  CHECK(summary.mean_accuracy == doctest::Approx(mean).epsilon(1e-15));

  const std::vector<int> a = select_classes(p.labels, 3, 5);
  const std::vector<int> b = select_classes(p.labels, 3, 5);
  CHECK(a == b);
  CHECK_THROWS_AS(select_classes(p.labels, 7, 5), Error);
}

TEST_CASE("kernel and dual variants run the full protocol") {
  const TinyProblem p = tiny_problem(3, 12, 6, 5, 307);
  const SplitPlan plan{4, 0.5, 0.5, 13};
  HyperGrid grid;
  grid.gamma_values = HyperGrid::log_space(1e-2, 1e1, 3);
  grid.epsilon_values = HyperGrid::log_space(1e-2, 1e1, 3);

  GraphSpec kernel_graph;
  kernel_graph.mode = GraphSpec::Mode::BuildKernel;
  const EvalReport gk =
      grid_search(Variant::Gkcca, p.x, p.y, p.labels, kernel_graph, grid, plan, 2, 3);
  CHECK(gk.cells.size() == 9);
  CHECK(gk.accuracy >= 0.0);
  CHECK(gk.accuracy <= 1.0);

  GraphSpec cosine_graph;
  const EvalReport gd =
      grid_search(Variant::Gdcca, p.x, p.y, p.labels, cosine_graph, grid, plan, 2, 3);
  CHECK(gd.chosen_epsilon > 0.0);
}

TEST_CASE("curve writer emits plain triples") {
  std::ostringstream out;
  write_curve(out, {{10, 0.5, 0.01}, {20, 0.75, 0.005}});
  CHECK(out.str() == "10 0.5 0.01\n20 0.75 0.0050000000000000001\n");
}
