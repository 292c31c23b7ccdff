#include <doctest.h>

#include <cstring>
#include <sstream>

#include "gcca/cca.hpp"
#include "gcca/model_io.hpp"
#include "gcca/prng.hpp"
#include "support/oracles.hpp"

using namespace gcca;
using test::random_adjacency;
using test::random_matrix;
using test::random_views;

TEST_CASE("center removes row means and keeps them") {
  Prng rng(61);
  const Mat x = random_matrix(5, 20, rng);
  const Mat y = random_matrix(3, 20, rng);
  const PairedViews views = center(x, y);
  CHECK(views.x.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(views.y.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(((views.x.colwise() + views.x_mean) - x).cwiseAbs().maxCoeff() < 1e-12);

  // Already centered input is untouched and reports zero means.
  const PairedViews twice = center(views.x, views.y);
  CHECK(twice.x_mean.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.x - views.x).cwiseAbs().maxCoeff() < 1e-12);

  // A constant replicated column centers to zero.
  Mat constant(4, 6);
  for (Index j = 0; j < 6; ++j) constant.col(j) = Vec::LinSpaced(4, 1.0, 4.0);
  const PairedViews flat = center(constant, constant);
  CHECK(flat.x.cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(center(random_matrix(2, 3, rng), random_matrix(2, 4, rng)),
                  DimensionMismatchError);
}

TEST_CASE("fit_cca on identical views finds correlation one") {
  Prng rng(67);
  const Mat x = random_matrix(4, 60, rng);
  const PairedViews views = center(x, x);
  const GccaModel model = fit_cca(views, 1);
  CHECK(model.singulars(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(model.singulars(0) <= 1.0 + 1e-8);
}

TEST_CASE("fit_cca on independent views finds near-zero correlation") {
  Prng rng(71);
  const PairedViews views = random_views(5, 5, 2000, rng);
  const GccaModel model = fit_cca(views, 1);
  CHECK(model.singulars(0) < 0.3);
}

TEST_CASE("fit_cca matches the block generalized eigenproblem oracle") {
  Prng rng(73);
  const PairedViews views = random_views(3, 2, 50, rng);
  const GccaModel model = fit_cca(views, 2);
  const test::BlockCcaResult oracle = test::cca_block_pencil(covariances(views), 2);

  CHECK((model.singulars - oracle.correlations).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(test::max_diff_up_to_sign(oracle.u, model.u) < 1e-8);
  CHECK(test::max_diff_up_to_sign(oracle.v, model.v) < 1e-8);
}

TEST_CASE("fit_cca error paths") {
  Prng rng(79);
  const PairedViews views = random_views(3, 2, 30, rng);
  CHECK_THROWS_AS(fit_cca(views, 3), RankTooLargeError);

  // More features than samples leaves the covariance singular unless jitter
  // is supplied.
  const PairedViews thin = random_views(6, 2, 4, rng);
  CHECK_THROWS_AS(fit_cca(thin, 1), SingularMatrixError);
  CHECK_NOTHROW(fit_cca(thin, 1, 1e-6));
}

TEST_CASE("fit_gcca with gamma 0 or an empty graph reduces to fit_cca") {
  Prng rng(83);
  const PairedViews views = random_views(6, 5, 40, rng);
  const SourceGraph graph = laplacian(random_adjacency(40, 0.3, rng));
  const GccaModel plain = fit_cca(views, 4);

  const GccaModel at_zero = fit_gcca(views, graph, 0.0, 4);
  CHECK((at_zero.u - plain.u).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((at_zero.v - plain.v).cwiseAbs().maxCoeff() < 1e-13);

  const GccaModel no_edges = fit_gcca(views, empty_graph(40), 0.7, 4);
  CHECK((no_edges.u - plain.u).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(fit_gcca(views, empty_graph(39), 0.1, 2), GraphSizeMismatchError);
}

TEST_CASE("fit_gcca satisfies the whitening constraints") {
  Prng rng(89);
  for (int trial = 0; trial < 10; ++trial) {
    const PairedViews views = random_views(6, 5, 40, rng);
    const SourceGraph graph = laplacian(random_adjacency(40, 0.3, rng));
    const GccaModel model = fit_gcca(views, graph, 0.25, 3);
    const CovarianceSet cov = covariances(views);
    CHECK((model.u.transpose() * cov.sxx * model.u - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-8);
    CHECK((model.v.transpose() * cov.syy * model.v - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-8);
  }
}

TEST_CASE("fitted objective equals the singular value sum and beats random feasible points") {
  Prng rng(97);
  const PairedViews views = random_views(6, 5, 40, rng);
  const SourceGraph graph = laplacian(random_adjacency(40, 0.4, rng));
  const GccaModel model = fit_gcca(views, graph, 0.1, 3);
  const double fitted = gcca_objective(model, views, graph);
  CHECK(fitted == doctest::Approx(model.singulars.sum()).epsilon(1e-8));

  const CovarianceSet cov = covariances(views);
  for (int draw = 0; draw < 200; ++draw) {
    GccaModel candidate = model;
    candidate.u = test::random_feasible_primal(cov.sxx, 3, rng);
    candidate.v = test::random_feasible_primal(cov.syy, 3, rng);
    CHECK(gcca_objective(candidate, views, graph) <= fitted + 1e-9);
  }

  GccaModel zero = model;
  zero.u.setZero();
  CHECK(gcca_objective(zero, views, graph) == 0.0);
}

TEST_CASE("objective of the leading pair is the canonical correlation") {
  Prng rng(101);
  const PairedViews views = random_views(4, 3, 60, rng);
  const GccaModel model = fit_cca(views, 1);
  CHECK(gcca_objective(model, views, empty_graph(60)) ==
        doctest::Approx(model.singulars(0)).epsilon(1e-10));
}

TEST_CASE("stationarity residuals vanish for the leading pair") {
  Prng rng(103);
  const PairedViews views = random_views(5, 4, 50, rng);
  const GccaModel model = fit_cca(views, 1);
  const CovarianceSet cov = covariances(views);
  const Vec u = model.u.col(0);
  const Vec v = model.v.col(0);
  const double two_lambda = u.dot(cov.sxy * v);
  CHECK((cov.sxy * v - two_lambda * (cov.sxx * u)).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((cov.sxy.transpose() * u - two_lambda * (cov.syy * v)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("graph term of the fitted model is non-increasing in gamma") {
  Prng rng(107);
  const std::vector<double> gammas = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  for (int trial = 0; trial < 20; ++trial) {
    const PairedViews views = random_views(5, 4, 30, rng);
    const SourceGraph graph = laplacian(random_adjacency(30, 0.4, rng));
    const GccaSolver solver(views, graph);
    double previous = std::numeric_limits<double>::infinity();
    for (double gamma : gammas) {
      const GccaModel model = solver.fit(gamma, 2);
      const double term = graph_term_value(model, views, graph);
      CHECK(term <= previous + 1e-8 * std::max(1.0, std::abs(previous)));
      previous = term;
    }
  }
}

TEST_CASE("scaling a view rescales its canonical matrix and fixes embeddings") {
  Prng rng(109);
  const Mat x_raw = random_matrix(5, 40, rng);
  const Mat y_raw = random_matrix(4, 40, rng);
  const SourceGraph graph = laplacian(random_adjacency(40, 0.4, rng));
  const double c = 3.7;

  const GccaModel base = fit_gcca(center(x_raw, y_raw), graph, 0.2, 2);
  const GccaModel scaled = fit_gcca(center(c * x_raw, y_raw), graph, 0.2, 2);
  CHECK((scaled.u - base.u / c).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((project_x(scaled, c * x_raw) - project_x(base, x_raw)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("simultaneous solve agrees with the sequential second pair") {
  Prng rng(113);
  const PairedViews views = random_views(4, 4, 50, rng);
  const GccaModel model = fit_cca(views, 2);
  // The block pencil yields the sequential solution pair-for-pair.
  const test::BlockCcaResult oracle = test::cca_block_pencil(covariances(views), 2);
  CHECK(test::max_diff_up_to_sign(oracle.u, model.u) < 1e-8);
  CHECK(test::max_diff_up_to_sign(oracle.v, model.v) < 1e-8);
}

TEST_CASE("projection subtracts the stored mean") {
  Prng rng(127);
  const Mat x_raw = random_matrix(4, 30, rng);
  const Mat y_raw = random_matrix(3, 30, rng);
  const PairedViews views = center(x_raw, y_raw);
  const GccaModel model = fit_cca(views, 2);

  // Training embeddings are whitened: (1/N) E E^T = I.
  const Mat emb = project_x(model, x_raw);
  const Mat gram = emb * emb.transpose() / 30.0;
  CHECK((gram - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);

  // Replicating the mean projects to zero.
  Mat mean_only(4, 5);
  for (Index j = 0; j < 5; ++j) mean_only.col(j) = model.x_mean;
  CHECK(project_x(model, mean_only).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(project_x(model, random_matrix(5, 3, rng)), DimensionMismatchError);
  CHECK_THROWS_AS(project_y(model, random_matrix(4, 3, rng)), DimensionMismatchError);
}

TEST_CASE("projection arithmetic on a hand-built model") {
  GccaModel model;
  model.u.resize(2, 1);
  model.u << 2.0, -1.0;
  model.x_mean.resize(2);
  model.x_mean << 1.0, 1.0;
  model.v = model.u;
  model.y_mean = model.x_mean;
  model.d = 1;

  Mat point(2, 1);
  point << 4.0, 3.0;
  // u^T (point - mean) = 2*3 - 1*2 = 4
  CHECK(project_x(model, point)(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("model files round-trip bit-exactly") {
  Prng rng(131);
  const PairedViews views = random_views(5, 4, 30, rng);
  const SourceGraph graph = laplacian(random_adjacency(30, 0.5, rng));
  const GccaModel model = fit_gcca(views, graph, 0.3, 2);

  std::stringstream buffer;
  save_model(model, false, buffer);
  const StoredModel back = load_model(buffer);
  REQUIRE(back.variant == "gcca");
  CHECK(back.primal.gamma == model.gamma);
  CHECK(back.primal.d == model.d);
  CHECK(std::memcmp(back.primal.u.data(), model.u.data(), sizeof(double) * model.u.size()) == 0);
  CHECK(std::memcmp(back.primal.v.data(), model.v.data(), sizeof(double) * model.v.size()) == 0);
  CHECK(std::memcmp(back.primal.x_mean.data(), model.x_mean.data(),
                    sizeof(double) * model.x_mean.size()) == 0);
  CHECK(std::memcmp(back.primal.singulars.data(), model.singulars.data(),
                    sizeof(double) * model.singulars.size()) == 0);
}
