// gcca: graph-regularized canonical correlation analysis toolkit.
//
// Subcommands: fit, transform, evaluate, grid, graph build, graph export,
// fixture digits, fixture downsample. Every option is a key=value pair that
// can live in a config file (--config) or be passed as --key value; flags
// override the file.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gcca/dataset.hpp"
#include "gcca/digits.hpp"
#include "gcca/dual.hpp"
#include "gcca/format.hpp"
#include "gcca/graph.hpp"
#include "gcca/kernel.hpp"
#include "gcca/model_io.hpp"
#include "gcca/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gcca;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::map<std::string, std::string> kDefaults = {
    {"config", ""},
    {"variant", "gcca"},
    // data
    {"data.format", "csv"},
    {"data.x", ""},
    {"data.y", ""},
    {"data.images", ""},
    {"data.labels", ""},
    {"data.dx", "0"},
    {"data.rows_are_samples", "true"},
    {"data.labels_inline", "false"},
    // model
    {"model.d", "2"},
    {"model.gamma", "0"},
    {"model.epsilon", ""},
    {"model.jitter", "0"},
    {"model.path", ""},
    // grid
    {"grid.gamma.min", "1e-3"},
    {"grid.gamma.max", "1e3"},
    {"grid.gamma.count", "30"},
    {"grid.gamma.values", ""},
    {"grid.epsilon.min", "1e-3"},
    {"grid.epsilon.max", "1e3"},
    {"grid.epsilon.count", "30"},
    {"grid.epsilon.values", ""},
    // split / monte carlo
    {"split.n_train", "10"},
    {"split.tune_fraction", "0.5"},
    {"split.seed", "1"},
    {"mc.runs", "1"},
    {"mc.classes_per_run", "0"},
    // graph
    {"graph.mode", "build-cosine"},
    {"graph.k", "0"},
    {"graph.path", ""},
    {"graph.what", "weights"},
    // kernels
    {"kernel.x.kind", "gaussian"},
    {"kernel.x.bandwidth", "median"},
    {"kernel.y.kind", "gaussian"},
    {"kernel.y.bandwidth", "median"},
    {"kernel.s.kind", "gaussian"},
    {"kernel.s.bandwidth", "median"},
    // evaluation
    {"knn.k", "10"},
    // fixtures
    {"fixture.classes", "10"},
    {"fixture.per_class", "60"},
    {"fixture.seed", "1"},
    {"fixture.side", "20"},
    {"fixture.out_side", "20"},
    // transform
    {"transform.view", "x"},
    {"transform.train_x", ""},
    {"transform.train_y", ""},
    // misc
    {"output.dir", "."},
    {"output.path", ""},
    {"threads", "1"},
    {"dump_kernels", "false"},
    {"save_models", "true"},
    {"ablation", "false"},
};

struct Options {
  std::map<std::string, std::string> values = kDefaults;

  const std::string& str(const std::string& key) const { return values.at(key); }
  bool flag(const std::string& key) const {
    const std::string& v = values.at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("option " + key + " expects a boolean, got '" + v + "'");
  }
  long integer(const std::string& key) const {
    try {
      return std::stol(values.at(key));
    } catch (...) {
      throw UsageError("option " + key + " expects an integer, got '" + values.at(key) + "'");
    }
  }
  double number(const std::string& key) const {
    const std::string& v = values.at(key);
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
      throw UsageError("option " + key + " expects a number, got '" + v + "'");
    return out;
  }
  std::uint64_t seed(const std::string& key) const {
    try {
      return std::stoull(values.at(key));
    } catch (...) {
      throw UsageError("option " + key + " expects a seed, got '" + values.at(key) + "'");
    }
  }

  void set(const std::string& key, const std::string& value) {
    if (!values.count(key)) throw UsageError("unknown option '" + key + "'");
    values[key] = value;
  }
};

void load_config_file(Options& opts, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    opts.set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
}

void parse_flags(Options& opts, const std::vector<std::string>& args) {
  // First pass picks up --config so later flags override the file.
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      load_config_file(opts, args[i + 1]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      load_config_file(opts, args[i].substr(9));
    }
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + arg + "'");
    std::string key = arg.substr(2);
    std::string value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size()) throw UsageError("option --" + key + " needs a value");
      value = args[++i];
    }
    if (key == "config") continue;  // consumed above
    opts.set(key, value);
  }
}

void print_usage() {
  std::cout <<
      R"(gcca - graph-regularized canonical correlation analysis

usage: gcca <subcommand> [--config FILE] [--key value ...]

subcommands:
  fit                fit one model on a whole dataset and save it
  transform          embed new samples with a saved model
  evaluate           one train/tune/test protocol at fixed hyperparameters
  grid               full hyperparameter grid search with Monte-Carlo runs
  graph build        build a same-class neighborhood graph, write edge CSV
  graph export       dense weights/Laplacian CSV from an edge CSV
  fixture digits     deterministic synthetic digit-image IDX fixture
  fixture downsample halve IDX image resolution by block averaging

common options (config keys and flags share names):
  variant              cca | gcca | gdcca | gkcca
  data.format          csv | idx
  data.x, data.y       CSV views (samples in rows by default)
  data.images          IDX image file (with data.labels as the IDX label file)
  data.labels          label file (CSV: one integer per line; IDX as above)
  data.dx              split a single matrix into views at this feature index
  data.rows_are_samples / data.labels_inline
                       CSV layout switches
  model.d              number of canonical pairs
  model.gamma          graph regularization weight (fit/evaluate)
  model.epsilon        Tikhonov weight; empty = 1e-3 Tr(X^T X)/N
  model.jitter         ridge added to covariances or kernels
  grid.gamma.*         min/max/count (log-spaced) or explicit values "a,b,c"
  grid.epsilon.*       same for the dual/kernel ridge
  split.n_train        training samples per class; grid accepts "10,20,30"
  split.seed           Monte-Carlo base seed; run r uses seed + r
  mc.runs              Monte-Carlo repetitions
  mc.classes_per_run   draw this many classes per run (0 = all)
  graph.mode           build-cosine | build-kernel | import
  graph.k              same-class neighbor count (0 = per-class train count - 1)
  graph.path           edge CSV for import / graph export input
  kernel.{x,y,s}.kind  linear | gaussian, with .bandwidth a number or "median"
  knn.k                neighbors for classification
  output.dir, output.path, threads, dump_kernels, save_models
  ablation             grid: also run and report the gamma=0 baseline

exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
)";
}

void require_file(const std::string& path, const std::string& key) {
  if (path.empty()) throw UsageError("required option " + key + " is missing");
  if (!fs::exists(path)) throw UsageError(key + ": file not found: " + path);
}

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size())
      throw UsageError(key + ": bad number '" + cell + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(key + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<int> out;
  for (double v : parse_number_list(text, key)) out.push_back(static_cast<int>(v));
  return out;
}

struct LoadedData {
  Mat x, y;
  std::vector<int> labels;
};

std::vector<int> load_label_csv(const std::string& path) {
  const Dataset d = load_csv(path, {.rows_are_samples = true, .labels_inline = false});
  if (d.data.rows() != 1)
    throw UsageError("label file " + path + " must hold one integer per line");
  std::vector<int> out(d.data.cols());
  for (Index j = 0; j < d.data.cols(); ++j) out[j] = static_cast<int>(d.data(0, j));
  return out;
}

LoadedData load_views(const Options& opts, bool need_labels) {
  LoadedData out;
  const std::string format = opts.str("data.format");
  if (format == "idx") {
    require_file(opts.str("data.images"), "data.images");
    require_file(opts.str("data.labels"), "data.labels");
    const Dataset d = load_idx(opts.str("data.images"), opts.str("data.labels"));
    const long dx = opts.integer("data.dx");
    if (dx <= 0) throw UsageError("data.dx is required for idx input");
    std::tie(out.x, out.y) = split_views(d.data, dx);
    out.labels = d.labels;
  } else if (format == "csv") {
    require_file(opts.str("data.x"), "data.x");
    const CsvLayout layout{.rows_are_samples = opts.flag("data.rows_are_samples"),
                           .labels_inline = opts.flag("data.labels_inline")};
    const Dataset dx_data = load_csv(opts.str("data.x"), layout);
    out.labels = dx_data.labels;
    if (!opts.str("data.y").empty()) {
      require_file(opts.str("data.y"), "data.y");
      const CsvLayout plain{.rows_are_samples = layout.rows_are_samples, .labels_inline = false};
      out.x = dx_data.data;
      out.y = load_csv(opts.str("data.y"), plain).data;
      if (out.x.cols() != out.y.cols())
        throw UsageError("data.x and data.y disagree on the sample count");
    } else {
      const long dx = opts.integer("data.dx");
      if (dx <= 0) throw UsageError("provide data.y or a positive data.dx split point");
      std::tie(out.x, out.y) = split_views(dx_data.data, dx);
    }
    if (!opts.str("data.labels").empty()) {
      require_file(opts.str("data.labels"), "data.labels");
      out.labels = load_label_csv(opts.str("data.labels"));
    }
  } else {
    throw UsageError("data.format must be csv or idx, got '" + format + "'");
  }

  if (!out.labels.empty() && static_cast<Index>(out.labels.size()) != out.x.cols())
    throw UsageError("label count does not match the sample count");
  if (need_labels && out.labels.empty())
    throw UsageError("this command needs labels (data.labels or data.labels_inline)");
  return out;
}

GraphSpec graph_spec_from(const Options& opts) {
  GraphSpec spec;
  const std::string mode = opts.str("graph.mode");
  if (mode == "build-cosine")
    spec.mode = GraphSpec::Mode::BuildCosine;
  else if (mode == "build-kernel")
    spec.mode = GraphSpec::Mode::BuildKernel;
  else if (mode == "import")
    spec.mode = GraphSpec::Mode::Import;
  else
    throw UsageError("graph.mode must be build-cosine, build-kernel or import");
  spec.k = static_cast<int>(opts.integer("graph.k"));
  spec.source_kernel = parse_kernel(opts.str("kernel.s.kind"), opts.str("kernel.s.bandwidth"));
  if (spec.mode == GraphSpec::Mode::Import) {
    require_file(opts.str("graph.path"), "graph.path");
    spec.imported_weights = load_edges_csv(opts.str("graph.path")).weights;
  }
  return spec;
}

SolveOptions solve_options_from(const Options& opts) {
  SolveOptions solve;
  solve.jitter = opts.number("model.jitter");
  solve.kernel_x = parse_kernel(opts.str("kernel.x.kind"), opts.str("kernel.x.bandwidth"));
  solve.kernel_y = parse_kernel(opts.str("kernel.y.kind"), opts.str("kernel.y.bandwidth"));
  solve.threads = static_cast<int>(opts.integer("threads"));
  return solve;
}

HyperGrid grid_from(const Options& opts) {
  HyperGrid grid;
  if (!opts.str("grid.gamma.values").empty())
    grid.gamma_values = parse_number_list(opts.str("grid.gamma.values"), "grid.gamma.values");
  else
    grid.gamma_values =
        HyperGrid::log_space(opts.number("grid.gamma.min"), opts.number("grid.gamma.max"),
                             static_cast<int>(opts.integer("grid.gamma.count")));
  if (!opts.str("grid.epsilon.values").empty())
    grid.epsilon_values =
        parse_number_list(opts.str("grid.epsilon.values"), "grid.epsilon.values");
  else
    grid.epsilon_values =
        HyperGrid::log_space(opts.number("grid.epsilon.min"), opts.number("grid.epsilon.max"),
                             static_cast<int>(opts.integer("grid.epsilon.count")));
  return grid;
}

std::string output_path(const Options& opts, const std::string& fallback_name) {
  if (!opts.str("output.path").empty()) return opts.str("output.path");
  fs::create_directories(opts.str("output.dir"));
  return (fs::path(opts.str("output.dir")) / fallback_name).string();
}

double resolve_epsilon(const Options& opts, const Mat& x_view) {
  if (!opts.str("model.epsilon").empty()) return opts.number("model.epsilon");
  const Mat centered = x_view.colwise() - Vec(x_view.rowwise().mean());
  return 1e-3 * centered.squaredNorm() / static_cast<double>(x_view.cols());
}

int graph_auto_k(const std::vector<int>& labels) {
  std::map<int, int> counts;
  for (int label : labels) ++counts[label];
  int smallest = std::numeric_limits<int>::max();
  for (const auto& [cls, count] : counts) smallest = std::min(smallest, count);
  return std::max(1, smallest - 1);
}

SourceGraph build_whole_data_graph(const GraphSpec& spec, const PairedViews& views,
                                   const std::vector<int>& labels) {
  if (spec.mode == GraphSpec::Mode::Import) {
    if (spec.imported_weights.rows() != views.n)
      throw UsageError("imported graph size does not match the sample count");
    return laplacian(spec.imported_weights);
  }
  const int k = spec.k > 0 ? spec.k : graph_auto_k(labels);
  Mat stacked(views.dx() + views.dy(), views.n);
  stacked.topRows(views.dx()) = views.x;
  stacked.bottomRows(views.dy()) = views.y;
  if (spec.mode == GraphSpec::Mode::BuildCosine) return cosine_class_graph(stacked, labels, k);
  const KernelSpec resolved = resolve_bandwidth(spec.source_kernel, stacked);
  return kernel_class_graph(center_kernel(gram(stacked, resolved)), labels, k);
}

void dump_kernel_csv(const Options& opts, const std::string& name, const Mat& k) {
  fs::create_directories(opts.str("output.dir"));
  const std::string path = (fs::path(opts.str("output.dir")) / name).string();
  save_csv(path, k, {});
  std::cout << "wrote " << path << "\n";
}

// --- subcommands ---

int run_fit(const Options& opts) {
  const Variant variant = parse_variant(opts.str("variant"));
  const bool needs_graph = variant != Variant::Cca;
  const GraphSpec spec = needs_graph ? graph_spec_from(opts) : GraphSpec{};
  const bool class_graph = needs_graph && spec.mode != GraphSpec::Mode::Import;
  const LoadedData data = load_views(opts, class_graph);

  const PairedViews views = center(data.x, data.y);
  const Index d = opts.integer("model.d");
  const double gamma = opts.number("model.gamma");
  const double jitter = opts.number("model.jitter");

  SourceGraph graph;
  if (needs_graph) graph = build_whole_data_graph(spec, views, data.labels);

  fs::create_directories(opts.str("output.dir"));
  const std::string model_path = output_path(opts, "model-" + to_string(variant) + ".txt");

  auto write_train_views = [&](const Mat& x_raw, const Mat& y_raw) {
    const std::string xp = (fs::path(opts.str("output.dir")) / "train-x.csv").string();
    const std::string yp = (fs::path(opts.str("output.dir")) / "train-y.csv").string();
    save_csv(xp, x_raw, {.rows_are_samples = true, .labels_inline = false});
    save_csv(yp, y_raw, {.rows_are_samples = true, .labels_inline = false});
    return std::make_pair(xp, yp);
  };

  switch (variant) {
    case Variant::Cca: {
      const GccaModel model = fit_cca(views, d, jitter);
      save_model_file(model, true, model_path);
      break;
    }
    case Variant::Gcca: {
      const GccaModel model = fit_gcca(views, graph, gamma, d, jitter);
      save_model_file(model, false, model_path);
      break;
    }
    case Variant::Gdcca: {
      const double epsilon = resolve_epsilon(opts, data.x);
      const DualModel model = fit_gdcca(views, graph, gamma, epsilon, d);
      const auto [xp, yp] = write_train_views(data.x, data.y);
      save_model_file(model, xp, yp, model_path);
      break;
    }
    case Variant::Gkcca: {
      const double epsilon = resolve_epsilon(opts, data.x);
      const KernelSpec kx_spec = resolve_bandwidth(
          parse_kernel(opts.str("kernel.x.kind"), opts.str("kernel.x.bandwidth")), data.x);
      const KernelSpec ky_spec = resolve_bandwidth(
          parse_kernel(opts.str("kernel.y.kind"), opts.str("kernel.y.bandwidth")), data.y);
      const KernelModel model =
          fit_gkcca_views(data.x, data.y, kx_spec, ky_spec, graph, gamma, epsilon, d, jitter);
      if (opts.flag("dump_kernels")) {
        dump_kernel_csv(opts, "kx.csv", center_kernel(gram(data.x, model.kernel_x)));
        dump_kernel_csv(opts, "ky.csv", center_kernel(gram(data.y, model.kernel_y)));
      }
      const auto [xp, yp] = write_train_views(data.x, data.y);
      save_model_file(model, xp, yp, model_path);
      break;
    }
  }
  std::cout << "wrote " << model_path << "\n";
  return kExitOk;
}

Mat load_single_matrix(const Options& opts) {
  require_file(opts.str("data.x"), "data.x");
  const CsvLayout layout{.rows_are_samples = opts.flag("data.rows_are_samples"),
                         .labels_inline = opts.flag("data.labels_inline")};
  return load_csv(opts.str("data.x"), layout).data;
}

int run_transform(const Options& opts) {
  require_file(opts.str("model.path"), "model.path");
  const StoredModel stored = load_model_file(opts.str("model.path"));
  const bool view_x = opts.str("transform.view") == "x";
  if (!view_x && opts.str("transform.view") != "y")
    throw UsageError("transform.view must be x or y");
  const Mat data = load_single_matrix(opts);

  auto train_ref = [&](const std::string& recorded, const std::string& key) {
    const std::string& override_path = opts.str(key);
    const std::string path = override_path.empty() ? recorded : override_path;
    if (path.empty() || path == "-")
      throw UsageError("model has no training data reference; pass --" + key);
    require_file(path, key);
    return load_csv(path, {.rows_are_samples = true, .labels_inline = false}).data;
  };

  Mat embeddings;
  if (stored.variant == "cca" || stored.variant == "gcca") {
    embeddings = view_x ? project_x(stored.primal, data) : project_y(stored.primal, data);
  } else if (stored.variant == "gdcca") {
    DualModel model = stored.dual;
    if (view_x) {
      const Mat raw = train_ref(stored.x_ref, "transform.train_x");
      model.train_x = raw.colwise() - model.x_mean;
      embeddings = dual_project_x(model, data);
    } else {
      const Mat raw = train_ref(stored.y_ref, "transform.train_y");
      model.train_y = raw.colwise() - model.y_mean;
      embeddings = dual_project_y(model, data);
    }
  } else if (stored.variant == "gkcca") {
    KernelModel model = stored.kernel;
    if (view_x) {
      model.train_x = train_ref(stored.x_ref, "transform.train_x");
      embeddings = project_kernel_x(model, data);
    } else {
      model.train_y = train_ref(stored.y_ref, "transform.train_y");
      embeddings = project_kernel_y(model, data);
    }
  } else {
    throw UsageError("unknown model variant '" + stored.variant + "'");
  }

  const std::string path = output_path(opts, "embeddings.csv");
  save_csv(path, embeddings, {.rows_are_samples = true, .labels_inline = false});
  std::cout << "wrote " << path << " (" << embeddings.cols() << " samples, " << embeddings.rows()
            << " dimensions)\n";
  return kExitOk;
}

SplitPlan plan_from(const Options& opts, int n_train) {
  SplitPlan plan;
  plan.n_train_per_class = n_train;
  plan.tune_fraction = opts.number("split.tune_fraction");
  plan.test_fraction = 1.0 - plan.tune_fraction;
  plan.seed = opts.seed("split.seed");
  return plan;
}

int run_evaluate(const Options& opts) {
  const Variant variant = parse_variant(opts.str("variant"));
  const LoadedData data = load_views(opts, true);
  const std::vector<int> n_train_list = parse_int_list(opts.str("split.n_train"), "split.n_train");
  if (n_train_list.size() != 1) throw UsageError("evaluate expects a single split.n_train value");

  HyperGrid grid;
  grid.gamma_values = {opts.number("model.gamma")};
  grid.epsilon_values = {resolve_epsilon(opts, data.x)};
  const GraphSpec spec = variant == Variant::Cca ? GraphSpec{} : graph_spec_from(opts);

  McOptions mc;
  mc.runs = static_cast<int>(opts.integer("mc.runs"));
  mc.classes_per_run = static_cast<int>(opts.integer("mc.classes_per_run"));

  const McSummary summary = evaluate_mc(
      variant, data.x, data.y, data.labels, spec, grid, plan_from(opts, n_train_list[0]),
      opts.integer("model.d"), static_cast<int>(opts.integer("knn.k")), mc,
      solve_options_from(opts));

  const std::string path = output_path(opts, "report.txt");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_report(out, summary);
  std::cout << "variant=" << to_string(variant)
            << " mean_test_acc=" << fmt_g17(summary.mean_accuracy)
            << " std_test_acc=" << fmt_g17(summary.std_accuracy) << "\n"
            << "wrote " << path << "\n";
  return kExitOk;
}

int run_grid(const Options& opts) {
  const Variant variant = parse_variant(opts.str("variant"));
  const LoadedData data = load_views(opts, true);
  const HyperGrid grid = grid_from(opts);
  const GraphSpec spec = variant == Variant::Cca ? GraphSpec{} : graph_spec_from(opts);
  const SolveOptions solve = solve_options_from(opts);
  const Index d = opts.integer("model.d");
  const int knn_k = static_cast<int>(opts.integer("knn.k"));

  McOptions mc;
  mc.runs = static_cast<int>(opts.integer("mc.runs"));
  mc.classes_per_run = static_cast<int>(opts.integer("mc.classes_per_run"));

  fs::create_directories(opts.str("output.dir"));
  const fs::path out_dir(opts.str("output.dir"));
  const bool save_models = opts.flag("save_models");

  std::vector<CurvePoint> curve;
  for (int n_train : parse_int_list(opts.str("split.n_train"), "split.n_train")) {
    const std::string suffix = "-ntr" + std::to_string(n_train);
    ModelSink sink;
    if (save_models) {
      sink = [&, suffix](int run, const FittedModel& model) {
        const std::string stem = "model" + suffix + "-run" + std::to_string(run);
        const std::string model_path = (out_dir / (stem + ".txt")).string();
        switch (model.variant) {
          case Variant::Cca:
            save_model_file(model.primal, true, model_path);
            break;
          case Variant::Gcca:
            save_model_file(model.primal, false, model_path);
            break;
          case Variant::Gdcca: {
            const std::string xp = (out_dir / (stem + "-train-x.csv")).string();
            const std::string yp = (out_dir / (stem + "-train-y.csv")).string();
            save_csv(xp, model.dual.train_x.colwise() + model.dual.x_mean,
                     {.rows_are_samples = true, .labels_inline = false});
            save_csv(yp, model.dual.train_y.colwise() + model.dual.y_mean,
                     {.rows_are_samples = true, .labels_inline = false});
            save_model_file(model.dual, xp, yp, model_path);
            break;
          }
          case Variant::Gkcca: {
            const std::string xp = (out_dir / (stem + "-train-x.csv")).string();
            const std::string yp = (out_dir / (stem + "-train-y.csv")).string();
            save_csv(xp, model.kernel.train_x, {.rows_are_samples = true, .labels_inline = false});
            save_csv(yp, model.kernel.train_y, {.rows_are_samples = true, .labels_inline = false});
            save_model_file(model.kernel, xp, yp, model_path);
            break;
          }
        }
      };
    }

    const McSummary summary = evaluate_mc(variant, data.x, data.y, data.labels, spec, grid,
                                          plan_from(opts, n_train), d, knn_k, mc, solve, sink);
    const std::string report_path = (out_dir / ("report" + suffix + ".txt")).string();
    std::ofstream out(report_path);
    if (!out) throw IoError("cannot open " + report_path + " for writing");
    write_report(out, summary);
    std::cout << "n_train=" << n_train << " mean_test_acc=" << fmt_g17(summary.mean_accuracy)
              << " std_test_acc=" << fmt_g17(summary.std_accuracy) << "\n";
    curve.push_back({n_train, summary.mean_accuracy, summary.std_accuracy});

    // Optional unregularized baseline over the same splits: gamma pinned to 0.
    if (opts.flag("ablation") && variant != Variant::Cca) {
      HyperGrid zero = grid;
      zero.gamma_values = {0.0};
      const McSummary baseline = evaluate_mc(variant, data.x, data.y, data.labels, spec, zero,
                                             plan_from(opts, n_train), d, knn_k, mc, solve);
      const std::string base_path = (out_dir / ("report" + suffix + "-gamma0.txt")).string();
      std::ofstream base_out(base_path);
      if (!base_out) throw IoError("cannot open " + base_path + " for writing");
      write_report(base_out, baseline);
      std::cout << "n_train=" << n_train
                << " gamma0_mean_test_acc=" << fmt_g17(baseline.mean_accuracy)
                << " std_test_acc=" << fmt_g17(baseline.std_accuracy) << "\n";
    }
  }

  const std::string curve_path = (out_dir / "curve.txt").string();
  std::ofstream curve_out(curve_path);
  write_curve(curve_out, curve);
  std::cout << "wrote " << curve_path << "\n";
  return kExitOk;
}

int run_graph_build(const Options& opts) {
  const GraphSpec spec = graph_spec_from(opts);
  if (spec.mode == GraphSpec::Mode::Import)
    throw UsageError("graph build expects graph.mode build-cosine or build-kernel");
  const LoadedData data = load_views(opts, true);
  const PairedViews views = center(data.x, data.y);
  const SourceGraph graph = build_whole_data_graph(spec, views, data.labels);
  const std::string path = output_path(opts, "edges.csv");
  save_edges_csv(graph, path);
  std::cout << "wrote " << path << " (" << graph.n << " nodes)\n";
  return kExitOk;
}

int run_graph_export(const Options& opts) {
  require_file(opts.str("graph.path"), "graph.path");
  const SourceGraph graph = load_edges_csv(opts.str("graph.path"));
  const std::string what = opts.str("graph.what");
  const std::string path = output_path(opts, what + ".csv");
  if (what == "weights")
    save_csv(path, graph.weights, {});
  else if (what == "laplacian")
    save_csv(path, graph.laplacian, {});
  else if (what == "degrees")
    save_csv(path, graph.degrees, {});
  else
    throw UsageError("graph.what must be weights, laplacian or degrees");
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

int run_fixture_digits(const Options& opts) {
  const Dataset digits = make_synthetic_digits(static_cast<int>(opts.integer("fixture.classes")),
                                               static_cast<int>(opts.integer("fixture.per_class")),
                                               opts.seed("fixture.seed"),
                                               static_cast<int>(opts.integer("fixture.side")));
  fs::create_directories(opts.str("output.dir"));
  const int side = static_cast<int>(opts.integer("fixture.side"));
  const std::string images = (fs::path(opts.str("output.dir")) / "digits-images.idx").string();
  const std::string labels = (fs::path(opts.str("output.dir")) / "digits-labels.idx").string();
  save_idx_images(images, digits.data, side, side);
  save_idx_labels(labels, digits.labels);
  std::cout << "wrote " << images << " and " << labels << " (" << digits.data.cols()
            << " images)\n";
  return kExitOk;
}

int run_fixture_downsample(const Options& opts) {
  require_file(opts.str("data.images"), "data.images");
  require_file(opts.str("data.labels"), "data.labels");
  int rows = 0, cols = 0;
  const Mat images = load_idx_images(opts.str("data.images"), &rows, &cols);
  if (rows != cols) throw UsageError("fixture downsample expects square images");
  const std::vector<int> labels = load_idx_labels(opts.str("data.labels"));
  const int out_side = static_cast<int>(opts.integer("fixture.out_side"));
  const Mat down = block_downsample(images, rows, out_side);

  fs::create_directories(opts.str("output.dir"));
  const std::string images_path =
      (fs::path(opts.str("output.dir")) / "downsampled-images.idx").string();
  const std::string labels_path =
      (fs::path(opts.str("output.dir")) / "downsampled-labels.idx").string();
  save_idx_images(images_path, down, out_side, out_side);
  save_idx_labels(labels_path, labels);
  std::cout << "wrote " << images_path << " (" << out_side << "x" << out_side << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    print_usage();
    return kExitOk;
  }

  std::string command = args[0];
  std::size_t consumed = 1;
  if ((command == "graph" || command == "fixture") && args.size() > 1 &&
      args[1].rfind("--", 0) != 0) {
    command += " " + args[1];
    consumed = 2;
  }
  const std::vector<std::string> rest(args.begin() + consumed, args.end());
  if (std::find(rest.begin(), rest.end(), "--help") != rest.end()) {
    print_usage();
    return kExitOk;
  }

  Options opts;
  try {
    parse_flags(opts, rest);
    if (command == "fit") return run_fit(opts);
    if (command == "transform") return run_transform(opts);
    if (command == "evaluate") return run_evaluate(opts);
    if (command == "grid") return run_grid(opts);
    if (command == "graph build") return run_graph_build(opts);
    if (command == "graph export") return run_graph_export(opts);
    if (command == "fixture digits") return run_fixture_digits(opts);
    if (command == "fixture downsample") return run_fixture_downsample(opts);
    throw UsageError("unknown subcommand '" + command + "' (see gcca --help)");
  } catch (const UsageError& e) {
    std::cerr << "gcca: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "gcca: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "gcca: internal error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
