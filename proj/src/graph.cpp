#include "gcca/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "gcca/matkit.hpp"

namespace gcca {

namespace {

constexpr double kDiagTol = 1e-14;

void check_labels(const std::vector<int>& labels, Index n, const char* who) {
  if (static_cast<Index>(labels.size()) != n)
    throw DimensionMismatchError(std::string(who) + ": " + std::to_string(labels.size()) +
                                 " labels for " + std::to_string(n) + " samples");
}

std::map<int, std::vector<Index>> group_by_class(const std::vector<int>& labels) {
  std::map<int, std::vector<Index>> groups;
  for (Index i = 0; i < static_cast<Index>(labels.size()); ++i) groups[labels[i]].push_back(i);
  return groups;
}

void check_class_sizes(const std::map<int, std::vector<Index>>& groups, int k, const char* who) {
  if (k < 1) throw InvalidGraphError(std::string(who) + ": neighbor count must be >= 1");
  for (const auto& [cls, members] : groups) {
    if (static_cast<long>(members.size()) < k + 1)
      throw ClassTooSmallError(cls, static_cast<long>(members.size()), k + 1);
  }
}

// Marks (i, j) and (j, i) for the k same-class neighbors of every node under
// the given "closer-than" ordering; ties go to the lower sample index because
// candidates are scanned in index order with a strict comparison.
template <typename CloserThan>
std::vector<std::vector<bool>> neighbor_selection(const std::map<int, std::vector<Index>>& groups,
                                                  Index n, int k, CloserThan closer) {
  std::vector<std::vector<bool>> selected(n, std::vector<bool>(n, false));
  for (const auto& [cls, members] : groups) {
    for (Index j : members) {
      std::vector<Index> candidates;
      candidates.reserve(members.size() - 1);
      for (Index i : members)
        if (i != j) candidates.push_back(i);
      std::stable_sort(candidates.begin(), candidates.end(),
                       [&](Index a, Index b) { return closer(a, b, j); });
      for (int t = 0; t < k && t < static_cast<int>(candidates.size()); ++t) {
        selected[candidates[t]][j] = true;
        selected[j][candidates[t]] = true;
      }
    }
  }
  return selected;
}

}  // namespace

SourceGraph laplacian(const Mat& weights) {
  const Mat w = symmetrized(weights, "laplacian");
  if (w.rows() > 0 && w.diagonal().cwiseAbs().maxCoeff() > kDiagTol)
    throw InvalidGraphError("laplacian: adjacency has nonzero diagonal (self-loop)");

  SourceGraph g;
  g.n = w.rows();
  g.weights = w;
  g.weights.diagonal().setZero();
  g.degrees = g.weights.rowwise().sum();
  g.laplacian = Mat(g.degrees.asDiagonal());
  g.laplacian -= g.weights;
  return g;
}

SourceGraph empty_graph(Index n) { return laplacian(Mat::Zero(n, n)); }

SourceGraph cosine_class_graph(const Mat& sources, const std::vector<int>& labels, int k) {
  const Index n = sources.cols();
  check_labels(labels, n, "cosine_class_graph");
  const auto groups = group_by_class(labels);
  check_class_sizes(groups, k, "cosine_class_graph");

  Vec norms(n);
  for (Index i = 0; i < n; ++i) {
    norms(i) = sources.col(i).norm();
    if (norms(i) == 0.0) throw ZeroNormSampleError(i);
  }

  // Squared Euclidean distances drive the neighborhoods, cosine the weights.
  const Mat gram = sources.transpose() * sources;
  auto sqdist = [&](Index a, Index b) { return gram(a, a) + gram(b, b) - 2.0 * gram(a, b); };
  const auto selected = neighbor_selection(
      groups, n, k, [&](Index a, Index b, Index j) { return sqdist(a, j) < sqdist(b, j); });

  Mat w = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (selected[i][j]) w(i, j) = w(j, i) = gram(i, j) / (norms(i) * norms(j));
  return laplacian(w);
}

SourceGraph kernel_class_graph(const Mat& kernel, const std::vector<int>& labels, int k1) {
  const Mat ks = symmetrized(kernel, "kernel_class_graph");
  const Index n = ks.rows();
  check_labels(labels, n, "kernel_class_graph");
  const auto groups = group_by_class(labels);
  check_class_sizes(groups, k1, "kernel_class_graph");

  // Larger kernel value means nearer.
  const auto selected = neighbor_selection(
      groups, n, k1, [&](Index a, Index b, Index j) { return ks(a, j) > ks(b, j); });

  Mat w = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (selected[i][j]) w(i, j) = w(j, i) = ks(i, j);
  return laplacian(w);
}

SpectralFilterSpec parse_filter(const std::string& text) {
  if (text == "identity") return {FilterKind::Identity, 1.0};
  const auto open = text.find('(');
  if (open != std::string::npos && text.back() == ')') {
    const std::string name = text.substr(0, open);
    const std::string arg = text.substr(open + 1, text.size() - open - 2);
    char* end = nullptr;
    const double value = std::strtod(arg.c_str(), &end);
    if (end != arg.c_str() + arg.size())
      throw UnsupportedFilterError("bad filter parameter: " + text);
    if (name == "power") return {FilterKind::Power, value};
    if (name == "exponential") return {FilterKind::Exponential, value};
  }
  throw UnsupportedFilterError("unknown filter: " + text +
                               " (expected identity, power(p), exponential(t))");
}

Vec filtered_spectrum(const SourceGraph& graph, const SpectralFilterSpec& spec) {
  switch (spec.kind) {
    case FilterKind::Power:
      if (!(spec.param > 0.0)) throw UnsupportedFilterError("power filter needs p > 0");
      break;
    case FilterKind::Exponential:
      if (!(spec.param > 0.0)) throw UnsupportedFilterError("exponential filter needs t > 0");
      break;
    case FilterKind::Identity:
      break;
  }

  const SymEigResult eig = sym_eig(graph.laplacian);
  Vec out(eig.eigenvalues.size());
  for (Index i = 0; i < out.size(); ++i) {
    const double l = eig.eigenvalues(i);
    switch (spec.kind) {
      case FilterKind::Identity:
        out(i) = l;
        break;
      case FilterKind::Power:
        out(i) = std::pow(std::max(l, 0.0), spec.param);
        break;
      case FilterKind::Exponential:
        out(i) = std::exp(spec.param * l);
        break;
    }
  }
  return out;
}

Mat spectral_filter(const SourceGraph& graph, const SpectralFilterSpec& spec) {
  if (spec.kind == FilterKind::Identity) return graph.laplacian;
  const SymEigResult eig = sym_eig(graph.laplacian);
  const Vec values = filtered_spectrum(graph, spec);
  Mat out = eig.eigenvectors * values.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

SourceGraph filtered_graph(const SourceGraph& graph, const SpectralFilterSpec& spec) {
  SourceGraph out = graph;
  out.laplacian = spectral_filter(graph, spec);
  return out;
}

void save_edges_csv(const SourceGraph& graph, std::ostream& out) {
  out << "# nodes " << graph.n << "\n";
  char buf[64];
  for (Index i = 0; i < graph.n; ++i) {
    for (Index j = i + 1; j < graph.n; ++j) {
      if (graph.weights(i, j) != 0.0) {
        std::snprintf(buf, sizeof(buf), "%.17g", graph.weights(i, j));
        out << i << "," << j << "," << buf << "\n";
      }
    }
  }
}

void save_edges_csv(const SourceGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save_edges_csv(graph, out);
}

SourceGraph load_edges_csv(std::istream& in) {
  std::string line;
  long line_no = 0;
  Index n = -1;
  std::vector<std::tuple<Index, Index, double>> edges;
  Index max_index = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string word;
      long long count = 0;
      if (hdr >> word >> count && word == "nodes") n = static_cast<Index>(count);
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    long long i = 0, j = 0;
    double w = 0.0;
    for (int field = 0; field < 3; ++field) {
      if (!std::getline(row, cell, ','))
        throw ParseError("edge line needs i,j,w", line_no, field + 1);
      const char* begin = cell.c_str();
      char* end = nullptr;
      if (field < 3 - 1) {
        const long long value = std::strtoll(begin, &end, 10);
        if (end == begin || *end != '\0')
          throw ParseError("bad index '" + cell + "'", line_no, field + 1);
        (field == 0 ? i : j) = value;
      } else {
        w = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
          throw ParseError("bad weight '" + cell + "'", line_no, field + 1);
      }
    }
    if (std::getline(row, cell, ',')) throw ParseError("extra field", line_no, 4);
    if (i < 0 || j < 0) throw ParseError("negative index", line_no, 1);
    if (i == j) throw ParseError("self-loop edge", line_no, 1);
    edges.emplace_back(static_cast<Index>(i), static_cast<Index>(j), w);
    max_index = std::max({max_index, static_cast<Index>(i), static_cast<Index>(j)});
  }

  if (n < 0) n = max_index + 1;
  if (max_index >= n)
    throw InvalidGraphError("edge index " + std::to_string(max_index) +
                            " outside declared node count " + std::to_string(n));

  Mat w = Mat::Zero(n, n);
  std::set<std::pair<Index, Index>> seen;
  for (const auto& [i, j, weight] : edges) {
    const auto key = std::minmax(i, j);
    if (!seen.insert(key).second)
      throw InvalidGraphError("duplicate edge (" + std::to_string(i) + "," + std::to_string(j) +
                              ")");
    w(i, j) = w(j, i) = weight;
  }
  return laplacian(w);
}

SourceGraph load_edges_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_edges_csv(in);
}

}  // namespace gcca
