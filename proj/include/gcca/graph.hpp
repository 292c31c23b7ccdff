#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gcca/errors.hpp"
#include "gcca/types.hpp"

namespace gcca {

/// Weighted undirected graph over the N common sources. weights is symmetric
/// with a zero diagonal, degrees(i) = sum_j weights(i, j), and
/// laplacian = diag(degrees) - weights.
struct SourceGraph {
  Index n = 0;
  Mat weights;
  Vec degrees;
  Mat laplacian;

  double max_degree() const { return n > 0 ? degrees.maxCoeff() : 0.0; }
};

/// Builds degrees and Laplacian from a symmetric zero-diagonal adjacency.
SourceGraph laplacian(const Mat& weights);

/// Graph with no edges over n nodes.
SourceGraph empty_graph(Index n);

/// Adjacency over the columns of `sources`: w_ij is the cosine similarity of
/// columns i and j when one is among the k nearest same-class neighbors of the
/// other (Euclidean distance, ties to the lower index), else 0. Cosine values
/// are kept as computed, including negative ones.
SourceGraph cosine_class_graph(const Mat& sources, const std::vector<int>& labels, int k);

/// Same neighborhood rule with similarity read from a symmetric kernel matrix:
/// neighbors are ordered by descending kernel value and w_ij = kernel(i, j)
/// when the or-rule over same-class k1-neighborhoods selects the pair.
SourceGraph kernel_class_graph(const Mat& kernel, const std::vector<int>& labels, int k1);

enum class FilterKind { Identity, Power, Exponential };

struct SpectralFilterSpec {
  FilterKind kind = FilterKind::Identity;
  double param = 1.0;  // exponent p for Power, rate t for Exponential
};

SpectralFilterSpec parse_filter(const std::string& text);

/// Filtered eigenvalues r(lambda_i), by descending eigenvalue rank.
/// Negative eigenvalues are clamped to zero before a Power filter is applied.
Vec filtered_spectrum(const SourceGraph& graph, const SpectralFilterSpec& spec);

/// r(L) = sum_i r(lambda_i) u_i u_i^T; drop-in replacement for the Laplacian
/// in any of the solvers.
Mat spectral_filter(const SourceGraph& graph, const SpectralFilterSpec& spec);

/// Copy of the graph whose laplacian slot carries r(L) instead of L, so the
/// filtered regularizer can be passed to any solver taking a SourceGraph.
SourceGraph filtered_graph(const SourceGraph& graph, const SpectralFilterSpec& spec);

// Edge-list CSV: one "i,j,w" line per undirected edge (0-based, i < j), with a
// "# nodes N" header carrying the node count.
void save_edges_csv(const SourceGraph& graph, std::ostream& out);
void save_edges_csv(const SourceGraph& graph, const std::string& path);
SourceGraph load_edges_csv(std::istream& in);
SourceGraph load_edges_csv(const std::string& path);

}  // namespace gcca
