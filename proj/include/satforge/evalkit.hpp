#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "satforge/embeddings.hpp"
#include "satforge/matrix.hpp"

namespace satforge {

struct ClusterAssignment {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
  int iterations = 0;
};

struct KMeansOptions {
  int k = 2;
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iterations = 300;
  double tolerance = 1e-8;  // max centroid movement (Euclidean)
};

/// k-means++ seeding and Lloyd iterations; returns the lowest-inertia restart.
/// Empty clusters are re-seeded with the point farthest from its centroid.
/// Throws DataError if k > N or X has fewer than k distinct rows.
ClusterAssignment kmeans(const Matrix& x, const KMeansOptions& options);

/// Normalized mutual information with arithmetic-mean normalization, natural
/// logs. 1 when both partitions are a single block; 0 when exactly one is.
double nmi(std::span<const int> truth, std::span<const int> predicted);

struct Purity {
  double macro = 0.0;     // mean over clusters of dominant-class fraction
  double weighted = 0.0;  // sum of dominant-class counts / N
};
Purity purity(std::span<const int> truth, std::span<const int> predicted);

struct NullDistribution {
  double observed = 0.0;
  std::vector<double> null_nmi;
  /// Percentage of null draws strictly below the observed value, plus half
  /// of the ties.
  double percentile = 0.0;
};

/// NMI under `trials` seeded random permutations of `predicted`.
NullDistribution permutation_null(std::span<const int> truth, std::span<const int> predicted, int trials,
                                  std::uint64_t seed);

struct Projection {
  Matrix coords;                   // N x 2
  double explained[2] = {0.0, 0.0};  // fractions of total variance
};

/// Mean-centered projection onto the top-2 covariance eigenvectors; each
/// component's largest-magnitude loading is made positive.
Projection pca_2d(const Matrix& x);

/// Maps string labels to dense ids in first-seen order.
std::vector<int> encode_labels(std::span<const std::string> labels, std::vector<std::string>* names = nullptr);

struct MetricsRow {
  std::string variant;
  double nmi_mean = 0.0, nmi_std = 0.0;
  double purity_macro_mean = 0.0, purity_macro_std = 0.0;
  double purity_weighted_mean = 0.0, purity_weighted_std = 0.0;
  int k = 0;
  std::vector<std::uint64_t> seeds;
  int restarts = 0;
  /// Permutation-null percentile of the first seed's NMI (if trials > 0).
  double null_percentile = -1.0;
  std::vector<double> nmi_per_seed;
};

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_std(std::span<const double> values);

struct ReportOptions {
  int k = 0;  // 0 = number of ground-truth groups
  std::vector<std::uint64_t> seeds{0, 1, 2};
  int restarts = 10;
  int null_trials = 0;
  /// Group by family only instead of (family, feasibility).
  bool family_only = false;
};

struct VariantReport {
  MetricsRow metrics;
  std::string svg;
};

struct Report {
  std::vector<VariantReport> variants;
  std::size_t excluded_unknown = 0;  // rows without a feasibility label
  std::vector<std::string> groups;
  std::string metrics_table() const;
};

/// Ground-truth label per row: "family|SAT" or "family|UNSAT" (or family
/// alone when family_only). Rows with unknown feasibility are dropped from
/// composite grouping.
Report report(std::span<const EmbeddingTable> tables, const ReportOptions& options);

/// Self-contained SVG scatter with a legend of ground-truth groups.
std::string scatter_svg(const Projection& projection, std::span<const int> groups,
                        std::span<const std::string> group_names, const std::string& title);

}  // namespace satforge
