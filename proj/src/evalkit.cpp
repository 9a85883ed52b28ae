#include "satforge/evalkit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "satforge/error.hpp"
#include "satforge/rng.hpp"

namespace satforge {
namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

std::size_t distinct_rows(const Matrix& x) {
  std::set<std::vector<double>> rows;
  for (std::size_t i = 0; i < x.rows(); ++i) rows.emplace(x.row(i).begin(), x.row(i).end());
  return rows.size();
}

// Index drawn with probability proportional to weights.
std::size_t weighted_pick(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double target = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    target -= weights[i];
    if (target < 0.0 && weights[i] > 0.0) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;
}

ClusterAssignment lloyd(const Matrix& x, const KMeansOptions& opt, Rng& rng) {
  const std::size_t n = x.rows(), d = x.cols();
  const std::size_t k = static_cast<std::size_t>(opt.k);
  ClusterAssignment a;
  a.centroids = Matrix(k, d);
  // k-means++ seeding.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng.uniform_index(n);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t pick = c == 0 ? first : weighted_pick(nearest, rng);
    std::copy(x.row(pick).begin(), x.row(pick).end(), a.centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], sq_dist(x.row(i), a.centroids.row(c)));
  }

  a.labels.assign(n, 0);
  for (a.iterations = 1; a.iterations <= opt.max_iterations; ++a.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = sq_dist(x.row(i), a.centroids.row(c));
        if (dd < best) {
          best = dd;
          a.labels[i] = static_cast<int>(c);
        }
      }
    }
    Matrix next(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(a.labels[i]);
      ++counts[c];
      auto dst = next.row(c);
      auto src = x.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (double& v : next.row(c)) v /= static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      // Re-seed from the point farthest from its current centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dd = sq_dist(x.row(i), next.row(static_cast<std::size_t>(a.labels[i])));
        if (dd > far_d) {
          far_d = dd;
          far = i;
        }
      }
      std::copy(x.row(far).begin(), x.row(far).end(), next.row(c).begin());
      a.labels[far] = static_cast<int>(c);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(sq_dist(next.row(c), a.centroids.row(c))));
    a.centroids = std::move(next);
    if (shift <= opt.tolerance) break;
  }
  // Final assignment against the final centroids.
  a.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double dd = sq_dist(x.row(i), a.centroids.row(c));
      if (dd < best) {
        best = dd;
        a.labels[i] = static_cast<int>(c);
      }
    }
    a.inertia += best;
  }
  return a;
}

struct Contingency {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  double n = 0.0;
};

Contingency contingency(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw DataError("label and cluster vectors differ in length");
  if (truth.empty()) throw DataError("empty labeling");
  Contingency t;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    t.joint[{truth[i], predicted[i]}] += 1.0;
    t.rows[truth[i]] += 1.0;
    t.cols[predicted[i]] += 1.0;
  }
  t.n = static_cast<double>(truth.size());
  return t;
}

double entropy(const std::map<int, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = c / n;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& x, const KMeansOptions& options) {
  if (options.k < 1) throw DataError("kmeans: k must be positive");
  if (options.restarts < 1) throw DataError("kmeans: restarts must be positive");
  if (static_cast<std::size_t>(options.k) > x.rows()) {
    throw DataError("kmeans: k = " + std::to_string(options.k) + " exceeds the number of points " + std::to_string(x.rows()));
  }
  if (distinct_rows(x) < static_cast<std::size_t>(options.k)) {
    throw DataError("kmeans: only " + std::to_string(distinct_rows(x)) + " distinct points for k = " + std::to_string(options.k));
  }
  ClusterAssignment best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(options.seed, Stream::kClustering, static_cast<std::uint64_t>(r));
    ClusterAssignment a = lloyd(x, options, rng);
    if (a.inertia < best.inertia) best = std::move(a);
  }
  return best;
}

double nmi(std::span<const int> truth, std::span<const int> predicted) {
  const Contingency t = contingency(truth, predicted);
  const double hu = entropy(t.rows, t.n);
  const double hv = entropy(t.cols, t.n);
  if (hu == 0.0 && hv == 0.0) return 1.0;
  if (hu == 0.0 || hv == 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [key, c] : t.joint) {
    const double pij = c / t.n;
    mi += pij * std::log(pij * t.n * t.n / (t.rows.at(key.first) * t.cols.at(key.second)));
  }
  return std::clamp(mi / (0.5 * (hu + hv)), 0.0, 1.0);
}

Purity purity(std::span<const int> truth, std::span<const int> predicted) {
  const Contingency t = contingency(truth, predicted);
  std::map<int, double> dominant;
  for (const auto& [key, c] : t.joint) dominant[key.second] = std::max(dominant[key.second], c);
  Purity p;
  for (const auto& [cluster, size] : t.cols) {
    p.macro += dominant[cluster] / size;
    p.weighted += dominant[cluster];
  }
  p.macro /= static_cast<double>(t.cols.size());
  p.weighted /= t.n;
  return p;
}

NullDistribution permutation_null(std::span<const int> truth, std::span<const int> predicted, int trials,
                                  std::uint64_t seed) {
  NullDistribution out;
  out.observed = nmi(truth, predicted);
  std::vector<int> shuffled(predicted.begin(), predicted.end());
  double below = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, Stream::kPermutation, static_cast<std::uint64_t>(t));
    std::copy(predicted.begin(), predicted.end(), shuffled.begin());
    rng.shuffle(std::span<int>(shuffled));
    const double v = nmi(truth, shuffled);
    out.null_nmi.push_back(v);
    if (v < out.observed) below += 1.0;
    else if (v == out.observed) below += 0.5;
  }
  out.percentile = trials > 0 ? 100.0 * below / trials : 0.0;
  return out;
}

Projection pca_2d(const Matrix& x) {
  if (x.cols() < 1) throw DataError("pca_2d: need at least one column");
  if (x.rows() < 2) throw DataError("pca_2d: need at least two points");
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  m.rowwise() -= m.colwise().mean();
  const Eigen::MatrixXd cov = (m.transpose() * m) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::VectorXd values = solver.eigenvalues();   // ascending
  const Eigen::MatrixXd vectors = solver.eigenvectors();
  double total = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) total += std::max(values(j), 0.0);

  Projection p;
  p.coords = Matrix(x.rows(), 2);
  for (int c = 0; c < 2 && c < d; ++c) {
    Eigen::VectorXd axis = vectors.col(d - 1 - c);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    const Eigen::VectorXd proj = m * axis;
    for (Eigen::Index i = 0; i < n; ++i) p.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) = proj(i);
    p.explained[c] = total > 0.0 ? std::max(values(d - 1 - c), 0.0) / total : 0.0;
  }
  return p;
}

std::vector<int> encode_labels(std::span<const std::string> labels, std::vector<std::string>* names) {
  std::map<std::string, int> ids;
  std::vector<std::string> order;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const std::string& l : labels) {
    auto [it, inserted] = ids.emplace(l, static_cast<int>(order.size()));
    if (inserted) order.push_back(l);
    out.push_back(it->second);
  }
  if (names) *names = std::move(order);
  return out;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::string Report::metrics_table() const {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "variant\tnmi_mean\tnmi_std\tpurity_macro_mean\tpurity_macro_std\tpurity_weighted_mean\tpurity_weighted_std"
         "\tk\tseeds\trestarts\tnull_percentile\tnmi_normalization\n";
  for (const VariantReport& v : variants) {
    const MetricsRow& m = v.metrics;
    out << m.variant << '\t' << m.nmi_mean << '\t' << m.nmi_std << '\t' << m.purity_macro_mean << '\t'
        << m.purity_macro_std << '\t' << m.purity_weighted_mean << '\t' << m.purity_weighted_std << '\t' << m.k << '\t';
    for (std::size_t i = 0; i < m.seeds.size(); ++i) out << (i ? "," : "") << m.seeds[i];
    out << '\t' << m.restarts << '\t';
    if (m.null_percentile >= 0.0) out << m.null_percentile;
    else out << "NA";
    out << "\tarithmetic\n";
  }
  return out.str();
}

Report report(std::span<const EmbeddingTable> tables, const ReportOptions& options) {
  if (tables.empty()) throw DataError("report: no embedding tables");
  Report rep;
  // Every table must cover the same instances with the same labels.
  const EmbeddingTable& ref = tables.front();
  for (const EmbeddingTable& t : tables) {
    if (t.rows.size() != ref.rows.size()) throw DataError("report: embedding tables cover different instance sets");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.rows[i].id != ref.rows[i].id || t.rows[i].family != ref.rows[i].family ||
          t.rows[i].feasibility != ref.rows[i].feasibility) {
        throw DataError("report: instance '" + t.rows[i].id + "' differs across embedding tables");
      }
    }
  }
  std::vector<std::size_t> keep;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < ref.rows.size(); ++i) {
    const EmbeddingRow& r = ref.rows[i];
    if (options.family_only) {
      keep.push_back(i);
      labels.push_back(r.family);
    } else if (r.feasibility) {
      keep.push_back(i);
      labels.push_back(r.family + "|" + std::string(to_string(*r.feasibility)));
    } else {
      ++rep.excluded_unknown;
    }
  }
  const std::vector<int> truth = encode_labels(labels, &rep.groups);
  const int k = options.k > 0 ? options.k : static_cast<int>(rep.groups.size());

  for (const EmbeddingTable& t : tables) {
    if (t.rows.empty()) throw DataError("report: empty embedding table");
    Matrix x(keep.size(), t.dim());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      const auto& v = t.rows[keep[i]].vector;
      std::copy(v.begin(), v.end(), x.row(i).begin());
    }
    VariantReport vr;
    MetricsRow& m = vr.metrics;
    m.variant = std::string(to_string(t.rows.front().variant));
    m.k = k;
    m.seeds = options.seeds;
    m.restarts = options.restarts;
    std::vector<double> nmis, macros, weighteds;
    std::vector<int> first_labels;
    for (std::uint64_t seed : options.seeds) {
      const ClusterAssignment a = kmeans(x, KMeansOptions{k, seed, options.restarts});
      if (first_labels.empty()) first_labels = a.labels;
      nmis.push_back(nmi(truth, a.labels));
      const Purity p = purity(truth, a.labels);
      macros.push_back(p.macro);
      weighteds.push_back(p.weighted);
    }
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double e : v) s += e;
      return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    m.nmi_per_seed = nmis;
    m.nmi_mean = mean(nmis);
    m.nmi_std = sample_std(nmis);
    m.purity_macro_mean = mean(macros);
    m.purity_macro_std = sample_std(macros);
    m.purity_weighted_mean = mean(weighteds);
    m.purity_weighted_std = sample_std(weighteds);
    if (options.null_trials > 0 && !first_labels.empty()) {
      m.null_percentile = permutation_null(truth, first_labels, options.null_trials, options.seeds.front()).percentile;
    }
    vr.svg = scatter_svg(pca_2d(x), truth, rep.groups, m.variant);
    rep.variants.push_back(std::move(vr));
  }
  return rep;
}

std::string scatter_svg(const Projection& projection, std::span<const int> groups,
                        std::span<const std::string> group_names, const std::string& title) {
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
                                             "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39"};
  constexpr double kW = 640, kH = 480, kPad = 40, kLegend = 180;
  const Matrix& c = projection.coords;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (c.rows() > 0) {
    xmin = xmax = c(0, 0);
    ymin = ymax = c(0, 1);
    for (std::size_t i = 0; i < c.rows(); ++i) {
      xmin = std::min(xmin, c(i, 0));
      xmax = std::max(xmax, c(i, 0));
      ymin = std::min(ymin, c(i, 1));
      ymax = std::max(ymax, c(i, 1));
    }
  }
  const double xr = xmax > xmin ? xmax - xmin : 1.0;
  const double yr = ymax > ymin ? ymax - ymin : 1.0;
  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW + kLegend << "\" height=\"" << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kPad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << title << " (PC1 "
      << projection.explained[0] * 100 << "%, PC2 " << projection.explained[1] * 100 << "%)</text>\n";
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const double px = kPad + (c(i, 0) - xmin) / xr * (kW - 2 * kPad);
    const double py = kH - kPad - (c(i, 1) - ymin) / yr * (kH - 2 * kPad);
    out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"4\" fill=\"" << kPalette[groups[i] % 14]
        << "\" fill-opacity=\"0.8\"/>\n";
  }
  for (std::size_t g = 0; g < group_names.size(); ++g) {
    const double y = kPad + 20.0 * static_cast<double>(g);
    out << "<circle cx=\"" << kW + 10 << "\" cy=\"" << y << "\" r=\"5\" fill=\"" << kPalette[g % 14] << "\"/>\n";
    out << "<text x=\"" << kW + 20 << "\" y=\"" << y + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << group_names[g] << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace satforge
