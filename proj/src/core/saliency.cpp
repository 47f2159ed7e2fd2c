#include "ans/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ans/error.hpp"
#include "text.hpp"

namespace ans {
namespace {

double bin_edge(std::size_t r, std::size_t bins) {
  return static_cast<double>(r) / static_cast<double>(bins);
}

// 1 + sum(p log2 p) / log2(occupied), over the given counts.
double normalized_entropy_difference(std::span<const std::size_t> counts, std::size_t total,
                                     std::size_t occupied) {
  if (occupied <= 1) return 1.0;
  double acc = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    acc += p * std::log2(p);
  }
  return std::clamp(1.0 + acc / std::log2(static_cast<double>(occupied)), 0.0, 1.0);
}

double clamp_proportion(double q) {
  return std::clamp(q, kProportionEpsilon, 1.0 - kProportionEpsilon);
}

}  // namespace

std::size_t ActivationHistogram::occupied_bins() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
}

ActivationHistogram ActivationHistogram::swapped() const {
  ActivationHistogram out = *this;
  std::swap(out.class0, out.class1);
  std::swap(out.n0, out.n1);
  return out;
}

std::size_t bin_index(double activation, std::size_t bins) noexcept {
  auto idx = static_cast<std::size_t>(activation * static_cast<double>(bins));
  idx = std::min(idx, bins - 1);
  // Keep agreement with the interval edges r/k when a*k rounds across one.
  if (idx > 0 && activation < bin_edge(idx, bins)) --idx;
  if (idx + 1 < bins && activation >= bin_edge(idx + 1, bins)) ++idx;
  return idx;
}

ActivationHistogram build_histogram(std::span<const double> activations,
                                    std::span<const int> labels, std::size_t bins) {
  if (bins < 2) fail(ErrorCode::kInvalidArgument, "histogram needs at least 2 bins");
  if (activations.empty()) fail(ErrorCode::kEmpty, "histogram of an empty activation vector");
  if (labels.size() != activations.size()) {
    fail(ErrorCode::kDimensionMismatch, "histogram: " + std::to_string(activations.size()) +
                                            " activations but " + std::to_string(labels.size()) +
                                            " labels");
  }
  ActivationHistogram h;
  h.bins = bins;
  h.counts.assign(bins, 0);
  h.class0.assign(bins, 0);
  h.class1.assign(bins, 0);
  for (std::size_t i = 0; i < activations.size(); ++i) {
    const double a = activations[i];
    if (!(a >= 0.0 && a <= 1.0))
      fail(ErrorCode::kInvalidArgument, "activation " + std::to_string(a) + " outside [0,1]");
    const std::size_t r = bin_index(a, bins);
    ++h.counts[r];
    if (labels[i] == 0) {
      ++h.class0[r];
      ++h.n0;
    } else if (labels[i] == 1) {
      ++h.class1[r];
      ++h.n1;
    } else {
      fail(ErrorCode::kLabel, "label " + std::to_string(labels[i]) + " is not 0 or 1");
    }
  }
  h.total = activations.size();
  return h;
}

double ned(const ActivationHistogram& hist) {
  if (hist.total == 0) fail(ErrorCode::kEmpty, "NED of an empty histogram");
  return normalized_entropy_difference(hist.counts, hist.total, hist.occupied_bins());
}

double ned_class(const ActivationHistogram& hist, int label) {
  if (label != 0 && label != 1) fail(ErrorCode::kLabel, "class must be 0 or 1");
  const auto& counts = label == 0 ? hist.class0 : hist.class1;
  const std::size_t n = label == 0 ? hist.n0 : hist.n1;
  if (n == 0) fail(ErrorCode::kEmpty, "class " + std::to_string(label) + " has no samples");
  return normalized_entropy_difference(counts, n, hist.occupied_bins());
}

std::vector<std::optional<double>> binomial_proportions(const ActivationHistogram& hist) {
  std::vector<std::optional<double>> q(hist.bins);
  for (std::size_t r = 0; r < hist.bins; ++r) {
    if (hist.counts[r] > 0)
      q[r] = static_cast<double>(hist.class1[r]) / static_cast<double>(hist.counts[r]);
  }
  return q;
}

std::vector<double> reference_distribution(std::size_t bins) {
  if (bins < 2) fail(ErrorCode::kInvalidArgument, "reference distribution needs k >= 2");
  std::vector<double> p(bins, 0.0);
  const double half = static_cast<double>(bins) / 2.0;
  for (std::size_t r = 2; r <= bins; ++r) {
    if (static_cast<double>(r) >= half) p[r - 1] = 1.0;
  }
  return p;
}

double wce(const ActivationHistogram& hist, int orientation) {
  if (orientation != 0 && orientation != 1)
    fail(ErrorCode::kInvalidArgument, "orientation must be 0 or 1");
  if (hist.total == 0) fail(ErrorCode::kEmpty, "WCE of an empty histogram");
  const auto reference = reference_distribution(hist.bins);
  double acc = 0.0;
  for (std::size_t r = 0; r < hist.bins; ++r) {
    const std::size_t c = hist.counts[r];
    if (c == 0) continue;
    const double weight = static_cast<double>(c) / static_cast<double>(hist.total);
    const double log_q1 = std::log2(clamp_proportion(static_cast<double>(hist.class1[r]) / c));
    const double log_q0 = std::log2(clamp_proportion(static_cast<double>(hist.class0[r]) / c));
    const double p = orientation == 1 ? reference[r] : 1.0 - reference[r];
    acc += weight * (-p * log_q1 - (1.0 - p) * log_q0);
  }
  return acc;
}

NodeSaliency sns(const ActivationHistogram& hist, std::size_t node) {
  if (hist.n0 == 0 || hist.n1 == 0)
    fail(ErrorCode::kInvalidArgument, "saliency needs samples from both classes");
  NodeSaliency out;
  out.node = node;
  out.wce0 = wce(hist, 0);
  out.wce1 = wce(hist, 1);
  out.sns = std::min(out.wce0, out.wce1);
  out.ned = ned(hist);
  out.ned0 = ned_class(hist, 0);
  out.ned1 = ned_class(hist, 1);
  out.good_classifier = out.ned < out.ned0 && out.ned < out.ned1;
  return out;
}

std::size_t SaliencyReport::rank_of(std::size_t node) const {
  auto it = std::find(ranking.begin(), ranking.end(), node);
  if (it == ranking.end()) fail(ErrorCode::kInvalidArgument, "node not in report");
  return static_cast<std::size_t>(it - ranking.begin()) + 1;
}

SaliencyReport rank_nodes(const Matrix& activations, std::span<const int> labels,
                          std::size_t bins) {
  if (activations.cols() != labels.size()) {
    fail(ErrorCode::kDimensionMismatch, "activations cover " +
                                            std::to_string(activations.cols()) +
                                            " samples but there are " +
                                            std::to_string(labels.size()) + " labels");
  }
  SaliencyReport report;
  const std::size_t m = activations.rows();
  for (std::size_t s = 0; s < m; ++s) {
    report.histograms.push_back(build_histogram(activations.row(s), labels, bins));
    report.nodes.push_back(sns(report.histograms.back(), s + 1));
  }
  report.ranking.resize(m);
  std::iota(report.ranking.begin(), report.ranking.end(), 1);
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return report.nodes[a - 1].sns < report.nodes[b - 1].sns;
                   });
  return report;
}

WeightProfile node_weight_profile(const AutoencoderModel& model, std::size_t node,
                                  std::size_t top_n) {
  if (node < 1 || node > model.hidden_width()) {
    fail(ErrorCode::kInvalidArgument, "node " + std::to_string(node) + " outside 1.." +
                                          std::to_string(model.hidden_width()));
  }
  WeightProfile p;
  p.node = node;
  auto row = model.weights.row(node - 1);
  p.weights.assign(row.begin(), row.end());
  const auto [lo, hi] = std::minmax_element(p.weights.begin(), p.weights.end());
  p.lo = *lo;
  p.hi = *hi;
  p.histogram.assign(kWeightHistogramBins, 0);
  const double width = p.hi - p.lo;
  for (double w : p.weights) {
    std::size_t b = 0;
    if (width > 0.0) {
      b = static_cast<std::size_t>((w - p.lo) / width * kWeightHistogramBins);
      b = std::min(b, kWeightHistogramBins - 1);
    }
    ++p.histogram[b];
  }
  std::vector<std::size_t> order(p.weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(p.weights[a]) > std::abs(p.weights[b]);
  });
  order.resize(std::min(top_n, order.size()));
  p.top_features = std::move(order);
  return p;
}

void write_report_csv(const SaliencyReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write report file " + path.string());
  std::vector<std::size_t> rank(report.nodes.size() + 1);
  for (std::size_t i = 0; i < report.ranking.size(); ++i) rank[report.ranking[i]] = i + 1;
  out << "node,sns,wce0,wce1,ned,ned0,ned1,good_classifier,rank\n";
  for (const auto& n : report.nodes) {
    out << n.node << ',' << text::format_double(n.sns) << ',' << text::format_double(n.wce0)
        << ',' << text::format_double(n.wce1) << ',' << text::format_double(n.ned) << ','
        << text::format_double(n.ned0) << ',' << text::format_double(n.ned1) << ','
        << (n.good_classifier ? 1 : 0) << ',' << rank[n.node] << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

void write_histogram_csv(const ActivationHistogram& hist, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write histogram file " + path.string());
  out << "bin_lo,bin_hi,count_class0,count_class1\n";
  for (std::size_t r = 0; r < hist.bins; ++r) {
    out << text::format_double(bin_edge(r, hist.bins)) << ','
        << text::format_double(bin_edge(r + 1, hist.bins)) << ',' << hist.class0[r] << ','
        << hist.class1[r] << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

void write_weight_profile(const WeightProfile& profile,
                          std::span<const std::string> feature_ids,
                          const std::filesystem::path& top_path,
                          const std::filesystem::path& hist_path) {
  if (feature_ids.size() != profile.weights.size())
    fail(ErrorCode::kDimensionMismatch, "feature id count does not match model input width");
  {
    std::ofstream out(top_path);
    if (!out) fail(ErrorCode::kIo, "cannot write " + top_path.string());
    out << "rank,feature_id,weight\n";
    for (std::size_t i = 0; i < profile.top_features.size(); ++i) {
      const auto j = profile.top_features[i];
      out << i + 1 << ',' << feature_ids[j] << ',' << text::format_double(profile.weights[j])
          << '\n';
    }
    if (!out) fail(ErrorCode::kIo, "write failed for " + top_path.string());
  }
  std::ofstream out(hist_path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + hist_path.string());
  out << "bin_lo,bin_hi,count\n";
  const double width = (profile.hi - profile.lo) / kWeightHistogramBins;
  for (std::size_t b = 0; b < kWeightHistogramBins; ++b) {
    out << text::format_double(profile.lo + width * b) << ','
        << text::format_double(b + 1 == kWeightHistogramBins ? profile.hi
                                                             : profile.lo + width * (b + 1))
        << ',' << profile.histogram[b] << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + hist_path.string());
}

}  // namespace ans
