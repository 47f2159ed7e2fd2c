#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ans/autoencoder.hpp"
#include "ans/matrix.hpp"

namespace ans {

inline constexpr std::size_t kDefaultBins = 10;

// Clamp applied to class proportions before taking logarithms.
inline constexpr double kProportionEpsilon = 1e-12;

// Occupancy of k equal-width bins over [0,1] for one hidden node. Bin r
// (0-based here) covers [r/k, (r+1)/k); the last bin is closed at 1.
struct ActivationHistogram {
  std::size_t bins = 0;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> class0;
  std::vector<std::size_t> class1;
  std::size_t total = 0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;

  std::size_t occupied_bins() const noexcept;
  // Same histogram with the two classes exchanged.
  ActivationHistogram swapped() const;

  friend bool operator==(const ActivationHistogram&, const ActivationHistogram&) = default;
};

std::size_t bin_index(double activation, std::size_t bins) noexcept;

ActivationHistogram build_histogram(std::span<const double> activations,
                                    std::span<const int> labels, std::size_t bins);

// Normalized entropy difference of the combined histogram. A histogram with
// a single occupied bin has NED 1.
double ned(const ActivationHistogram& hist);

// NED of class c alone, normalized by the combined histogram's occupied-bin count.
double ned_class(const ActivationHistogram& hist, int label);

// Fraction of class-1 samples per bin; nullopt for empty bins.
std::vector<std::optional<double>> binomial_proportions(const ActivationHistogram& hist);

// Ideal two-class layout over 1-based bins r: 0 below k/2, 1 from k/2 on,
// with the first bin always 0 so that k=2 still splits.
std::vector<double> reference_distribution(std::size_t bins);

// Occupancy-weighted cross entropy against the reference layout. Orientation
// 1 expects class 1 in the upper bins; orientation 0 expects it in the lower.
// The class-1 and class-0 proportions of each bin are each clamped to
// [kProportionEpsilon, 1 - kProportionEpsilon]; empty bins contribute 0.
double wce(const ActivationHistogram& hist, int orientation);

struct NodeSaliency {
  std::size_t node = 0;  // 1-based hidden node index
  double sns = 0.0;
  double wce0 = 0.0;
  double wce1 = 0.0;
  double ned = 0.0;
  double ned0 = 0.0;
  double ned1 = 0.0;
  bool good_classifier = false;
};

NodeSaliency sns(const ActivationHistogram& hist, std::size_t node = 1);

struct SaliencyReport {
  std::vector<NodeSaliency> nodes;             // in node order
  std::vector<std::size_t> ranking;            // 1-based node ids, ascending SNS
  std::vector<ActivationHistogram> histograms; // in node order

  const NodeSaliency& at_rank(std::size_t rank) const { return nodes[ranking[rank - 1] - 1]; }
  // 1-based rank of a 1-based node id.
  std::size_t rank_of(std::size_t node) const;
};

// One entry per row of the m x n activation matrix. Ties in SNS are broken
// by node index.
SaliencyReport rank_nodes(const Matrix& activations, std::span<const int> labels,
                          std::size_t bins = kDefaultBins);

inline constexpr std::size_t kWeightHistogramBins = 50;

struct WeightProfile {
  std::size_t node = 0;  // 1-based
  std::vector<double> weights;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> histogram;     // kWeightHistogramBins over [lo, hi]
  std::vector<std::size_t> top_features;  // 0-based columns, |weight| descending
};

WeightProfile node_weight_profile(const AutoencoderModel& model, std::size_t node,
                                  std::size_t top_n);

void write_report_csv(const SaliencyReport& report, const std::filesystem::path& path);
void write_histogram_csv(const ActivationHistogram& hist, const std::filesystem::path& path);

// `top_path` gets rank,feature_id,weight for the top features; `hist_path`
// gets bin_lo,bin_hi,count of the weight histogram.
void write_weight_profile(const WeightProfile& profile,
                          std::span<const std::string> feature_ids,
                          const std::filesystem::path& top_path,
                          const std::filesystem::path& hist_path);

}  // namespace ans
