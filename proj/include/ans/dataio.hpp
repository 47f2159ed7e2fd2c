#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ans/matrix.hpp"

namespace ans {

// n samples by d features. Labels, when present, are 0 or 1 per sample.
struct LabeledDataset {
  Matrix values;
  std::optional<std::vector<int>> labels;
  std::vector<std::string> sample_ids;
  std::vector<std::string> feature_ids;
  std::optional<std::vector<std::string>> group_tags;

  std::size_t num_samples() const noexcept { return values.rows(); }
  std::size_t num_features() const noexcept { return values.cols(); }

  // Throws ans::Error when sizes, labels or identifiers are inconsistent.
  void validate() const;

  // Row subset, carrying labels, ids and tags along.
  LabeledDataset select(std::span<const std::size_t> rows) const;
};

// Per-feature range observed on the fitting set.
struct NormalizationRecord {
  std::vector<std::string> feature_ids;
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const noexcept { return min.size(); }
};

// Text layout: header row of feature ids, first column sample ids, optional
// `group` column, optional trailing `label` column. Tab or comma delimited,
// detected from the header line.
LabeledDataset load_matrix(const std::filesystem::path& path, bool has_labels);
// True when the header's last cell is named "label".
bool has_label_column(const std::filesystem::path& path);

void save_matrix(const LabeledDataset& dataset, const std::filesystem::path& path);

std::pair<NormalizationRecord, LabeledDataset> fit_normalizer(const LabeledDataset& dataset);

// Min-max map with clamping into [0,1]. Constant features map to 0.
LabeledDataset apply_normalizer(const NormalizationRecord& record,
                                const LabeledDataset& dataset);

void save_normalizer(const NormalizationRecord& record, const std::filesystem::path& path);
NormalizationRecord load_normalizer(const std::filesystem::path& path);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Validation size is round(fraction * n), kept within [1, n-1].
SplitIndices split_indices(std::size_t n, double fraction, std::uint64_t seed);

std::pair<LabeledDataset, LabeledDataset> split_train_validation(
    const LabeledDataset& dataset, double fraction, std::uint64_t seed);

LabeledDataset select_subset(const LabeledDataset& dataset,
                             const std::function<bool(const std::string&)>& group_predicate);

struct SyntheticSpec {
  std::size_t n_per_class = 200;
  std::size_t d = 50;
  std::size_t n_informative = 5;
  double separation = 4.0;
  std::uint64_t seed = 1;
  // Number of round-robin group tags; 0 leaves the dataset untagged.
  std::size_t n_groups = 0;
};

// Two balanced classes. Features are unit-variance Gaussian noise; the
// informative ones are shifted by `separation` for class 1. Informative
// columns sit at seed-dependent positions and carry the id prefix "inf_".
// The result is min-max normalized into [0,1].
LabeledDataset generate_synthetic(const SyntheticSpec& spec);

// Column indices of features whose id marks them as planted informative.
std::vector<std::size_t> informative_features(const LabeledDataset& dataset);

}  // namespace ans
