#include "ans/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "ans/error.hpp"
#include "text.hpp"

namespace ans {
namespace {

template <typename Ids>
void require_unique(const Ids& ids, const char* axis) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second)
      fail(ErrorCode::kInvalidArgument, std::string("duplicate ") + axis + " id '" + id + "'");
  }
}

std::string format_id(const char* prefix, std::size_t index, int width) {
  std::ostringstream os;
  os << prefix;
  os.width(width);
  os.fill('0');
  os << index;
  return os.str();
}

}  // namespace

void LabeledDataset::validate() const {
  const std::size_t n = values.rows();
  if (sample_ids.size() != n)
    fail(ErrorCode::kDimensionMismatch, "sample id count does not match row count");
  if (feature_ids.size() != values.cols())
    fail(ErrorCode::kDimensionMismatch, "feature id count does not match column count");
  if (labels) {
    if (labels->size() != n)
      fail(ErrorCode::kDimensionMismatch, "label count does not match row count");
    for (std::size_t i = 0; i < n; ++i) {
      if ((*labels)[i] != 0 && (*labels)[i] != 1)
        fail(ErrorCode::kLabel, "label of sample " + sample_ids[i] + " is not 0 or 1");
    }
  }
  if (group_tags && group_tags->size() != n)
    fail(ErrorCode::kDimensionMismatch, "group tag count does not match row count");
  require_unique(sample_ids, "sample");
  require_unique(feature_ids, "feature");
}

LabeledDataset LabeledDataset::select(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.values = values.select_rows(rows);
  out.feature_ids = feature_ids;
  out.sample_ids.reserve(rows.size());
  for (auto r : rows) out.sample_ids.push_back(sample_ids[r]);
  if (labels) {
    out.labels.emplace();
    for (auto r : rows) out.labels->push_back((*labels)[r]);
  }
  if (group_tags) {
    out.group_tags.emplace();
    for (auto r : rows) out.group_tags->push_back((*group_tags)[r]);
  }
  return out;
}

LabeledDataset load_matrix(const std::filesystem::path& path, bool has_labels) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open dataset file " + path.string());

  std::string header_line;
  if (!std::getline(in, header_line))
    fail(ErrorCode::kParse, "dataset file " + path.string() + " is empty");
  const char delim = header_line.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> header;
  for (auto cell : text::split(header_line, delim)) header.emplace_back(cell);

  const std::size_t n_cols = header.size();
  std::size_t trailing = has_labels ? 1 : 0;
  bool has_group = false;
  if (n_cols >= 2 + trailing && header[n_cols - 1 - trailing] == "group") {
    has_group = true;
    ++trailing;
  }
  if (n_cols < 2 + trailing)
    fail(ErrorCode::kParse, "dataset header needs a sample id column and at least one feature");
  const std::size_t d = n_cols - 1 - trailing;

  LabeledDataset ds;
  ds.feature_ids.assign(header.begin() + 1, header.begin() + 1 + static_cast<long>(d));
  if (has_labels) ds.labels.emplace();
  if (has_group) ds.group_tags.emplace();

  std::vector<double> values;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto cells = text::split(line, delim);
    if (cells.size() != n_cols) {
      fail(ErrorCode::kParse, "row " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(n_cols));
    }
    ds.sample_ids.emplace_back(cells[0]);
    for (std::size_t j = 0; j < d; ++j) {
      auto v = text::parse_double(cells[j + 1]);
      if (!v || !std::isfinite(*v)) {
        fail(ErrorCode::kParse, "non-numeric cell at row " + std::to_string(line_no) +
                                    ", column " + std::to_string(j + 2) + " ('" +
                                    std::string(cells[j + 1]) + "')");
      }
      values.push_back(*v);
    }
    if (has_group) ds.group_tags->emplace_back(cells[d + 1]);
    if (has_labels) {
      auto raw = cells[n_cols - 1];
      auto v = text::parse_double(raw);
      if (!v || (*v != 0.0 && *v != 1.0)) {
        fail(ErrorCode::kLabel, "label at row " + std::to_string(line_no) + " is '" +
                                    std::string(raw) + "', expected 0 or 1");
      }
      ds.labels->push_back(static_cast<int>(*v));
    }
  }

  const std::size_t n = ds.sample_ids.size();
  ds.values = Matrix(n, d);
  std::copy(values.begin(), values.end(), ds.values.flat().begin());
  ds.validate();
  return ds;
}

bool has_label_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open dataset file " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line)) return false;
  const char delim = header_line.find('\t') != std::string::npos ? '\t' : ',';
  auto cells = text::split(header_line, delim);
  return !cells.empty() && cells.back() == "label";
}

void save_matrix(const LabeledDataset& dataset, const std::filesystem::path& path) {
  dataset.validate();
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write dataset file " + path.string());
  out << "sample_id";
  for (const auto& f : dataset.feature_ids) out << '\t' << f;
  if (dataset.group_tags) out << "\tgroup";
  if (dataset.labels) out << "\tlabel";
  out << '\n';
  for (std::size_t i = 0; i < dataset.num_samples(); ++i) {
    out << dataset.sample_ids[i];
    for (double v : dataset.values.row(i)) out << '\t' << text::format_double(v);
    if (dataset.group_tags) out << '\t' << (*dataset.group_tags)[i];
    if (dataset.labels) out << '\t' << (*dataset.labels)[i];
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::pair<NormalizationRecord, LabeledDataset> fit_normalizer(const LabeledDataset& dataset) {
  const std::size_t n = dataset.num_samples();
  const std::size_t d = dataset.num_features();
  if (n == 0) fail(ErrorCode::kEmpty, "cannot fit a normalizer on an empty dataset");

  NormalizationRecord rec;
  rec.feature_ids = dataset.feature_ids;
  rec.min.assign(d, 0.0);
  rec.max.assign(d, 0.0);
  auto first = dataset.values.row(0);
  std::copy(first.begin(), first.end(), rec.min.begin());
  std::copy(first.begin(), first.end(), rec.max.begin());
  for (std::size_t i = 1; i < n; ++i) {
    auto row = dataset.values.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      rec.min[j] = std::min(rec.min[j], row[j]);
      rec.max[j] = std::max(rec.max[j], row[j]);
    }
  }
  auto normalized = apply_normalizer(rec, dataset);
  return {std::move(rec), std::move(normalized)};
}

LabeledDataset apply_normalizer(const NormalizationRecord& record,
                                const LabeledDataset& dataset) {
  const std::size_t d = dataset.num_features();
  if (record.size() != d) {
    fail(ErrorCode::kDimensionMismatch,
         "normalizer has " + std::to_string(record.size()) + " features, dataset has " +
             std::to_string(d));
  }
  LabeledDataset out = dataset;
  for (std::size_t i = 0; i < out.num_samples(); ++i) {
    auto row = out.values.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double range = record.max[j] - record.min[j];
      if (range <= 0.0) {
        row[j] = 0.0;
      } else {
        row[j] = std::clamp((row[j] - record.min[j]) / range, 0.0, 1.0);
      }
    }
  }
  return out;
}

void save_normalizer(const NormalizationRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write normalizer file " + path.string());
  out << "v1\n";
  for (std::size_t j = 0; j < record.size(); ++j) {
    out << record.feature_ids[j] << '\t' << text::format_double(record.min[j]) << '\t'
        << text::format_double(record.max[j]) << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

NormalizationRecord load_normalizer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open normalizer file " + path.string());
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "v1")
    fail(ErrorCode::kFormatVersion, "normalizer file " + path.string() + " is not version v1");

  NormalizationRecord rec;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto cells = text::split(line, '\t');
    auto lo = cells.size() == 3 ? text::parse_double(cells[1]) : std::nullopt;
    auto hi = cells.size() == 3 ? text::parse_double(cells[2]) : std::nullopt;
    if (!lo || !hi || *hi < *lo)
      fail(ErrorCode::kParse, "bad normalizer line " + std::to_string(line_no));
    rec.feature_ids.emplace_back(cells[0]);
    rec.min.push_back(*lo);
    rec.max.push_back(*hi);
  }
  return rec;
}

SplitIndices split_indices(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    fail(ErrorCode::kInvalidArgument, "validation fraction must lie in (0,1)");
  if (n < 2) fail(ErrorCode::kInvalidArgument, "splitting needs at least 2 samples");

  auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  n_val = std::clamp<std::size_t>(n_val, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  SplitIndices split;
  split.validation.assign(order.begin(), order.begin() + static_cast<long>(n_val));
  split.train.assign(order.begin() + static_cast<long>(n_val), order.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

std::pair<LabeledDataset, LabeledDataset> split_train_validation(
    const LabeledDataset& dataset, double fraction, std::uint64_t seed) {
  auto split = split_indices(dataset.num_samples(), fraction, seed);
  return {dataset.select(split.train), dataset.select(split.validation)};
}

LabeledDataset select_subset(const LabeledDataset& dataset,
                             const std::function<bool(const std::string&)>& group_predicate) {
  if (!dataset.group_tags)
    fail(ErrorCode::kInvalidArgument, "dataset has no group column to filter on");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < dataset.num_samples(); ++i) {
    if (group_predicate((*dataset.group_tags)[i])) rows.push_back(i);
  }
  if (rows.empty()) fail(ErrorCode::kEmpty, "group filter matched no samples");
  return dataset.select(rows);
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_per_class == 0 || spec.d == 0)
    fail(ErrorCode::kInvalidArgument, "synthetic dataset needs n_per_class >= 1 and d >= 1");
  if (spec.n_informative > spec.d)
    fail(ErrorCode::kInvalidArgument, "n_informative exceeds feature count");
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation))
    fail(ErrorCode::kInvalidArgument, "separation must be a finite value >= 0");

  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> columns(spec.d);
  std::iota(columns.begin(), columns.end(), 0);
  std::shuffle(columns.begin(), columns.end(), rng);
  std::vector<bool> informative(spec.d, false);
  for (std::size_t k = 0; k < spec.n_informative; ++k) informative[columns[k]] = true;

  const std::size_t n = 2 * spec.n_per_class;
  LabeledDataset ds;
  ds.values = Matrix(n, spec.d);
  ds.labels.emplace(n);
  if (spec.n_groups > 0) ds.group_tags.emplace(n);
  for (std::size_t j = 0; j < spec.d; ++j)
    ds.feature_ids.push_back(format_id(informative[j] ? "inf_f" : "f", j, 3));

  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    (*ds.labels)[i] = label;
    ds.sample_ids.push_back(format_id("s", i, 5));
    if (ds.group_tags) (*ds.group_tags)[i] = format_id("g", (i / 2) % spec.n_groups, 1);
    auto row = ds.values.row(i);
    for (std::size_t j = 0; j < spec.d; ++j) {
      row[j] = noise(rng) + (informative[j] && label == 1 ? spec.separation : 0.0);
    }
  }
  return fit_normalizer(ds).second;
}

std::vector<std::size_t> informative_features(const LabeledDataset& dataset) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < dataset.feature_ids.size(); ++j) {
    if (dataset.feature_ids[j].starts_with("inf_")) out.push_back(j);
  }
  return out;
}

}  // namespace ans
