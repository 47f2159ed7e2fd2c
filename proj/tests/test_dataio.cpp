#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "ans/dataio.hpp"
#include "ans/error.hpp"

namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("ans_dataio_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& body) const {
    auto p = path_ / name;
    std::ofstream(p) << body;
    return p;
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

ans::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ans::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected ans::Error";
  return ans::ErrorCode::kInvalidArgument;
}

ans::LabeledDataset column(std::vector<double> v) {
  ans::LabeledDataset ds;
  ds.values = ans::Matrix(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    ds.values(i, 0) = v[i];
    ds.sample_ids.push_back("s" + std::to_string(i));
  }
  ds.feature_ids = {"g"};
  return ds;
}

}  // namespace

TEST(LoadMatrix, ParsesLabelledFile) {
  TempDir dir;
  auto p = dir.file("a.tsv", "id\tf1\tf2\tlabel\na\t1\t2\t0\nb\t3\t4\t1\nc\t5\t6.5\t1\n");
  auto ds = ans::load_matrix(p, true);
  EXPECT_EQ(ds.num_samples(), 3u);
  EXPECT_EQ(ds.num_features(), 2u);
  EXPECT_EQ(ds.values(2, 1), 6.5);
  EXPECT_EQ(*ds.labels, (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(ds.feature_ids, (std::vector<std::string>{"f1", "f2"}));
  EXPECT_TRUE(ans::has_label_column(p));
}

TEST(LoadMatrix, CommaDelimitedWithGroups) {
  TempDir dir;
  auto p = dir.file("a.csv", "id,f1,group,label\na,0.1,breast,0\nb,0.2,lung,1\n");
  auto ds = ans::load_matrix(p, true);
  ASSERT_TRUE(ds.group_tags);
  EXPECT_EQ((*ds.group_tags)[1], "lung");
  EXPECT_EQ(ds.num_features(), 1u);
}

TEST(LoadMatrix, RaggedRowNamesTheRow) {
  TempDir dir;
  auto p = dir.file("r.tsv", "id\tf1\tf2\na\t1\t2\nb\t1\t2\t3\nc\t1\t2\n");
  try {
    ans::load_matrix(p, false);
    FAIL();
  } catch (const ans::Error& e) {
    EXPECT_EQ(e.code(), ans::ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(LoadMatrix, NonNumericCellGivesCoordinates) {
  TempDir dir;
  auto p = dir.file("n.tsv", "id\tf1\tf2\na\t1\tx\n");
  try {
    ans::load_matrix(p, false);
    FAIL();
  } catch (const ans::Error& e) {
    EXPECT_EQ(e.code(), ans::ErrorCode::kParse);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 3"), std::string::npos) << msg;
  }
}

TEST(LoadMatrix, BadLabelAndMissingFile) {
  TempDir dir;
  auto p = dir.file("l.tsv", "id\tf1\tlabel\na\t1\t2\n");
  EXPECT_EQ(code_of([&] { ans::load_matrix(p, true); }), ans::ErrorCode::kLabel);
  EXPECT_EQ(code_of([&] { ans::load_matrix(dir / "missing.tsv", true); }), ans::ErrorCode::kIo);
}

TEST(SaveMatrix, RoundTripIsExact) {
  TempDir dir;
  auto ds = ans::generate_synthetic({10, 4, 2, 3.0, 5, 2});
  ans::save_matrix(ds, dir / "x.tsv");
  auto back = ans::load_matrix(dir / "x.tsv", true);
  EXPECT_EQ(back.values, ds.values);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.group_tags, ds.group_tags);
  EXPECT_EQ(back.sample_ids, ds.sample_ids);
}

TEST(Normalizer, MinMaxAndConstantColumn) {
  auto [rec, out] = ans::fit_normalizer(column({2, 4, 6}));
  EXPECT_EQ(out.values(0, 0), 0.0);
  EXPECT_EQ(out.values(1, 0), 0.5);
  EXPECT_EQ(out.values(2, 0), 1.0);
  auto [rec2, flat] = ans::fit_normalizer(column({5, 5, 5}));
  for (double v : flat.values.flat()) EXPECT_EQ(v, 0.0);
}

TEST(Normalizer, ApplyClampsOutsideFittedRange) {
  auto [rec, out] = ans::fit_normalizer(column({2, 4, 6}));
  auto applied = ans::apply_normalizer(rec, column({2, 9, -1}));
  EXPECT_EQ(applied.values(0, 0), 0.0);
  EXPECT_EQ(applied.values(1, 0), 1.0);
  EXPECT_EQ(applied.values(2, 0), 0.0);
}

TEST(Normalizer, RandomMatrixStaysInUnitRange) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 100);
  ans::LabeledDataset ds;
  ds.values = ans::Matrix(10, 4);
  for (auto& v : ds.values.flat()) v = g(rng);
  for (int i = 0; i < 10; ++i) ds.sample_ids.push_back(std::to_string(i));
  ds.feature_ids = {"a", "b", "c", "d"};
  auto [rec, out] = ans::fit_normalizer(ds);
  for (double v : out.values.flat()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Normalizer, ErrorsAndPersistence) {
  ans::LabeledDataset empty;
  EXPECT_EQ(code_of([&] { ans::fit_normalizer(empty); }), ans::ErrorCode::kEmpty);
  auto [rec, out] = ans::fit_normalizer(column({0.1, 7.25, -3}));
  TempDir dir;
  ans::save_normalizer(rec, dir / "n.tsv");
  auto back = ans::load_normalizer(dir / "n.tsv");
  EXPECT_EQ(back.min, rec.min);
  EXPECT_EQ(back.max, rec.max);
  EXPECT_EQ(back.feature_ids, rec.feature_ids);

  auto two = ans::generate_synthetic({2, 2, 0, 0.0, 1, 0});
  EXPECT_EQ(code_of([&] { ans::apply_normalizer(rec, two); }),
            ans::ErrorCode::kDimensionMismatch);
  auto bad = dir.file("v0.tsv", "v0\n");
  EXPECT_EQ(code_of([&] { ans::load_normalizer(bad); }), ans::ErrorCode::kFormatVersion);
}

TEST(Split, SizesAndDeterminism) {
  auto a = ans::split_indices(10, 0.2, 7);
  EXPECT_EQ(a.train.size(), 8u);
  EXPECT_EQ(a.validation.size(), 2u);
  auto b = ans::split_indices(10, 0.2, 7);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.validation, b.validation);
  auto c = ans::split_indices(2, 0.5, 1);
  EXPECT_EQ(c.train.size(), 1u);
  EXPECT_EQ(c.validation.size(), 1u);
  EXPECT_EQ(code_of([] { ans::split_indices(10, 1.0, 1); }), ans::ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { ans::split_indices(10, 0.0, 1); }), ans::ErrorCode::kInvalidArgument);
}

TEST(Split, AlwaysPartitions) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 37;
    auto s = ans::split_indices(n, 0.3, seed);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.validation.begin(), s.validation.end());
    EXPECT_EQ(all.size(), n);
    EXPECT_EQ(s.train.size() + s.validation.size(), n);
    EXPECT_FALSE(s.train.empty());
    EXPECT_FALSE(s.validation.empty());
  }
}

TEST(Subset, ByGroupTag) {
  auto ds = column({1, 2, 3});
  ds.group_tags = std::vector<std::string>{"A", "A", "B"};
  auto a = ans::select_subset(ds, [](const std::string& t) { return t == "A"; });
  EXPECT_EQ(a.num_samples(), 2u);
  EXPECT_EQ(a.values(1, 0), 2.0);
  EXPECT_EQ(code_of([&] { ans::select_subset(ds, [](const std::string&) { return false; }); }),
            ans::ErrorCode::kEmpty);
}

TEST(Synthetic, SameSeedSameBits) {
  ans::SyntheticSpec spec;
  auto a = ans::generate_synthetic(spec);
  auto b = ans::generate_synthetic(spec);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.feature_ids, b.feature_ids);
  EXPECT_EQ(a.num_samples(), 400u);
  EXPECT_EQ(ans::informative_features(a).size(), 5u);
  spec.seed = 2;
  EXPECT_NE(ans::generate_synthetic(spec).values, a.values);
}

TEST(Synthetic, InformativeColumnsSeparateClasses) {
  auto ds = ans::generate_synthetic({});
  const auto& y = *ds.labels;
  const std::size_t n = ds.num_samples();
  for (auto j : ans::informative_features(ds)) {
    // Best single-threshold error over every cut point, in either direction.
    std::vector<std::pair<double, int>> v;
    for (std::size_t i = 0; i < n; ++i) v.emplace_back(ds.values(i, j), y[i]);
    std::sort(v.begin(), v.end());
    std::size_t ones_below = 0, best = n;
    const std::size_t ones = std::count(y.begin(), y.end(), 1);
    for (std::size_t cut = 0; cut <= n; ++cut) {
      if (cut > 0) ones_below += v[cut - 1].second;
      const std::size_t zeros_below = cut - ones_below;
      const std::size_t err_up = ones_below + (n - ones - zeros_below);
      best = std::min({best, err_up, n - err_up});
    }
    EXPECT_LT(double(best) / double(n), 0.05) << ds.feature_ids[j];
  }
}

TEST(Synthetic, ZeroSeparationLooksLikeNoise) {
  auto ds = ans::generate_synthetic({200, 20, 5, 0.0, 11, 0});
  const auto& y = *ds.labels;
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    double m[2] = {0, 0}, s[2] = {0, 0};
    double c[2] = {0, 0};
    for (std::size_t i = 0; i < ds.num_samples(); ++i) {
      m[y[i]] += ds.values(i, j);
      c[y[i]] += 1;
    }
    m[0] /= c[0];
    m[1] /= c[1];
    for (std::size_t i = 0; i < ds.num_samples(); ++i)
      s[y[i]] += std::pow(ds.values(i, j) - m[y[i]], 2);
    const double se = std::sqrt(s[0] / (c[0] - 1) / c[0] + s[1] / (c[1] - 1) / c[1]);
    EXPECT_LT(std::abs(m[1] - m[0]) / se, 4.5) << ds.feature_ids[j];
  }
}

TEST(Synthetic, InvalidSizes) {
  EXPECT_EQ(code_of([] { ans::generate_synthetic({0, 5, 1, 1.0, 1, 0}); }),
            ans::ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { ans::generate_synthetic({5, 5, 6, 1.0, 1, 0}); }),
            ans::ErrorCode::kInvalidArgument);
}
