// Runs the `ans` executable end to end on small inputs.
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ans_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of `ans <args>` run inside the scratch directory.
  int run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" ANS_CLI_PATH "' " + args +
                            " >stdout.txt 2>stderr.txt";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  }

  std::string read(const fs::path& rel) const {
    std::ifstream in(dir_ / rel);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::vector<std::string> lines(const fs::path& rel) const {
    std::vector<std::string> out;
    std::istringstream in(read(rel));
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }

  bool exists(const fs::path& rel) const { return fs::exists(dir_ / rel); }

  // Small labelled dataset plus a trained model in out/.
  void prepare_model(const std::string& extra_synth = "") {
    ASSERT_EQ(run("--out-dir out synth --n 40 --d 12 --informative 3 " + extra_synth), 0);
    ASSERT_EQ(run("--out-dir out train --data out/data.tsv --hidden 8 --epochs 5 --batch 16"), 0);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SynthWritesRowsAndIsReproducible) {
  ASSERT_EQ(run("synth --n 200 --d 50 --informative 5 --sep 4 --seed 1 -o data.tsv"), 0);
  const auto first = read("data.tsv");
  EXPECT_EQ(lines("data.tsv").size(), 401u);
  ASSERT_EQ(run("synth --n 200 --d 50 --informative 5 --sep 4 --seed 1 -o data.tsv"), 0);
  EXPECT_EQ(read("data.tsv"), first);
  EXPECT_TRUE(exists("synth.run.json"));
}

TEST_F(CliTest, SynthRejectsTooManyInformative) {
  EXPECT_NE(run("synth --informative 60 --d 50"), 0);
  EXPECT_FALSE(exists("data.tsv"));
  EXPECT_NE(read("stderr.txt").find("informative"), std::string::npos);
}

TEST_F(CliTest, TrainSingleRun) {
  prepare_model();
  EXPECT_TRUE(exists("out/model.ansm"));
  EXPECT_TRUE(exists("out/normalizer.tsv"));
  const auto hist = lines("out/history.csv");
  ASSERT_EQ(hist.size(), 6u);
  EXPECT_EQ(hist[0], "epoch,train_mse,val_mse,val_pearson,seconds");
}

TEST_F(CliTest, TrainSweepGrid) {
  ASSERT_EQ(run("--out-dir out synth --n 30 --d 6 --informative 2"), 0);
  ASSERT_EQ(run("--out-dir out train --data out/data.tsv --sweep --hidden 3,4 --batch 8,16 "
                "--epochs 2"),
            0);
  const auto summary = lines("out/sweep_summary.csv");
  ASSERT_EQ(summary.size(), 5u);
  EXPECT_EQ(summary[0], "hidden,batch,lr,seed,final_val_pearson,final_val_mse,status");
  int histories = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "out"))
    histories += e.path().filename().string().starts_with("history_");
  EXPECT_EQ(histories, 4);
}

TEST_F(CliTest, TrainListWithoutSweepIsUsageError) {
  ASSERT_EQ(run("synth --n 10 --d 4 --informative 1"), 0);
  EXPECT_EQ(run("train --data data.tsv --hidden 3,4"), 2);
}

TEST_F(CliTest, RankReportAndPlots) {
  prepare_model();
  ASSERT_EQ(run("--out-dir out rank --model out/model.ansm --data out/data.tsv "
                "--normalizer out/normalizer.tsv --plots --top 6"),
            0);
  const auto report = lines("out/report.csv");
  ASSERT_EQ(report.size(), 9u);
  EXPECT_EQ(report[0], "node,sns,wce0,wce1,ned,ned0,ned1,good_classifier,rank");
  // The rank-1 row carries the smallest SNS.
  double best = 1e300, rank1 = -1;
  for (std::size_t i = 1; i < report.size(); ++i) {
    std::stringstream ss(report[i]);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    const double sns = std::stod(cells[1]);
    best = std::min(best, sns);
    if (cells[8] == "1") rank1 = sns;
  }
  EXPECT_EQ(rank1, best);
  int svgs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "out"))
    svgs += e.path().extension() == ".svg";
  EXPECT_EQ(svgs, 6);
}

TEST_F(CliTest, RankWeightsProfile) {
  prepare_model();
  ASSERT_EQ(run("--out-dir out rank --model out/model.ansm --data out/data.tsv --weights 2 "
                "--top-features 5"),
            0);
  const auto top = lines("out/weights_node_2.csv");
  ASSERT_EQ(top.size(), 6u);
  EXPECT_EQ(top[0], "rank,feature_id,weight");
  EXPECT_EQ(lines("out/weights_node_2_hist.csv").size(), 51u);
  EXPECT_TRUE(exists("out/weights_node_2.svg"));
}

TEST_F(CliTest, RankOnGroupSubset) {
  prepare_model("--groups 2");
  ASSERT_EQ(run("--out-dir out rank --model out/model.ansm --data out/data.tsv --group g1"), 0);
  EXPECT_EQ(lines("out/report.csv").size(), 9u);
  EXPECT_NE(read("out/rank.run.json").find("\"samples\": 40"), std::string::npos);
  EXPECT_NE(run("--out-dir out rank --model out/model.ansm --data out/data.tsv --group nope"), 0);
}

TEST_F(CliTest, RankNeedsLabels) {
  prepare_model();
  std::ofstream(dir_ / "nolabel.tsv") << "id\tf1\na\t0.5\nb\t0.2\n";
  EXPECT_NE(run("rank --model out/model.ansm --data nolabel.tsv"), 0);
}

TEST_F(CliTest, PcaScoresAndMismatch) {
  ASSERT_EQ(run("synth --n 20 --d 6 --informative 2 --groups 2 -o a.tsv"), 0);
  ASSERT_EQ(run("synth --n 20 --d 7 --informative 2 -o b.tsv"), 0);
  ASSERT_EQ(run("pca --fit a.tsv --components 2"), 0);
  const auto scores = lines("scores.csv");
  ASSERT_EQ(scores.size(), 41u);
  EXPECT_EQ(scores[0], "sample_id,pc1,pc2,label,group");
  EXPECT_TRUE(exists("pca_scatter.svg"));
  EXPECT_NE(run("pca --fit a.tsv --data b.tsv"), 0);
  EXPECT_NE(read("stderr.txt").find("mismatch"), std::string::npos);
}

TEST_F(CliTest, BenchRows) {
  ASSERT_EQ(run("bench --n 50 --d 10 --hidden 4 --epochs 1 --workers 1 -o one.csv"), 0);
  auto one = lines("one.csv");
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[1].substr(one[1].rfind(',') + 1), "1");
  ASSERT_EQ(run("bench --n 50 --d 10 --hidden 4 --epochs 1 --workers 1,2,4 -o three.csv"), 0);
  EXPECT_EQ(lines("three.csv").size(), 4u);
}

TEST_F(CliTest, UnknownFlagExitsTwo) {
  EXPECT_EQ(run("synth --bogus"), 2);
  EXPECT_EQ(run("--help"), 0);
}
