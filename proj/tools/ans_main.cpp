// Command-line front end: synth, train, rank, pca, bench.
// Talks to the toolkit exclusively through the C API in ans/ans.h.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <string>
#include <vector>

#include "ans/ans.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<ans_dataset, Deleter<ans_dataset, ans_dataset_free>>;
using Model = std::unique_ptr<ans_model, Deleter<ans_model, ans_model_free>>;
using History = std::unique_ptr<ans_history, Deleter<ans_history, ans_history_free>>;
using Report = std::unique_ptr<ans_report, Deleter<ans_report, ans_report_free>>;
using Normalizer = std::unique_ptr<ans_normalizer, Deleter<ans_normalizer, ans_normalizer_free>>;
using Pca = std::unique_ptr<ans_pca, Deleter<ans_pca, ans_pca_free>>;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(ans_status status, const std::string& context) {
  if (status != ANS_OK) {
    throw ApiError(context + ": " + ans_status_name(status) + ": " + ans_last_error());
  }
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Files produced by one invocation; removed again if the command fails.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  const fs::path& dir() const { return dir_; }

  fs::path resolve(const std::string& name) const {
    fs::path p(name);
    return p.is_absolute() ? p : dir_ / p;
  }

  std::string claim(const fs::path& p) {
    written_.push_back(p);
    return p.string();
  }

  std::string claim_in_dir(const std::string& name) { return claim(resolve(name)); }

  const std::vector<fs::path>& files() const { return written_; }

  void rollback() {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    written_.clear();
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::size_t bins = 10;
};

Dataset load_dataset(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("input file does not exist: " + path);
  ans_dataset* raw = nullptr;
  check(ans_dataset_load(path.c_str(), ANS_LABELS_AUTO, &raw), "loading " + path);
  return Dataset(raw);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw UsageError("empty value list '" + s + "'");
  return out;
}

template <typename T>
T parse_value(const std::string& s, const char* flag) {
  std::istringstream is(s);
  T v{};
  if (!(is >> v) || !is.eof()) throw UsageError(std::string("bad value '") + s + "' for " + flag);
  return v;
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
  std::size_t n = 200;
  std::size_t d = 50;
  std::size_t informative = 5;
  double sep = 4.0;
  std::size_t groups = 0;
  std::string output = "data.tsv";
};

json run_synth(const SynthArgs& a, const Globals& g, Outputs& out) {
  if (a.informative > a.d)
    throw UsageError("--informative (" + std::to_string(a.informative) + ") exceeds --d (" +
                     std::to_string(a.d) + ")");
  if (a.n == 0 || a.d == 0) throw UsageError("--n and --d must be positive");
  if (!(a.sep >= 0.0)) throw UsageError("--sep must be >= 0");
  ans_dataset* raw = nullptr;
  check(ans_dataset_synthetic(a.n, a.d, a.informative, a.sep, g.seed, a.groups, &raw),
        "generating synthetic data");
  Dataset ds(raw);
  check(ans_dataset_save(ds.get(), out.claim_in_dir(a.output).c_str()), "writing dataset");
  std::size_t n = 0, d = 0;
  check(ans_dataset_shape(ds.get(), &n, &d), "dataset shape");
  std::cout << "wrote " << n << " samples x " << d << " features to "
            << out.resolve(a.output).string() << "\n";
  return {{"n", a.n}, {"d", a.d}, {"informative", a.informative}, {"sep", a.sep},
          {"groups", a.groups}, {"output", a.output}};
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string hidden = "64";
  std::string batch = "32";
  std::string lr;
  std::size_t epochs = 100;
  std::size_t workers = 1;
  double val_fraction = 0.2;
  bool no_shuffle = false;
  bool sweep = false;
  std::string model = "model.ansm";
  std::string history = "history.csv";
};

std::string cell_tag(const std::string& h, const std::string& b, const std::string& lr) {
  return "h" + h + "_b" + b + "_lr" + lr;
}

json run_train(const TrainArgs& a, const Globals& g, Outputs& out) {
  ans_train_config base{};
  ans_train_config_default(&base);
  const std::string lr_text = a.lr.empty() ? [&] {
    std::ostringstream os;
    os << base.learning_rate;
    return os.str();
  }() : a.lr;

  const auto hidden = split_list(a.hidden);
  const auto batch = split_list(a.batch);
  const auto lrs = split_list(lr_text);
  if (!a.sweep && (hidden.size() > 1 || batch.size() > 1 || lrs.size() > 1))
    throw UsageError("comma lists for --hidden/--batch/--lr need --sweep");

  Dataset raw_ds = load_dataset(a.data);
  ans_normalizer* rec_raw = nullptr;
  ans_dataset* norm_raw = nullptr;
  check(ans_normalizer_fit(raw_ds.get(), &rec_raw, &norm_raw), "fitting normalizer");
  Normalizer rec(rec_raw);
  Dataset ds(norm_raw);
  check(ans_normalizer_save(rec.get(), out.claim_in_dir("normalizer.tsv").c_str()),
        "writing normalizer");

  base.epochs = a.epochs;
  base.workers = a.workers;
  base.validation_fraction = a.val_fraction;
  base.seed = g.seed;
  base.shuffle = a.no_shuffle ? 0 : 1;

  json cells = json::array();
  std::ofstream summary;
  if (a.sweep) {
    summary.open(out.claim_in_dir("sweep_summary.csv"));
    summary << "hidden,batch,lr,seed,final_val_pearson,final_val_mse,status\n";
  }
  for (const auto& h : hidden) {
    for (const auto& b : batch) {
      for (const auto& lr : lrs) {
        ans_train_config cfg = base;
        cfg.hidden_width = parse_value<std::size_t>(h, "--hidden");
        cfg.batch_size = parse_value<std::size_t>(b, "--batch");
        cfg.learning_rate = parse_value<double>(lr, "--lr");
        const std::string model_name = a.sweep ? "model_" + cell_tag(h, b, lr) + ".ansm" : a.model;
        const std::string history_name =
            a.sweep ? "history_" + cell_tag(h, b, lr) + ".csv" : a.history;

        ans_model* m_raw = nullptr;
        ans_history* h_raw = nullptr;
        const ans_status st = ans_train(ds.get(), &cfg, &m_raw, &h_raw);
        Model model(m_raw);
        History history(h_raw);
        json cell = {{"hidden", cfg.hidden_width}, {"batch", cfg.batch_size},
                     {"lr", cfg.learning_rate},    {"seed", cfg.seed},
                     {"epochs", cfg.epochs},       {"workers", cfg.workers}};
        if (st != ANS_OK) {
          const std::string msg = std::string(ans_status_name(st)) + ": " + ans_last_error();
          if (!a.sweep) throw ApiError("training: " + msg);
          std::cerr << "cell " << cell_tag(h, b, lr) << " failed: " << msg << "\n";
          summary << cfg.hidden_width << ',' << cfg.batch_size << ',' << lr << ',' << cfg.seed
                  << ",,,\"" << msg << "\"\n";
          cell["status"] = msg;
          cells.push_back(cell);
          continue;
        }
        check(ans_model_save(model.get(), out.claim_in_dir(model_name).c_str()), "writing model");
        check(ans_history_write_csv(history.get(), out.claim_in_dir(history_name).c_str()),
              "writing history");
        ans_epoch_record last{};
        check(ans_history_epoch(history.get(), ans_history_size(history.get()) - 1, &last),
              "reading history");
        std::cout << cell_tag(h, b, lr) << ": epochs=" << last.epoch
                  << " train_mse=" << last.train_mse << " val_mse=" << last.val_mse
                  << " val_pearson=" << last.val_pearson << "\n";
        if (a.sweep) {
          summary << cfg.hidden_width << ',' << cfg.batch_size << ',' << lr << ',' << cfg.seed
                  << ',' << std::setprecision(17) << last.val_pearson << ',' << last.val_mse
                  << ",ok\n";
        }
        cell["status"] = "ok";
        cell["final_val_pearson"] = last.val_pearson;
        cell["model"] = model_name;
        cell["history"] = history_name;
        cells.push_back(cell);
      }
    }
  }
  if (a.sweep && !summary) throw ApiError("writing sweep summary failed");
  return {{"data", a.data},     {"hidden", a.hidden},     {"batch", a.batch},
          {"lr", lr_text},      {"epochs", a.epochs},     {"workers", a.workers},
          {"val_fraction", a.val_fraction}, {"shuffle", !a.no_shuffle},
          {"sweep", a.sweep},   {"cells", cells}};
}

// --- rank ----------------------------------------------------------------

struct RankArgs {
  std::string model;
  std::string data;
  std::string normalizer;
  std::string group;
  std::size_t top = 6;
  bool plots = false;
  std::size_t weights = 0;
  std::size_t top_features = 20;
  std::string report = "report.csv";
};

json run_rank(const RankArgs& a, const Globals& g, Outputs& out) {
  if (!fs::exists(a.model)) throw UsageError("model file does not exist: " + a.model);
  ans_model* m_raw = nullptr;
  check(ans_model_load(a.model.c_str(), &m_raw), "loading model");
  Model model(m_raw);

  Dataset ds = load_dataset(a.data);
  if (!ans_dataset_has_labels(ds.get()))
    throw ApiError("dataset " + a.data + " has no label column; ranking needs labels");
  if (!a.normalizer.empty()) {
    if (!fs::exists(a.normalizer)) throw UsageError("normalizer file does not exist: " + a.normalizer);
    ans_normalizer* r_raw = nullptr;
    check(ans_normalizer_load(a.normalizer.c_str(), &r_raw), "loading normalizer");
    Normalizer rec(r_raw);
    ans_dataset* n_raw = nullptr;
    check(ans_normalizer_apply(rec.get(), ds.get(), &n_raw), "normalizing dataset");
    ds.reset(n_raw);
  } else if (!ans_dataset_in_unit_range(ds.get())) {
    throw ApiError("dataset values fall outside [0,1]; pass --normalizer");
  }
  if (!a.group.empty()) {
    ans_dataset* s_raw = nullptr;
    check(ans_dataset_select_group(ds.get(), a.group.c_str(), &s_raw),
          "selecting group '" + a.group + "'");
    ds.reset(s_raw);
  }
  std::size_t n = 0;
  check(ans_dataset_shape(ds.get(), &n, nullptr), "dataset shape");

  ans_report* rep_raw = nullptr;
  check(ans_rank_nodes(model.get(), ds.get(), g.bins, &rep_raw), "ranking nodes");
  Report report(rep_raw);
  check(ans_report_write_csv(report.get(), out.claim_in_dir(a.report).c_str()), "writing report");

  const std::size_t m = ans_report_size(report.get());
  const std::size_t shown = std::min(a.top, m);
  json top = json::array();
  std::cout << "rank  node  sns         ned       ned0      ned1      good\n";
  for (std::size_t r = 1; r <= shown; ++r) {
    ans_node_saliency s{};
    check(ans_report_ranked(report.get(), r, &s), "reading report");
    std::cout << std::setw(4) << r << "  " << std::setw(4) << s.node << "  " << std::fixed
              << std::setprecision(6) << std::setw(10) << s.sns << "  " << s.ned << "  " << s.ned0
              << "  " << s.ned1 << "  " << (s.good_classifier ? "yes" : "no") << "\n";
    std::cout.unsetf(std::ios::fixed);
    top.push_back({{"rank", r}, {"node", s.node}, {"sns", s.sns}, {"good_classifier", s.good_classifier != 0}});
    if (a.plots) {
      const std::string stem = "node_" + std::to_string(s.node);
      check(ans_report_write_histogram_svg(report.get(), s.node,
                                           out.claim_in_dir(stem + ".svg").c_str()),
            "writing histogram plot");
      check(ans_report_write_histogram_csv(report.get(), s.node,
                                           out.claim_in_dir(stem + "_hist.csv").c_str()),
            "writing histogram csv");
    }
  }
  if (a.weights > 0) {
    const std::string stem = "weights_node_" + std::to_string(a.weights);
    const std::string top_csv = out.claim_in_dir(stem + ".csv");
    const std::string hist_csv = out.claim_in_dir(stem + "_hist.csv");
    const std::string svg = out.claim_in_dir(stem + ".svg");
    check(ans_weight_profile_write(model.get(), ds.get(), a.weights, a.top_features,
                                   top_csv.c_str(), hist_csv.c_str(), svg.c_str()),
          "writing weight profile");
  }
  return {{"model", a.model},   {"data", a.data},          {"normalizer", a.normalizer},
          {"group", a.group},   {"samples", n},            {"top", a.top},
          {"plots", a.plots},   {"weights", a.weights},    {"top_features", a.top_features},
          {"ranked", top}};
}

// --- pca -----------------------------------------------------------------

struct PcaArgs {
  std::string fit;
  std::string data;
  std::size_t components = 2;
  double tol = 1e-12;
  std::size_t max_iter = 100000;
  std::string scores = "scores.csv";
  std::string plot = "pca_scatter.svg";
};

json run_pca(const PcaArgs& a, const Globals&, Outputs& out) {
  Dataset fit_ds = load_dataset(a.fit);
  Dataset proj_owned;
  const ans_dataset* proj = fit_ds.get();
  if (!a.data.empty() && a.data != a.fit) {
    proj_owned = load_dataset(a.data);
    proj = proj_owned.get();
  }
  std::size_t d_fit = 0, d_proj = 0;
  check(ans_dataset_shape(fit_ds.get(), nullptr, &d_fit), "dataset shape");
  check(ans_dataset_shape(proj, nullptr, &d_proj), "dataset shape");
  if (d_fit != d_proj) {
    throw ApiError("feature count mismatch: fit data has " + std::to_string(d_fit) +
                   ", projected data has " + std::to_string(d_proj));
  }
  ans_pca* p_raw = nullptr;
  check(ans_pca_fit(fit_ds.get(), a.components, a.tol, a.max_iter, &p_raw), "fitting PCA");
  Pca pca(p_raw);
  std::vector<double> ev(a.components);
  check(ans_pca_eigenvalues(pca.get(), ev.data(), ev.size()), "reading eigenvalues");
  const std::string scores = out.claim_in_dir(a.scores);
  std::string plot;
  if (a.components >= 2) plot = out.claim_in_dir(a.plot);
  check(ans_pca_write_scores(pca.get(), proj, scores.c_str(), plot.empty() ? nullptr : plot.c_str()),
        "writing scores");
  for (std::size_t k = 0; k < ev.size(); ++k)
    std::cout << "pc" << k + 1 << " eigenvalue " << ev[k] << "\n";
  return {{"fit", a.fit}, {"data", a.data.empty() ? a.fit : a.data},
          {"components", a.components}, {"tol", a.tol}, {"max_iter", a.max_iter},
          {"eigenvalues", ev}};
}

// --- bench ---------------------------------------------------------------

struct BenchArgs {
  std::string data;
  std::size_t n = 10000;
  std::size_t d = 500;
  std::size_t hidden = 64;
  std::size_t batch = 32;
  std::size_t epochs = 2;
  std::string lr;
  std::string workers = "1,2,4";
  std::string output = "bench.csv";
};

json run_bench(const BenchArgs& a, const Globals& g, Outputs& out) {
  std::vector<std::size_t> workers;
  for (const auto& w : split_list(a.workers)) {
    const auto v = parse_value<std::size_t>(w, "--workers");
    if (v == 0) throw UsageError("worker counts must be >= 1");
    workers.push_back(v);
  }
  Dataset ds;
  if (!a.data.empty()) {
    Dataset raw = load_dataset(a.data);
    ans_normalizer* r_raw = nullptr;
    ans_dataset* n_raw = nullptr;
    check(ans_normalizer_fit(raw.get(), &r_raw, &n_raw), "normalizing");
    Normalizer rec(r_raw);
    ds.reset(n_raw);
  } else {
    if (a.n < 2) throw UsageError("--n must be >= 2");
    ans_dataset* raw = nullptr;
    check(ans_dataset_synthetic(a.n / 2, a.d, std::min<std::size_t>(5, a.d), 4.0, g.seed, 0, &raw),
          "generating benchmark data");
    ds.reset(raw);
  }
  ans_train_config cfg{};
  ans_train_config_default(&cfg);
  cfg.hidden_width = a.hidden;
  cfg.batch_size = a.batch;
  cfg.epochs = a.epochs;
  cfg.seed = g.seed;
  if (!a.lr.empty()) cfg.learning_rate = parse_value<double>(a.lr, "--lr");

  std::vector<ans_scaling_row> rows(workers.size());
  check(ans_benchmark(ds.get(), &cfg, workers.data(), workers.size(), rows.data(),
                      out.claim_in_dir(a.output).c_str()),
        "benchmark");
  json table = json::array();
  std::cout << "workers  mean_epoch_seconds  speedup\n";
  for (const auto& r : rows) {
    std::cout << std::setw(7) << r.workers << "  " << std::setw(18) << r.mean_epoch_seconds
              << "  " << r.speedup << "\n";
    table.push_back({{"workers", r.workers}, {"mean_epoch_seconds", r.mean_epoch_seconds},
                     {"speedup", r.speedup}});
  }
  return {{"data", a.data.empty() ? "synthetic" : a.data}, {"n", a.n}, {"d", a.d},
          {"hidden", a.hidden}, {"batch", a.batch}, {"epochs", a.epochs},
          {"workers", a.workers}, {"hardware_threads", std::thread::hardware_concurrency()},
          {"rows", table}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autoencoder node saliency toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for all outputs")->capture_default_str();
  app.add_option("--bins", g.bins, "Histogram bin count k")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  synth_cmd->add_option("--n", synth.n, "Samples per class")->capture_default_str();
  synth_cmd->add_option("--d", synth.d, "Feature count")->capture_default_str();
  synth_cmd->add_option("--informative", synth.informative, "Informative features")
      ->capture_default_str();
  synth_cmd->add_option("--sep", synth.sep, "Class mean shift of informative features")
      ->capture_default_str();
  synth_cmd->add_option("--groups", synth.groups, "Round-robin group tags (0 = none)")
      ->capture_default_str();
  synth_cmd->add_option("-o,--output", synth.output, "Dataset file")->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the autoencoder (optionally a sweep)");
  train_cmd->add_option("--data", train.data, "Dataset file")->required();
  train_cmd->add_option("--hidden", train.hidden, "Hidden width (comma list with --sweep)")
      ->capture_default_str();
  train_cmd->add_option("--batch", train.batch, "Batch size (comma list with --sweep)")
      ->capture_default_str();
  train_cmd->add_option("--lr", train.lr, "Learning rate (comma list with --sweep; default 2)");
  train_cmd->add_option("--epochs", train.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--workers", train.workers, "Data-parallel gradient workers")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--val-fraction", train.val_fraction, "Validation fraction")
      ->capture_default_str();
  train_cmd->add_flag("--no-shuffle", train.no_shuffle, "Keep sample order fixed");
  train_cmd->add_flag("--sweep", train.sweep, "Run every hidden x batch x lr combination");
  train_cmd->add_option("--model", train.model, "Model file name")->capture_default_str();
  train_cmd->add_option("--history", train.history, "History CSV name")->capture_default_str();

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank hidden nodes by supervised saliency");
  rank_cmd->add_option("--model", rank.model, "Model file")->required();
  rank_cmd->add_option("--data", rank.data, "Labeled dataset file")->required();
  rank_cmd->add_option("--normalizer", rank.normalizer, "Normalization record to apply");
  rank_cmd->add_option("--group", rank.group, "Only use samples with this group tag");
  rank_cmd->add_option("--top", rank.top, "Nodes to print and plot")->capture_default_str();
  rank_cmd->add_flag("--plots", rank.plots, "Write SVG and CSV histograms of the top nodes");
  rank_cmd->add_option("--weights", rank.weights, "Write the weight profile of this node");
  rank_cmd->add_option("--top-features", rank.top_features, "Features listed in the weight profile")
      ->capture_default_str();
  rank_cmd->add_option("--report", rank.report, "Report CSV name")->capture_default_str();

  PcaArgs pca;
  auto* pca_cmd = app.add_subcommand("pca", "PCA baseline: fit on one dataset, project another");
  pca_cmd->add_option("--fit", pca.fit, "Dataset to fit components on")->required();
  pca_cmd->add_option("--data", pca.data, "Dataset to project (default: --fit)");
  pca_cmd->add_option("--components", pca.components, "Components")->capture_default_str();
  pca_cmd->add_option("--tol", pca.tol, "Power iteration tolerance")->capture_default_str();
  pca_cmd->add_option("--max-iter", pca.max_iter, "Power iteration limit")->capture_default_str();
  pca_cmd->add_option("--scores", pca.scores, "Scores CSV name")->capture_default_str();
  pca_cmd->add_option("--plot", pca.plot, "Scatter SVG name")->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Strong-scaling benchmark of data-parallel training");
  bench_cmd->add_option("--data", bench.data, "Dataset file (default: synthetic)");
  bench_cmd->add_option("--n", bench.n, "Synthetic sample count")->capture_default_str();
  bench_cmd->add_option("--d", bench.d, "Synthetic feature count")->capture_default_str();
  bench_cmd->add_option("--hidden", bench.hidden, "Hidden width")->capture_default_str();
  bench_cmd->add_option("--batch", bench.batch, "Batch size")->capture_default_str();
  bench_cmd->add_option("--epochs", bench.epochs, "Timed epochs per worker count")
      ->capture_default_str();
  bench_cmd->add_option("--lr", bench.lr, "Learning rate");
  bench_cmd->add_option("--workers", bench.workers, "Comma list of worker counts")
      ->capture_default_str();
  bench_cmd->add_option("-o,--output", bench.output, "Benchmark CSV name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << g.out_dir << ": " << ec.message() << "\n";
    return 1;
  }

  Outputs out(g.out_dir);
  std::string command;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  json meta = {{"command", command},      {"version", ans_version()},
               {"seed", g.seed},          {"out_dir", g.out_dir},
               {"bins", g.bins},          {"started", timestamp()}};
  std::vector<std::string> args(argv, argv + argc);
  meta["argv"] = args;

  try {
    json flags;
    if (command == "synth") flags = run_synth(synth, g, out);
    else if (command == "train") flags = run_train(train, g, out);
    else if (command == "rank") flags = run_rank(rank, g, out);
    else if (command == "pca") flags = run_pca(pca, g, out);
    else flags = run_bench(bench, g, out);
    meta["flags"] = flags;
    meta["finished"] = timestamp();
    json files = json::array();
    for (const auto& f : out.files()) files.push_back(f.string());
    meta["outputs"] = files;
    const std::string sidecar = out.claim_in_dir(command + ".run.json");
    std::ofstream(sidecar) << meta.dump(2) << "\n";
  } catch (const UsageError& e) {
    out.rollback();
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    out.rollback();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
