#include "ans/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "ans/error.hpp"
#include "text.hpp"

namespace ans {
namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSplitStream = 2;
constexpr std::uint64_t kShuffleStreamBase = 1000;

void apply_update(AutoencoderModel& model, const Gradients& g, double rate) {
  auto w = model.weights.flat();
  auto gw = g.weights.flat();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] -= rate * gw[k];
  for (std::size_t s = 0; s < model.encoder_bias.size(); ++s)
    model.encoder_bias[s] -= rate * g.encoder_bias[s];
  for (std::size_t j = 0; j < model.decoder_bias.size(); ++j)
    model.decoder_bias[j] -= rate * g.decoder_bias[j];
}

double quiet_pearson(const Matrix& a, const Matrix& b) {
  try {
    return pearson(a, b);
  } catch (const Error&) {
    return std::nan("");
  }
}

TrainResult run_training(const Matrix& train_set, const Matrix& validation_set,
                         const TrainConfig& config, bool record_metrics) {
  config.validate();
  const std::size_t n = train_set.rows();
  const std::size_t d = train_set.cols();
  if (n == 0) fail(ErrorCode::kEmpty, "training set is empty");
  if (config.batch_size > n) {
    fail(ErrorCode::kInvalidArgument, "batch size " + std::to_string(config.batch_size) +
                                          " exceeds training set size " + std::to_string(n));
  }
  if (!validation_set.empty() && validation_set.cols() != d)
    fail(ErrorCode::kDimensionMismatch, "validation set feature count differs from training set");

  TrainResult result;
  result.model = init_weights(config.hidden_width, d, derive_seed(config.seed, kInitStream));
  auto& model = result.model;
  ParallelGradient grad(config.workers, config.hidden_width, d);

  std::vector<std::size_t> order(n);
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    if (config.shuffle) {
      std::mt19937_64 rng(derive_seed(config.seed, kShuffleStreamBase + epoch));
      std::shuffle(order.begin(), order.end(), rng);
    }

    const auto started = std::chrono::steady_clock::now();
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      const Matrix batch = train_set.select_rows(
          std::span<const std::size_t>(order.data() + start, stop - start));
      const Gradients& g = grad.compute(model, batch);
      if (!std::isfinite(g.loss)) {
        fail(ErrorCode::kDivergence, "non-finite loss at epoch " + std::to_string(epoch) +
                                         ", batch " + std::to_string(batch_index + 1));
      }
      apply_update(model, g, config.learning_rate);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.seconds = elapsed.count();
    if (record_metrics) {
      rec.train_mse = mse_loss(train_set, decode(model, encode(model, train_set)));
      if (!std::isfinite(rec.train_mse))
        fail(ErrorCode::kDivergence, "non-finite training loss after epoch " + std::to_string(epoch));
      if (!validation_set.empty()) {
        const Matrix recon = decode(model, encode(model, validation_set));
        rec.val_mse = mse_loss(validation_set, recon);
        rec.val_pearson = quiet_pearson(validation_set, recon);
      } else {
        rec.val_mse = std::nan("");
        rec.val_pearson = std::nan("");
      }
    }
    result.history.epochs.push_back(rec);
  }
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  if (hidden_width < 1) fail(ErrorCode::kInvalidArgument, "hidden width must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    fail(ErrorCode::kInvalidArgument, "learning rate must be finite and >= 0");
  if (batch_size < 1) fail(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (epochs < 1) fail(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (workers < 1) fail(ErrorCode::kInvalidArgument, "workers must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    fail(ErrorCode::kInvalidArgument, "validation fraction must lie in (0,1)");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

AutoencoderModel init_weights(std::size_t hidden, std::size_t input, std::uint64_t seed) {
  if (hidden < 1 || input < 1)
    fail(ErrorCode::kInvalidArgument, "model dimensions must be >= 1");
  AutoencoderModel model(hidden, input);
  const double bound = std::sqrt(6.0 / static_cast<double>(hidden + input));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& w : model.weights.flat()) w = dist(rng);
  return model;
}

ShardPool::ShardPool(std::size_t size)
    : size_(size),
      start_(static_cast<std::ptrdiff_t>(size)),
      done_(static_cast<std::ptrdiff_t>(size)),
      failures_(size) {
  if (size < 1) fail(ErrorCode::kInvalidArgument, "worker count must be >= 1");
  threads_.reserve(size - 1);
  for (std::size_t shard = 1; shard < size; ++shard)
    threads_.emplace_back([this, shard] { worker_loop(shard); });
}

ShardPool::~ShardPool() {
  stopping_ = true;
  start_.arrive_and_wait();
  threads_.clear();
}

void ShardPool::worker_loop(std::size_t shard) {
  for (;;) {
    start_.arrive_and_wait();
    if (stopping_) return;
    try {
      (*job_)(shard);
    } catch (...) {
      failures_[shard] = std::current_exception();
    }
    done_.arrive_and_wait();
  }
}

void ShardPool::run(const std::function<void(std::size_t)>& job) {
  job_ = &job;
  std::fill(failures_.begin(), failures_.end(), nullptr);
  start_.arrive_and_wait();
  try {
    job(0);
  } catch (...) {
    failures_[0] = std::current_exception();
  }
  done_.arrive_and_wait();
  job_ = nullptr;
  for (const auto& f : failures_) {
    if (f) std::rethrow_exception(f);
  }
}

ParallelGradient::ParallelGradient(std::size_t workers, std::size_t hidden, std::size_t input)
    : pool_(workers), shards_(workers, Gradients(hidden, input)) {}

const Gradients& ParallelGradient::compute(const AutoencoderModel& model, const Matrix& batch) {
  const std::size_t n = batch.rows();
  if (n == 0) fail(ErrorCode::kEmpty, "gradient of an empty batch");
  const std::size_t workers = pool_.size();
  pool_.run([&](std::size_t shard) {
    Gradients& g = shards_[shard];
    g.set_zero();
    const std::size_t begin = shard * n / workers;
    const std::size_t end = (shard + 1) * n / workers;
    accumulate_gradient_sums(model, batch, begin, end, g);
  });
  Gradients& total = shards_[0];
  for (std::size_t shard = 1; shard < workers; ++shard) total += shards_[shard];
  finalize_gradient_sums(total, n, model.input_width());
  return total;
}

Gradients parallel_gradient(const AutoencoderModel& model, const Matrix& batch,
                            std::size_t workers) {
  ParallelGradient pg(workers, model.hidden_width(), model.input_width());
  return pg.compute(model, batch);
}

TrainResult train(const LabeledDataset& dataset, const TrainConfig& config) {
  config.validate();
  auto split = split_indices(dataset.num_samples(), config.validation_fraction,
                             derive_seed(config.seed, kSplitStream));
  return run_training(dataset.values.select_rows(split.train),
                      dataset.values.select_rows(split.validation), config, true);
}

TrainResult train(const Matrix& train_set, const Matrix& validation_set,
                  const TrainConfig& config) {
  return run_training(train_set, validation_set, config, true);
}

std::vector<ScalingRow> benchmark_scaling(const LabeledDataset& dataset,
                                          const TrainConfig& config,
                                          std::span<const std::size_t> worker_counts) {
  if (worker_counts.empty()) fail(ErrorCode::kInvalidArgument, "no worker counts given");
  config.validate();
  auto split = split_indices(dataset.num_samples(), config.validation_fraction,
                             derive_seed(config.seed, kSplitStream));
  const Matrix train_set = dataset.values.select_rows(split.train);

  std::vector<ScalingRow> rows;
  for (auto workers : worker_counts) {
    TrainConfig cfg = config;
    cfg.workers = workers;
    auto result = run_training(train_set, Matrix(), cfg, false);
    double total = 0.0;
    for (const auto& e : result.history.epochs) total += e.seconds;
    rows.push_back({workers, total / static_cast<double>(result.history.epochs.size()), 0.0});
  }
  auto base = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.workers == 1; });
  const double baseline = (base != rows.end() ? *base : rows.front()).mean_epoch_seconds;
  for (auto& r : rows) r.speedup = r.workers == 1 ? 1.0 : baseline / r.mean_epoch_seconds;
  return rows;
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write history file " + path.string());
  out << "epoch,train_mse,val_mse,val_pearson,seconds\n";
  for (const auto& e : history.epochs) {
    out << e.epoch << ',' << text::format_double(e.train_mse) << ','
        << text::format_double(e.val_mse) << ',' << text::format_double(e.val_pearson) << ','
        << text::format_double(e.seconds) << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

void write_benchmark_csv(std::span<const ScalingRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write benchmark file " + path.string());
  out << "workers,mean_epoch_seconds,speedup\n";
  for (const auto& r : rows) {
    out << r.workers << ',' << text::format_double(r.mean_epoch_seconds) << ','
        << text::format_double(r.speedup) << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace ans
