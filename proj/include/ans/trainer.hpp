#pragma once

#include <barrier>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "ans/autoencoder.hpp"
#include "ans/dataio.hpp"

namespace ans {

struct TrainConfig {
  std::size_t hidden_width = 64;
  double learning_rate = 2.0;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  double validation_fraction = 0.2;
  bool shuffle = true;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  double val_pearson = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  AutoencoderModel model;
  TrainHistory history;
};

// Independent streams derived from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Glorot-uniform weights in [-sqrt(6/(m+d)), sqrt(6/(m+d))], zero biases.
AutoencoderModel init_weights(std::size_t hidden, std::size_t input, std::uint64_t seed);

// Runs a job on `size` shards: shard 0 on the calling thread, the others on
// persistent background threads. run() returns once every shard finished and
// rethrows the first shard failure in shard order.
class ShardPool {
 public:
  explicit ShardPool(std::size_t size);
  ~ShardPool();
  ShardPool(const ShardPool&) = delete;
  ShardPool& operator=(const ShardPool&) = delete;

  std::size_t size() const noexcept { return size_; }
  void run(const std::function<void(std::size_t)>& job);

 private:
  void worker_loop(std::size_t shard);

  std::size_t size_;
  std::barrier<> start_;
  std::barrier<> done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  bool stopping_ = false;
  std::vector<std::exception_ptr> failures_;
  std::vector<std::jthread> threads_;
};

// Data-parallel gradient: the batch is cut into `pool.size()` contiguous
// shards, shard sums are computed concurrently, added in ascending shard
// order and scaled to the full-batch mean. With one shard the result is
// bit-identical to gradients().
class ParallelGradient {
 public:
  ParallelGradient(std::size_t workers, std::size_t hidden, std::size_t input);

  const Gradients& compute(const AutoencoderModel& model, const Matrix& batch);

 private:
  ShardPool pool_;
  std::vector<Gradients> shards_;
};

Gradients parallel_gradient(const AutoencoderModel& model, const Matrix& batch,
                            std::size_t workers);

// Splits `dataset` with config.validation_fraction and runs plain minibatch SGD.
TrainResult train(const LabeledDataset& dataset, const TrainConfig& config);

// Same, on an explicit train/validation pair of normalized matrices.
TrainResult train(const Matrix& train_set, const Matrix& validation_set,
                  const TrainConfig& config);

struct ScalingRow {
  std::size_t workers = 0;
  double mean_epoch_seconds = 0.0;
  double speedup = 0.0;
};

// Times config.epochs epochs per worker count. Speedup is relative to the
// workers=1 row, or to the first row when 1 is not listed.
std::vector<ScalingRow> benchmark_scaling(const LabeledDataset& dataset,
                                          const TrainConfig& config,
                                          std::span<const std::size_t> worker_counts);

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);
void write_benchmark_csv(std::span<const ScalingRow> rows, const std::filesystem::path& path);

}  // namespace ans
