#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "ans/matrix.hpp"

namespace ans {

// Single hidden layer, sigmoid units, tied weights: the decoder reuses the
// transpose of the encoder weight matrix.
struct AutoencoderModel {
  Matrix weights;                     // m x d
  std::vector<double> encoder_bias;   // m
  std::vector<double> decoder_bias;   // d

  AutoencoderModel() = default;
  AutoencoderModel(std::size_t hidden, std::size_t input)
      : weights(hidden, input), encoder_bias(hidden, 0.0), decoder_bias(input, 0.0) {}

  std::size_t hidden_width() const noexcept { return weights.rows(); }
  std::size_t input_width() const noexcept { return weights.cols(); }

  // Throws on inconsistent sizes or non-finite parameters.
  void validate() const;

  friend bool operator==(const AutoencoderModel&, const AutoencoderModel&) = default;
};

// Two-branch logistic function. Saturates one ulp inside (0,1) rather than
// rounding to exactly 0 or 1.
double sigmoid(double z) noexcept;

// Hidden activations, m x n: row s holds node s over all samples.
Matrix encode(const AutoencoderModel& model, const Matrix& samples);

// Reconstruction, n x d, from m x n activations.
Matrix decode(const AutoencoderModel& model, const Matrix& activations);

double mse_loss(const Matrix& original, const Matrix& reconstruction);

// Correlation of the two matrices flattened into single vectors.
double pearson(const Matrix& original, const Matrix& reconstruction);

struct Gradients {
  Matrix weights;
  std::vector<double> encoder_bias;
  std::vector<double> decoder_bias;
  double loss = 0.0;

  Gradients() = default;
  Gradients(std::size_t hidden, std::size_t input)
      : weights(hidden, input), encoder_bias(hidden, 0.0), decoder_bias(input, 0.0) {}

  void set_zero();
  // Elementwise accumulate, including the loss.
  Gradients& operator+=(const Gradients& other);
};

// Adds the un-normalized gradient contributions of rows [begin, end) of
// `samples` into `sums`: per-sample terms of d/dtheta sum((x'-x)^2) / 2, and
// sum((x'-x)^2) into sums.loss. Rows are visited in ascending order.
void accumulate_gradient_sums(const AutoencoderModel& model, const Matrix& samples,
                              std::size_t begin, std::size_t end, Gradients& sums);

// Turns sums over `total_rows` samples into the gradient of the mean loss.
void finalize_gradient_sums(Gradients& sums, std::size_t total_rows, std::size_t input_width);

// Exact gradient of mse_loss(batch, decode(encode(batch))).
Gradients gradients(const AutoencoderModel& model, const Matrix& batch);

void save_model(const AutoencoderModel& model, const std::filesystem::path& path);
AutoencoderModel load_model(const std::filesystem::path& path);

}  // namespace ans
