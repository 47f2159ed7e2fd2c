#include "ans/autoencoder.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "ans/error.hpp"

namespace ans {
namespace {

constexpr double kUpperSaturation = 1.0 - 0x1p-53;
constexpr char kMagic[4] = {'A', 'N', 'S', 'M'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8;

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
             std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
             std::to_string(b.cols()) + " differ");
  }
}

template <typename T>
void put_le(std::string& out, T value) {
  auto bits = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

std::uint32_t crc_of(const unsigned char* data, std::size_t len) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large payloads in pieces.
  while (len > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    len -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void AutoencoderModel::validate() const {
  if (encoder_bias.size() != weights.rows() || decoder_bias.size() != weights.cols()) {
    fail(ErrorCode::kDimensionMismatch, "model bias sizes do not match weight matrix " +
                                            std::to_string(weights.rows()) + "x" +
                                            std::to_string(weights.cols()));
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(weights.flat().begin(), weights.flat().end(), finite) ||
      !std::all_of(encoder_bias.begin(), encoder_bias.end(), finite) ||
      !std::all_of(decoder_bias.begin(), decoder_bias.end(), finite)) {
    fail(ErrorCode::kInvalidArgument, "model has non-finite parameters");
  }
}

double sigmoid(double z) noexcept {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  return std::clamp(s, std::numeric_limits<double>::denorm_min(), kUpperSaturation);
}

Matrix encode(const AutoencoderModel& model, const Matrix& samples) {
  const std::size_t m = model.hidden_width();
  if (samples.cols() != model.input_width()) {
    fail(ErrorCode::kDimensionMismatch, "encode: input has " + std::to_string(samples.cols()) +
                                            " features, model expects " +
                                            std::to_string(model.input_width()));
  }
  Matrix act(m, samples.rows());
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    auto x = samples.row(i);
    for (std::size_t s = 0; s < m; ++s) {
      act(s, i) = sigmoid(dot(model.weights.row(s), x) + model.encoder_bias[s]);
    }
  }
  return act;
}

Matrix decode(const AutoencoderModel& model, const Matrix& activations) {
  const std::size_t m = model.hidden_width();
  const std::size_t d = model.input_width();
  if (activations.rows() != m) {
    fail(ErrorCode::kDimensionMismatch, "decode: activations have " +
                                            std::to_string(activations.rows()) +
                                            " rows, model has " + std::to_string(m) + " nodes");
  }
  const std::size_t n = activations.cols();
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto y = out.row(i);
    std::copy(model.decoder_bias.begin(), model.decoder_bias.end(), y.begin());
    for (std::size_t s = 0; s < m; ++s) {
      const double a = activations(s, i);
      auto w = model.weights.row(s);
      for (std::size_t j = 0; j < d; ++j) y[j] += a * w[j];
    }
    for (auto& v : y) v = sigmoid(v);
  }
  return out;
}

double mse_loss(const Matrix& original, const Matrix& reconstruction) {
  require_same_shape(original, reconstruction, "mse_loss");
  if (original.empty()) fail(ErrorCode::kEmpty, "mse_loss of empty matrices");
  auto a = original.flat();
  auto b = reconstruction.flat();
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = b[k] - a[k];
    acc += diff * diff;
  }
  return acc / static_cast<double>(a.size());
}

double pearson(const Matrix& original, const Matrix& reconstruction) {
  require_same_shape(original, reconstruction, "pearson");
  auto a = original.flat();
  auto b = reconstruction.flat();
  if (a.size() < 2) fail(ErrorCode::kInvalidArgument, "pearson needs at least 2 entries");
  const double count = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    mean_a += a[k];
    mean_b += b[k];
  }
  mean_a /= count;
  mean_b /= count;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double da = a[k] - mean_a;
    const double db = b[k] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a <= 0.0 || var_b <= 0.0)
    fail(ErrorCode::kInvalidArgument, "pearson undefined for zero-variance input");
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

void Gradients::set_zero() {
  std::fill(weights.flat().begin(), weights.flat().end(), 0.0);
  std::fill(encoder_bias.begin(), encoder_bias.end(), 0.0);
  std::fill(decoder_bias.begin(), decoder_bias.end(), 0.0);
  loss = 0.0;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  auto dst = weights.flat();
  auto src = other.weights.flat();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  for (std::size_t s = 0; s < encoder_bias.size(); ++s) encoder_bias[s] += other.encoder_bias[s];
  for (std::size_t j = 0; j < decoder_bias.size(); ++j) decoder_bias[j] += other.decoder_bias[j];
  loss += other.loss;
  return *this;
}

void accumulate_gradient_sums(const AutoencoderModel& model, const Matrix& samples,
                              std::size_t begin, std::size_t end, Gradients& sums) {
  const std::size_t m = model.hidden_width();
  const std::size_t d = model.input_width();
  if (samples.cols() != d) {
    fail(ErrorCode::kDimensionMismatch, "gradient: batch has " + std::to_string(samples.cols()) +
                                            " features, model expects " + std::to_string(d));
  }
  std::vector<double> act(m);
  std::vector<double> out(d);
  std::vector<double> out_delta(d);

  for (std::size_t i = begin; i < end; ++i) {
    auto x = samples.row(i);
    for (std::size_t s = 0; s < m; ++s)
      act[s] = sigmoid(dot(model.weights.row(s), x) + model.encoder_bias[s]);

    std::copy(model.decoder_bias.begin(), model.decoder_bias.end(), out.begin());
    for (std::size_t s = 0; s < m; ++s) {
      auto w = model.weights.row(s);
      for (std::size_t j = 0; j < d; ++j) out[j] += act[s] * w[j];
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double y = sigmoid(out[j]);
      const double diff = y - x[j];
      sums.loss += diff * diff;
      out_delta[j] = diff * y * (1.0 - y);
      sums.decoder_bias[j] += out_delta[j];
    }

    for (std::size_t s = 0; s < m; ++s) {
      auto w = model.weights.row(s);
      const double hidden_delta = dot(w, out_delta) * act[s] * (1.0 - act[s]);
      sums.encoder_bias[s] += hidden_delta;
      auto g = sums.weights.row(s);
      // Decoder contribution (through W^T) plus encoder contribution.
      for (std::size_t j = 0; j < d; ++j) g[j] += act[s] * out_delta[j] + hidden_delta * x[j];
    }
  }
}

void finalize_gradient_sums(Gradients& sums, std::size_t total_rows, std::size_t input_width) {
  const double entries = static_cast<double>(total_rows) * static_cast<double>(input_width);
  const double scale = 2.0 / entries;
  for (auto& v : sums.weights.flat()) v *= scale;
  for (auto& v : sums.encoder_bias) v *= scale;
  for (auto& v : sums.decoder_bias) v *= scale;
  sums.loss /= entries;
}

Gradients gradients(const AutoencoderModel& model, const Matrix& batch) {
  if (batch.rows() == 0) fail(ErrorCode::kEmpty, "gradient of an empty batch");
  Gradients g(model.hidden_width(), model.input_width());
  accumulate_gradient_sums(model, batch, 0, batch.rows(), g);
  finalize_gradient_sums(g, batch.rows(), model.input_width());
  return g;
}

void save_model(const AutoencoderModel& model, const std::filesystem::path& path) {
  model.validate();
  const std::size_t m = model.hidden_width();
  const std::size_t d = model.input_width();
  std::string bytes;
  bytes.reserve(kHeaderBytes + 8 * (m * d + m + d) + 4);
  bytes.append(kMagic, 4);
  put_le(bytes, kFormatVersion);
  put_le(bytes, static_cast<std::uint64_t>(m));
  put_le(bytes, static_cast<std::uint64_t>(d));
  for (double v : model.weights.flat()) put_le(bytes, v);
  for (double v : model.encoder_bias) put_le(bytes, v);
  for (double v : model.decoder_bias) put_le(bytes, v);
  const auto* payload = reinterpret_cast<const unsigned char*>(bytes.data()) + kHeaderBytes;
  put_le(bytes, crc_of(payload, bytes.size() - kHeaderBytes));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write model file " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

AutoencoderModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open model file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 8) fail(ErrorCode::kTruncated, "model file truncated in header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    fail(ErrorCode::kFormatVersion, "model file has bad magic bytes");
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kFormatVersion)
    fail(ErrorCode::kFormatVersion, "unsupported model format version " + std::to_string(version));
  if (bytes.size() < kHeaderBytes) fail(ErrorCode::kTruncated, "model file truncated in header");

  const auto m = get_le<std::uint64_t>(bytes.data() + 8);
  const auto d = get_le<std::uint64_t>(bytes.data() + 16);
  constexpr std::uint64_t kMaxCount = std::numeric_limits<std::uint64_t>::max() / 16;
  if (m == 0 || d == 0 || m > kMaxCount / d)
    fail(ErrorCode::kDimensionMismatch, "model header has invalid dimensions");
  const std::uint64_t count = m * d + m + d;
  const std::uint64_t expected = kHeaderBytes + 8 * count + 4;
  if (bytes.size() < expected) fail(ErrorCode::kTruncated, "model file truncated in payload");
  if (bytes.size() > expected)
    fail(ErrorCode::kDimensionMismatch, "model header dimensions do not match payload size");

  const unsigned char* payload = bytes.data() + kHeaderBytes;
  const std::size_t payload_bytes = static_cast<std::size_t>(8 * count);
  if (crc_of(payload, payload_bytes) != get_le<std::uint32_t>(payload + payload_bytes))
    fail(ErrorCode::kCorrupt, "model payload checksum mismatch");

  AutoencoderModel model(static_cast<std::size_t>(m), static_cast<std::size_t>(d));
  const unsigned char* p = payload;
  for (auto& v : model.weights.flat()) { v = get_le<double>(p); p += 8; }
  for (auto& v : model.encoder_bias) { v = get_le<double>(p); p += 8; }
  for (auto& v : model.decoder_bias) { v = get_le<double>(p); p += 8; }
  model.validate();
  return model;
}

}  // namespace ans
