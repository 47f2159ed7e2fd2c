#include "ans/pca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ans/error.hpp"
#include "text.hpp"

namespace ans {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void multiply(const Matrix& c, std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < c.rows(); ++i) out[i] = dot(c.row(i), v);
}

// Removes the projections on the first `count` rows of `basis`.
void orthogonalize(std::span<double> v, const Matrix& basis, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    auto b = basis.row(k);
    const double proj = dot(v, b);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= proj * b[j];
  }
}

void normalize(std::span<double> v) {
  const double len = norm(v);
  for (auto& x : v) x /= len;
}

void fix_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (std::abs(v[j]) > std::abs(v[best])) best = j;
  }
  if (v[best] < 0.0) {
    for (auto& x : v) x = -x;
  }
}

// Deterministic start: all-ones with a per-component perturbation.
void start_vector(std::span<double> v, std::size_t component) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    const auto wobble = static_cast<double>((j * 7919 + component * 104729 + 17) % 1000);
    v[j] = 1.0 + wobble / 2000.0;
  }
}

// Next canonical axis that survives orthogonalization against found rows.
void canonical_fallback(std::span<double> v, const Matrix& basis, std::size_t count) {
  for (std::size_t axis = 0; axis < v.size(); ++axis) {
    std::fill(v.begin(), v.end(), 0.0);
    v[axis] = 1.0;
    orthogonalize(v, basis, count);
    orthogonalize(v, basis, count);
    if (norm(v) > 0.5) {
      normalize(v);
      return;
    }
  }
  fail(ErrorCode::kConvergence, "no orthogonal axis left for component " + std::to_string(count + 1));
}

}  // namespace

Matrix covariance(const Matrix& samples, std::vector<double>* mean_out) {
  const std::size_t n = samples.rows();
  const std::size_t d = samples.cols();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "covariance needs at least 2 samples");
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = samples.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (auto& m : mean) m /= static_cast<double>(n);

  Matrix cov(d, d);
  std::vector<double> centred(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = samples.row(i);
    for (std::size_t j = 0; j < d; ++j) centred[j] = row[j] - mean[j];
    for (std::size_t a = 0; a < d; ++a) {
      auto out = cov.row(a);
      for (std::size_t b = a; b < d; ++b) out[b] += centred[a] * centred[b];
    }
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov(a, b) /= denom;
      cov(b, a) = cov(a, b);
    }
  }
  if (mean_out) *mean_out = std::move(mean);
  return cov;
}

PcaModel fit_pca(const Matrix& samples, std::size_t components, double tol,
                 std::size_t max_iter) {
  const std::size_t n = samples.rows();
  const std::size_t d = samples.cols();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "PCA needs at least 2 samples");
  if (components < 1 || components > std::min(n - 1, d)) {
    fail(ErrorCode::kInvalidArgument, "cannot extract " + std::to_string(components) +
                                          " components from " + std::to_string(n) + "x" +
                                          std::to_string(d) + " data");
  }
  if (!(tol > 0.0)) fail(ErrorCode::kInvalidArgument, "tolerance must be positive");

  PcaModel model;
  const Matrix cov = covariance(samples, &model.mean);
  Matrix deflated = cov;
  model.components = Matrix(components, d);
  model.eigenvalues.assign(components, 0.0);

  double trace = 0.0;
  for (std::size_t j = 0; j < d; ++j) trace += cov(j, j);
  const double scale = trace;
  std::vector<double> next(d);

  for (std::size_t k = 0; k < components; ++k) {
    auto v = model.components.row(k);
    bool zero_variance = !(scale > 0.0);
    if (!zero_variance) {
      start_vector(v, k);
      orthogonalize(v, model.components, k);
      normalize(v);
      bool converged = false;
      for (std::size_t it = 0; it < max_iter; ++it) {
        multiply(deflated, v, next);
        orthogonalize(next, model.components, k);
        const double len = norm(next);
        if (len <= 1e-13 * scale) {
          zero_variance = true;
          break;
        }
        const double lambda = dot(v, next);
        double residual = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double r = next[j] - lambda * v[j];
          residual += r * r;
        }
        for (std::size_t j = 0; j < d; ++j) v[j] = next[j] / len;
        if (std::sqrt(residual) <= tol * scale) {
          converged = true;
          break;
        }
      }
      if (!converged && !zero_variance) {
        fail(ErrorCode::kConvergence, "power iteration did not converge for component " +
                                          std::to_string(k + 1) + " within " +
                                          std::to_string(max_iter) + " iterations");
      }
    }
    if (zero_variance) {
      canonical_fallback(v, model.components, k);
      model.eigenvalues[k] = 0.0;
    } else {
      orthogonalize(v, model.components, k);
      normalize(v);
      multiply(cov, v, next);
      model.eigenvalues[k] = dot(v, next);
    }
    fix_sign(v);
    // Deflate: C <- C - lambda v v^T.
    const double lambda = model.eigenvalues[k];
    for (std::size_t a = 0; a < d; ++a) {
      auto row = deflated.row(a);
      for (std::size_t b = 0; b < d; ++b) row[b] -= lambda * v[a] * v[b];
    }
  }

  // Near-equal eigenvalues can come out of iteration slightly out of order.
  std::vector<std::size_t> order(components);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return model.eigenvalues[a] > model.eigenvalues[b];
  });
  if (!std::is_sorted(order.begin(), order.end())) {
    PcaModel sorted;
    sorted.mean = model.mean;
    sorted.components = model.components.select_rows(order);
    for (auto i : order) sorted.eigenvalues.push_back(model.eigenvalues[i]);
    return sorted;
  }
  return model;
}

Matrix project(const PcaModel& model, const Matrix& samples) {
  const std::size_t d = model.mean.size();
  if (samples.cols() != d) {
    fail(ErrorCode::kDimensionMismatch, "PCA model expects " + std::to_string(d) +
                                            " features, data has " +
                                            std::to_string(samples.cols()));
  }
  const std::size_t c = model.num_components();
  Matrix scores(samples.rows(), c);
  std::vector<double> centred(d);
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    auto row = samples.row(i);
    for (std::size_t j = 0; j < d; ++j) centred[j] = row[j] - model.mean[j];
    for (std::size_t k = 0; k < c; ++k) scores(i, k) = dot(centred, model.components.row(k));
  }
  return scores;
}

void write_scores_csv(const Matrix& scores, const LabeledDataset& dataset,
                      const std::filesystem::path& path) {
  if (scores.rows() != dataset.num_samples())
    fail(ErrorCode::kDimensionMismatch, "score rows do not match dataset samples");
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write scores file " + path.string());
  out << "sample_id";
  for (std::size_t k = 0; k < scores.cols(); ++k) out << ",pc" << k + 1;
  out << ",label,group\n";
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    out << dataset.sample_ids[i];
    for (double v : scores.row(i)) out << ',' << text::format_double(v);
    out << ',';
    if (dataset.labels) out << (*dataset.labels)[i];
    out << ',';
    if (dataset.group_tags) out << (*dataset.group_tags)[i];
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace ans
