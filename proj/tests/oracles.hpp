// Slow, independent reference implementations used by the unit tests and the
// acceptance runner. None of them call into the library's numeric code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "ans/autoencoder.hpp"
#include "ans/matrix.hpp"

namespace oracle {

// Counts per bin for each class, 0-based bins.
struct Counts {
  std::size_t k = 0;
  std::vector<std::size_t> c0;
  std::vector<std::size_t> c1;
};

struct Saliency {
  double ned = 0, ned0 = 0, ned1 = 0, wce0 = 0, wce1 = 0, sns = 0;
  bool good = false;
};

inline double log2_of(double x) { return std::log(x) / std::log(2.0); }

inline double entropy_score(const std::vector<std::size_t>& counts, std::size_t khat) {
  if (khat <= 1) return 1.0;
  std::size_t total = 0;
  for (auto c : counts) total += c;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = double(c) / double(total);
    h -= p * log2_of(p);
  }
  double v = 1.0 - h / log2_of(double(khat));
  return v < 0 ? 0 : (v > 1 ? 1 : v);
}

inline Saliency evaluate(const Counts& h) {
  const std::size_t k = h.k;
  std::vector<std::size_t> all(k);
  std::size_t khat = 0, n = 0;
  for (std::size_t r = 0; r < k; ++r) {
    all[r] = h.c0[r] + h.c1[r];
    n += all[r];
    if (all[r]) ++khat;
  }
  Saliency s;
  s.ned = entropy_score(all, khat);
  s.ned0 = entropy_score(h.c0, khat);
  s.ned1 = entropy_score(h.c1, khat);
  const double eps = 1e-12;
  auto clampq = [&](double q) { return q < eps ? eps : (q > 1 - eps ? 1 - eps : q); };
  for (int orient = 0; orient < 2; ++orient) {
    double acc = 0.0;
    for (std::size_t r = 1; r <= k; ++r) {
      const std::size_t c = all[r - 1];
      if (c == 0) continue;
      double p = (2 * r >= k && r >= 2) ? 1.0 : 0.0;
      if (orient == 0) p = 1.0 - p;
      const double q1 = clampq(double(h.c1[r - 1]) / double(c));
      const double q0 = clampq(double(h.c0[r - 1]) / double(c));
      acc += double(c) / double(n) * (-p * log2_of(q1) - (1 - p) * log2_of(q0));
    }
    (orient == 0 ? s.wce0 : s.wce1) = acc;
  }
  s.sns = std::min(s.wce0, s.wce1);
  s.good = s.ned < s.ned0 && s.ned < s.ned1;
  return s;
}

// Bin membership by sorting and sweeping the edges r/k upward.
inline std::vector<std::size_t> sweep_bins(const std::vector<double>& a, std::size_t k) {
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x] < a[y]; });
  std::vector<std::size_t> bin(a.size());
  std::size_t r = 0;
  for (auto i : order) {
    while (r + 1 < k && a[i] >= double(r + 1) / double(k)) ++r;
    bin[i] = r;
  }
  return bin;
}

// Forward pass written as plain loops over one sample at a time.
inline double loss(const ans::AutoencoderModel& m, const ans::Matrix& x) {
  const std::size_t hidden = m.weights.rows(), d = m.weights.cols();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<double> a(hidden);
    for (std::size_t s = 0; s < hidden; ++s) {
      double z = m.encoder_bias[s];
      for (std::size_t j = 0; j < d; ++j) z += m.weights(s, j) * x(i, j);
      a[s] = 1.0 / (1.0 + std::exp(-z));
    }
    for (std::size_t j = 0; j < d; ++j) {
      double z = m.decoder_bias[j];
      for (std::size_t s = 0; s < hidden; ++s) z += m.weights(s, j) * a[s];
      const double y = 1.0 / (1.0 + std::exp(-z));
      acc += (y - x(i, j)) * (y - x(i, j));
    }
  }
  return acc / double(x.rows() * d);
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues descending with unit eigenvectors as rows.
inline std::pair<std::vector<double>, ans::Matrix> jacobi(ans::Matrix a) {
  const std::size_t n = a.rows();
  ans::Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return a(x, x) > a(y, y); });
  std::vector<double> vals(n);
  ans::Matrix vecs(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = a(idx[i], idx[i]);
    for (std::size_t r = 0; r < n; ++r) vecs(i, r) = v(r, idx[i]);
  }
  return {vals, vecs};
}

inline ans::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                 double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ans::Matrix m(rows, cols);
  for (auto& x : m.flat()) x = u(rng);
  return m;
}

inline ans::AutoencoderModel random_model(std::size_t hidden, std::size_t d,
                                          std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  ans::AutoencoderModel m(hidden, d);
  for (auto& w : m.weights.flat()) w = u(rng);
  for (auto& b : m.encoder_bias) b = u(rng);
  for (auto& b : m.decoder_bias) b = u(rng);
  return m;
}

}  // namespace oracle
