#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "ans/dataio.hpp"
#include "ans/matrix.hpp"

namespace ans {

struct PcaModel {
  std::vector<double> mean;         // d
  Matrix components;                // c x d, orthonormal rows
  std::vector<double> eigenvalues;  // c, descending

  std::size_t num_components() const noexcept { return components.rows(); }
};

// Sample covariance (1/(n-1)) of the mean-centred rows.
Matrix covariance(const Matrix& samples, std::vector<double>* mean_out = nullptr);

// Top `components` eigenpairs of the sample covariance by power iteration
// with deflation. Each component is iterated until the eigen-residual
// |Cv - lambda v| falls below tol * trace(C). Components are signed so that
// their largest-magnitude coordinate is positive. If the remaining variance
// is zero, the component is the next canonical axis orthogonal to the ones
// found so far, with eigenvalue 0.
PcaModel fit_pca(const Matrix& samples, std::size_t components, double tol = 1e-12,
                 std::size_t max_iter = 100000);

// n x c scores: (x - mean) projected on each component.
Matrix project(const PcaModel& model, const Matrix& samples);

// sample_id,pc1,...,pcC,label,group. Missing labels or tags leave the cell empty.
void write_scores_csv(const Matrix& scores, const LabeledDataset& dataset,
                      const std::filesystem::path& path);

}  // namespace ans
