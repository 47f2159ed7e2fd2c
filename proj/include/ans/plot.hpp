#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "ans/matrix.hpp"
#include "ans/saliency.hpp"

namespace ans::plot {

// Grouped bars per activation bin, class 0 and class 1 side by side.
std::string histogram_svg(const ActivationHistogram& hist, const std::string& title);

// Bars of a node's weight histogram.
std::string weight_histogram_svg(const WeightProfile& profile, const std::string& title);

// First two score columns, one colour per distinct category.
std::string scatter_svg(const Matrix& scores, std::span<const std::string> categories,
                        const std::string& title);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ans::plot
