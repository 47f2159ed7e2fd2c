#include "ans/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ans/error.hpp"

namespace ans::plot {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

// Fixed two-decimal coordinates keep output bytes stable.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"24.00\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"15\">" << escape(title) << "</text>\n";
}

void axes(std::ostringstream& os) {
  const double x0 = kLeft, y0 = kHeight - kBottom;
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(kWidth - kRight)
     << "\" y2=\"" << num(y0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0)
     << "\" y2=\"" << num(y0) << "\" stroke=\"black\"/>\n";
}

void text_at(std::ostringstream& os, double x, double y, const std::string& s,
             const char* anchor = "middle") {
  os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor
     << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s) << "</text>\n";
}

void legend(std::ostringstream& os, std::span<const std::string> names) {
  double y = kTop + 4;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double x = kWidth - kRight - 110;
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"10.00\" height=\"10.00\" fill=\""
       << kPalette[i % std::size(kPalette)] << "\"/>\n";
    text_at(os, x + 16, y + 9, names[i], "start");
    y += 16;
  }
}

}  // namespace

std::string histogram_svg(const ActivationHistogram& hist, const std::string& title) {
  std::ostringstream os;
  open_svg(os, title);
  axes(os);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t peak = std::max<std::size_t>(
      1, std::max(*std::max_element(hist.class0.begin(), hist.class0.end()),
                  *std::max_element(hist.class1.begin(), hist.class1.end())));
  const double slot = plot_w / static_cast<double>(hist.bins);
  const double bar = slot * 0.4;
  for (std::size_t r = 0; r < hist.bins; ++r) {
    const std::size_t series[2] = {hist.class0[r], hist.class1[r]};
    for (int c = 0; c < 2; ++c) {
      const double h = plot_h * static_cast<double>(series[c]) / static_cast<double>(peak);
      const double x = kLeft + slot * r + slot * 0.1 + bar * c;
      os << "<rect x=\"" << num(x) << "\" y=\"" << num(kHeight - kBottom - h) << "\" width=\""
         << num(bar) << "\" height=\"" << num(h) << "\" fill=\"" << kPalette[c] << "\"/>\n";
    }
  }
  for (std::size_t r = 0; r <= hist.bins; ++r) {
    text_at(os, kLeft + slot * r, kHeight - kBottom + 16,
            num(static_cast<double>(r) / static_cast<double>(hist.bins)));
  }
  text_at(os, kLeft + plot_w / 2, kHeight - 10, "activation");
  text_at(os, kLeft - 8, kTop + 8, std::to_string(peak), "end");
  text_at(os, kLeft - 8, kHeight - kBottom, "0", "end");
  const std::string names[] = {"class 0", "class 1"};
  legend(os, names);
  os << "</svg>\n";
  return os.str();
}

std::string weight_histogram_svg(const WeightProfile& profile, const std::string& title) {
  std::ostringstream os;
  open_svg(os, title);
  axes(os);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t bins = profile.histogram.size();
  const std::size_t peak =
      std::max<std::size_t>(1, *std::max_element(profile.histogram.begin(), profile.histogram.end()));
  const double slot = plot_w / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double h = plot_h * static_cast<double>(profile.histogram[b]) / static_cast<double>(peak);
    os << "<rect x=\"" << num(kLeft + slot * b) << "\" y=\"" << num(kHeight - kBottom - h)
       << "\" width=\"" << num(slot * 0.9) << "\" height=\"" << num(h) << "\" fill=\""
       << kPalette[0] << "\"/>\n";
  }
  text_at(os, kLeft, kHeight - kBottom + 16, num(profile.lo));
  text_at(os, kWidth - kRight, kHeight - kBottom + 16, num(profile.hi));
  text_at(os, kLeft + plot_w / 2, kHeight - 10, "weight");
  text_at(os, kLeft - 8, kTop + 8, std::to_string(peak), "end");
  os << "</svg>\n";
  return os.str();
}

std::string scatter_svg(const Matrix& scores, std::span<const std::string> categories,
                        const std::string& title) {
  if (scores.cols() < 2) fail(ErrorCode::kInvalidArgument, "scatter plot needs two score columns");
  if (categories.size() != scores.rows())
    fail(ErrorCode::kDimensionMismatch, "one category per scored sample is required");
  std::ostringstream os;
  open_svg(os, title);
  axes(os);
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const double x = scores(i, 0), y = scores(i, 1);
    if (i == 0) {
      xmin = xmax = x;
      ymin = ymax = y;
    }
    xmin = std::min(xmin, x); xmax = std::max(xmax, x);
    ymin = std::min(ymin, y); ymax = std::max(ymax, y);
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  std::map<std::string, std::size_t> colour;
  std::vector<std::string> names;
  for (const auto& c : categories) {
    if (colour.emplace(c, colour.size()).second) names.push_back(c);
  }
  const double plot_w = kWidth - kLeft - kRight - 120;
  const double plot_h = kHeight - kTop - kBottom;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const double px = kLeft + 6 + (scores(i, 0) - xmin) / (xmax - xmin) * (plot_w - 12);
    const double py = kHeight - kBottom - 6 - (scores(i, 1) - ymin) / (ymax - ymin) * (plot_h - 12);
    os << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3.00\" fill=\""
       << kPalette[colour[categories[i]] % std::size(kPalette)] << "\" fill-opacity=\"0.8\"/>\n";
  }
  text_at(os, kLeft + plot_w / 2, kHeight - 10, "pc1");
  text_at(os, 16, kTop + plot_h / 2, "pc2");
  legend(os, names);
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace ans::plot
