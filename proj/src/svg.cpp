#include "mide/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mide::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 60.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(const std::string& title) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << escape(title) << "</text>\n";
  return out.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

}  // namespace

Figure::Figure(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

std::string Figure::render() const {
  Range rx, ry;
  for (const auto& s : series_)
    for (const auto& [x, y] : s.points) rx.add(x), ry.add(y);
  for (const auto& g : segments_) rx.add(g.x0), rx.add(g.x1), ry.add(g.y0), ry.add(g.y1);
  rx.finish();
  ry.finish();
  const double w = kWidth - kLeft - kRight, h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - rx.lo) / (rx.hi - rx.lo) * w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - ry.lo) / (ry.hi - ry.lo)) * h; };

  std::ostringstream out;
  out << header(title_);
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double yv = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + h + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(xv) << "</text>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(yv) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + w / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label_) << "</text>\n";
  out << "<text x=\"14\" y=\"" << num(kTop + h / 2) << "\" transform=\"rotate(-90 14 " << num(kTop + h / 2)
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(y_label_) << "</text>\n";

  for (const auto& g : segments_)
    out << "<line x1=\"" << num(px(g.x0)) << "\" y1=\"" << num(py(g.y0)) << "\" x2=\"" << num(px(g.x1)) << "\" y2=\""
        << num(py(g.y1)) << "\" stroke=\"" << g.color << "\" stroke-width=\"" << g.width << "\"/>\n";
  for (const auto& s : series_) {
    if (s.line) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.points) out << num(px(x)) << ',' << num(py(y)) << ' ';
      out << "\"/>\n";
    } else {
      for (const auto& [x, y] : s.points)
        out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.2\" fill=\"" << s.color
            << "\"/>\n";
    }
  }
  double ly = kTop + 14;
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    out << "<rect x=\"" << num(kLeft + w - 110) << "\" y=\"" << num(ly - 8) << "\" width=\"8\" height=\"8\" fill=\""
        << s.color << "\"/>\n";
    out << "<text x=\"" << num(kLeft + w - 98) << "\" y=\"" << num(ly) << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(s.label) << "</text>\n";
    ly += 14;
  }
  out << "</svg>\n";
  return out.str();
}

std::string heatmap(const Matrix& values, const std::string& title) {
  const double w = kWidth - kLeft - kRight, h = kHeight - kTop - kBottom;
  const double peak = values.max_abs();
  const double cw = values.cols() ? w / static_cast<double>(values.cols()) : w;
  const double ch = values.rows() ? h / static_cast<double>(values.rows()) : h;
  std::ostringstream out;
  out << header(title);
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < values.rows(); ++i)
    for (std::size_t j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      if (!(v > 0.0) || peak <= 0.0) continue;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::sqrt(v / peak))));
      out << "<rect x=\"" << num(kLeft + j * cw) << "\" y=\"" << num(kTop + i * ch) << "\" width=\""
          << num(std::max(cw, 1.0)) << "\" height=\"" << num(std::max(ch, 1.0)) << "\" fill=\"rgb(" << shade << ','
          << shade << ',' << shade << ")\"/>\n";
    }
  out << "<text x=\"" << num(kLeft + w / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">j</text>\n";
  out << "<text x=\"20\" y=\"" << num(kTop + h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">i</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace mide::svg
