#ifndef REVGEO_TOOLS_SVG_HPP
#define REVGEO_TOOLS_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace revgeo::svg {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// A plot with a fixed data window. Points outside the window are clipped to
/// its edge, non-finite points break the current path.
class Plot {
 public:
  Plot(double x0, double x1, double y0, double y1, int width = 640, int height = 480)
      : x0_(x0), x1_(x1), y0_(y0), y1_(y1), w_(width), h_(height) {}

  void path(const std::vector<std::pair<double, double>>& pts, const std::string& color = "#1f4e8c",
            double stroke = 1.2, bool dashed = false) {
    std::string d;
    bool pen = false;
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        pen = false;
        continue;
      }
      d += (pen ? " L" : " M") + num(px(x)) + "," + num(py(y));
      pen = true;
    }
    if (d.empty()) return;
    body_ += "<path fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + num(stroke) + "\"" +
             (dashed ? " stroke-dasharray=\"4,3\"" : "") + " d=\"" + d.substr(1) + "\"/>\n";
  }

  void hline(double y, const std::string& color, const std::string& label = {}) {
    path({{x0_, y}, {x1_, y}}, color, 0.8, true);
    if (!label.empty()) text(x1_, y, label, "end", color);
  }

  void text(double x, double y, const std::string& s, const char* anchor = "start",
            const std::string& color = "#222") {
    body_ += "<text x=\"" + num(px(x)) + "\" y=\"" + num(py(y) - 3.0) + "\" font-size=\"11\" fill=\"" +
             color + "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
  }

  void title(const std::string& s) { title_ = s; }
  void labels(const std::string& x, const std::string& y) {
    xlabel_ = x;
    ylabel_ = y;
  }

  std::string str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w_) +
                      "\" height=\"" + std::to_string(h_) + "\" viewBox=\"0 0 " + std::to_string(w_) +
                      " " + std::to_string(h_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w_) + "\" height=\"" + std::to_string(h_) +
           "\" fill=\"white\"/>\n";
    out += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(w_ - 2 * kMargin) +
           "\" height=\"" + num(h_ - 2 * kMargin) + "\" fill=\"none\" stroke=\"#888\"/>\n";
    auto tick = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3g", v);
      return std::string(buf);
    };
    out += "<text x=\"" + num(kMargin) + "\" y=\"" + num(h_ - kMargin + 14) + "\" font-size=\"10\">" +
           tick(x0_) + "</text>\n";
    out += "<text x=\"" + num(w_ - kMargin) + "\" y=\"" + num(h_ - kMargin + 14) +
           "\" font-size=\"10\" text-anchor=\"end\">" + tick(x1_) + "</text>\n";
    out += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(h_ - kMargin) +
           "\" font-size=\"10\" text-anchor=\"end\">" + tick(y0_) + "</text>\n";
    out += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kMargin + 8) +
           "\" font-size=\"10\" text-anchor=\"end\">" + tick(y1_) + "</text>\n";
    if (!xlabel_.empty())
      out += "<text x=\"" + num(w_ / 2.0) + "\" y=\"" + num(h_ - 12.0) +
             "\" font-size=\"12\" text-anchor=\"middle\">" + escape(xlabel_) + "</text>\n";
    if (!ylabel_.empty())
      out += "<text x=\"14\" y=\"" + num(h_ / 2.0) + "\" font-size=\"12\" text-anchor=\"middle\" " +
             "transform=\"rotate(-90 14 " + num(h_ / 2.0) + ")\">" + escape(ylabel_) + "</text>\n";
    if (!title_.empty())
      out += "<text x=\"" + num(w_ / 2.0) + "\" y=\"20\" font-size=\"13\" text-anchor=\"middle\">" +
             escape(title_) + "</text>\n";
    out += body_;
    out += "</svg>\n";
    return out;
  }

 private:
  static constexpr double kMargin = 48.0;

  double px(double x) const {
    x = std::clamp(x, x0_, x1_);
    return kMargin + (x - x0_) / (x1_ - x0_) * (w_ - 2 * kMargin);
  }
  double py(double y) const {
    y = std::clamp(y, y0_, y1_);
    return h_ - kMargin - (y - y0_) / (y1_ - y0_) * (h_ - 2 * kMargin);
  }

  double x0_, x1_, y0_, y1_;
  int w_, h_;
  std::string body_, title_, xlabel_, ylabel_;
};

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f4e8c", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085", "#2c3e50"};
  return colors[i % 7];
}

}  // namespace revgeo::svg

#endif  // REVGEO_TOOLS_SVG_HPP
