#include "driveclone/eval/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "driveclone/errors.hpp"

namespace driveclone::eval {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
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

constexpr int kMarginLeft = 56;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 32;
constexpr int kPanelGap = 36;
constexpr int kMarginBottom = 36;

struct Panel {
  double left, top, width, height;
  double x_lo, x_hi, y_lo, y_hi;

  double px(double frame) const {
    const double span = x_hi > x_lo ? x_hi - x_lo : 1.0;
    return left + (frame - x_lo) / span * width;
  }
  double py(double value) const { return top + (y_hi - value) / (y_hi - y_lo) * height; }
};

void draw_series(std::ostringstream& out, const Panel& p, const std::vector<std::int64_t>& frames,
                 const std::vector<double>& values, const char* cls) {
  if (frames.empty()) return;
  out << "<polyline class=\"" << cls << "\" fill=\"none\" points=\"";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double v = std::isnan(values[i]) ? p.y_hi : std::clamp(values[i], p.y_lo, p.y_hi);
    out << (i ? " " : "") << num(p.px(static_cast<double>(frames[i]))) << "," << num(p.py(v));
  }
  out << "\"/>\n";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double v = values[i];
    if (v >= p.y_lo && v <= p.y_hi) continue;
    const double x = p.px(static_cast<double>(frames[i]));
    const bool above = v > p.y_hi || std::isnan(v);
    const double y = above ? p.py(p.y_hi) : p.py(p.y_lo);
    const double tip = above ? y - 6.0 : y + 6.0;
    out << "<path class=\"overflow " << cls << "\" d=\"M" << num(x - 4.0) << "," << num(y) << " L"
        << num(x + 4.0) << "," << num(y) << " L" << num(x) << "," << num(tip) << " Z\"/>\n";
  }
}

void draw_panel(std::ostringstream& out, const Panel& p, const PlotSeries& s,
                const std::vector<double>& pred, const std::vector<double>& truth,
                const char* label) {
  out << "<g class=\"panel\" data-y-min=\"" << shortest(p.y_lo) << "\" data-y-max=\""
      << shortest(p.y_hi) << "\">\n";
  out << "<rect class=\"frame\" x=\"" << num(p.left) << "\" y=\"" << num(p.top) << "\" width=\""
      << num(p.width) << "\" height=\"" << num(p.height) << "\" fill=\"none\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = p.y_lo + (p.y_hi - p.y_lo) * k / 4.0;
    const double y = p.py(v);
    out << "<line class=\"grid\" x1=\"" << num(p.left) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(p.left + p.width) << "\" y2=\"" << num(y) << "\"/>\n";
    out << "<text class=\"tick\" x=\"" << num(p.left - 6.0) << "\" y=\"" << num(y + 4.0)
        << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  const double span = p.x_hi - p.x_lo;
  const double step = span <= 0 ? 1.0 : std::max(1.0, std::pow(10.0, std::floor(std::log10(span))) / 2.0);
  for (double f = std::ceil(p.x_lo / step) * step; f <= p.x_hi; f += step) {
    out << "<text class=\"tick\" x=\"" << num(p.px(f)) << "\" y=\""
        << num(p.top + p.height + 16.0) << "\" text-anchor=\"middle\">" << num(f) << "</text>\n";
  }
  out << "<text class=\"label\" x=\"" << num(p.left + 4.0) << "\" y=\"" << num(p.top - 6.0)
      << "\">" << label << " (m/s^2)</text>\n";
  draw_series(out, p, s.frame, truth, "truth");
  draw_series(out, p, s.frame, pred, "pred");
  out << "</g>\n";
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s, std::size_t line) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError(line, "bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void PlotSeries::validate() const {
  const std::size_t n = frame.size();
  if (pred_x.size() != n || true_x.size() != n || pred_y.size() != n || true_y.size() != n) {
    throw ValidationError("plot series lengths differ: frame " + std::to_string(n) + ", pred_x " +
                          std::to_string(pred_x.size()) + ", true_x " +
                          std::to_string(true_x.size()) + ", pred_y " +
                          std::to_string(pred_y.size()) + ", true_y " +
                          std::to_string(true_y.size()));
  }
}

std::string render_svg(const PlotSeries& series, const PlotSpec& spec) {
  series.validate();
  if (!(spec.y_max > spec.y_min)) throw ConfigError("plot y range is empty");
  const int height = kMarginTop + 2 * spec.panel_height + kPanelGap + kMarginBottom;
  double x_lo = 0.0, x_hi = 1.0;
  if (!series.frame.empty()) {
    x_lo = static_cast<double>(*std::min_element(series.frame.begin(), series.frame.end()));
    x_hi = static_cast<double>(*std::max_element(series.frame.begin(), series.frame.end()));
  }
  const double pw = spec.width - kMarginLeft - kMarginRight;
  Panel top{kMarginLeft, kMarginTop, pw, static_cast<double>(spec.panel_height),
            x_lo, x_hi, spec.y_min, spec.y_max};
  Panel bottom = top;
  bottom.top = kMarginTop + spec.panel_height + kPanelGap;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << spec.width << " " << height << "\">\n";
  out << "<style>.pred{stroke:#d62728;stroke-width:1.5}.truth{stroke:#1f77b4;stroke-width:1.5;"
         "stroke-dasharray:4 3}.overflow{stroke:none;fill:#ff7f0e}.grid{stroke:#ddd}"
         ".frame{stroke:#444}text{font-family:sans-serif;font-size:11px}</style>\n";
  out << "<text class=\"title\" x=\"" << kMarginLeft << "\" y=\"16\">" << escape_xml(spec.title)
      << "</text>\n";
  out << "<text class=\"legend\" x=\"" << spec.width - kMarginRight
      << "\" y=\"16\" text-anchor=\"end\">red: predicted, blue dashed: ground truth</text>\n";
  draw_panel(out, top, series, series.pred_x, series.true_x, "a_x");
  draw_panel(out, bottom, series, series.pred_y, series.true_y, "a_y");
  out << "<text class=\"axis\" x=\"" << num(kMarginLeft + pw / 2.0) << "\" y=\"" << height - 4
      << "\" text-anchor=\"middle\">frame</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string plot_csv(const PlotSeries& series) {
  series.validate();
  std::string out = "frame,pred_x,true_x,pred_y,true_y\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += std::to_string(series.frame[i]) + "," + shortest(series.pred_x[i]) + "," +
           shortest(series.true_x[i]) + "," + shortest(series.pred_y[i]) + "," +
           shortest(series.true_y[i]) + "\n";
  }
  return out;
}

PlotSeries parse_plot_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  PlotSeries s;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1) {
      if (split(line, ',') != std::vector<std::string>{"frame", "pred_x", "true_x", "pred_y", "true_y"}) {
        throw ParseError(1, "expected header frame,pred_x,true_x,pred_y,true_y");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw ParseError(n, "expected 5 fields");
    s.frame.push_back(parse_number<std::int64_t>(f[0], n));
    s.pred_x.push_back(parse_number<double>(f[1], n));
    s.true_x.push_back(parse_number<double>(f[2], n));
    s.pred_y.push_back(parse_number<double>(f[3], n));
    s.true_y.push_back(parse_number<double>(f[4], n));
  }
  return s;
}

PlotOutput render_plot(const PlotSeries& series, const PlotSpec& spec) {
  return {render_svg(series, spec), plot_csv(series)};
}

PlotSeries segment_series(const models::Predictor& predictor,
                          std::span<const pipeline::WindowSample> windows,
                          const std::string& segment_id) {
  std::vector<pipeline::WindowSample> picked;
  for (const auto& w : windows) {
    if (w.segment_id == segment_id) picked.push_back(w);
  }
  if (picked.empty()) throw ValidationError("no windows for segment '" + segment_id + "'");
  std::sort(picked.begin(), picked.end(),
            [](const auto& a, const auto& b) { return a.start_index < b.start_index; });
  const nn::Tensor pred = predictor.predict_raw(picked);
  const std::size_t s = pred.dim(1);
  PlotSeries out;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const auto& w = picked[i];
    out.frame.push_back(static_cast<std::int64_t>(w.start_index + w.history_len()));
    out.pred_x.push_back(pred[i * s * 2]);
    out.pred_y.push_back(pred[i * s * 2 + 1]);
    out.true_x.push_back(w.target(0, 0));
    out.true_y.push_back(w.target(0, 1));
  }
  return out;
}

}  // namespace driveclone::eval
