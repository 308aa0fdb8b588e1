#include "qxfer/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qxfer/io.hpp"

namespace qxfer {

namespace {

const char* kPalette[] = {"#d62728", "#ff7f0e", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
  void pad() {
    if (hi - lo < 1e-300) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape(const std::string& s) {
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

class Canvas {
 public:
  Canvas(const PlotStyle& style, Range x, Range y) : style_(style), x_(x), y_(y) {
    x_.pad();
    y_.pad();
  }

  double px(double x) const { return left_ + (x - x_.lo) / (x_.hi - x_.lo) * plot_w(); }
  double py(double y) const { return top_ + (1.0 - (y - y_.lo) / (y_.hi - y_.lo)) * plot_h(); }

  void frame(std::ostringstream& out) const {
    const int w = style_.width;
    const int h = style_.height;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"white\"/>\n"
        << "<style>.axis{stroke:#000;stroke-width:1}.grid{stroke:#ddd;stroke-width:1}"
        << ".label{font-family:sans-serif;font-size:13px;fill:#000}"
        << ".tick{font-family:sans-serif;font-size:11px;fill:#333}</style>\n";
    if (!style_.title.empty()) {
      out << "<text class=\"label\" x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\">"
          << escape(style_.title) << "</text>\n";
    }
    constexpr int kTicks = 5;
    for (int k = 0; k <= kTicks; ++k) {
      const double xv = x_.lo + (x_.hi - x_.lo) * k / kTicks;
      const double yv = y_.lo + (y_.hi - y_.lo) * k / kTicks;
      out << "<line class=\"grid\" x1=\"" << fmt(px(xv), "%.2f") << "\" y1=\"" << top_
          << "\" x2=\"" << fmt(px(xv), "%.2f") << "\" y2=\"" << top_ + plot_h() << "\"/>\n"
          << "<text class=\"tick\" x=\"" << fmt(px(xv), "%.2f") << "\" y=\"" << top_ + plot_h() + 16
          << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n"
          << "<line class=\"grid\" x1=\"" << left_ << "\" y1=\"" << fmt(py(yv), "%.2f")
          << "\" x2=\"" << left_ + plot_w() << "\" y2=\"" << fmt(py(yv), "%.2f") << "\"/>\n"
          << "<text class=\"tick\" x=\"" << left_ - 6 << "\" y=\"" << fmt(py(yv) + 4, "%.2f")
          << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    out << "<rect class=\"axis\" fill=\"none\" x=\"" << left_ << "\" y=\"" << top_
        << "\" width=\"" << plot_w() << "\" height=\"" << plot_h() << "\"/>\n"
        << "<text class=\"label\" x=\"" << left_ + plot_w() / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\">" << escape(style_.x_label) << "</text>\n"
        << "<text class=\"label\" transform=\"translate(18," << top_ + plot_h() / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(style_.y_label) << "</text>\n";
  }

  void legend(std::ostringstream& out, int slot, const std::string& text, const char* color) const {
    const int y = top_ + 16 + 18 * slot;
    const int x = left_ + plot_w() - 170;
    out << "<line x1=\"" << x << "\" y1=\"" << y - 4 << "\" x2=\"" << x + 24 << "\" y2=\""
        << y - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text class=\"tick\" x=\"" << x + 30 << "\" y=\"" << y << "\">" << escape(text)
        << "</text>\n";
  }

 private:
  int plot_w() const { return style_.width - left_ - right_; }
  int plot_h() const { return style_.height - top_ - bottom_; }

  const PlotStyle& style_;
  Range x_;
  Range y_;
  int left_ = 80;
  int right_ = 24;
  int top_ = 36;
  int bottom_ = 56;
};

}  // namespace

std::string render_series_svg(const TimeSeries& ts, const PlotStyle& style) {
  if (ts.size() == 0 || style.columns.empty()) {
    throw std::invalid_argument("emit_plot: empty series");
  }
  Range xr, yr;
  for (double t : ts.t) xr.add(t);
  for (const auto& name : style.columns) {
    for (double v : ts.column(name)) yr.add(v);
  }
  if (xr.empty() || yr.empty()) throw std::invalid_argument("emit_plot: no finite data");
  const Canvas canvas(style, xr, yr);
  std::ostringstream out;
  canvas.frame(out);
  int slot = 0;
  for (const auto& name : style.columns) {
    const char* color = kPalette[slot % std::size(kPalette)];
    const auto& ys = ts.column(name);
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t n = 0; n < ts.size(); ++n) {
      if (!std::isfinite(ys[n])) continue;
      out << fmt(canvas.px(ts.t[n]), "%.2f") << ',' << fmt(canvas.py(ys[n]), "%.2f") << ' ';
    }
    out << "\"/>\n";
    canvas.legend(out, slot++, name, color);
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_sweep_svg(const SweepResult& sweep, const PlotStyle& style) {
  Range xr, yr;
  for (const auto& r : sweep.rows) {
    if (!r.valid) continue;
    xr.add(r.inv_c_squared);
    yr.add(r.t_target);
  }
  if (xr.empty()) throw std::invalid_argument("emit_plot: sweep has no valid rows");
  const bool has_fit = std::isfinite(sweep.fit.slope) && std::isfinite(sweep.fit.intercept);
  if (has_fit) {
    yr.add(sweep.fit.slope * xr.lo + sweep.fit.intercept);
    yr.add(sweep.fit.slope * xr.hi + sweep.fit.intercept);
  }
  const Canvas canvas(style, xr, yr);
  std::ostringstream out;
  canvas.frame(out);
  for (const auto& r : sweep.rows) {
    if (!r.valid) continue;
    out << "<circle cx=\"" << fmt(canvas.px(r.inv_c_squared), "%.2f") << "\" cy=\""
        << fmt(canvas.py(r.t_target), "%.2f") << "\" r=\"4\" fill=\"" << kPalette[0] << "\"/>\n";
  }
  canvas.legend(out, 0, "measured", kPalette[0]);
  if (has_fit) {
    out << "<line x1=\"" << fmt(canvas.px(xr.lo), "%.2f") << "\" y1=\""
        << fmt(canvas.py(sweep.fit.slope * xr.lo + sweep.fit.intercept), "%.2f") << "\" x2=\""
        << fmt(canvas.px(xr.hi), "%.2f") << "\" y2=\""
        << fmt(canvas.py(sweep.fit.slope * xr.hi + sweep.fit.intercept), "%.2f")
        << "\" stroke=\"" << kPalette[2] << "\" stroke-width=\"1.5\"/>\n";
    canvas.legend(out, 1, "fit, r2 = " + fmt(sweep.fit.r_squared, "%.5f"), kPalette[2]);
  }
  out << "</svg>\n";
  return out.str();
}

void emit_plot(const TimeSeries& ts, const PlotStyle& style, const std::filesystem::path& path) {
  write_text_file(path, render_series_svg(ts, style));
}

void emit_plot(const SweepResult& sweep, const PlotStyle& style,
               const std::filesystem::path& path) {
  write_text_file(path, render_sweep_svg(sweep, style));
}

PlotStyle decay_plot_style() {
  PlotStyle s;
  s.title = "Decay probability";
  s.y_label = "P";
  s.columns = {column::kPNumeric, column::kPPerturbative};
  return s;
}

PlotStyle mi_plot_style() {
  PlotStyle s;
  s.title = "Mutual information";
  s.y_label = "I(B, Abar) [nats]";
  s.columns = {column::kINumeric, column::kIModel};
  return s;
}

PlotStyle sweep_plot_style(double target) {
  PlotStyle s;
  s.title = "Decay time vs coupling";
  s.x_label = "1/c^2";
  s.y_label = "T_" + fmt(target, "%g");
  return s;
}

}  // namespace qxfer
