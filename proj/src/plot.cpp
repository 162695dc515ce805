#include "leaps/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace leaps {

namespace {

constexpr double kCanvas = 800.0;
constexpr double kMargin = 40.0;

// 25 distinguishable colours, enough for a 5x5 SLR grid.
constexpr char const *kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
                                    "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39",
                                    "#7b4173", "#3182bd", "#e6550d", "#31a354", "#756bb1", "#636363", "#6baed6",
                                    "#fd8d3c", "#74c476", "#9e9ac8", "#969696"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct Frame {
  double sx = 1.0, sy = 1.0, h = 0.0;
  double px(double x) const { return kMargin + x * sx; }
  double py(double y) const { return kMargin + (h - y) * sy; }
};

Frame frame_for(FabricLayout const &layout, double &w, double &h) {
  double const scale = kCanvas / std::max(layout.width(), layout.height());
  w = layout.width() * scale + 2 * kMargin;
  h = layout.height() * scale + 2 * kMargin;
  return {scale, scale, layout.height()};
}

void open_svg(std::ostringstream &o, double w, double h, std::string const &title) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  o << "<title>" << title << "</title>\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"white\"/>\n";
}

void rect(std::ostringstream &o, Frame const &f, Box const &b, char const *style) {
  o << "<rect x=\"" << num(f.px(b.lx)) << "\" y=\"" << num(f.py(b.hy)) << "\" width=\"" << num(b.width() * f.sx)
    << "\" height=\"" << num(b.height() * f.sy) << "\" " << style << "/>\n";
}

std::string xml_escape(std::string const &s) {
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

}  // namespace

std::string placement_svg(PlacementState const &s, Netlist const &n, FabricLayout const &layout) {
  double w = 0, h = 0;
  Frame const f = frame_for(layout, w, h);
  auto const &topo = layout.topology();
  std::ostringstream o;
  open_svg(o, w, h, xml_escape(n.name) + " placement");
  o << "<style>\n";
  for (int k = 0; k < topo.count(); ++k) o << ".slr" << k << "{fill:" << kPalette[k % 25] << "}\n";
  o << "</style>\n";
  for (auto const &r : layout.regions()) rect(o, f, r.box, "fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.5\"");
  for (int zy = 0; zy < topo.rows; ++zy)
    for (int zx = 0; zx < topo.cols; ++zx) {
      Box b{topo.ref.x + zx * topo.slr_width, topo.ref.y + zy * topo.slr_height, topo.ref.x + (zx + 1) * topo.slr_width,
            topo.ref.y + (zy + 1) * topo.slr_height};
      rect(o, f, b, "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"");
    }
  double const r = std::clamp(0.35 * f.sx, 0.5, 3.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    int const k = flat(slr_index_clamped(s.x[i], s.y[i], topo), topo);
    o << "<circle class=\"slr" << k << "\" cx=\"" << num(f.px(s.x[i])) << "\" cy=\"" << num(f.py(s.y[i])) << "\" r=\""
      << num(r) << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string density_svg(PlacementState const &s, Netlist const &n, FabricLayout const &layout) {
  double w = 0, h = 0;
  Frame const f = frame_for(layout, w, h);
  int const gx = std::min(layout.bins_x(), 64);
  int const gy = std::min(layout.bins_y(), 64);
  double const cw = layout.width() / gx;
  double const ch = layout.height() / gy;
  std::vector<double> demand(static_cast<std::size_t>(gx * gy), 0.0);
  std::vector<double> cap(demand.size(), 0.0);
  for (std::size_t i = 0; i < s.size() && i < n.instances.size(); ++i) {
    int const bx = std::clamp(static_cast<int>(s.x[i] / cw), 0, gx - 1);
    int const by = std::clamp(static_cast<int>(s.y[i] / ch), 0, gy - 1);
    demand[static_cast<std::size_t>(by * gx + bx)] += n.instances[i].charge();
  }
  for (auto const &site : layout.sites()) {
    int const bx = std::clamp(static_cast<int>(site.center.x / cw), 0, gx - 1);
    int const by = std::clamp(static_cast<int>(site.center.y / ch), 0, gy - 1);
    double c = 0.0;
    for (double v : layout.site_capacity(site)) c += v;
    cap[static_cast<std::size_t>(by * gx + bx)] += c;
  }
  std::ostringstream o;
  open_svg(o, w, h, xml_escape(n.name) + " density");
  for (int by = 0; by < gy; ++by)
    for (int bx = 0; bx < gx; ++bx) {
      auto const k = static_cast<std::size_t>(by * gx + bx);
      double const u = cap[k] > 0.0 ? demand[k] / cap[k] : (demand[k] > 0.0 ? 2.0 : 0.0);
      // White at 0, red at 1, dark red beyond.
      double const t = std::clamp(u, 0.0, 2.0);
      int const red = t <= 1.0 ? 255 : static_cast<int>(255 - 120 * (t - 1.0));
      int const gb = t <= 1.0 ? static_cast<int>(255 * (1.0 - t)) : 0;
      char style[80];
      std::snprintf(style, sizeof style, "fill=\"#%02x%02x%02x\"", red, gb, gb);
      rect(o, f, Box{bx * cw, by * ch, (bx + 1) * cw, (by + 1) * ch}, style);
    }
  rect(o, f, layout.bounds(), "fill=\"none\" stroke=\"black\" stroke-width=\"1\"");
  o << "</svg>\n";
  return o.str();
}

std::string trace_svg(std::vector<TraceSeries> const &series, std::string const &title) {
  double const pw = 720.0, ph = 200.0, gap = 50.0;
  std::size_t const panels = std::max<std::size_t>(series.size(), 1);
  double const w = pw + 2 * kMargin + 30.0;
  double const h = panels * (ph + gap) + kMargin;
  std::ostringstream o;
  open_svg(o, w, h, xml_escape(title));
  for (std::size_t p = 0; p < panels; ++p) {
    double const x0 = kMargin + 30.0, y0 = kMargin + p * (ph + gap);
    std::string const name = p < series.size() ? series[p].name : "";
    o << "<g class=\"panel\">\n";
    o << "<text x=\"" << num(x0) << "\" y=\"" << num(y0 - 8) << "\" font-size=\"12\">" << xml_escape(name) << "</text>\n";
    o << "<line class=\"axis\" x1=\"" << num(x0) << "\" y1=\"" << num(y0 + ph) << "\" x2=\"" << num(x0 + pw)
      << "\" y2=\"" << num(y0 + ph) << "\" stroke=\"black\"/>\n";
    o << "<line class=\"axis\" x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\""
      << num(y0 + ph) << "\" stroke=\"black\"/>\n";
    if (p < series.size() && !series[p].values.empty()) {
      auto const &v = series[p].values;
      auto [mn, mx] = std::minmax_element(v.begin(), v.end());
      double lo = *mn, hi = *mx;
      if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
      }
      o << "<text x=\"2\" y=\"" << num(y0 + 10) << "\" font-size=\"10\">" << num(hi) << "</text>\n";
      o << "<text x=\"2\" y=\"" << num(y0 + ph) << "\" font-size=\"10\">" << num(lo) << "</text>\n";
      o << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
      double const dx = v.size() > 1 ? pw / static_cast<double>(v.size() - 1) : 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) o << ' ';
        o << num(x0 + i * dx) << ',' << num(y0 + ph - (v[i] - lo) / (hi - lo) * ph);
      }
      o << "\"/>\n";
    }
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace leaps
