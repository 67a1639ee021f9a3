#include "swarmcl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace swarmcl {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string header(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"" +
         anchor + "\">" + s + "</text>\n";
}

}  // namespace

std::string curve_svg(std::span<const CurvePoint> curve) {
  if (curve.empty()) throw std::invalid_argument("curve plot: no points");
  const int W = 800, H = 420, left = 70, right = 60, top = 30, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t k_max = 1;
  for (const CurvePoint& p : curve) {
    const double v = std::log10(std::max(p.loss, 1e-12));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    k_max = std::max(k_max, p.horizon);
  }
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double s_max = static_cast<double>(std::max<std::size_t>(curve.back().step, 1));
  auto sx = [&](double step) { return left + pw * (step - 1.0) / std::max(1.0, s_max - 1.0); };
  auto sy_loss = [&](double loss) { return top + ph * (hi - std::log10(std::max(loss, 1e-12))) / (hi - lo); };
  auto sy_k = [&](double k) { return top + ph * (1.0 - k / static_cast<double>(k_max)); };

  std::string svg = header(W, H);
  svg += "<rect x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(top) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  std::string loss_pts, k_pts;
  for (const CurvePoint& p : curve) {
    loss_pts += num(sx(static_cast<double>(p.step))) + "," + num(sy_loss(p.loss)) + " ";
    k_pts += num(sx(static_cast<double>(p.step))) + "," + num(sy_k(static_cast<double>(p.horizon))) + " ";
  }
  svg += "<polyline fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 3\" points=\"" + k_pts + "\"/>\n";
  svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"" + loss_pts + "\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = top + ph * (1.0 - t / 4.0);
    char label[32];
    std::snprintf(label, sizeof label, "1e%.1f", v);
    svg += text(left - 8, y + 4, label, "end");
    svg += text(W - right + 8, y + 4, num(static_cast<double>(k_max) * t / 4.0), "start");
  }
  svg += text(left + pw / 2, H - 15, "training step");
  svg += text(left + pw / 2, 18, "loss (solid, log scale) and K_e (dashed)");
  svg += text(left, H - 32, "1", "middle");
  svg += text(left + pw, H - 32, std::to_string(curve.back().step), "middle");
  svg += "</svg>\n";
  return svg;
}

std::string trajectory_svg(const Trajectory& expert, const Trajectory& predicted) {
  if (expert.samples.empty() || predicted.samples.empty()) {
    throw std::invalid_argument("trajectory plot: empty trajectory");
  }
  const std::size_t n = expert.samples.front().robot_count();
  if (predicted.samples.front().robot_count() != n) {
    throw std::invalid_argument("trajectory plot: robot counts differ");
  }
  const int S = 560, pad = 30;
  const double A = expert.world.arena_half_extent;
  const double scale = (S - 2 * pad) / (2 * A);
  auto px = [&](double x) { return pad + (x + A) * scale; };
  auto py = [&](double y) { return S - pad - (y + A) * scale; };

  std::string svg = header(S, S);
  svg += "<rect x=\"" + num(px(-A)) + "\" y=\"" + num(py(A)) + "\" width=\"" + num(2 * A * scale) +
         "\" height=\"" + num(2 * A * scale) + "\" fill=\"none\" stroke=\"black\"/>\n";
  if (expert.world.wall) {
    const Wall& w = *expert.world.wall;
    const double y0 = py(w.y + 0.5 * w.thickness);
    const double h = w.thickness * scale;
    svg += "<rect x=\"" + num(px(-A)) + "\" y=\"" + num(y0) + "\" width=\"" +
           num((w.gap_center - w.gap_half_width + A) * scale) + "\" height=\"" + num(h) + "\" fill=\"#444444\"/>\n";
    svg += "<rect x=\"" + num(px(w.gap_center + w.gap_half_width)) + "\" y=\"" + num(y0) + "\" width=\"" +
           num((A - w.gap_center - w.gap_half_width) * scale) + "\" height=\"" + num(h) + "\" fill=\"#444444\"/>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (const SwarmState& s : expert.samples) pts += num(px(s.position(i).x)) + "," + num(py(s.position(i).y)) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    for (const SwarmState& s : predicted.samples) {
      svg += "<circle cx=\"" + num(px(s.position(i).x)) + "\" cy=\"" + num(py(s.position(i).y)) +
             "\" r=\"2.5\" fill=\"none\" stroke=\"" + color + "\"/>\n";
    }
    if (i < expert.world.goals.size()) {
      const Vec2 g = expert.world.goals[i];
      const double gx = px(g.x), gy = py(g.y);
      svg += "<path d=\"M" + num(gx - 5) + " " + num(gy - 5) + " L" + num(gx + 5) + " " + num(gy + 5) + " M" +
             num(gx - 5) + " " + num(gy + 5) + " L" + num(gx + 5) + " " + num(gy - 5) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace swarmcl
