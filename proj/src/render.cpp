#include "crowdbench/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "crowdbench/episode_io.hpp"

namespace crowdbench {
namespace {

constexpr double kPixelsPerMeter = 50.0;
constexpr double kMarginMeters = 1.0;
constexpr double kLegendHeight = 90.0;

constexpr std::array<const char*, 8> kHumanColors{
    "#e6862e", "#3aa655", "#9b59b6", "#c0392b", "#16a085", "#d35400", "#7f8c8d", "#8e44ad",
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Canvas {
  double min_x, max_x, min_y, max_y;

  double width() const { return (max_x - min_x) * kPixelsPerMeter; }
  double height() const { return (max_y - min_y) * kPixelsPerMeter; }
  double sx(double x) const { return (x - min_x) * kPixelsPerMeter; }
  double sy(double y) const { return (max_y - y) * kPixelsPerMeter; }
  std::string pt(const Vec2& p) const { return num(sx(p.x)) + "," + num(sy(p.y)); }
};

Canvas fit(const EpisodeLog& log) {
  double lo_x = std::numeric_limits<double>::infinity();
  double lo_y = lo_x;
  double hi_x = -lo_x;
  double hi_y = -lo_x;
  const auto grow = [&](const Vec2& p) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  };
  grow(log.spec.robot_start);
  grow(log.spec.robot_goal);
  for (const HumanSpec& h : log.spec.humans) {
    grow(h.start);
    grow(h.goal);
  }
  for (const Frame& f : log.frames) {
    for (const AgentSnapshot& a : f.agents) grow(a.position);
  }
  return {lo_x - kMarginMeters, hi_x + kMarginMeters, lo_y - kMarginMeters, hi_y + kMarginMeters};
}

std::string star(double cx, double cy, double outer) {
  std::string pts;
  for (int k = 0; k < 10; ++k) {
    const double r = k % 2 == 0 ? outer : outer * 0.45;
    const double a = -M_PI / 2.0 + k * M_PI / 5.0;
    if (k) pts += ' ';
    pts += num(cx + r * std::cos(a)) + "," + num(cy + r * std::sin(a));
  }
  return pts;
}

std::string polyline(const Canvas& c, const EpisodeLog& log, std::size_t agent, std::size_t from,
                     std::size_t to) {
  std::string pts;
  for (std::size_t f = from; f <= to; ++f) {
    if (f != from) pts += ' ';
    pts += c.pt(log.frames[f].agents[agent].position);
  }
  return pts;
}

}  // namespace

std::string render_trajectory_svg(const EpisodeLog& log, const MetricConfig& cfg) {
  const Canvas c = fit(log);
  const double total_h = c.height() + kLegendHeight;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(c.width()) << "\" height=\""
      << num(total_h) << "\" viewBox=\"0 0 " << num(c.width()) << ' ' << num(total_h) << "\">\n";
  svg << "<title>" << log.episode_id << " (" << to_string(log.spec.kind) << ", "
      << to_string(log.outcome) << ")</title>\n";
  svg << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << num(c.width()) << "\" height=\""
      << num(c.height()) << "\" fill=\"white\" stroke=\"#cccccc\"/>\n";

  for (std::size_t i = 0; i < log.spec.humans.size(); ++i) {
    const char* color = kHumanColors[i % kHumanColors.size()];
    const HumanSpec& h = log.spec.humans[i];
    svg << "<polyline class=\"path human\" id=\"agent-" << i + 1 << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"2\" points=\"" << polyline(c, log, i + 1, 0, log.frames.size() - 1)
        << "\"/>\n";
    svg << "<circle class=\"start human-start\" cx=\"" << num(c.sx(h.start.x)) << "\" cy=\""
        << num(c.sy(h.start.y)) << "\" r=\"5\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    const double gx = c.sx(h.goal.x);
    const double gy = c.sy(h.goal.y);
    svg << "<path class=\"goal human-goal\" d=\"M" << num(gx - 5) << ',' << num(gy - 5) << " L"
        << num(gx + 5) << ',' << num(gy + 5) << " M" << num(gx - 5) << ',' << num(gy + 5) << " L"
        << num(gx + 5) << ',' << num(gy - 5) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
  }

  svg << "<polyline class=\"path robot\" id=\"agent-0\" fill=\"none\" stroke=\"#1f5fd6\" "
         "stroke-width=\"2.5\" points=\""
      << polyline(c, log, 0, 0, log.frames.size() - 1) << "\"/>\n";

  if (log.human_count() > 0) {
    const auto flags = personal_space_flags(log, cfg);
    for (std::size_t f = 0; f < flags.size();) {
      if (!flags[f]) {
        ++f;
        continue;
      }
      std::size_t end = f;
      while (end + 1 < flags.size() && flags[end + 1]) ++end;
      svg << "<polyline class=\"violation\" data-frames=\"" << f << '-' << end
          << "\" fill=\"none\" stroke=\"#e01b1b\" stroke-width=\"5\" stroke-opacity=\"0.6\" points=\""
          << polyline(c, log, 0, f, end) << "\"/>\n";
      for (std::size_t k = f; k <= end; ++k) {
        const Vec2& p = log.frames[k].agents[0].position;
        svg << "<circle class=\"violation-frame\" data-frame=\"" << k << "\" cx=\"" << num(c.sx(p.x))
            << "\" cy=\"" << num(c.sy(p.y)) << "\" r=\"2\" fill=\"#e01b1b\"/>\n";
      }
      f = end + 1;
    }
  }

  if (log.outcome == Outcome::collision) {
    const std::size_t last = log.frames.size() - 1;
    const Vec2& rp = log.frames[last].agents[0].position;
    svg << "<circle class=\"collision\" data-frame=\"" << last << "\" cx=\"" << num(c.sx(rp.x))
        << "\" cy=\"" << num(c.sy(rp.y)) << "\" r=\""
        << num(log.spec.robot_radius * kPixelsPerMeter) << "\" fill=\"none\" stroke=\"#e01b1b\" "
        << "stroke-width=\"3\"/>\n";
    for (std::size_t i = 0; i < log.human_count(); ++i) {
      const Vec2& hp = log.frames[last].agents[i + 1].position;
      if (norm(hp - rp) < log.spec.robot_radius + log.spec.humans[i].radius) {
        svg << "<circle class=\"collision\" data-frame=\"" << last << "\" cx=\"" << num(c.sx(hp.x))
            << "\" cy=\"" << num(c.sy(hp.y)) << "\" r=\""
            << num(log.spec.humans[i].radius * kPixelsPerMeter)
            << "\" fill=\"none\" stroke=\"#e01b1b\" stroke-width=\"3\"/>\n";
      }
    }
  }

  svg << "<circle class=\"start robot-start\" cx=\"" << num(c.sx(log.spec.robot_start.x))
      << "\" cy=\"" << num(c.sy(log.spec.robot_start.y)) << "\" r=\"7\" fill=\"#1f5fd6\"/>\n";
  svg << "<polygon class=\"goal robot-goal\" points=\"" << star(c.sx(log.spec.robot_goal.x), c.sy(log.spec.robot_goal.y), 11)
      << "\" fill=\"black\"/>\n";

  // Legend.
  const double ly = c.height() + 20.0;
  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<circle cx=\"12\" cy=\"" << num(ly) << "\" r=\"6\" fill=\"#1f5fd6\"/>"
      << "<text x=\"24\" y=\"" << num(ly + 4) << "\">Blue dot: robot start</text>\n";
  svg << "<polygon points=\"" << star(12.0, ly + 22.0, 9)
      << "\" fill=\"black\"/><text x=\"24\" y=\"" << num(ly + 26)
      << "\">Black star: robot destination</text>\n";
  svg << "<circle cx=\"12\" cy=\"" << num(ly + 44) << "\" r=\"5\" fill=\"none\" stroke=\"#e6862e\"/>"
      << "<text x=\"24\" y=\"" << num(ly + 48) << "\">Human start (circle) and goal (cross)</text>\n";
  svg << "<line x1=\"4\" y1=\"" << num(ly + 64) << "\" x2=\"20\" y2=\"" << num(ly + 64)
      << "\" stroke=\"#e01b1b\" stroke-width=\"5\" stroke-opacity=\"0.6\"/>"
      << "<text x=\"24\" y=\"" << num(ly + 68) << "\">Within " << num(cfg.epsilon)
      << " m of a human</text>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void render_trajectory(const EpisodeLog& log, const std::filesystem::path& path,
                       const MetricConfig& cfg) {
  write_text_file(path, render_trajectory_svg(log, cfg));
}

}  // namespace crowdbench
