#include "csifb/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace csifb {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_bound(const BoundValue& b) {
  return b.valid ? fmt(b.value) : std::string("nan");
}

std::string fmt_coord(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void write_file(const std::string& content, const std::string& path,
                const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(ErrorCode::IoError, std::string(what) + ": cannot open " + path);
  }
  out << content;
  if (!out) {
    raise(ErrorCode::IoError, std::string(what) + ": write failed for " + path);
  }
}

}  // namespace

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "training_symbols,source_delta_mean,source_delta_stderr,"
         "mmse_mean,mmse_stderr,distortion_delta_mean,distortion_delta_stderr,"
         "total_mean,total_stderr,gap_mean,gap_stderr,"
         "source_delta_lo,source_delta_hi,mmse_lo,mmse_hi,"
         "distortion_delta_lo,distortion_delta_hi,overall_lo,overall_hi,"
         "direct_rate,skipped,epsilon_violation_fraction,extended_fraction,"
         "sandwich_ok\n";
  for (const SweepPoint& p : sweep.points) {
    out << p.training_symbols << ',' << fmt(p.mc.source_delta.mean) << ','
        << fmt(p.mc.source_delta.std_error) << ',' << fmt(p.mc.mmse.mean) << ','
        << fmt(p.mc.mmse.std_error) << ',' << fmt(p.mc.distortion_delta.mean)
        << ',' << fmt(p.mc.distortion_delta.std_error) << ','
        << fmt(p.mc.total.mean) << ',' << fmt(p.mc.total.std_error) << ','
        << fmt(p.mc.gap.mean) << ',' << fmt(p.mc.gap.std_error) << ','
        << fmt_bound(p.bounds.source_delta_lo) << ','
        << fmt_bound(p.bounds.source_delta_hi) << ','
        << fmt_bound(p.bounds.mmse_lo) << ',' << fmt_bound(p.bounds.mmse_hi)
        << ',' << fmt_bound(p.bounds.distortion_delta_lo) << ','
        << fmt_bound(p.bounds.distortion_delta_hi) << ','
        << fmt_bound(p.bounds.overall_lo) << ','
        << fmt_bound(p.bounds.overall_hi) << ',' << fmt(sweep.direct_rate)
        << ',' << p.mc.skipped << ','
        << fmt(p.mc.epsilon_violation_fraction) << ','
        << fmt(p.mc.extended_fraction) << ',' << (p.sandwich_ok ? 1 : 0)
        << "\n";
  }
  return out.str();
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  write_file(sweep_csv(sweep), path, "write_sweep_csv");
}

namespace {

struct SvgLayout {
  double width = 760.0, height = 520.0;
  double left = 80.0, right = 24.0, top = 48.0, bottom = 64.0;
  double x_lo = 0.0, x_hi = 1.0;  // log10 data range
  double y_lo = 0.0, y_hi = 1.0;

  double x(double log10_v) const {
    return left + (log10_v - x_lo) / (x_hi - x_lo) * (width - left - right);
  }
  double y(double log10_v) const {
    return height - bottom -
           (log10_v - y_lo) / (y_hi - y_lo) * (height - top - bottom);
  }
};

}  // namespace

std::string sweep_svg(const SweepResult& sweep) {
  if (sweep.points.empty()) {
    raise(ErrorCode::InvalidArgument, "sweep_svg: nothing to plot");
  }

  // Collect positive values that should be visible on the log axis.
  std::vector<double> ys;
  for (const SweepPoint& p : sweep.points) {
    const double mean = p.mc.gap.mean;
    if (mean > 0.0) ys.push_back(mean);
    const double hi_bar = mean + 3.0 * p.mc.gap.std_error;
    if (hi_bar > 0.0) ys.push_back(hi_bar);
    if (p.bounds.overall_lo.valid && p.bounds.overall_lo.value > 0.0) {
      ys.push_back(p.bounds.overall_lo.value);
    }
    if (p.bounds.overall_hi.valid && p.bounds.overall_hi.value > 0.0) {
      ys.push_back(p.bounds.overall_hi.value);
    }
  }
  if (ys.empty()) ys.push_back(1.0);
  const auto [y_min_it, y_max_it] = std::minmax_element(ys.begin(), ys.end());

  SvgLayout lay;
  lay.x_lo = std::log10(static_cast<double>(sweep.points.front().training_symbols)) - 0.06;
  lay.x_hi = std::log10(static_cast<double>(sweep.points.back().training_symbols)) + 0.06;
  lay.y_lo = std::log10(*y_min_it) - 0.25;
  lay.y_hi = std::log10(*y_max_it) + 0.15;
  if (lay.y_hi - lay.y_lo < 0.5) lay.y_hi = lay.y_lo + 0.5;
  const double floor_value = std::pow(10.0, lay.y_lo);

  auto clip_log10 = [&](double v) {
    return std::log10(std::max(v, floor_value));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << lay.width
      << "\" height=\"" << lay.height << "\" viewBox=\"0 0 " << lay.width
      << ' ' << lay.height << "\">\n";
  svg << "<rect width=\"" << lay.width << "\" height=\"" << lay.height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << lay.width / 2
      << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
         "text-anchor=\"middle\">overall rate gap vs downlink training "
         "length</text>\n";

  // Axes box.
  svg << "<rect x=\"" << lay.left << "\" y=\"" << lay.top << "\" width=\""
      << lay.width - lay.left - lay.right << "\" height=\""
      << lay.height - lay.top - lay.bottom
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  // X ticks at each grid point.
  for (const SweepPoint& p : sweep.points) {
    const double x = lay.x(std::log10(static_cast<double>(p.training_symbols)));
    svg << "<line x1=\"" << fmt_coord(x) << "\" y1=\""
        << fmt_coord(lay.height - lay.bottom) << "\" x2=\"" << fmt_coord(x)
        << "\" y2=\"" << fmt_coord(lay.height - lay.bottom + 6)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt_coord(x) << "\" y=\""
        << fmt_coord(lay.height - lay.bottom + 22)
        << "\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\">"
        << p.training_symbols << "</text>\n";
  }
  svg << "<text x=\"" << fmt_coord((lay.left + lay.width - lay.right) / 2)
      << "\" y=\"" << fmt_coord(lay.height - 16)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">training symbols per pilot "
         "subcarrier</text>\n";

  // Y ticks at powers of ten inside the range.
  const int k_lo = static_cast<int>(std::ceil(lay.y_lo));
  const int k_hi = static_cast<int>(std::floor(lay.y_hi));
  for (int k = k_lo; k <= k_hi; ++k) {
    const double y = lay.y(static_cast<double>(k));
    svg << "<line x1=\"" << fmt_coord(lay.left - 6) << "\" y1=\""
        << fmt_coord(y) << "\" x2=\"" << fmt_coord(lay.left) << "\" y2=\""
        << fmt_coord(y) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt_coord(lay.left) << "\" y1=\"" << fmt_coord(y)
        << "\" x2=\"" << fmt_coord(lay.width - lay.right) << "\" y2=\""
        << fmt_coord(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt_coord(lay.left - 10) << "\" y=\""
        << fmt_coord(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"end\">"
        << fmt_label(std::pow(10.0, k)) << "</text>\n";
  }
  svg << "<text x=\"20\" y=\"" << fmt_coord((lay.top + lay.height - lay.bottom) / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << fmt_coord((lay.top + lay.height - lay.bottom) / 2)
      << ")\">rate gap (nats)</text>\n";

  // Bound band over the points where both overall bounds are valid.
  std::vector<const SweepPoint*> banded;
  for (const SweepPoint& p : sweep.points) {
    if (p.bounds.overall_lo.valid && p.bounds.overall_hi.valid) {
      banded.push_back(&p);
    }
  }
  if (banded.size() >= 2) {
    std::ostringstream poly;
    for (const SweepPoint* p : banded) {
      poly << fmt_coord(lay.x(std::log10(static_cast<double>(p->training_symbols))))
           << ',' << fmt_coord(lay.y(clip_log10(p->bounds.overall_hi.value)))
           << ' ';
    }
    for (auto it = banded.rbegin(); it != banded.rend(); ++it) {
      poly << fmt_coord(lay.x(std::log10(static_cast<double>((*it)->training_symbols))))
           << ',' << fmt_coord(lay.y(clip_log10((*it)->bounds.overall_lo.value)))
           << ' ';
    }
    svg << "<polygon points=\"" << poly.str()
        << "\" fill=\"#bcd7ee\" fill-opacity=\"0.55\" stroke=\"none\"/>\n";
    for (const bool upper : {true, false}) {
      svg << "<polyline points=\"";
      for (const SweepPoint* p : banded) {
        const double v =
            upper ? p->bounds.overall_hi.value : p->bounds.overall_lo.value;
        svg << fmt_coord(lay.x(std::log10(static_cast<double>(p->training_symbols))))
            << ',' << fmt_coord(lay.y(clip_log10(v))) << ' ';
      }
      svg << "\" fill=\"none\" stroke=\"#4477aa\" stroke-dasharray=\"5 3\"/>\n";
    }
  }

  // Monte Carlo gap with 3-sigma bars.
  svg << "<polyline points=\"";
  for (const SweepPoint& p : sweep.points) {
    svg << fmt_coord(lay.x(std::log10(static_cast<double>(p.training_symbols))))
        << ',' << fmt_coord(lay.y(clip_log10(p.mc.gap.mean))) << ' ';
  }
  svg << "\" fill=\"none\" stroke=\"#cc3311\" stroke-width=\"1.5\"/>\n";
  for (const SweepPoint& p : sweep.points) {
    const double x = lay.x(std::log10(static_cast<double>(p.training_symbols)));
    const double lo = lay.y(clip_log10(p.mc.gap.mean - 3.0 * p.mc.gap.std_error));
    const double hi = lay.y(clip_log10(p.mc.gap.mean + 3.0 * p.mc.gap.std_error));
    svg << "<line x1=\"" << fmt_coord(x) << "\" y1=\"" << fmt_coord(lo)
        << "\" x2=\"" << fmt_coord(x) << "\" y2=\"" << fmt_coord(hi)
        << "\" stroke=\"#cc3311\"/>\n";
    svg << "<circle cx=\"" << fmt_coord(x) << "\" cy=\""
        << fmt_coord(lay.y(clip_log10(p.mc.gap.mean)))
        << "\" r=\"3\" fill=\"#cc3311\"/>\n";
  }

  // Legend and fit annotation.
  const double lx = lay.left + 12;
  svg << "<circle cx=\"" << fmt_coord(lx) << "\" cy=\""
      << fmt_coord(lay.top + 14) << "\" r=\"3\" fill=\"#cc3311\"/>\n";
  svg << "<text x=\"" << fmt_coord(lx + 10) << "\" y=\""
      << fmt_coord(lay.top + 18)
      << "\" font-family=\"sans-serif\" font-size=\"12\">Monte Carlo mean "
         "(3-sigma bars)</text>\n";
  svg << "<rect x=\"" << fmt_coord(lx - 4) << "\" y=\""
      << fmt_coord(lay.top + 28)
      << "\" width=\"10\" height=\"10\" fill=\"#bcd7ee\" "
         "fill-opacity=\"0.55\" stroke=\"#4477aa\"/>\n";
  svg << "<text x=\"" << fmt_coord(lx + 10) << "\" y=\""
      << fmt_coord(lay.top + 37)
      << "\" font-family=\"sans-serif\" font-size=\"12\">deterministic bound "
         "band</text>\n";
  if (sweep.gap_loglog_slope_valid) {
    svg << "<text x=\"" << fmt_coord(lx + 10) << "\" y=\""
        << fmt_coord(lay.top + 56)
        << "\" font-family=\"sans-serif\" font-size=\"12\">fitted log-log "
           "slope "
        << fmt_label(sweep.gap_loglog_slope) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_sweep_svg(const SweepResult& sweep, const std::string& path) {
  write_file(sweep_svg(sweep), path, "write_sweep_svg");
}

}  // namespace csifb
