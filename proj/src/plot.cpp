// Copyright (c) the grainkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "grainkit/plot.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace grainkit {

namespace {

constexpr double kPlotW = 640.0, kPlotH = 400.0;
constexpr double kMarginL = 64.0, kMarginR = 64.0;
constexpr double kMarginT = 32.0, kMarginB = 48.0;
constexpr double kInnerW = kPlotW - kMarginL - kMarginR;
constexpr double kInnerH = kPlotH - kMarginT - kMarginB;

// Pixel-cell edge coordinate: value v occupies [v, v+1) of 256 cells, so the
// trailing edge of upper=255 lands exactly on the plot frame.
double x_pos(double cell_edge) { return kMarginL + cell_edge / 256.0 * kInnerW; }
double y_scale(double s) { return kMarginT + (1.0 - s / 255.0) * kInnerH; }
double y_cutoff(double c) {
  return kMarginT + (1.0 - (c - kCutoffMin) / double(kCutoffMax - kCutoffMin)) *
                        kInnerH;
}

const ComponentModel& component_or_throw(const FilmGrainParams& params,
                                         int component) {
  if (component < 0 || component > 2 || !params.components[component]) {
    throw std::invalid_argument(std::string("component ") +
                                component_name(component < 0 || component > 2
                                                   ? 0
                                                   : component) +
                                " is not present in the parameters");
  }
  return *params.components[component];
}

void step_curve(std::ostringstream& os, const ComponentModel& model,
                double (*value_y)(double), double (*value_of)(const IntensityInterval&),
                const char* color, const char* cls) {
  os << "  <path class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
     << "\" stroke-width=\"2\" d=\"";
  bool pen_down = false;
  for (const auto& iv : model.intervals) {
    const double y = value_y(value_of(iv));
    os << (pen_down ? " L" : " M") << x_pos(iv.lower) << " " << y << " L"
       << x_pos(iv.upper + 1) << " " << y;
    pen_down = false;  // lift the pen between intervals (gaps allowed)
  }
  os << "\"/>\n";
}

}  // namespace

std::string render_params_svg(const FilmGrainParams& params, int component) {
  const ComponentModel& model = component_or_throw(params, component);
  const int log2 = params.log2_scale_factor;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPlotW
     << "\" height=\"" << kPlotH << "\" viewBox=\"0 0 " << kPlotW << " "
     << kPlotH << "\">\n";
  os << "  <rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\""
     << kInnerW << "\" height=\"" << kInnerH
     << "\" fill=\"white\" stroke=\"black\"/>\n";

  // Interval separators: one dashed line at the trailing edge of each
  // interval (the last lands on the plot frame for full-range models).
  for (const auto& iv : model.intervals) {
    const double x = x_pos(iv.upper + 1);
    os << "  <line class=\"sep\" x1=\"" << x << "\" y1=\"" << kMarginT
       << "\" x2=\"" << x << "\" y2=\"" << kMarginT + kInnerH
       << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }

  step_curve(os, model, y_scale,
             [](const IntensityInterval& iv) { return double(iv.scaling_factor); },
             "blue", "scaling");
  step_curve(os, model, y_cutoff,
             [](const IntensityInterval& iv) {
               return 0.5 * (iv.cutoff_h + iv.cutoff_v);
             },
             "green", "cutoff");

  // Axis labels. The left label carries the gain annotation so the global
  // log2 scale factor is visible on the plot.
  os << "  <text x=\"" << kPlotW / 2 << "\" y=\"" << kPlotH - 12
     << "\" text-anchor=\"middle\">pixel value [0,255]</text>\n";
  os << "  <text x=\"16\" y=\"" << kPlotH / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kPlotH / 2
     << ")\" fill=\"blue\">scaling factor [0,255], Gain(x*2^-" << log2
     << ")</text>\n";
  os << "  <text x=\"" << kPlotW - 16 << "\" y=\"" << kPlotH / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(90 " << kPlotW - 16
     << " " << kPlotH / 2 << ")\" fill=\"green\">cut-off frequency ["
     << kCutoffMin << "," << kCutoffMax << "]</text>\n";
  os << "  <text x=\"" << kMarginL << "\" y=\"" << kMarginT - 10
     << "\">component " << component_name(component) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string render_params_table(const FilmGrainParams& params, int component) {
  const ComponentModel& model = component_or_throw(params, component);
  std::ostringstream os;
  os << "lower\tupper\tscaling_factor\tcutoff_h\tcutoff_v\tgain\n";
  const double gain_base = std::ldexp(1.0, -params.log2_scale_factor);
  for (const auto& iv : model.intervals) {
    os << int(iv.lower) << "\t" << int(iv.upper) << "\t"
       << int(iv.scaling_factor) << "\t" << int(iv.cutoff_h) << "\t"
       << int(iv.cutoff_v) << "\t" << iv.scaling_factor * gain_base << "\n";
  }
  return os.str();
}

void plot_params(const FilmGrainParams& params, int component,
                 const std::string& out_prefix) {
  const std::string svg = render_params_svg(params, component);
  const std::string table = render_params_table(params, component);
  for (const auto& [suffix, content] :
       {std::pair<const char*, const std::string&>{".svg", svg},
        std::pair<const char*, const std::string&>{".tsv", table}}) {
    const std::string path = out_prefix + suffix;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace grainkit
