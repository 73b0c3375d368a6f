#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "topiclens/layout.hpp"

namespace topiclens::layout {
namespace {

constexpr double kMargin = 40.0;
constexpr double kTitleBand = 30.0;
constexpr double kTopicMarkerFraction = 0.08;
constexpr double kPointRadius = 3.0;

std::string num(double v) {
  if (!std::isfinite(v)) v = 0.0;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

class SvgWriter {
 public:
  SvgWriter(const FigureSpec& spec) : spec_(spec) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width << "\" height=\""
         << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\""
         << xml_escape(spec.font_family) << "\" data-kind=\"" << to_string(spec.kind) << "\">\n";
    out_ << "<title>" << xml_escape(spec.title.empty() ? to_string(spec.kind) : spec.title) << "</title>\n";
    if (!spec.title.empty()) {
      out_ << "<text id=\"title\" x=\"" << num(spec.width / 2.0) << "\" y=\"" << num(kTitleBand * 0.7)
           << "\" font-size=\"16\" text-anchor=\"middle\" fill=\"currentColor\">" << xml_escape(spec.title)
           << "</text>\n";
    }
  }

  const std::string& color(std::size_t index) const { return spec_.palette[index % spec_.palette.size()]; }
  std::size_t cycle(std::size_t index) const { return index / spec_.palette.size(); }

  std::ostringstream& out() { return out_; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  const FigureSpec& spec_;
  std::ostringstream out_;
};

void check_spec(const FigureSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw FigureError("figure dimensions must be positive");
  if (spec.palette.empty()) throw FigureError("figure palette must not be empty");
  for (const auto& colour : spec.palette) {
    if (colour.empty() || colour.find_first_of("<>&\"' ") != std::string::npos)
      throw FigureError("invalid palette colour '" + colour + "'");
  }
}

void render_map(const FigureSpec& spec, const MapData& data, SvgWriter& svg) {
  const std::size_t n = data.coords.size();
  if (spec.kind == FigureKind::topic_map && data.sizes.size() != n)
    throw FigureError("topic_map needs one importance per topic");
  if (!data.sizes.empty() && data.sizes.size() != n) throw FigureError("map sizes do not match coordinates");
  if (!data.labels.empty() && data.labels.size() != n) throw FigureError("map labels do not match coordinates");
  if (!data.colors.empty() && data.colors.size() != n) throw FigureError("map colours do not match coordinates");

  const double w = spec.width;
  const double h = spec.height;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& c : data.coords) {
    xmin = std::min(xmin, c[0]);
    xmax = std::max(xmax, c[0]);
    ymin = std::min(ymin, c[1]);
    ymax = std::max(ymax, c[1]);
  }
  const double plot_w = std::max(1.0, w - 2.0 * kMargin);
  const double plot_h = std::max(1.0, h - 2.0 * kMargin - kTitleBand);
  const double dx = xmax - xmin;
  const double dy = ymax - ymin;
  double scale = 1.0;
  if (dx > 0.0 && dy > 0.0) {
    scale = std::min(plot_w / dx, plot_h / dy);
  } else if (dx > 0.0) {
    scale = plot_w / dx;
  } else if (dy > 0.0) {
    scale = plot_h / dy;
  }
  const double ox = kMargin + (plot_w - dx * scale) / 2.0;
  const double oy = kMargin + kTitleBand + (plot_h - dy * scale) / 2.0;
  auto sx = [&](double x) { return ox + (x - xmin) * scale; };
  auto sy = [&](double y) { return oy + (ymax - y) * scale; };

  double max_size = 0.0;
  for (double s : data.sizes) max_size = std::max(max_size, s);
  const double max_radius = kTopicMarkerFraction * std::min(w, h);

  auto& out = svg.out();
  out << "<g id=\"markers\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    double r = kPointRadius;
    if (!data.sizes.empty()) r = max_size > 0.0 ? max_radius * std::sqrt(std::max(data.sizes[i], 0.0) / max_size) : 0.0;
    const std::size_t colour_index = data.colors.empty() ? 0 : data.colors[i];
    const double x = sx(data.coords[i][0]);
    const double y = sy(data.coords[i][1]);
    const std::size_t cyc = svg.cycle(colour_index);
    if (cyc == 0) {
      out << "<circle id=\"point-" << i << "\" cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r)
          << "\" fill=\"" << svg.color(colour_index) << "\" fill-opacity=\"0.75\"/>\n";
    } else {
      // Palette wrapped around: same colour, rotated square marker.
      const double side = r * std::sqrt(M_PI);
      out << "<rect id=\"point-" << i << "\" x=\"" << num(x - side / 2.0) << "\" y=\"" << num(y - side / 2.0)
          << "\" width=\"" << num(side) << "\" height=\"" << num(side) << "\" transform=\"rotate("
          << num(22.5 * static_cast<double>(cyc)) << ' ' << num(x) << ' ' << num(y) << ")\" fill=\""
          << svg.color(colour_index) << "\" fill-opacity=\"0.75\"/>\n";
    }
  }
  out << "</g>\n<g id=\"labels\" font-size=\"11\" text-anchor=\"middle\" fill=\"currentColor\">\n";
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i].empty()) continue;
    out << "<text id=\"label-" << i << "\" x=\"" << num(sx(data.coords[i][0])) << "\" y=\""
        << num(sy(data.coords[i][1]) + 4.0) << "\">" << xml_escape(data.labels[i]) << "</text>\n";
  }
  out << "</g>\n";
}

void render_bars(const FigureSpec& spec, const BarsData& data, SvgWriter& svg) {
  const double w = spec.width;
  const double h = spec.height;
  const double label_w = 0.3 * w;
  const double bar_x = kMargin + label_w;
  const double bar_w = std::max(1.0, w - bar_x - kMargin - 60.0);
  const double top = kMargin + kTitleBand;
  const double row_h = data.bars.empty() ? 0.0 : std::max(1.0, (h - top - kMargin) / static_cast<double>(data.bars.size()));
  double max_value = 0.0;
  for (const auto& [label, value] : data.bars) max_value = std::max(max_value, value);

  auto& out = svg.out();
  out << "<g id=\"bars\">\n";
  for (std::size_t i = 0; i < data.bars.size(); ++i) {
    const auto& [label, value] = data.bars[i];
    const double length = max_value > 0.0 ? bar_w * std::max(value, 0.0) / max_value : 0.0;
    const double y = top + row_h * static_cast<double>(i);
    out << "<rect id=\"bar-" << i << "\" x=\"" << num(bar_x) << "\" y=\"" << num(y + 0.1 * row_h) << "\" width=\""
        << num(length) << "\" height=\"" << num(0.8 * row_h) << "\" fill=\"" << svg.color(data.color) << "\"/>\n";
    out << "<text id=\"bar-label-" << i << "\" x=\"" << num(bar_x - 6.0) << "\" y=\"" << num(y + 0.5 * row_h + 4.0)
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"currentColor\">" << xml_escape(label) << "</text>\n";
    out << "<text id=\"bar-value-" << i << "\" x=\"" << num(bar_x + length + 4.0) << "\" y=\""
        << num(y + 0.5 * row_h + 4.0) << "\" font-size=\"10\" fill=\"currentColor\">" << num(value) << "</text>\n";
  }
  out << "</g>\n";
}

void render_wordcloud(const WordcloudData& data, SvgWriter& svg) {
  auto& out = svg.out();
  out << "<g id=\"words\" text-anchor=\"middle\" dominant-baseline=\"central\">\n";
  for (std::size_t i = 0; i < data.layout.placements.size(); ++i) {
    const auto& p = data.layout.placements[i];
    out << "<text id=\"word-" << i << "\" x=\"" << num(p.x) << "\" y=\"" << num(p.y) << "\" font-size=\""
        << num(p.font_size) << "\" fill=\"" << svg.color(i) << "\"";
    if (p.rotation != 0) out << " transform=\"rotate(-90 " << num(p.x) << ' ' << num(p.y) << ")\"";
    out << '>' << xml_escape(p.term) << "</text>\n";
  }
  out << "</g>\n";
}

void render_timeline(const FigureSpec& spec, const TimelineData& data, SvgWriter& svg) {
  const auto& windows = data.timeline.windows;
  const double w = spec.width;
  const double h = spec.height;
  const double top = kMargin + kTitleBand;
  const double legend_h = data.topic_names.empty() ? 0.0 : 20.0;
  const double plot_h = std::max(1.0, h - top - kMargin - legend_h);
  const double plot_w = std::max(1.0, w - 2.0 * kMargin);
  const double col_w = windows.empty() ? 0.0 : plot_w / static_cast<double>(windows.size());

  auto& out = svg.out();
  out << "<g id=\"windows\">\n";
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& win = windows[i];
    const double x = kMargin + col_w * static_cast<double>(i);
    if (win.empty) {
      out << "<rect id=\"window-" << i << "-empty\" x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\""
          << num(col_w) << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"currentColor\" stroke-dasharray=\"2,2\"/>\n";
      continue;
    }
    double y = top + plot_h;
    for (std::size_t t = 0; t < win.distribution.size(); ++t) {
      const double seg = plot_h * win.distribution[t];
      if (seg <= 0.0) continue;
      y -= seg;
      out << "<rect id=\"window-" << i << "-topic-" << t << "\" x=\"" << num(x) << "\" y=\"" << num(y)
          << "\" width=\"" << num(col_w) << "\" height=\"" << num(seg) << "\" fill=\"" << svg.color(t) << "\"/>\n";
    }
  }
  out << "</g>\n";
  if (!data.topic_names.empty()) {
    out << "<g id=\"legend\" font-size=\"10\" fill=\"currentColor\">\n";
    const double item_w = plot_w / static_cast<double>(data.topic_names.size());
    for (std::size_t t = 0; t < data.topic_names.size(); ++t) {
      const double x = kMargin + item_w * static_cast<double>(t);
      const double y = h - kMargin + 6.0;
      out << "<rect id=\"legend-swatch-" << t << "\" x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"10\" height=\"10\" fill=\""
          << svg.color(t) << "\"/>\n";
      out << "<text id=\"legend-label-" << t << "\" x=\"" << num(x + 14.0) << "\" y=\"" << num(y + 9.0) << "\">"
          << xml_escape(data.topic_names[t]) << "</text>\n";
    }
    out << "</g>\n";
  }
}

bool is_map(FigureKind kind) {
  return kind == FigureKind::topic_map || kind == FigureKind::word_map || kind == FigureKind::document_map ||
         kind == FigureKind::group_map;
}

}  // namespace

std::string to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::topic_map: return "topic_map";
    case FigureKind::word_map: return "word_map";
    case FigureKind::document_map: return "document_map";
    case FigureKind::group_map: return "group_map";
    case FigureKind::term_bars: return "term_bars";
    case FigureKind::wordcloud: return "wordcloud";
    case FigureKind::timeline: return "timeline";
  }
  return "unknown";
}

const std::vector<std::string>& default_palette() {
  static const std::vector<std::string> palette = {
      "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
      "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f", "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5"};
  return palette;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // XML 1.0 forbids most C0 controls.
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') {
          out += ' ';
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string render_figure(const FigureSpec& spec, const FigureData& data) {
  check_spec(spec);
  SvgWriter svg(spec);
  if (is_map(spec.kind)) {
    const auto* map = std::get_if<MapData>(&data);
    if (map == nullptr) throw FigureError(to_string(spec.kind) + " needs map data");
    render_map(spec, *map, svg);
  } else if (spec.kind == FigureKind::term_bars) {
    const auto* bars = std::get_if<BarsData>(&data);
    if (bars == nullptr) throw FigureError("term_bars needs bar data");
    render_bars(spec, *bars, svg);
  } else if (spec.kind == FigureKind::wordcloud) {
    const auto* cloud = std::get_if<WordcloudData>(&data);
    if (cloud == nullptr) throw FigureError("wordcloud needs a wordcloud layout");
    render_wordcloud(*cloud, svg);
  } else {
    const auto* timeline = std::get_if<TimelineData>(&data);
    if (timeline == nullptr) throw FigureError("timeline needs timeline data");
    render_timeline(spec, *timeline, svg);
  }
  return svg.finish();
}

}  // namespace topiclens::layout
