#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "topiclens/interpret.hpp"
#include "topiclens/manifold.hpp"

namespace topiclens::layout {

// ---------------------------------------------------------------------------
// Wordcloud

struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  /// Positive-area overlap; boxes that only share an edge do not intersect.
  bool intersects(const Box& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
  bool inside(double width, double height) const { return x0 >= 0.0 && y0 >= 0.0 && x1 <= width && y1 <= height; }
};

struct WordWeight {
  std::string term;
  double weight = 0.0;
};

struct Placement {
  std::string term;
  double weight = 0.0;
  double font_size = 0.0;
  double x = 0.0;  // box centre
  double y = 0.0;
  int rotation = 0;  // degrees, 0 or 90
  Box box;
};

struct WordcloudLayout {
  double width = 0.0;
  double height = 0.0;
  std::vector<Placement> placements;
  std::vector<std::string> dropped;  // zero weight, or no free spot on the spiral
};

inline constexpr double kMinFontSize = 10.0;
inline constexpr double kMaxFontFraction = 0.15;
inline constexpr double kSpiralStep = 0.1;    // radians per probe
inline constexpr double kSpiralPitch = 1.0;   // pixels of radius per radian
inline constexpr double kGlyphAspect = 0.6;   // advance width per code point, in font sizes

/// Axis-aligned extent of `term` at `font_size` before rotation.
Box text_extent(std::string_view term, double font_size);

/// Places words largest-first on an Archimedean spiral from the canvas
/// centre; the first collision-free, in-canvas box is accepted. Throws
/// std::invalid_argument if no weight is positive or a term repeats.
WordcloudLayout layout_wordcloud(std::span<const WordWeight> weights, double width, double height, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Figures

enum class FigureKind { topic_map, word_map, document_map, group_map, term_bars, wordcloud, timeline };

std::string to_string(FigureKind kind);

/// 20-colour qualitative cycle.
const std::vector<std::string>& default_palette();

struct FigureSpec {
  FigureKind kind = FigureKind::topic_map;
  int width = 800;
  int height = 600;
  std::vector<std::string> palette = default_palette();
  std::string font_family = "sans-serif";
  std::string title;
};

/// Scatter of a 2-D projection. `sizes` scale marker area (required for the
/// topic map); `colors` index the palette; `labels` may be empty strings.
struct MapData {
  manifold::Coordinates coords;
  std::vector<std::string> labels;
  std::vector<double> sizes;
  std::vector<std::size_t> colors;
};

struct BarsData {
  std::vector<std::pair<std::string, double>> bars;  // drawn in order, top to bottom
  std::size_t color = 0;
};

struct WordcloudData {
  WordcloudLayout layout;
};

struct TimelineData {
  interpret::Timeline timeline;
  std::vector<std::string> topic_names;
};

using FigureData = std::variant<MapData, BarsData, WordcloudData, TimelineData>;

class FigureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Standalone SVG 1.1 document. Output is a pure function of the inputs.
std::string render_figure(const FigureSpec& spec, const FigureData& data);

std::string xml_escape(std::string_view text);

}  // namespace topiclens::layout
