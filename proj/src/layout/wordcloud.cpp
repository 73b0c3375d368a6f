#include <algorithm>
#include <cmath>
#include <set>

#include "topiclens/layout.hpp"
#include "topiclens/pcg32.hpp"
#include "topiclens/tokenizer.hpp"

namespace topiclens::layout {

Box text_extent(std::string_view term, double font_size) {
  const auto glyphs = static_cast<double>(std::max<std::size_t>(count_code_points(term), 1));
  return Box{0.0, 0.0, kGlyphAspect * font_size * glyphs, font_size};
}

WordcloudLayout layout_wordcloud(std::span<const WordWeight> weights, double width, double height, std::uint64_t seed) {
  if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("layout_wordcloud: canvas must be positive");
  std::set<std::string_view> seen;
  double max_weight = 0.0;
  for (const auto& w : weights) {
    if (!seen.insert(w.term).second) throw std::invalid_argument("layout_wordcloud: duplicate term '" + w.term + "'");
    if (!std::isfinite(w.weight) || w.weight < 0.0)
      throw std::invalid_argument("layout_wordcloud: weight of '" + w.term + "' must be finite and non-negative");
    max_weight = std::max(max_weight, w.weight);
  }
  if (!(max_weight > 0.0)) throw std::invalid_argument("layout_wordcloud: no positive weights");

  std::vector<WordWeight> order(weights.begin(), weights.end());
  std::sort(order.begin(), order.end(), [](const WordWeight& a, const WordWeight& b) {
    return a.weight > b.weight || (a.weight == b.weight && a.term < b.term);
  });

  const double min_size = kMinFontSize;
  const double max_size = std::max(min_size, kMaxFontFraction * std::min(width, height));
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  const double max_radius = std::hypot(width, height) / 2.0;

  WordcloudLayout layout;
  layout.width = width;
  layout.height = height;
  Pcg32 rng(seed, order.size());

  for (const auto& word : order) {
    const bool vertical = (rng.next() >> 31u) != 0u;
    if (word.weight <= 0.0) {
      layout.dropped.push_back(word.term);
      continue;
    }
    const double size = min_size + (max_size - min_size) * std::sqrt(word.weight / max_weight);
    const Box extent = text_extent(word.term, size);
    const double w = vertical ? extent.height() : extent.width();
    const double h = vertical ? extent.width() : extent.height();

    bool placed = false;
    for (double theta = 0.0;; theta += kSpiralStep) {
      const double r = kSpiralPitch * theta;
      if (r > max_radius) break;
      const double x = cx + r * std::cos(theta);
      const double y = cy + r * std::sin(theta);
      const Box box{x - w / 2.0, y - h / 2.0, x + w / 2.0, y + h / 2.0};
      if (!box.inside(width, height)) continue;
      const bool collides = std::any_of(layout.placements.begin(), layout.placements.end(),
                                        [&](const Placement& p) { return p.box.intersects(box); });
      if (collides) continue;
      layout.placements.push_back(Placement{word.term, word.weight, size, x, y, vertical ? 90 : 0, box});
      placed = true;
      break;
    }
    if (!placed) layout.dropped.push_back(word.term);
  }
  return layout;
}

}  // namespace topiclens::layout
