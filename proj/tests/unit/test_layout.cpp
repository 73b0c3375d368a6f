#include <cmath>
#include <regex>
#include <set>

#include "doctest.h"
#include "topiclens/layout.hpp"

using namespace topiclens;
using namespace topiclens::layout;

namespace {

std::vector<WordWeight> zipf_words(std::size_t n) {
  std::vector<WordWeight> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back({"word" + std::to_string(i), 1.0 / static_cast<double>(i + 1)});
  return words;
}

std::set<std::string> fill_colours(const std::string& svg) {
  std::set<std::string> out;
  const std::regex attr(R"((fill|stroke)=\"([^\"]*)\")");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), attr); it != std::sregex_iterator(); ++it)
    out.insert((*it)[2]);
  return out;
}

}  // namespace

TEST_CASE("wordcloud placements never overlap and stay on the canvas") {
  const auto words = zipf_words(150);
  const auto layout = layout_wordcloud(words, 800, 600, 1);
  CHECK(layout.placements.size() + layout.dropped.size() == 150);
  CHECK(layout.placements.size() > 50);
  for (std::size_t i = 0; i < layout.placements.size(); ++i) {
    CHECK(layout.placements[i].box.inside(800, 600));
    for (std::size_t j = i + 1; j < layout.placements.size(); ++j)
      CHECK_FALSE(layout.placements[i].box.intersects(layout.placements[j].box));
  }
}

TEST_CASE("wordcloud font size follows weight") {
  const auto layout = layout_wordcloud(zipf_words(40), 800, 600, 3);
  for (std::size_t i = 1; i < layout.placements.size(); ++i)
    CHECK(layout.placements[i - 1].font_size >= layout.placements[i].font_size);
  CHECK(layout.placements.front().font_size == doctest::Approx(kMaxFontFraction * 600));
  for (const auto& p : layout.placements) CHECK(p.font_size >= kMinFontSize);
}

TEST_CASE("wordcloud is a function of its seed") {
  const auto words = zipf_words(60);
  const auto a = layout_wordcloud(words, 500, 400, 7);
  const auto b = layout_wordcloud(words, 500, 400, 7);
  REQUIRE(a.placements.size() == b.placements.size());
  for (std::size_t i = 0; i < a.placements.size(); ++i) {
    CHECK(a.placements[i].x == b.placements[i].x);
    CHECK(a.placements[i].rotation == b.placements[i].rotation);
  }
  const auto c = layout_wordcloud(words, 500, 400, 8);
  bool differs = false;
  for (std::size_t i = 0; i < std::min(a.placements.size(), c.placements.size()); ++i)
    differs |= a.placements[i].rotation != c.placements[i].rotation || a.placements[i].x != c.placements[i].x;
  CHECK(differs);
}

TEST_CASE("wordcloud input checks") {
  const std::vector<WordWeight> zero{{"a", 0.0}, {"b", 0.0}};
  CHECK_THROWS_AS(layout_wordcloud(zero, 100, 100, 0), std::invalid_argument);
  const std::vector<WordWeight> dup{{"a", 1.0}, {"a", 2.0}};
  CHECK_THROWS_AS(layout_wordcloud(dup, 100, 100, 0), std::invalid_argument);
  const std::vector<WordWeight> some{{"a", 1.0}, {"b", 0.0}};
  const auto layout = layout_wordcloud(some, 200, 200, 0);
  CHECK(layout.placements.size() == 1);
  CHECK(layout.dropped == std::vector<std::string>{"b"});
}

TEST_CASE("box intersection needs positive area") {
  const Box a{0, 0, 10, 10}, b{10, 0, 20, 10}, c{5, 5, 15, 15};
  CHECK_FALSE(a.intersects(b));
  CHECK(a.intersects(c));
}

TEST_CASE("topic map svg is deterministic and uses palette colours only") {
  MapData data;
  data.coords = {{0.0, 0.0}, {1.0, 2.0}, {-1.0, 0.5}};
  data.labels = {"alpha", "b<e>ta", "gamma & co"};
  data.sizes = {3.0, 1.0, 2.0};
  data.colors = {0, 1, 2};
  FigureSpec spec;
  spec.kind = FigureKind::topic_map;
  spec.palette = {"#112233", "#445566"};
  const std::string svg = render_figure(spec, data);
  CHECK(svg == render_figure(spec, data));
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("id=\"point-2\"") != std::string::npos);
  CHECK(svg.find("b&lt;e&gt;ta") != std::string::npos);
  CHECK(svg.find("gamma &amp; co") != std::string::npos);
  for (const auto& c : fill_colours(svg)) {
    CAPTURE(c);
    CHECK((c == "#112233" || c == "#445566" || c == "none" || c == "currentColor"));
  }
  // The third marker wraps the two-colour palette and is drawn as a square.
  CHECK(svg.find("<rect id=\"point-2\"") != std::string::npos);
}

TEST_CASE("topic map marker area scales with importance") {
  MapData data;
  data.coords = {{0.0, 0.0}, {1.0, 1.0}};
  data.sizes = {4.0, 1.0};
  FigureSpec spec;
  spec.width = 500;
  spec.height = 400;
  const std::string svg = render_figure(spec, data);
  std::smatch m;
  const std::regex r0(R"re(id="point-0"[^>]* r="([0-9.]+)")re"), r1(R"re(id="point-1"[^>]* r="([0-9.]+)")re");
  REQUIRE(std::regex_search(svg, m, r0));
  const double big = std::stod(m[1]);
  REQUIRE(std::regex_search(svg, m, r1));
  const double small = std::stod(m[1]);
  CHECK(big == doctest::Approx(0.08 * 400));
  CHECK(small == doctest::Approx(0.08 * 400 * 0.5));
}

TEST_CASE("figure validation") {
  FigureSpec spec;
  spec.palette = {"red\" onload=\"x"};
  CHECK_THROWS_AS(render_figure(spec, MapData{{{0, 0}}, {}, {1.0}, {}}), FigureError);
  spec.palette = default_palette();
  spec.width = 0;
  CHECK_THROWS_AS(render_figure(spec, MapData{{{0, 0}}, {}, {1.0}, {}}), FigureError);
  spec.width = 800;
  spec.kind = FigureKind::term_bars;
  CHECK_THROWS_AS(render_figure(spec, MapData{}), FigureError);
  CHECK(default_palette().size() == 20);
}

TEST_CASE("bars, wordcloud and timeline figures render") {
  FigureSpec bars;
  bars.kind = FigureKind::term_bars;
  const std::string b = render_figure(bars, BarsData{{{"apple", 0.4}, {"pear", 0.2}}, 3});
  CHECK(b.find("id=\"bar-1\"") != std::string::npos);

  FigureSpec cloud;
  cloud.kind = FigureKind::wordcloud;
  const std::string w = render_figure(cloud, WordcloudData{layout_wordcloud(zipf_words(10), 800, 600, 0)});
  CHECK(w.find("id=\"word-0\"") != std::string::npos);

  interpret::Timeline tl;
  tl.windows.push_back({0, 4, {0.25, 0.75}, false});
  tl.windows.push_back({4, 6, {0.0, 0.0}, true});
  FigureSpec timeline;
  timeline.kind = FigureKind::timeline;
  const std::string t = render_figure(timeline, TimelineData{tl, {"A", "B"}});
  CHECK(t.find("id=\"window-0-topic-1\"") != std::string::npos);
  CHECK(t.find("id=\"window-1-empty\"") != std::string::npos);
}

TEST_CASE("wordcloud hand examples") {
  const std::vector<WordWeight> one{{"solo", 1.0}};
  const auto single = layout_wordcloud(one, 400, 300, 0);
  REQUIRE(single.placements.size() == 1);
  CHECK(single.placements[0].x == doctest::Approx(200.0));
  CHECK(single.placements[0].y == doctest::Approx(150.0));

  const std::vector<WordWeight> pair{{"left", 0.5}, {"right", 0.5}};
  const auto equal = layout_wordcloud(pair, 400, 300, 0);
  REQUIRE(equal.placements.size() == 2);
  CHECK(equal.placements[0].font_size == equal.placements[1].font_size);

  const auto crowded = layout_wordcloud(zipf_words(100), 50, 50, 0);
  CHECK_FALSE(crowded.dropped.empty());
  CHECK(crowded.placements.size() + crowded.dropped.size() == 100);
}

TEST_CASE("topic map radii follow the square root of importance") {
  MapData data;
  data.coords = {{0.0, 0.0}, {1.0, 1.0}};
  data.sizes = {3.0, 5.0};
  const std::string svg = render_figure(FigureSpec{}, data);
  std::smatch m;
  const std::regex r0(R"re(id="point-0"[^>]* r="([0-9.]+)")re"), r1(R"re(id="point-1"[^>]* r="([0-9.]+)")re");
  REQUIRE(std::regex_search(svg, m, r0));
  const double a = std::stod(m[1]);
  REQUIRE(std::regex_search(svg, m, r1));
  const double b = std::stod(m[1]);
  CHECK(a / b == doctest::Approx(std::sqrt(3.0) / std::sqrt(5.0)).epsilon(1e-3));
}
