#include <charconv>
#include <iostream>

#include "topiclens/server.hpp"

namespace topiclens::server {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

ApiResponse json_response(int status, const json& body) { return ApiResponse{status, body.dump(), "application/json"}; }

ApiResponse error_response(int status, std::string code, std::string message) {
  return json_response(status, json{{"error", {{"code", std::move(code)}, {"message", std::move(message)}}}});
}

ApiResponse not_found(std::string message) { return error_response(404, "not_found", std::move(message)); }
ApiResponse unprocessable(std::string message) { return error_response(422, "invalid_parameter", std::move(message)); }

std::optional<std::size_t> parse_index(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

/// Reads an optional non-negative integer query parameter.
struct QueryInt {
  std::optional<std::size_t> value;
  std::optional<std::string> error;
};

QueryInt query_int(const Query& query, const std::string& name) {
  auto it = query.find(name);
  if (it == query.end() || it->second.empty()) return {};
  auto v = parse_index(it->second);
  if (!v) return {std::nullopt, "query parameter '" + name + "' must be a non-negative integer"};
  return {v, std::nullopt};
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

json ranked_terms_json(const std::vector<interpret::RankedTerm>& terms, const std::vector<std::string>& vocabulary,
                       const char* weight_key) {
  json arr = json::array();
  for (const auto& t : terms) arr.push_back(json{{"term_id", t.term}, {"term", vocabulary[t.term]}, {weight_key, t.weight}});
  return arr;
}

json distribution_json(const interpret::Distribution& d) { return json{{"values", d.values}, {"undefined", d.undefined}}; }

}  // namespace

std::unique_ptr<ApiSession> ApiSession::open(const fs::path& bundle_dir, const SessionOptions& options) {
  std::unique_ptr<ApiSession> session(new ApiSession());
  session->bundle_dir_ = bundle_dir;
  session->bundle_ = load_bundle(bundle_dir);
  ValidationReport report = validate_bundle(session->bundle_);
  if (!report.ok()) throw StartupError("bundle failed validation", std::move(report));
  session->bundle_hash_ = topiclens::bundle_hash(bundle_dir);
  session->cache_path_ = options.cache_path.value_or(default_cache_path(bundle_dir));

  auto& cache = session->cache_;
  if (auto stored = load_cache(session->cache_path_);
      stored && stored->bundle_hash == session->bundle_hash_ && stored->params == options.params) {
    cache = std::move(*stored);
    session->cache_loaded_ = true;
  } else {
    cache = build_base(session->bundle_, session->bundle_hash_, options.params);
  }

  if (options.precompute) {
    bool changed = !session->cache_loaded_;
    for (MapKind kind : kAllMaps) {
      if (!map_applicable(session->bundle_, kind) || cache.has_map(kind)) continue;
      cache.maps[kind] = build_map(session->bundle_, cache, kind);
      ++session->maps_computed_;
      changed = true;
    }
    if (changed) save_cache(cache, session->cache_path_);
  }

  session->matcher_ = std::make_unique<TermMatcher>(session->bundle_.vocabulary);
  session->phi_hat_ = std::make_unique<interpret::NormalizedPhi>(session->bundle_.phi);
  session->doc_term_ = std::make_unique<SparseCounts>(doc_term_counts(session->bundle_));
  for (std::size_t d = 0; d < session->bundle_.n_docs(); ++d) session->doc_index_.emplace(session->bundle_.documents[d].id, d);
  return session;
}

ApiSession::~ApiSession() {
  wait_idle();
  for (auto& t : builders_)
    if (t.joinable()) t.join();
}

void ApiSession::wait_idle() {
  std::unique_lock lock(maps_mutex_);
  maps_idle_.wait(lock, [&] {
    return std::none_of(building_.begin(), building_.end(), [](const auto& kv) { return kv.second; });
  });
}

std::vector<std::string> ApiSession::names_snapshot() const {
  std::shared_lock lock(names_mutex_);
  return bundle_.topic_names;
}

ApiResponse ApiSession::handle(std::string_view method, std::string_view path, const Query& query,
                               std::string_view body) {
  const auto parts = split_path(path);
  if (parts.size() < 2 || parts[0] != "api") return not_found("no such endpoint");
  if (cache_.bundle_hash != bundle_hash_) {
    return error_response(409, "stale_cache", "interpretation cache does not match the bundle");
  }
  const std::string_view resource = parts[1];
  const bool get = method == "GET";

  try {
    if (resource == "meta" && parts.size() == 2) {
      return get ? meta() : error_response(405, "method_not_allowed", "use GET");
    }
    if (resource == "topics") {
      if (parts.size() == 2) return get ? topics() : error_response(405, "method_not_allowed", "use GET");
      if (parts.size() == 3) return get ? topic(parts[2]) : error_response(405, "method_not_allowed", "use GET");
      if (parts.size() == 4 && parts[3] == "name") {
        return method == "PATCH" ? rename_topic(parts[2], body) : error_response(405, "method_not_allowed", "use PATCH");
      }
      if (parts.size() == 4 && parts[3] == "wordcloud") {
        return get ? topic_wordcloud(parts[2]) : error_response(405, "method_not_allowed", "use GET");
      }
    }
    if (!get) return error_response(405, "method_not_allowed", "use GET");
    if (resource == "maps" && parts.size() == 3) return map(parts[2], query);
    if (resource == "words" && parts.size() == 3) return word(parts[2], query);
    const std::string prefix_documents = "/api/documents/";
    const std::string prefix_groups = "/api/groups/";
    if (resource == "documents" && parts.size() >= 3) return document(path.substr(prefix_documents.size()), query);
    if (resource == "groups" && parts.size() == 2) return groups();
    if (resource == "groups" && parts.size() >= 3) return group(path.substr(prefix_groups.size()));
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what());
  }
  return not_found("no such endpoint");
}

ApiResponse ApiSession::meta() const {
  return json_response(200, json{{"n_topics", bundle_.n_topics()},
                                 {"n_docs", bundle_.n_docs()},
                                 {"n_terms", bundle_.n_terms()},
                                 {"has_groups", bundle_.group_labels.has_value()},
                                 {"bundle_hash", bundle_hash_}});
}

namespace {

json topic_summary_json(std::size_t t, const std::string& name, const InterpretationCache& cache,
                        const std::vector<std::string>& vocabulary, std::size_t n_terms) {
  std::vector<interpret::RankedTerm> terms = cache.top_terms[t];
  if (terms.size() > n_terms) terms.resize(n_terms);
  return json{{"topic_id", t},
              {"name", name},
              {"importance", cache.topic_importance[t]},
              {"top_terms", ranked_terms_json(terms, vocabulary, "weight")},
              {"dominant_documents", cache.topic_dominant_counts[t]}};
}

}  // namespace

ApiResponse ApiSession::topics() const {
  const auto names = names_snapshot();
  json arr = json::array();
  for (std::size_t t = 0; t < bundle_.n_topics(); ++t)
    arr.push_back(topic_summary_json(t, names[t], cache_, bundle_.vocabulary, kListedTopTerms));
  return json_response(200, arr);
}

ApiResponse ApiSession::topic(std::string_view id) const {
  auto t = parse_index(id);
  if (!t || *t >= bundle_.n_topics()) return not_found("unknown topic '" + std::string(id) + "'");
  json out = topic_summary_json(*t, names_snapshot()[*t], cache_, bundle_.vocabulary, kCachedTopTerms);
  out["bundle_hash"] = bundle_hash_;
  return json_response(200, out);
}

ApiResponse ApiSession::rename_topic(std::string_view id, std::string_view body) {
  auto t = parse_index(id);
  if (!t || *t >= bundle_.n_topics()) return not_found("unknown topic '" + std::string(id) + "'");
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error&) {
    return error_response(400, "bad_request", "body must be JSON {\"name\": string}");
  }
  if (!request.is_object() || !request.contains("name") || !request["name"].is_string()) {
    return error_response(400, "bad_request", "body must be JSON {\"name\": string}");
  }
  const std::string name = request["name"].get<std::string>();
  if (name.empty() || is_blank(name)) return error_response(422, "invalid_name", "topic name must not be empty");
  if (count_code_points(name) > kMaxTopicNameLength) {
    return error_response(422, "invalid_name",
                          "topic name exceeds " + std::to_string(kMaxTopicNameLength) + " characters");
  }

  std::unique_lock writer(writer_mutex_, std::try_to_lock);
  if (!writer.owns_lock()) return error_response(409, "conflict", "another rename is in progress");

  std::vector<std::string> names = names_snapshot();
  names[*t] = name;
  try {
    save_topic_names(bundle_dir_, names, bundle_.n_topics());
  } catch (const std::exception& e) {
    return error_response(500, "write_failed", e.what());
  }
  {
    std::unique_lock lock(names_mutex_);
    bundle_.topic_names = names;
  }
  json out = topic_summary_json(*t, name, cache_, bundle_.vocabulary, kCachedTopTerms);
  out["bundle_hash"] = bundle_hash_;
  return json_response(200, out);
}

ApiResponse ApiSession::topic_wordcloud(std::string_view id) const {
  auto t = parse_index(id);
  if (!t || *t >= bundle_.n_topics()) return not_found("unknown topic '" + std::string(id) + "'");
  json out = to_json(cache_.topic_wordclouds[*t]);
  out["topic_id"] = *t;
  out["bundle_hash"] = bundle_hash_;
  return json_response(200, out);
}

void ApiSession::persist_cache_locked() {
  try {
    save_cache(cache_, cache_path_);
  } catch (const std::exception& e) {
    std::cerr << "warning: could not persist cache: " << e.what() << "\n";
  }
}

void ApiSession::start_map_build(MapKind kind) {
  // Called with maps_mutex_ held.
  building_[kind] = true;
  builders_.emplace_back([this, kind] {
    std::optional<manifold::Projection2D> result;
    std::string failure;
    try {
      result = build_map(bundle_, cache_, kind);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    std::lock_guard lock(maps_mutex_);
    if (result) {
      cache_.maps[kind] = std::move(*result);
      ++maps_computed_;
      persist_cache_locked();
    } else {
      build_errors_[kind] = failure;
    }
    building_[kind] = false;
    maps_idle_.notify_all();
  });
}

ApiResponse ApiSession::map(std::string_view kind_name, const Query& query) {
  auto kind = parse_map_kind(kind_name);
  if (!kind) return not_found("unknown map '" + std::string(kind_name) + "'");
  if (!map_applicable(bundle_, *kind)) return error_response(404, "no_groups", "bundle has no group labels");

  bool use_pca = false;
  if (auto it = query.find("fallback"); it != query.end()) {
    if (it->second != "pca") return unprocessable("fallback must be 'pca'");
    use_pca = true;
  }

  std::optional<manifold::Projection2D> projection;
  {
    std::lock_guard lock(maps_mutex_);
    if (auto it = cache_.maps.find(*kind); it != cache_.maps.end()) {
      projection = it->second;
    } else if (auto err = build_errors_.find(*kind); err != build_errors_.end() && !use_pca) {
      return error_response(500, "map_failed", err->second);
    } else if (!building_[*kind] && !build_errors_.contains(*kind)) {
      start_map_build(*kind);
    }
  }
  bool fallback = false;
  if (!projection) {
    if (!use_pca) {
      return json_response(202, json{{"status", "building"}, {"map", to_string(*kind)}, {"bundle_hash", bundle_hash_}});
    }
    projection = build_pca_map(bundle_, cache_, *kind);
    fallback = true;
  }

  json out = to_json(*projection);
  out["map"] = to_string(*kind);
  out["bundle_hash"] = bundle_hash_;
  out["fallback"] = fallback;
  json ids = json::array();
  json dominant = json::array();
  switch (*kind) {
    case MapKind::topics:
      for (std::size_t t = 0; t < bundle_.n_topics(); ++t) {
        ids.push_back(t);
        dominant.push_back(t);
      }
      out["importance"] = cache_.topic_importance;
      out["labels"] = names_snapshot();
      break;
    case MapKind::words:
      for (std::size_t w = 0; w < bundle_.n_terms(); ++w) {
        ids.push_back(w);
        dominant.push_back(bundle_.n_topics() > 0 ? interpret::dominant_topic(bundle_.phi.column(w)) : 0);
      }
      out["labels"] = bundle_.vocabulary;
      break;
    case MapKind::documents:
      for (std::size_t d = 0; d < bundle_.n_docs(); ++d) ids.push_back(bundle_.documents[d].id);
      dominant = cache_.dominant_topics;
      break;
    case MapKind::groups:
      for (std::size_t g = 0; g < cache_.groups->groups.size(); ++g) {
        ids.push_back(cache_.groups->groups[g]);
        dominant.push_back(interpret::dominant_topic(cache_.groups->values.row(g)));
      }
      break;
  }
  out["ids"] = std::move(ids);
  out["dominant_topic"] = std::move(dominant);
  return json_response(200, out);
}

ApiResponse ApiSession::word(std::string_view id, const Query& query) const {
  auto term = parse_index(id);
  if (!term || *term >= bundle_.n_terms()) return not_found("unknown term '" + std::string(id) + "'");
  const auto n_assoc = query_int(query, "n_assoc");
  if (n_assoc.error) return unprocessable(*n_assoc.error);
  const std::size_t n = n_assoc.value.value_or(kDefaultAssociations);
  if (n == 0) return unprocessable("n_assoc must be positive");

  const auto term_index = static_cast<TermIndex>(*term);
  const auto assoc = interpret::nearest_words(bundle_.phi, term_index, n);
  std::vector<TermIndex> neighborhood{term_index};
  for (const auto& a : assoc.neighbors) neighborhood.push_back(a.term);
  const auto distribution = interpret::word_topic_distribution(bundle_.phi, neighborhood);

  return json_response(200, json{{"term_id", *term},
                                 {"term", bundle_.vocabulary[*term]},
                                 {"bundle_hash", bundle_hash_},
                                 {"zero_norm", assoc.zero_norm},
                                 {"associations", ranked_terms_json(assoc.neighbors, bundle_.vocabulary, "similarity")},
                                 {"distribution", distribution_json(distribution)},
                                 {"embedding", interpret::word_embedding(bundle_.phi, term_index)}});
}

ApiResponse ApiSession::document(std::string_view id, const Query& query) const {
  auto found = doc_index_.find(id);
  if (found == doc_index_.end()) return not_found("unknown document '" + std::string(id) + "'");
  const std::size_t d = found->second;
  const Document& doc = bundle_.documents[d];

  const auto snippet_chars = query_int(query, "snippet_chars");
  const auto window = query_int(query, "window");
  const auto stride = query_int(query, "stride");
  const auto topic_override = query_int(query, "topic");
  for (const auto* q : {&snippet_chars, &window, &stride, &topic_override})
    if (q->error) return unprocessable(*q->error);
  const std::size_t window_size = window.value.value_or(interpret::kDefaultTimelineWindow);
  const std::size_t stride_size = stride.value.value_or(interpret::kDefaultTimelineStride);
  if (window_size == 0 || stride_size == 0) return unprocessable("window and stride must be positive");
  if (topic_override.value && *topic_override.value >= bundle_.n_topics()) {
    return unprocessable("topic " + std::to_string(*topic_override.value) + " out of range");
  }
  const std::size_t topic = topic_override.value.value_or(cache_.dominant_topics[d]);

  const MatchedText matched = matcher_->match(doc.text);

  // Snippet: the first `snippet_chars` code points, pulled back to the start
  // of any token the cut would split.
  const std::size_t limit = snippet_chars.value.value_or(kDefaultSnippetChars);
  std::size_t cut = 0;
  {
    std::size_t chars = 0;
    while (cut < doc.text.size() && chars < limit) {
      const auto lead = static_cast<unsigned char>(doc.text[cut]);
      std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xe ? 3 : (lead >> 3) == 0x1e ? 4 : 1;
      cut = std::min(cut + len, doc.text.size());
      ++chars;
    }
    for (const auto& token : matched.tokens) {
      if (token.begin < cut && cut < token.end) {
        cut = token.begin;
        break;
      }
    }
  }

  json spans = json::array();
  for (const auto& span : interpret::document_highlights(matched, *phi_hat_, topic, kHighlightTerms)) {
    if (span.end > cut) continue;
    spans.push_back(json{{"start", span.start},
                         {"end", span.end},
                         {"term_id", span.term},
                         {"term", bundle_.vocabulary[span.term]},
                         {"weight", span.weight}});
  }

  const auto tokens = matched.token_terms();
  const auto timeline = interpret::document_timeline(tokens, *phi_hat_, window_size, stride_size);
  json windows = json::array();
  for (const auto& w : timeline.windows) {
    windows.push_back(json{{"token_start", w.token_begin},
                           {"token_end", w.token_end},
                           {"distribution", w.distribution},
                           {"empty", w.empty}});
  }

  const auto row = bundle_.theta.row(d);
  const auto normalized = interpret::normalize(row);
  json out{{"id", doc.id},
           {"bundle_hash", bundle_hash_},
           {"snippet", doc.text.substr(0, cut)},
           {"snippet_truncated", cut < doc.text.size()},
           {"highlight_topic", topic},
           {"highlights", std::move(spans)},
           {"timeline", {{"window", window_size}, {"stride", stride_size}, {"windows", std::move(windows)}}},
           {"topic_distribution",
            {{"raw", std::vector<double>(row.begin(), row.end())},
             {"normalized", normalized.values},
             {"undefined", normalized.undefined}}},
           {"dominant_topic", cache_.dominant_topics[d]},
           {"token_count", matched.token_count}};
  if (doc.group) out["group"] = *doc.group;
  return json_response(200, out);
}

ApiResponse ApiSession::groups() const {
  if (!cache_.groups) return error_response(404, "no_groups", "bundle has no group labels");
  const auto& g = *cache_.groups;
  std::vector<std::size_t> sizes(g.groups.size(), 0);
  for (std::size_t idx : g.group_of) ++sizes[idx];
  json arr = json::array();
  for (std::size_t i = 0; i < g.groups.size(); ++i) {
    arr.push_back(json{{"id", g.groups[i]},
                       {"n_docs", sizes[i]},
                       {"dominant_topic", interpret::dominant_topic(g.values.row(i))}});
  }
  return json_response(200, json{{"bundle_hash", bundle_hash_}, {"groups", std::move(arr)}});
}

ApiResponse ApiSession::group(std::string_view id) const {
  if (!cache_.groups) return error_response(404, "no_groups", "bundle has no group labels");
  const auto index = cache_.groups->find(id);
  if (!index) return not_found("unknown group '" + std::string(id) + "'");
  const auto row = cache_.groups->values.row(*index);
  const auto normalized = interpret::normalize(row);
  const auto words = interpret::group_wordcloud_weights(*doc_term_, *bundle_.group_labels, id);
  return json_response(200, json{{"id", std::string(id)},
                                 {"bundle_hash", bundle_hash_},
                                 {"raw", std::vector<double>(row.begin(), row.end())},
                                 {"normalized", normalized.values},
                                 {"undefined", normalized.undefined},
                                 {"wordcloud", ranked_terms_json(words, bundle_.vocabulary, "weight")}});
}

}  // namespace topiclens::server
