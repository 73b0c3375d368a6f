#include "topiclens/bundle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>
#include <unordered_set>

#include "json.hpp"

namespace topiclens {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot open " + path.filename().string() + " (" + path.string() + ")");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BundleError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw BundleError("write failed: " + path.string());
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::string where(const fs::path& file, std::size_t row, std::size_t col) {
  return file.filename().string() + " row " + std::to_string(row + 1) + " column " + std::to_string(col + 1);
}

double parse_real(std::string_view field, const fs::path& file, std::size_t row, std::size_t col) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw BundleError("malformed number '" + std::string(field) + "' in " + where(file, row, col));
  }
  return value;
}

template <typename T>
T parse_unsigned(std::string_view field, const fs::path& file, std::size_t row, std::size_t col) {
  T value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw BundleError("malformed non-negative integer '" + std::string(field) + "' in " + where(file, row, col));
  }
  return value;
}

Matrix read_dense_csv(const fs::path& path) {
  const std::string content = read_file(path);
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (std::string_view line : split_lines(content)) {
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (rows == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw BundleError(path.filename().string() + " row " + std::to_string(rows + 1) + " has " +
                        std::to_string(fields.size()) + " columns, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) values.push_back(parse_real(fields[c], path, rows, c));
    ++rows;
  }
  return Matrix(rows, cols, std::move(values));
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string dense_csv(const Matrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out.push_back(',');
      out += format_real(m(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

void require_dim(std::size_t got, std::size_t expected, const std::string& got_name, const std::string& expected_name) {
  if (got != expected) {
    throw BundleError(got_name + " (" + std::to_string(got) + ") != " + expected_name + " (" +
                      std::to_string(expected) + ")");
  }
}

std::optional<std::string> manifest_entry(const json& manifest, const char* key, bool required) {
  auto it = manifest.find(key);
  if (it == manifest.end() || it->is_null()) {
    if (required) throw BundleError("manifest.json: missing required key '" + std::string(key) + "'");
    return std::nullopt;
  }
  if (!it->is_string()) throw BundleError("manifest.json: key '" + std::string(key) + "' must be a string");
  return it->get<std::string>();
}

std::vector<Document> read_documents(const fs::path& path) {
  const std::string content = read_file(path);
  std::vector<Document> docs;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string loc = path.filename().string() + " line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw BundleError(loc + ": invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw BundleError(loc + ": expected an object");
    Document doc;
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string()) throw BundleError(loc + ": missing string field 'id'");
    doc.id = id->get<std::string>();
    auto text = obj.find("text");
    if (text == obj.end() || !text->is_string()) throw BundleError(loc + ": missing string field 'text'");
    doc.text = text->get<std::string>();
    if (auto group = obj.find("group"); group != obj.end() && !group->is_null()) {
      if (group->is_string()) {
        doc.group = group->get<std::string>();
      } else if (group->is_number_integer()) {
        doc.group = std::to_string(group->get<long long>());
      } else {
        throw BundleError(loc + ": field 'group' must be a string");
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<std::string> read_lines_file(const fs::path& path) {
  const std::string content = read_file(path);
  std::vector<std::string> out;
  for (std::string_view line : split_lines(content)) out.emplace_back(line);
  return out;
}

void write_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, content);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw BundleError("cannot replace " + path.string());
  }
}

}  // namespace

SparseCounts SparseCounts::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> triplets) {
  std::sort(triplets.begin(), triplets.end());
  SparseCounts m(rows, cols);
  for (std::size_t i = 0; i < triplets.size();) {
    auto [r, c, n] = triplets[i];
    std::uint64_t total = n;
    std::size_t j = i + 1;
    for (; j < triplets.size() && std::get<0>(triplets[j]) == r && std::get<1>(triplets[j]) == c; ++j)
      total += std::get<2>(triplets[j]);
    if (total > 0) {
      m.entries_.push_back(Entry{static_cast<std::uint32_t>(c), total});
      ++m.row_start_[r + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_start_[r + 1] += m.row_start_[r];
  return m;
}

std::uint64_t SparseCounts::at(std::size_t r, std::size_t c) const {
  const auto entries = row(r);
  auto it = std::lower_bound(entries.begin(), entries.end(), c,
                             [](const Entry& e, std::size_t col) { return e.column < col; });
  return (it != entries.end() && it->column == c) ? it->count : 0;
}

std::uint64_t SparseCounts::row_sum(std::size_t r) const {
  std::uint64_t total = 0;
  for (const auto& e : row(r)) total += e.count;
  return total;
}

std::vector<std::uint64_t> SparseCounts::row_sums() const {
  std::vector<std::uint64_t> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = row_sum(r);
  return out;
}

std::vector<std::string> default_topic_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t k = 0; k < n; ++k) names.push_back("Topic " + std::to_string(k));
  return names;
}

BundleFiles BundleFiles::resolve(const fs::path& root) {
  const fs::path manifest_path = root / "manifest.json";
  if (!fs::exists(manifest_path)) throw BundleError("missing manifest.json in " + root.string());
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw BundleError(std::string("manifest.json: invalid JSON (") + e.what() + ")");
  }
  if (!manifest.is_object()) throw BundleError("manifest.json: expected an object");
  auto version = manifest.find("version");
  if (version == manifest.end() || !version->is_number_integer() || version->get<int>() != kManifestVersion) {
    throw BundleError("manifest.json: unsupported or missing 'version' (expected 1)");
  }
  BundleFiles files;
  files.root = root;
  files.vocabulary = root / *manifest_entry(manifest, "vocabulary", true);
  files.topic_term = root / *manifest_entry(manifest, "topic_term", true);
  files.doc_topic = root / *manifest_entry(manifest, "doc_topic", true);
  files.documents = root / *manifest_entry(manifest, "documents", true);
  if (auto p = manifest_entry(manifest, "doc_term", false)) files.doc_term = root / *p;
  if (auto p = manifest_entry(manifest, "doc_embeddings", false)) files.doc_embeddings = root / *p;
  if (auto p = manifest_entry(manifest, "groups", false)) files.groups = root / *p;
  files.topic_names = root / manifest_entry(manifest, "topic_names", false).value_or("topic_names.json");
  return files;
}

CorpusBundle load_bundle(const fs::path& dir) {
  const BundleFiles files = BundleFiles::resolve(dir);
  CorpusBundle bundle;

  for (const auto& f : {files.vocabulary, files.topic_term, files.doc_topic, files.documents}) {
    if (!fs::exists(f)) throw BundleError("missing file " + f.filename().string());
  }

  bundle.vocabulary = read_lines_file(files.vocabulary);
  // A trailing newline produces no extra term; interior empty lines stay and fail validation.
  bundle.phi = read_dense_csv(files.topic_term);
  bundle.theta = read_dense_csv(files.doc_topic);
  bundle.documents = read_documents(files.documents);

  const std::size_t m = bundle.vocabulary.size();
  const std::size_t d = bundle.documents.size();
  const std::size_t n = bundle.phi.rows();
  require_dim(bundle.phi.cols(), m, "phi columns", "vocabulary size");
  require_dim(bundle.theta.rows(), d, "theta rows", "document count");
  require_dim(bundle.theta.cols(), n, "theta columns", "phi rows");

  if (fs::exists(files.topic_names)) {
    json names;
    try {
      names = json::parse(read_file(files.topic_names));
    } catch (const json::parse_error& e) {
      throw BundleError(files.topic_names.filename().string() + ": invalid JSON (" + e.what() + ")");
    }
    if (!names.is_array()) throw BundleError(files.topic_names.filename().string() + ": expected an array of strings");
    for (const auto& name : names) {
      if (!name.is_string()) throw BundleError(files.topic_names.filename().string() + ": expected an array of strings");
      bundle.topic_names.push_back(name.get<std::string>());
    }
    require_dim(bundle.topic_names.size(), n, files.topic_names.filename().string() + " entries", "phi rows");
  } else {
    bundle.topic_names = default_topic_names(n);
  }

  if (files.groups) {
    if (!fs::exists(*files.groups)) throw BundleError("missing file " + files.groups->filename().string());
    auto labels = read_lines_file(*files.groups);
    if (labels.size() != d) {
      throw BundleError(files.groups->filename().string() + " has " + std::to_string(labels.size()) +
                        " group labels but " + files.documents.filename().string() + " has " +
                        std::to_string(d) + " documents");
    }
    for (std::size_t i = 0; i < d; ++i) bundle.documents[i].group = labels[i];
    bundle.group_labels = std::move(labels);
  } else {
    const auto labelled = static_cast<std::size_t>(std::count_if(
        bundle.documents.begin(), bundle.documents.end(), [](const Document& doc) { return doc.group.has_value(); }));
    if (labelled == d && d > 0) {
      std::vector<std::string> labels;
      labels.reserve(d);
      for (const auto& doc : bundle.documents) labels.push_back(*doc.group);
      bundle.group_labels = std::move(labels);
    } else if (labelled > 0) {
      throw BundleError(files.documents.filename().string() + " has group labels for " + std::to_string(labelled) +
                        " of " + std::to_string(d) + " documents");
    }
  }

  if (files.doc_embeddings) {
    if (!fs::exists(*files.doc_embeddings))
      throw BundleError("missing file " + files.doc_embeddings->filename().string());
    Matrix emb = read_dense_csv(*files.doc_embeddings);
    require_dim(emb.rows(), d, files.doc_embeddings->filename().string() + " rows", "document count");
    bundle.doc_embeddings = std::move(emb);
  }

  if (files.doc_term) {
    if (!fs::exists(*files.doc_term)) throw BundleError("missing file " + files.doc_term->filename().string());
    const std::string content = read_file(*files.doc_term);
    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> triplets;
    std::size_t row = 0;
    for (std::string_view line : split_lines(content)) {
      if (trim(line).empty()) {
        ++row;
        continue;
      }
      const auto fields = split_fields(line);
      if (fields.size() != 3) {
        throw BundleError(files.doc_term->filename().string() + " row " + std::to_string(row + 1) +
                          ": expected doc_index,term_index,count");
      }
      const auto doc = parse_unsigned<std::size_t>(fields[0], *files.doc_term, row, 0);
      const auto term = parse_unsigned<std::size_t>(fields[1], *files.doc_term, row, 1);
      const auto count = parse_unsigned<std::uint64_t>(fields[2], *files.doc_term, row, 2);
      if (doc >= d) {
        throw BundleError(where(*files.doc_term, row, 0) + ": doc_index " + std::to_string(doc) +
                          " out of range for document count (" + std::to_string(d) + ")");
      }
      if (term >= m) {
        throw BundleError(where(*files.doc_term, row, 1) + ": term_index " + std::to_string(term) +
                          " out of range for vocabulary size (" + std::to_string(m) + ")");
      }
      triplets.emplace_back(doc, term, count);
      ++row;
    }
    bundle.doc_term = SparseCounts::from_triplets(d, m, std::move(triplets));
  }

  return bundle;
}

void save_bundle(const CorpusBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest = {{"version", kManifestVersion},
                   {"vocabulary", "vocab.txt"},
                   {"topic_term", "phi.csv"},
                   {"doc_topic", "theta.csv"},
                   {"documents", "documents.jsonl"},
                   {"topic_names", "topic_names.json"}};

  std::string vocab;
  for (const auto& term : bundle.vocabulary) vocab += term + "\n";
  write_file(dir / "vocab.txt", vocab);
  write_file(dir / "phi.csv", dense_csv(bundle.phi));
  write_file(dir / "theta.csv", dense_csv(bundle.theta));

  std::string docs;
  for (std::size_t i = 0; i < bundle.documents.size(); ++i) {
    const auto& doc = bundle.documents[i];
    json obj = {{"id", doc.id}, {"text", doc.text}};
    if (bundle.group_labels) {
      obj["group"] = (*bundle.group_labels)[i];
    } else if (doc.group) {
      obj["group"] = *doc.group;
    }
    docs += obj.dump() + "\n";
  }
  write_file(dir / "documents.jsonl", docs);

  if (bundle.doc_term) {
    std::string triplets;
    for (std::size_t r = 0; r < bundle.doc_term->rows(); ++r)
      for (const auto& e : bundle.doc_term->row(r))
        triplets += std::to_string(r) + "," + std::to_string(e.column) + "," + std::to_string(e.count) + "\n";
    write_file(dir / "doc_term.csv", triplets);
    manifest["doc_term"] = "doc_term.csv";
  }
  if (bundle.doc_embeddings) {
    write_file(dir / "doc_embeddings.csv", dense_csv(*bundle.doc_embeddings));
    manifest["doc_embeddings"] = "doc_embeddings.csv";
  }
  write_file(dir / "topic_names.json", json(bundle.topic_names).dump() + "\n");
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

ValidationReport validate_bundle(const CorpusBundle& bundle) {
  ValidationReport report;
  auto error = [&](std::string code, std::string message, std::string location) {
    report.errors.push_back(Issue{std::move(code), std::move(message), std::move(location)});
  };
  auto warn = [&](std::string code, std::string message, std::string location) {
    report.warnings.push_back(Issue{std::move(code), std::move(message), std::move(location)});
  };

  const std::size_t n = bundle.phi.rows();
  const std::size_t m = bundle.vocabulary.size();
  const std::size_t d = bundle.documents.size();

  if (bundle.phi.cols() != m)
    error("shape", "phi columns (" + std::to_string(bundle.phi.cols()) + ") != vocabulary size (" + std::to_string(m) + ")", "phi");
  if (bundle.theta.rows() != d)
    error("shape", "theta rows (" + std::to_string(bundle.theta.rows()) + ") != document count (" + std::to_string(d) + ")", "theta");
  if (bundle.theta.cols() != n)
    error("shape", "theta columns (" + std::to_string(bundle.theta.cols()) + ") != phi rows (" + std::to_string(n) + ")", "theta");
  if (n == 0) error("shape", "bundle has no topics", "phi");
  if (bundle.topic_names.size() != n)
    error("shape", "topic_names has " + std::to_string(bundle.topic_names.size()) + " entries, expected " + std::to_string(n), "topic_names");
  if (bundle.group_labels && bundle.group_labels->size() != d)
    error("shape", "group labels (" + std::to_string(bundle.group_labels->size()) + ") != document count (" + std::to_string(d) + ")", "groups");
  if (bundle.doc_embeddings && bundle.doc_embeddings->rows() != d)
    error("shape", "doc_embeddings rows (" + std::to_string(bundle.doc_embeddings->rows()) + ") != document count (" + std::to_string(d) + ")", "doc_embeddings");
  if (bundle.doc_term && (bundle.doc_term->rows() != d || bundle.doc_term->cols() != m))
    error("shape", "doc_term shape does not match documents x vocabulary", "doc_term");

  std::unordered_set<std::string_view> seen_terms;
  for (std::size_t i = 0; i < m; ++i) {
    const std::string& term = bundle.vocabulary[i];
    const std::string loc = "vocabulary[" + std::to_string(i) + "]";
    if (term.empty()) {
      error("empty_term", "empty vocabulary entry", loc);
      continue;
    }
    if (!is_nfc(term)) error("not_nfc", "vocabulary entry '" + term + "' is not NFC-normalized", loc);
    if (!seen_terms.insert(term).second) error("duplicate_term", "duplicate vocabulary entry '" + term + "'", loc);
  }

  for (std::size_t k = 0; k < bundle.topic_names.size(); ++k) {
    if (bundle.topic_names[k].empty())
      error("empty_topic_name", "topic " + std::to_string(k) + " has an empty name", "topic_names[" + std::to_string(k) + "]");
  }

  std::unordered_set<std::string_view> seen_ids;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& doc = bundle.documents[i];
    if (!seen_ids.insert(doc.id).second)
      error("duplicate_document_id", "duplicate document id '" + doc.id + "'", "documents[" + std::to_string(i) + "]");
    if (doc.text.empty()) warn("empty_document", "document '" + doc.id + "' has empty text", doc.id);
  }

  auto first_negative = [](const Matrix& mat) -> std::optional<std::pair<std::size_t, std::size_t>> {
    for (std::size_t r = 0; r < mat.rows(); ++r)
      for (std::size_t c = 0; c < mat.cols(); ++c)
        if (mat(r, c) < 0.0) return std::make_pair(r, c);
    return std::nullopt;
  };
  if (auto neg = first_negative(bundle.phi)) {
    warn("negative_phi", "negative phi entry", "phi[" + std::to_string(neg->first) + "," + std::to_string(neg->second) + "]");
  }
  if (auto neg = first_negative(bundle.theta)) {
    warn("negative_theta", "negative theta entry",
         "theta[" + std::to_string(neg->first) + "," + std::to_string(neg->second) + "]");
  }

  if (report.errors.empty() && m > 0) {
    const SparseCounts counts = derive_doc_term(bundle);
    std::vector<bool> occurs(m, false);
    for (std::size_t r = 0; r < counts.rows(); ++r)
      for (const auto& e : counts.row(r)) occurs[e.column] = true;
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < m; ++i)
      if (!occurs[i]) missing.push_back(bundle.vocabulary[i]);
    if (!missing.empty()) {
      std::string sample;
      for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i) {
        if (i > 0) sample += ", ";
        sample += "'" + missing[i] + "'";
      }
      warn("unused_term",
           std::to_string(missing.size()) + " vocabulary term(s) never occur in any document text (e.g. " + sample + ")",
           "vocabulary");
    }
  }
  return report;
}

void save_topic_names(const fs::path& dir, const std::vector<std::string>& names, std::size_t n_topics) {
  if (names.size() != n_topics) {
    throw std::invalid_argument("expected " + std::to_string(n_topics) + " topic names, got " +
                                std::to_string(names.size()));
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k].empty()) throw std::invalid_argument("topic " + std::to_string(k) + " has an empty name");
  }
  const BundleFiles files = BundleFiles::resolve(dir);
  write_atomic(files.topic_names, json(names).dump() + "\n");
}

}  // namespace topiclens
