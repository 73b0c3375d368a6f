#include "topiclens/bundle.hpp"

namespace topiclens {

SparseCounts derive_doc_term(const std::vector<Document>& documents, const TermMatcher& matcher) {
  std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> triplets;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    const MatchedText matched = matcher.match(documents[d].text);
    for (const auto& occ : matched.occurrences) triplets.emplace_back(d, occ.term, 1);
  }
  return SparseCounts::from_triplets(documents.size(), matcher.vocabulary_size(), std::move(triplets));
}

SparseCounts derive_doc_term(const CorpusBundle& bundle) {
  const TermMatcher matcher(bundle.vocabulary);
  return derive_doc_term(bundle.documents, matcher);
}

SparseCounts doc_term_counts(const CorpusBundle& bundle) {
  if (bundle.doc_term) return *bundle.doc_term;
  return derive_doc_term(bundle);
}

}  // namespace topiclens
