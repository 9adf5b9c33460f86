#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "typelink/document.hpp"
#include "typelink/lexicon.hpp"

namespace typelink {

/// A detected span. surface is the raw text slice, offsets in scalar values.
struct Mention {
  std::string doc_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;
};

struct Candidate {
  std::string cui;
  double score = 0.0;  // in [0,1]
  int rank = 0;        // 1-based
};

struct CandidateSet {
  Mention mention;
  std::vector<Candidate> candidates;  // rank order, no duplicate cui
};

inline SpanKey key_of(const Mention& m) { return {m.doc_id, m.start, m.end}; }
inline SpanKey key_of(const CandidateSet& cs) { return key_of(cs.mention); }

struct MatcherConfig {
  int max_ngram = 6;
  int max_candidates = 5;
  double min_score = 0.7;

  void validate() const;
};

/// Dictionary matcher: token n-gram lookup against the lexicon's normalized
/// aliases, scored by Jaccard similarity of token sets (exact normalized
/// matches score 1.0). Overlaps are resolved longest-match-first, ties by
/// higher top score, then leftmost start. Thread-safe once built.
class Matcher {
 public:
  explicit Matcher(const Lexicon& lexicon);

  std::vector<CandidateSet> annotate(const Document& doc, const MatcherConfig& config) const;

  const Lexicon& lexicon() const { return *lexicon_; }

 private:
  struct AliasEntry {
    std::vector<std::string> token_set;  // sorted unique tokens
    std::string joined;                  // normalized joined key
    std::vector<std::string> cuis;       // ascending
  };

  const Lexicon* lexicon_;
  std::vector<AliasEntry> aliases_;
  std::map<std::string, std::vector<std::uint32_t>> token_postings_;
};

/// Corpus-level annotation, parallel over documents; the merge order is
/// (doc_id, start) regardless of thread count.
std::vector<CandidateSet> annotate_corpus(const Matcher& matcher,
                                          const std::vector<Document>& docs,
                                          const MatcherConfig& config,
                                          int threads);

/// Serial reference for the parallel kernel above; kept for tests and the
/// benchmark.
std::vector<CandidateSet> annotate_corpus_serial(const Matcher& matcher,
                                                 const std::vector<Document>& docs,
                                                 const MatcherConfig& config);

/// Reads externally produced candidates (JSONL, one mention per line:
/// {"doc_id","start","end","candidates":[{"cui","score"},...]}), validates
/// spans against the corpus and assigns ranks by listed order.
std::vector<CandidateSet> import_external_candidates(const std::filesystem::path& path,
                                                     const std::vector<Document>& docs);

}  // namespace typelink
