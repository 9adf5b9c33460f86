#include "typelink/matcher.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>
#include <omp.h>

#include "typelink/error.hpp"
#include "typelink/text.hpp"

namespace typelink {
namespace {

std::vector<std::string> token_set_of(const std::string& joined) {
  std::vector<std::string> tokens = normalize(joined);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t inter = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = a[i].compare(b[j]);
    if (c == 0) {
      ++inter;
      ++i;
      ++j;
    } else if (c < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct SpanHit {
  std::size_t start;
  std::size_t end;
  std::vector<Candidate> candidates;  // already (score desc, cui asc)

  double top_score() const { return candidates.front().score; }
  std::size_t length() const { return end - start; }
};

bool overlaps(const SpanHit& a, const SpanHit& b) {
  return a.start < b.end && b.start < a.end;
}

}  // namespace

void MatcherConfig::validate() const {
  if (max_ngram < 1) throw Error(ErrorKind::ConfigError, "max_ngram must be >= 1");
  if (max_candidates < 1) throw Error(ErrorKind::ConfigError, "max_candidates must be >= 1");
  if (min_score < 0.0 || min_score > 1.0)
    throw Error(ErrorKind::ConfigError, "min_score must be within [0,1]");
}

Matcher::Matcher(const Lexicon& lexicon) : lexicon_(&lexicon) {
  aliases_.reserve(lexicon.alias_index().size());
  for (const auto& [joined, cuis] : lexicon.alias_index()) {
    AliasEntry entry;
    entry.joined = joined;
    entry.token_set = token_set_of(joined);
    entry.cuis = cuis;
    const auto id = static_cast<std::uint32_t>(aliases_.size());
    for (const auto& token : entry.token_set) token_postings_[token].push_back(id);
    aliases_.push_back(std::move(entry));
  }
}

std::vector<CandidateSet> Matcher::annotate(const Document& doc,
                                            const MatcherConfig& config) const {
  config.validate();
  const std::vector<Token> tokens = tokenize(doc.text);
  const std::vector<std::size_t> offsets = scalar_offsets(doc.text);

  std::vector<SpanHit> hits;
  std::vector<std::uint32_t> alias_ids;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string joined;
    std::vector<std::string> gram;
    for (std::size_t len = 1; len <= static_cast<std::size_t>(config.max_ngram) &&
                              i + len <= tokens.size();
         ++len) {
      const std::string& tok = tokens[i + len - 1].norm;
      if (!joined.empty()) joined.push_back(' ');
      joined += tok;
      gram.insert(std::lower_bound(gram.begin(), gram.end(), tok), tok);

      alias_ids.clear();
      for (const auto& t : gram) {
        auto it = token_postings_.find(t);
        if (it == token_postings_.end()) continue;
        alias_ids.insert(alias_ids.end(), it->second.begin(), it->second.end());
      }
      std::sort(alias_ids.begin(), alias_ids.end());
      alias_ids.erase(std::unique(alias_ids.begin(), alias_ids.end()), alias_ids.end());
      if (alias_ids.empty()) continue;

      std::map<std::string, double> best;  // cui -> best score over aliases
      for (auto id : alias_ids) {
        const AliasEntry& alias = aliases_[id];
        double sim = jaccard(gram, alias.token_set);
        if (sim < config.min_score) continue;
        double score = (alias.joined == joined) ? 1.0 : sim;
        for (const auto& cui : alias.cuis) {
          auto [it, inserted] = best.emplace(cui, score);
          if (!inserted && score > it->second) it->second = score;
        }
      }
      if (best.empty()) continue;

      SpanHit hit;
      hit.start = tokens[i].start;
      hit.end = tokens[i + len - 1].end;
      hit.candidates.reserve(best.size());
      for (const auto& [cui, score] : best) hit.candidates.push_back({cui, score, 0});
      std::sort(hit.candidates.begin(), hit.candidates.end(),
                [](const Candidate& a, const Candidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.cui < b.cui;
                });
      hits.push_back(std::move(hit));
    }
  }

  // Longest match wins; ties by top score, then leftmost start.
  std::sort(hits.begin(), hits.end(), [](const SpanHit& a, const SpanHit& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    if (a.top_score() != b.top_score()) return a.top_score() > b.top_score();
    return a.start < b.start;
  });
  std::vector<SpanHit> kept;
  for (auto& hit : hits) {
    bool clash = false;
    for (const auto& k : kept) {
      if (overlaps(hit, k)) {
        clash = true;
        break;
      }
    }
    if (!clash) kept.push_back(std::move(hit));
  }
  std::sort(kept.begin(), kept.end(),
            [](const SpanHit& a, const SpanHit& b) { return a.start < b.start; });

  std::vector<CandidateSet> out;
  out.reserve(kept.size());
  for (auto& hit : kept) {
    CandidateSet cs;
    cs.mention.doc_id = doc.id;
    cs.mention.start = hit.start;
    cs.mention.end = hit.end;
    cs.mention.surface = std::string(
        doc.text.substr(offsets[hit.start], offsets[hit.end] - offsets[hit.start]));
    if (hit.candidates.size() > static_cast<std::size_t>(config.max_candidates))
      hit.candidates.resize(static_cast<std::size_t>(config.max_candidates));
    for (std::size_t r = 0; r < hit.candidates.size(); ++r)
      hit.candidates[r].rank = static_cast<int>(r + 1);
    cs.candidates = std::move(hit.candidates);
    out.push_back(std::move(cs));
  }
  return out;
}

namespace {

std::vector<CandidateSet> merge_doc_results(std::vector<std::vector<CandidateSet>> per_doc) {
  std::vector<CandidateSet> out;
  std::size_t total = 0;
  for (const auto& v : per_doc) total += v.size();
  out.reserve(total);
  for (auto& v : per_doc)
    for (auto& cs : v) out.push_back(std::move(cs));
  std::sort(out.begin(), out.end(), [](const CandidateSet& a, const CandidateSet& b) {
    return key_of(a) < key_of(b);
  });
  return out;
}

}  // namespace

std::vector<CandidateSet> annotate_corpus(const Matcher& matcher,
                                          const std::vector<Document>& docs,
                                          const MatcherConfig& config,
                                          int threads) {
  config.validate();
  std::vector<std::vector<CandidateSet>> per_doc(docs.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    per_doc[static_cast<std::size_t>(i)] =
        matcher.annotate(docs[static_cast<std::size_t>(i)], config);
  }
  return merge_doc_results(std::move(per_doc));
}

std::vector<CandidateSet> annotate_corpus_serial(const Matcher& matcher,
                                                 const std::vector<Document>& docs,
                                                 const MatcherConfig& config) {
  std::vector<std::vector<CandidateSet>> per_doc(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) per_doc[i] = matcher.annotate(docs[i], config);
  return merge_doc_results(std::move(per_doc));
}

std::vector<CandidateSet> import_external_candidates(const std::filesystem::path& path,
                                                     const std::vector<Document>& docs) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open candidates: " + path.string());

  std::map<std::string, const Document*> by_id;
  for (const auto& doc : docs) by_id.emplace(doc.id, &doc);
  std::map<std::string, std::vector<std::size_t>> offsets_cache;

  std::vector<CandidateSet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto at = [&](const std::string& what) {
      return path.string() + ":" + std::to_string(lineno) + ": " + what;
    };
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
      CandidateSet cs;
      cs.mention.doc_id = rec.at("doc_id").get<std::string>();
      cs.mention.start = rec.at("start").get<std::size_t>();
      cs.mention.end = rec.at("end").get<std::size_t>();

      auto doc_it = by_id.find(cs.mention.doc_id);
      if (doc_it == by_id.end())
        throw Error(ErrorKind::UnknownDocument, at("unknown doc_id " + cs.mention.doc_id));
      auto [off_it, fresh] = offsets_cache.try_emplace(cs.mention.doc_id);
      if (fresh) off_it->second = scalar_offsets(doc_it->second->text);
      const auto& offsets = off_it->second;
      const std::size_t text_len = offsets.size() - 1;
      if (cs.mention.start >= cs.mention.end || cs.mention.end > text_len)
        throw Error(ErrorKind::SpanError,
                    at("span [" + std::to_string(cs.mention.start) + "," +
                       std::to_string(cs.mention.end) + ") out of bounds in doc " +
                       cs.mention.doc_id));
      cs.mention.surface = doc_it->second->text.substr(
          offsets[cs.mention.start], offsets[cs.mention.end] - offsets[cs.mention.start]);

      std::set<std::string> seen;
      for (const auto& c : rec.at("candidates")) {
        Candidate cand;
        cand.cui = c.at("cui").get<std::string>();
        cand.score = c.at("score").get<double>();
        if (cand.score < 0.0 || cand.score > 1.0)
          throw Error(ErrorKind::RangeError,
                      at("candidate score " + std::to_string(cand.score) + " outside [0,1]"));
        if (!seen.insert(cand.cui).second)
          throw Error(ErrorKind::DuplicateCandidate,
                      at("cui " + cand.cui + " listed twice for one mention"));
        cand.rank = static_cast<int>(cs.candidates.size() + 1);
        cs.candidates.push_back(std::move(cand));
      }
      out.push_back(std::move(cs));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, at(e.what()));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const CandidateSet& a, const CandidateSet& b) {
    return key_of(a) < key_of(b);
  });
  return out;
}

}  // namespace typelink
