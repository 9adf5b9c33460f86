#include "typelink/corpus_builder.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <omp.h>

#include "typelink/error.hpp"
#include "typelink/text.hpp"

namespace typelink {

Crosswalk Crosswalk::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open crosswalk: " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw Error(ErrorKind::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": expected page_key<TAB>cui");
    entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return from_entries(entries);
}

Crosswalk Crosswalk::from_entries(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  Crosswalk out;
  std::map<std::string, std::string> reverse;
  for (const auto& [key, cui] : entries) {
    auto [fit, fresh] = out.forward_.emplace(key, cui);
    if (!fresh) {
      if (fit->second != cui)
        throw Error(ErrorKind::ParseError, "page key mapped twice: " + key);
      continue;
    }
    auto [rit, runiq] = reverse.emplace(cui, key);
    if (!runiq)
      throw Error(ErrorKind::InjectivityError,
                  "cui " + cui + " mapped from both '" + rit->second + "' and '" + key + "'");
  }
  return out;
}

const std::string* Crosswalk::map_key(const std::string& page_key) const {
  auto it = forward_.find(page_key);
  return it == forward_.end() ? nullptr : &it->second;
}

namespace {

void sort_annotations(std::vector<SilverAnnotation>& annotations) {
  std::sort(annotations.begin(), annotations.end(),
            [](const SilverAnnotation& a, const SilverAnnotation& b) {
              if (auto c = key_of(a.ann) <=> key_of(b.ann); c != 0) return c < 0;
              return a.ann.cui < b.ann.cui;
            });
  annotations.erase(std::unique(annotations.begin(), annotations.end(),
                                [](const SilverAnnotation& a, const SilverAnnotation& b) {
                                  return key_of(a.ann) == key_of(b.ann) &&
                                         a.ann.cui == b.ann.cui;
                                }),
                    annotations.end());
}

}  // namespace

SilverCorpus distant_supervise(const std::vector<HeadedDocument>& docs,
                               const Lexicon& lexicon, const MatcherConfig& config,
                               int threads, WarningList* warnings) {
  config.validate();
  const Matcher matcher(lexicon);

  struct PerDoc {
    std::vector<SilverAnnotation> annotations;
    std::int64_t skipped = 0;
    WarningList warnings;
  };
  std::vector<PerDoc> results(docs.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (std::ptrdiff_t di = 0; di < n; ++di) {
    const HeadedDocument& doc = docs[static_cast<std::size_t>(di)];
    PerDoc& res = results[static_cast<std::size_t>(di)];

    // Normalized heading name -> cuis (ascending, deduped).
    std::map<std::string, std::vector<std::string>> heading_index;
    for (const auto& heading : doc.headings) {
      if (lexicon.find(heading.cui) == nullptr) {
        ++res.skipped;
        res.warnings.push_back("doc " + doc.id + ": heading '" + heading.name +
                               "' skipped, cui not in lexicon: " + heading.cui);
        continue;
      }
      const std::string key = normalize_join(heading.name);
      if (key.empty()) {
        ++res.skipped;
        res.warnings.push_back("doc " + doc.id + ": heading '" + heading.name +
                               "' normalizes to nothing, skipped");
        continue;
      }
      auto& cuis = heading_index[key];
      if (std::find(cuis.begin(), cuis.end(), heading.cui) == cuis.end())
        cuis.push_back(heading.cui);
    }
    if (heading_index.empty()) continue;
    for (auto& [key, cuis] : heading_index) std::sort(cuis.begin(), cuis.end());

    const std::vector<CandidateSet> detected =
        matcher.annotate({doc.id, doc.text}, config);
    for (const auto& cs : detected) {
      auto it = heading_index.find(normalize_join(cs.mention.surface));
      if (it == heading_index.end()) continue;
      // Several headings can share a normalized name; take the smallest cui.
      res.annotations.push_back(
          {{doc.id, cs.mention.start, cs.mention.end, it->second.front()},
           Provenance::distant,
           false});
      if (it->second.size() > 1)
        res.warnings.push_back("doc " + doc.id + ": surface '" + cs.mention.surface +
                               "' matches multiple headings; smallest cui kept");
    }
  }

  SilverCorpus corpus;
  for (auto& res : results) {
    corpus.skipped_headings += res.skipped;
    if (warnings != nullptr)
      warnings->insert(warnings->end(), res.warnings.begin(), res.warnings.end());
    corpus.annotations.insert(corpus.annotations.end(), res.annotations.begin(),
                              res.annotations.end());
  }
  sort_annotations(corpus.annotations);
  return corpus;
}

SilverCorpus map_links(const std::vector<LinkedDocument>& docs, const Crosswalk& crosswalk,
                       const Lexicon& lexicon, WarningList* warnings) {
  SilverCorpus corpus;
  for (const auto& doc : docs) {
    const std::size_t text_len = scalar_length(doc.text);
    for (const auto& link : doc.links) {
      if (link.start >= link.end || link.end > text_len)
        throw Error(ErrorKind::SpanError,
                    "link span [" + std::to_string(link.start) + "," +
                        std::to_string(link.end) + ") out of bounds in doc " + doc.id);
      const std::string* cui = crosswalk.map_key(link.page_key);
      if (cui == nullptr) {
        ++corpus.dropped_links;
        continue;
      }
      SilverAnnotation silver{{doc.id, link.start, link.end, *cui},
                              Provenance::crosswalk,
                              false};
      if (lexicon.find(*cui) == nullptr) {
        silver.untyped = true;
        warn(warnings, "doc " + doc.id + ": mapped cui " + *cui +
                           " not in lexicon; annotation kept but untyped");
      }
      corpus.annotations.push_back(std::move(silver));
    }
  }
  sort_annotations(corpus.annotations);
  return corpus;
}

std::pair<double, double> quality_report(const SilverCorpus& silver,
                                         const std::vector<GoldAnnotation>& gold) {
  std::set<std::string> silver_docs, gold_docs, shared;
  for (const auto& s : silver.annotations) silver_docs.insert(s.ann.doc_id);
  for (const auto& g : gold) gold_docs.insert(g.doc_id);
  for (const auto& id : silver_docs)
    if (gold_docs.count(id) > 0) shared.insert(id);
  if (shared.empty())
    throw Error(ErrorKind::EmptyOverlap, "silver and gold share no document ids");

  std::set<std::tuple<std::string, std::size_t, std::size_t, std::string>> gold_keys;
  std::size_t n_gold = 0;
  for (const auto& g : gold) {
    if (shared.count(g.doc_id) == 0) continue;
    ++n_gold;
    gold_keys.insert({g.doc_id, g.start, g.end, g.cui});
  }
  std::size_t n_silver = 0, hits = 0;
  for (const auto& s : silver.annotations) {
    if (shared.count(s.ann.doc_id) == 0) continue;
    ++n_silver;
    if (gold_keys.count({s.ann.doc_id, s.ann.start, s.ann.end, s.ann.cui}) > 0) ++hits;
  }
  const double precision =
      n_silver == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(n_silver);
  const double recall =
      n_gold == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(n_gold);
  return {precision, recall};
}

}  // namespace typelink
