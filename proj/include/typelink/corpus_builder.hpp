#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "typelink/document.hpp"
#include "typelink/lexicon.hpp"
#include "typelink/matcher.hpp"

namespace typelink {

/// A document carrying curated subject headings (name + concept id).
struct HeadedDocument {
  std::string id;
  std::string text;
  struct Heading {
    std::string name;
    std::string cui;
  };
  std::vector<Heading> headings;
};

/// A document carrying pre-existing link spans keyed by external page keys.
struct LinkedDocument {
  std::string id;
  std::string text;
  struct Link {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string page_key;
  };
  std::vector<Link> links;
};

/// Injective page_key -> cui mapping loaded from `page_key<TAB>cui` lines.
class Crosswalk {
 public:
  static Crosswalk load(const std::filesystem::path& path);
  static Crosswalk from_entries(
      const std::vector<std::pair<std::string, std::string>>& entries);

  /// nullptr when the page key is unmapped.
  const std::string* map_key(const std::string& page_key) const;
  std::size_t size() const { return forward_.size(); }

 private:
  std::map<std::string, std::string> forward_;
};

enum class Provenance { distant, crosswalk };

struct SilverAnnotation {
  GoldAnnotation ann;
  Provenance provenance = Provenance::distant;
  bool untyped = false;  // mapped cui absent from the lexicon
};

struct SilverCorpus {
  std::vector<SilverAnnotation> annotations;  // (doc_id, start) order
  std::int64_t dropped_links = 0;             // page keys missing from the crosswalk
  std::int64_t skipped_headings = 0;          // heading cuis missing from the lexicon
};

/// Distant supervision: detect mentions with the dictionary matcher, keep
/// one iff its normalized surface equals a heading name of its document, and
/// annotate it with that heading's cui. Parallel over documents with a
/// deterministic merge.
SilverCorpus distant_supervise(const std::vector<HeadedDocument>& docs,
                               const Lexicon& lexicon, const MatcherConfig& config,
                               int threads, WarningList* warnings = nullptr);

/// Crosswalk mapping: each link span whose page key is mapped becomes an
/// annotation with the mapped cui; unmapped spans are dropped and counted.
SilverCorpus map_links(const std::vector<LinkedDocument>& docs, const Crosswalk& crosswalk,
                       const Lexicon& lexicon, WarningList* warnings = nullptr);

/// Exact span+cui agreement between silver and gold, restricted to shared
/// document ids: (precision over silver, recall over gold). Throws
/// EmptyOverlap when no document is shared.
std::pair<double, double> quality_report(const SilverCorpus& silver,
                                         const std::vector<GoldAnnotation>& gold);

}  // namespace typelink
