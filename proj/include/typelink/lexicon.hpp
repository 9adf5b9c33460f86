#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace typelink {

/// One entry of the concept inventory.
struct Concept {
  std::string cui;
  std::string preferred_name;
  std::vector<std::string> aliases;
  std::set<std::string> fine_types;  // non-empty
};

/// Concept inventory plus a normalized alias index for surface-form lookup.
/// Immutable after load; concurrent reads are safe.
class Lexicon {
 public:
  /// Reads `cui<TAB>preferred_name<TAB>alias|alias|...<TAB>type;type;...`
  /// lines (alias field may be empty, '#' comments ignored).
  static Lexicon load(const std::filesystem::path& path);
  static Lexicon from_concepts(std::vector<Concept> concepts);

  /// nullptr when the cui is absent.
  const Concept* find(const std::string& cui) const;

  /// Concepts whose normalized alias equals normalize_join(surface),
  /// ordered by ascending cui. Unknown surfaces give an empty list.
  std::vector<const Concept*> lookup(std::string_view surface) const;

  std::size_t size() const { return concepts_.size(); }
  const std::map<std::string, Concept>& concepts() const { return concepts_; }

  /// Normalized surface -> ascending cui list; one entry per distinct
  /// normalized alias across the whole inventory.
  const std::map<std::string, std::vector<std::string>>& alias_index() const {
    return alias_index_;
  }

 private:
  std::map<std::string, Concept> concepts_;
  std::map<std::string, std::vector<std::string>> alias_index_;
};

}  // namespace typelink
