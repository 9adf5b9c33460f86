#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace typelink {

/// Reserved label for the typer's abstain outcome (the empty predicted group
/// set). Never a key or value of a loaded TypeMap.
inline const std::string kNoneGroup = "None";

/// Total mapping from fine semantic types to the coarse semantic groups that
/// form the prediction label space. Immutable after load; concurrent reads
/// are safe.
class TypeMap {
 public:
  /// Reads `fine_type<TAB>group` lines (UTF-8, '#' comments ignored). Names
  /// are trimmed of surrounding whitespace and matched case-sensitively.
  static TypeMap load(const std::filesystem::path& path);
  static TypeMap from_entries(
      const std::vector<std::pair<std::string, std::string>>& entries);

  /// Group of one fine type. Throws UnknownFineType for absent keys.
  const std::string& group_of(const std::string& fine) const;

  /// Union of group_of over a fine-type set; empty input gives the empty set.
  std::set<std::string> groups_of(const std::set<std::string>& fine_types) const;

  bool has_fine(const std::string& fine) const { return entries_.count(fine) > 0; }
  bool has_group(const std::string& group) const;

  std::size_t fine_count() const { return entries_.size(); }
  /// Distinct group names, sorted.
  const std::vector<std::string>& group_names() const { return group_names_; }

 private:
  std::map<std::string, std::string> entries_;
  std::vector<std::string> group_names_;
};

}  // namespace typelink
