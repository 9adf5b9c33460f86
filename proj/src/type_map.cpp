#include "typelink/type_map.hpp"

#include <algorithm>
#include <fstream>

#include "typelink/error.hpp"

namespace typelink {
namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace

TypeMap TypeMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open type map: " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(ErrorKind::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": expected fine_type<TAB>group");
    std::string fine = trim(line.substr(0, tab));
    std::string group = trim(line.substr(tab + 1));
    if (fine.empty() || group.empty())
      throw Error(ErrorKind::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": empty field");
    entries.emplace_back(std::move(fine), std::move(group));
  }
  return from_entries(entries);
}

TypeMap TypeMap::from_entries(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  TypeMap map;
  for (const auto& [fine, group] : entries) {
    if (fine == kNoneGroup || group == kNoneGroup)
      throw Error(ErrorKind::ParseError, "'" + kNoneGroup + "' is reserved for the abstain label");
    auto [it, inserted] = map.entries_.emplace(fine, group);
    (void)it;
    if (!inserted)
      throw Error(ErrorKind::DuplicateFineType, "fine type mapped twice: " + fine);
  }
  std::set<std::string> groups;
  for (const auto& [fine, group] : map.entries_) groups.insert(group);
  map.group_names_.assign(groups.begin(), groups.end());
  return map;
}

const std::string& TypeMap::group_of(const std::string& fine) const {
  auto it = entries_.find(fine);
  if (it == entries_.end())
    throw Error(ErrorKind::UnknownFineType, "no group for fine type: " + fine);
  return it->second;
}

std::set<std::string> TypeMap::groups_of(const std::set<std::string>& fine_types) const {
  std::set<std::string> out;
  for (const auto& fine : fine_types) out.insert(group_of(fine));
  return out;
}

bool TypeMap::has_group(const std::string& group) const {
  return std::binary_search(group_names_.begin(), group_names_.end(), group);
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateFineType: return "DuplicateFineType";
    case ErrorKind::UnknownFineType: return "UnknownFineType";
    case ErrorKind::DuplicateCui: return "DuplicateCui";
    case ErrorKind::MissingTypes: return "MissingTypes";
    case ErrorKind::SpanError: return "SpanError";
    case ErrorKind::UnknownDocument: return "UnknownDocument";
    case ErrorKind::DuplicateCandidate: return "DuplicateCandidate";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::NumericalDivergence: return "NumericalDivergence";
    case ErrorKind::UnknownGroup: return "UnknownGroup";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::UnknownCui: return "UnknownCui";
    case ErrorKind::AlignmentError: return "AlignmentError";
    case ErrorKind::EmptyOverlap: return "EmptyOverlap";
    case ErrorKind::InjectivityError: return "InjectivityError";
    case ErrorKind::UndefinedMetric: return "UndefinedMetric";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Error";
}

}  // namespace typelink
