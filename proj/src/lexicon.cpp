#include "typelink/lexicon.hpp"

#include <algorithm>
#include <fstream>

#include "typelink/error.hpp"
#include "typelink/text.hpp"

namespace typelink {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.emplace_back(s.substr(pos));
      return parts;
    }
    parts.emplace_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

}  // namespace

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open lexicon: " + path.string());
  std::vector<Concept> concepts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto at = [&](const std::string& what) {
      return path.string() + ":" + std::to_string(lineno) + ": " + what;
    };
    auto fields = split(line, '\t');
    if (fields.size() != 4)
      throw Error(ErrorKind::ParseError, at("expected 4 tab-separated fields"));
    Concept c;
    c.cui = fields[0];
    c.preferred_name = fields[1];
    if (c.cui.empty()) throw Error(ErrorKind::ParseError, at("empty cui"));
    if (normalize_join(c.preferred_name).empty())
      throw Error(ErrorKind::ParseError, at("preferred name normalizes to nothing"));
    if (!fields[2].empty()) {
      for (auto& alias : split(fields[2], '|')) {
        if (!alias.empty()) c.aliases.push_back(std::move(alias));
      }
    }
    if (fields[3].empty())
      throw Error(ErrorKind::MissingTypes, at("concept " + c.cui + " has no semantic types"));
    for (auto& fine : split(fields[3], ';')) {
      if (!fine.empty()) c.fine_types.insert(std::move(fine));
    }
    if (c.fine_types.empty())
      throw Error(ErrorKind::MissingTypes, at("concept " + c.cui + " has no semantic types"));
    concepts.push_back(std::move(c));
  }
  return from_concepts(std::move(concepts));
}

Lexicon Lexicon::from_concepts(std::vector<Concept> concepts) {
  Lexicon lex;
  for (auto& c : concepts) {
    if (c.fine_types.empty())
      throw Error(ErrorKind::MissingTypes, "concept " + c.cui + " has no semantic types");
    std::string cui = c.cui;
    auto [it, inserted] = lex.concepts_.emplace(std::move(cui), std::move(c));
    (void)it;
    if (!inserted) throw Error(ErrorKind::DuplicateCui, "cui appears twice: " + it->first);
  }
  for (const auto& [cui, c] : lex.concepts_) {
    std::vector<std::string> surfaces;
    surfaces.push_back(c.preferred_name);
    surfaces.insert(surfaces.end(), c.aliases.begin(), c.aliases.end());
    for (const auto& surface : surfaces) {
      std::string key = normalize_join(surface);
      if (key.empty()) continue;  // pure-punctuation alias, not indexable
      auto& cuis = lex.alias_index_[key];
      if (cuis.empty() || cuis.back() != cui) cuis.push_back(cui);
    }
  }
  // concepts_ is cui-sorted, so each posting list already is too.
  return lex;
}

const Concept* Lexicon::find(const std::string& cui) const {
  auto it = concepts_.find(cui);
  return it == concepts_.end() ? nullptr : &it->second;
}

std::vector<const Concept*> Lexicon::lookup(std::string_view surface) const {
  std::vector<const Concept*> out;
  auto it = alias_index_.find(normalize_join(surface));
  if (it == alias_index_.end()) return out;
  out.reserve(it->second.size());
  for (const auto& cui : it->second) out.push_back(&concepts_.at(cui));
  return out;
}

}  // namespace typelink
