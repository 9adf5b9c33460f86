#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "typelink/document.hpp"
#include "typelink/lexicon.hpp"
#include "typelink/matcher.hpp"
#include "typelink/type_map.hpp"
#include "typelink/typer.hpp"

namespace typelink {

enum class FilterMode { none, predicted, oracle_coarse, oracle_fine };
enum class EmptyPolicy { drop, passthrough };

FilterMode parse_filter_mode(const std::string& name);
EmptyPolicy parse_empty_policy(const std::string& name);
const char* to_string(FilterMode mode);
const char* to_string(EmptyPolicy policy);

/// Pipeline output for one mention. chosen_cui, when present, is the rank-1
/// member of `surviving`.
struct LinkedMention {
  Mention mention;
  std::optional<std::string> chosen_cui;
  CandidateSet surviving;
  std::set<std::string> predicted_groups;
  int pre_filter_size = 0;
};

/// Keeps candidates whose semantic groups intersect `allowed`, preserving
/// relative order and re-ranking 1..n. When `allowed` is empty or nothing
/// survives: drop -> empty set, passthrough -> the original set. Candidates
/// whose cui is not in the lexicon have no groups and earn a warning.
CandidateSet filter_candidates(const CandidateSet& cs,
                               const std::set<std::string>& allowed,
                               const Lexicon& lexicon, const TypeMap& type_map,
                               EmptyPolicy policy, WarningList* warnings = nullptr);

/// Fine-grained variant: matches on the candidates' fine types directly.
CandidateSet filter_candidates_fine(const CandidateSet& cs,
                                    const std::set<std::string>& allowed_fine,
                                    const Lexicon& lexicon, EmptyPolicy policy,
                                    WarningList* warnings = nullptr);

/// Allowed set for the oracle modes: the gold concept's fine types
/// (oracle_fine) or their semantic groups (oracle_coarse).
std::set<std::string> oracle_allowed(const std::string& gold_cui, FilterMode mode,
                                     const Lexicon& lexicon, const TypeMap& type_map);

/// Where predicted-mode group scores come from: a trained model plus
/// thresholds, or imported external scores plus thresholds.
struct ScoreSource {
  const TyperModel* model = nullptr;
  const Thresholds* thresholds = nullptr;
  const std::map<SpanKey, std::vector<double>>* imported = nullptr;
  const std::vector<std::string>* group_names = nullptr;  // required with imported
};

struct LinkStats {
  int oracle_unaligned = 0;   // predicted mention with no exact gold span
  int imported_missing = 0;   // mention absent from an imported score file
  int abstained = 0;          // predicted-mode mentions with empty group set
};

/// Full pipeline: per mention, compute the allowed set for `mode`, filter,
/// and choose the rank-1 survivor. Output is sorted by (doc_id, start);
/// parallel over mentions with a deterministic merge.
std::vector<LinkedMention> link_corpus(const std::vector<Document>& docs,
                                       const std::vector<CandidateSet>& candidate_sets,
                                       FilterMode mode, const ScoreSource& scores,
                                       const std::vector<GoldAnnotation>* gold,
                                       EmptyPolicy policy, const Lexicon& lexicon,
                                       const TypeMap& type_map, int threads,
                                       LinkStats* stats = nullptr,
                                       WarningList* warnings = nullptr);

/// Serial reference for link_corpus, kept for tests and the benchmark.
std::vector<LinkedMention> link_corpus_serial(const std::vector<Document>& docs,
                                              const std::vector<CandidateSet>& candidate_sets,
                                              FilterMode mode, const ScoreSource& scores,
                                              const std::vector<GoldAnnotation>* gold,
                                              EmptyPolicy policy, const Lexicon& lexicon,
                                              const TypeMap& type_map,
                                              LinkStats* stats = nullptr,
                                              WarningList* warnings = nullptr);

}  // namespace typelink
