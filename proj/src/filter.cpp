#include "typelink/filter.hpp"

#include <algorithm>

#include <omp.h>

namespace typelink {

FilterMode parse_filter_mode(const std::string& name) {
  if (name == "none") return FilterMode::none;
  if (name == "predicted") return FilterMode::predicted;
  if (name == "oracle-coarse" || name == "oracle_coarse") return FilterMode::oracle_coarse;
  if (name == "oracle-fine" || name == "oracle_fine") return FilterMode::oracle_fine;
  throw Error(ErrorKind::ConfigError, "unknown filter mode: " + name);
}

EmptyPolicy parse_empty_policy(const std::string& name) {
  if (name == "drop") return EmptyPolicy::drop;
  if (name == "passthrough") return EmptyPolicy::passthrough;
  throw Error(ErrorKind::ConfigError, "unknown empty policy: " + name);
}

const char* to_string(FilterMode mode) {
  switch (mode) {
    case FilterMode::none: return "none";
    case FilterMode::predicted: return "predicted";
    case FilterMode::oracle_coarse: return "oracle-coarse";
    case FilterMode::oracle_fine: return "oracle-fine";
  }
  return "?";
}

const char* to_string(EmptyPolicy policy) {
  return policy == EmptyPolicy::drop ? "drop" : "passthrough";
}

namespace {

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.size() > b.size()) return intersects(b, a);
  for (const auto& x : a)
    if (b.count(x) > 0) return true;
  return false;
}

template <typename KeepFn>
CandidateSet filter_by(const CandidateSet& cs, EmptyPolicy policy, bool allowed_empty,
                       KeepFn&& keep) {
  if (allowed_empty)
    return policy == EmptyPolicy::passthrough ? cs : CandidateSet{cs.mention, {}};
  CandidateSet out;
  out.mention = cs.mention;
  for (const auto& cand : cs.candidates) {
    if (keep(cand)) out.candidates.push_back(cand);
  }
  if (out.candidates.empty())
    return policy == EmptyPolicy::passthrough ? cs : out;
  for (std::size_t r = 0; r < out.candidates.size(); ++r)
    out.candidates[r].rank = static_cast<int>(r + 1);
  return out;
}

}  // namespace

CandidateSet filter_candidates(const CandidateSet& cs,
                               const std::set<std::string>& allowed,
                               const Lexicon& lexicon, const TypeMap& type_map,
                               EmptyPolicy policy, WarningList* warnings) {
  return filter_by(cs, policy, allowed.empty(), [&](const Candidate& cand) {
    const Concept* concept = lexicon.find(cand.cui);
    if (concept == nullptr) {
      warn(warnings, "candidate cui not in lexicon, treated as untyped: " + cand.cui);
      return false;
    }
    return intersects(type_map.groups_of(concept->fine_types), allowed);
  });
}

CandidateSet filter_candidates_fine(const CandidateSet& cs,
                                    const std::set<std::string>& allowed_fine,
                                    const Lexicon& lexicon, EmptyPolicy policy,
                                    WarningList* warnings) {
  return filter_by(cs, policy, allowed_fine.empty(), [&](const Candidate& cand) {
    const Concept* concept = lexicon.find(cand.cui);
    if (concept == nullptr) {
      warn(warnings, "candidate cui not in lexicon, treated as untyped: " + cand.cui);
      return false;
    }
    return intersects(concept->fine_types, allowed_fine);
  });
}

std::set<std::string> oracle_allowed(const std::string& gold_cui, FilterMode mode,
                                     const Lexicon& lexicon, const TypeMap& type_map) {
  if (mode != FilterMode::oracle_fine && mode != FilterMode::oracle_coarse)
    throw Error(ErrorKind::ConfigError, "oracle_allowed requires an oracle mode");
  const Concept* concept = lexicon.find(gold_cui);
  if (concept == nullptr)
    throw Error(ErrorKind::UnknownCui, "gold cui not in lexicon: " + gold_cui);
  if (mode == FilterMode::oracle_fine) return concept->fine_types;
  return type_map.groups_of(concept->fine_types);
}

namespace {

struct LinkContext {
  const std::map<std::string, const Document*>* docs_by_id;
  const std::map<SpanKey, const GoldAnnotation*>* gold_by_span;
  FilterMode mode;
  const ScoreSource* scores;
  EmptyPolicy policy;
  const Lexicon* lexicon;
  const TypeMap* type_map;
};

struct PerMention {
  LinkedMention linked;
  WarningList warnings;
  bool oracle_unaligned = false;
  bool imported_missing = false;
  bool abstained = false;
};

PerMention link_one(const CandidateSet& cs, const LinkContext& ctx) {
  PerMention out;
  out.linked.mention = cs.mention;
  out.linked.pre_filter_size = static_cast<int>(cs.candidates.size());

  switch (ctx.mode) {
    case FilterMode::none:
      out.linked.surviving = cs;
      break;
    case FilterMode::predicted: {
      std::vector<double> group_scores;
      const std::vector<std::string>* names = nullptr;
      if (ctx.scores->imported != nullptr) {
        names = ctx.scores->group_names;
        auto it = ctx.scores->imported->find(key_of(cs));
        if (it != ctx.scores->imported->end()) {
          group_scores = it->second;
        } else {
          group_scores.assign(names->size(), 0.0);
          out.imported_missing = true;
          out.warnings.push_back("no imported scores for mention " + cs.mention.doc_id + ":" +
                                 std::to_string(cs.mention.start) + "-" +
                                 std::to_string(cs.mention.end) + "; abstaining");
        }
      } else {
        names = &ctx.scores->model->group_names;
        const Document* doc = ctx.docs_by_id->at(cs.mention.doc_id);
        const TrainingExample input = make_context_example(
            *doc, cs.mention.start, cs.mention.end, ctx.scores->model->window_k);
        group_scores = predict_scores(*ctx.scores->model, input);
      }
      std::set<std::string> predicted;
      for (std::size_t g = 0; g < names->size(); ++g) {
        if (group_scores[g] >= ctx.scores->thresholds->for_group((*names)[g]))
          predicted.insert((*names)[g]);
      }
      out.abstained = predicted.empty();
      out.linked.predicted_groups = predicted;
      out.linked.surviving = filter_candidates(cs, predicted, *ctx.lexicon, *ctx.type_map,
                                               ctx.policy, &out.warnings);
      break;
    }
    case FilterMode::oracle_coarse:
    case FilterMode::oracle_fine: {
      auto it = ctx.gold_by_span->find(key_of(cs));
      if (it == ctx.gold_by_span->end()) {
        // No exactly matching gold span: not oracle-filtered.
        out.oracle_unaligned = true;
        out.linked.surviving = cs;
        break;
      }
      const std::string& gold_cui = it->second->cui;
      const std::set<std::string> allowed =
          oracle_allowed(gold_cui, ctx.mode, *ctx.lexicon, *ctx.type_map);
      out.linked.predicted_groups =
          ctx.mode == FilterMode::oracle_coarse
              ? allowed
              : ctx.type_map->groups_of(allowed);
      out.linked.surviving =
          ctx.mode == FilterMode::oracle_fine
              ? filter_candidates_fine(cs, allowed, *ctx.lexicon, ctx.policy, &out.warnings)
              : filter_candidates(cs, allowed, *ctx.lexicon, *ctx.type_map, ctx.policy,
                                  &out.warnings);
      break;
    }
  }

  if (!out.linked.surviving.candidates.empty())
    out.linked.chosen_cui = out.linked.surviving.candidates.front().cui;
  return out;
}

std::vector<LinkedMention> run_link(const std::vector<Document>& docs,
                                    const std::vector<CandidateSet>& candidate_sets,
                                    FilterMode mode, const ScoreSource& scores,
                                    const std::vector<GoldAnnotation>* gold,
                                    EmptyPolicy policy, const Lexicon& lexicon,
                                    const TypeMap& type_map, int threads, bool parallel,
                                    LinkStats* stats, WarningList* warnings) {
  if (mode == FilterMode::predicted) {
    const bool have_model = scores.model != nullptr && scores.thresholds != nullptr;
    const bool have_imported = scores.imported != nullptr && scores.thresholds != nullptr &&
                               scores.group_names != nullptr;
    if (!have_model && !have_imported)
      throw Error(ErrorKind::ConfigError,
                  "predicted mode needs a model or imported scores, plus thresholds");
    if (have_model)
      scores.thresholds->validate(scores.model->group_names);
    else
      scores.thresholds->validate(*scores.group_names);
  }
  if ((mode == FilterMode::oracle_coarse || mode == FilterMode::oracle_fine) && gold == nullptr)
    throw Error(ErrorKind::ConfigError, "oracle modes need gold annotations");

  std::map<std::string, const Document*> docs_by_id;
  for (const auto& doc : docs) docs_by_id.emplace(doc.id, &doc);
  for (const auto& cs : candidate_sets) {
    if (docs_by_id.find(cs.mention.doc_id) == docs_by_id.end())
      throw Error(ErrorKind::UnknownDocument,
                  "candidate mention in unknown document: " + cs.mention.doc_id);
  }
  std::map<SpanKey, const GoldAnnotation*> gold_by_span;
  if (gold != nullptr) {
    for (const auto& g : *gold) {
      if (!gold_by_span.emplace(key_of(g), &g).second)
        throw Error(ErrorKind::AlignmentError,
                    "duplicate gold span in " + g.doc_id + " at " + std::to_string(g.start));
    }
  }

  const LinkContext ctx{&docs_by_id, &gold_by_span, mode, &scores, policy, &lexicon, &type_map};
  std::vector<PerMention> results(candidate_sets.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(candidate_sets.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(std::max(1, threads))
    for (std::ptrdiff_t i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] =
          link_one(candidate_sets[static_cast<std::size_t>(i)], ctx);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] =
          link_one(candidate_sets[static_cast<std::size_t>(i)], ctx);
  }

  std::vector<LinkedMention> linked;
  linked.reserve(results.size());
  for (auto& r : results) {
    if (stats != nullptr) {
      stats->oracle_unaligned += r.oracle_unaligned ? 1 : 0;
      stats->imported_missing += r.imported_missing ? 1 : 0;
      stats->abstained += r.abstained ? 1 : 0;
    }
    if (warnings != nullptr)
      warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
    linked.push_back(std::move(r.linked));
  }
  std::stable_sort(linked.begin(), linked.end(),
                   [](const LinkedMention& a, const LinkedMention& b) {
                     return key_of(a.mention) < key_of(b.mention);
                   });
  return linked;
}

}  // namespace

std::vector<LinkedMention> link_corpus(const std::vector<Document>& docs,
                                       const std::vector<CandidateSet>& candidate_sets,
                                       FilterMode mode, const ScoreSource& scores,
                                       const std::vector<GoldAnnotation>* gold,
                                       EmptyPolicy policy, const Lexicon& lexicon,
                                       const TypeMap& type_map, int threads,
                                       LinkStats* stats, WarningList* warnings) {
  return run_link(docs, candidate_sets, mode, scores, gold, policy, lexicon, type_map,
                  threads, /*parallel=*/true, stats, warnings);
}

std::vector<LinkedMention> link_corpus_serial(const std::vector<Document>& docs,
                                              const std::vector<CandidateSet>& candidate_sets,
                                              FilterMode mode, const ScoreSource& scores,
                                              const std::vector<GoldAnnotation>* gold,
                                              EmptyPolicy policy, const Lexicon& lexicon,
                                              const TypeMap& type_map,
                                              LinkStats* stats, WarningList* warnings) {
  return run_link(docs, candidate_sets, mode, scores, gold, policy, lexicon, type_map,
                  /*threads=*/1, /*parallel=*/false, stats, warnings);
}

}  // namespace typelink
