#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "typelink/document.hpp"
#include "typelink/filter.hpp"
#include "typelink/lexicon.hpp"
#include "typelink/type_map.hpp"

namespace typelink {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Exact mention-id match: a prediction counts iff its span equals a gold
/// span and its chosen cui equals that gold's cui; each gold is matched at
/// most once. Dropped mentions (no chosen cui) do not count as predictions.
/// Conventions: no preds and no golds -> (1,1,1); no preds -> precision 1.
Prf exact_f1(const std::vector<LinkedMention>& preds,
             const std::vector<GoldAnnotation>& golds);

/// Partial mention-id match: pairs with the same doc and cui earn character
/// Dice credit 2*overlap/(len_p+len_g); a one-to-one assignment is taken
/// greedily by descending credit (ties: earlier gold start, then earlier
/// pred start) and the credit sum plays the role of TP.
Prf partial_f1(const std::vector<LinkedMention>& preds,
               const std::vector<GoldAnnotation>& golds);

struct ErrorCounts {
  std::int64_t false_positive_mention = 0;  // span overlaps no gold
  std::int64_t missing_candidate = 0;       // overlapped gold cui not in candidates
  std::int64_t matched = 0;
};

/// Partitions the predicted mentions by failure stage, judged against the
/// pre-filter candidate lists.
ErrorCounts error_breakdown(const std::vector<CandidateSet>& preds_with_candidates,
                            const std::vector<GoldAnnotation>& golds);

struct SizeStats {
  std::map<int, std::int64_t> before_histogram;
  std::map<int, std::int64_t> after_histogram;
  double reduced_fraction = 0.0;              // |C'| < |C|
  double fully_disambiguated_fraction = 0.0;  // |C'| == 1 among |C| > 1
};

/// before/after must align by (doc_id, start, end) or AlignmentError.
SizeStats candidate_size_stats(const std::vector<CandidateSet>& before,
                               const std::vector<LinkedMention>& after);

/// One document's contribution to micro-F1: matched credit, prediction count
/// and gold count. Plain per-document scores embed as {score, 1, 1}.
struct DocStat {
  double tp = 0.0;
  double preds = 0.0;
  double golds = 0.0;
};

struct BootstrapResult {
  double p = 1.0;
  std::string winner;  // "A", "B" or "tie"
  double observed_a = 0.0;
  double observed_b = 0.0;
};

/// Paired bootstrap over documents: resample doc indices with replacement B
/// times, aggregate each side's micro-F1 on the resample, and report the
/// fraction of resamples where the observed loser matches or beats the
/// observed winner. Deterministic for a fixed seed; replicates draw from
/// independent (seed, index) streams.
BootstrapResult paired_bootstrap(const std::vector<DocStat>& a,
                                 const std::vector<DocStat>& b, int replicates,
                                 std::uint64_t seed, int threads = 1);

BootstrapResult paired_bootstrap(const std::vector<double>& a,
                                 const std::vector<double>& b, int replicates,
                                 std::uint64_t seed, int threads = 1);

/// Per-document (tp, preds, golds) triples of the exact metric, the
/// resampling payload for paired_bootstrap. Doc ids are the union of both
/// inputs, sorted.
std::vector<DocStat> per_doc_exact_stats(const std::vector<LinkedMention>& preds,
                                         const std::vector<GoldAnnotation>& golds);

/// Exact F1 per semantic group. Predictions and golds are attributed to
/// every group of their cui; gold cuis missing from the lexicon fall under
/// the reserved "UNRESOLVED" key with a warning.
std::map<std::string, double> per_group_f1(const std::vector<LinkedMention>& preds,
                                           const std::vector<GoldAnnotation>& golds,
                                           const Lexicon& lexicon, const TypeMap& type_map,
                                           WarningList* warnings = nullptr);

inline const std::string kUnresolvedGroup = "UNRESOLVED";

struct EvalReport {
  Prf exact;
  Prf partial;
  std::map<std::string, double> per_group;
  ErrorCounts errors;
  bool has_errors = false;
  SizeStats sizes;
  bool has_sizes = false;
  std::optional<double> bootstrap_p;
  std::string bootstrap_winner;

  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace typelink
