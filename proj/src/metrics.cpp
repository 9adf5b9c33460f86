#include "typelink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>
#include <omp.h>

#include "typelink/hash.hpp"

namespace typelink {
namespace {

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

Prf make_prf(double tp, double n_preds, double n_golds) {
  Prf out;
  out.precision = n_preds == 0.0 ? 1.0 : tp / n_preds;
  out.recall = n_golds == 0.0 ? 1.0 : tp / n_golds;
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

std::size_t overlap(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
  const std::size_t lo = std::max(a0, b0);
  const std::size_t hi = std::min(a1, b1);
  return hi > lo ? hi - lo : 0;
}

struct ExactKey {
  SpanKey span;
  std::string cui;
  auto operator<=>(const ExactKey&) const = default;
};

}  // namespace

Prf exact_f1(const std::vector<LinkedMention>& preds,
             const std::vector<GoldAnnotation>& golds) {
  std::map<ExactKey, std::size_t> unmatched;  // gold keys -> remaining matches
  for (const auto& g : golds) unmatched[{key_of(g), g.cui}] += 1;

  std::size_t n_preds = 0;
  std::size_t tp = 0;
  for (const auto& p : preds) {
    if (!p.chosen_cui.has_value()) continue;  // dropped mentions emit nothing
    ++n_preds;
    auto it = unmatched.find({key_of(p.mention), *p.chosen_cui});
    if (it != unmatched.end() && it->second > 0) {
      --it->second;
      ++tp;
    }
  }
  return make_prf(static_cast<double>(tp), static_cast<double>(n_preds),
                  static_cast<double>(golds.size()));
}

Prf partial_f1(const std::vector<LinkedMention>& preds,
               const std::vector<GoldAnnotation>& golds) {
  struct Pair {
    double credit;
    std::size_t gold_idx;
    std::size_t pred_idx;
    const GoldAnnotation* g;
    const Mention* m;
  };
  std::vector<const LinkedMention*> linked;
  for (const auto& p : preds)
    if (p.chosen_cui.has_value()) linked.push_back(&p);

  std::vector<Pair> pairs;
  for (std::size_t pi = 0; pi < linked.size(); ++pi) {
    const auto& m = linked[pi]->mention;
    const auto& cui = *linked[pi]->chosen_cui;
    for (std::size_t gi = 0; gi < golds.size(); ++gi) {
      const auto& g = golds[gi];
      if (g.doc_id != m.doc_id || g.cui != cui) continue;
      const std::size_t ov = overlap(m.start, m.end, g.start, g.end);
      if (ov == 0) continue;
      const double credit = 2.0 * static_cast<double>(ov) /
                            static_cast<double>((m.end - m.start) + (g.end - g.start));
      pairs.push_back({credit, gi, pi, &g, &m});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.credit != b.credit) return a.credit > b.credit;
    if (a.g->doc_id != b.g->doc_id) return a.g->doc_id < b.g->doc_id;
    if (a.g->start != b.g->start) return a.g->start < b.g->start;
    if (a.g->end != b.g->end) return a.g->end < b.g->end;
    if (a.m->start != b.m->start) return a.m->start < b.m->start;
    return a.m->end < b.m->end;
  });

  std::vector<bool> gold_used(golds.size(), false);
  std::vector<bool> pred_used(linked.size(), false);
  double tp = 0.0;
  for (const auto& pair : pairs) {
    if (gold_used[pair.gold_idx] || pred_used[pair.pred_idx]) continue;
    gold_used[pair.gold_idx] = true;
    pred_used[pair.pred_idx] = true;
    tp += pair.credit;
  }
  return make_prf(tp, static_cast<double>(linked.size()), static_cast<double>(golds.size()));
}

ErrorCounts error_breakdown(const std::vector<CandidateSet>& preds_with_candidates,
                            const std::vector<GoldAnnotation>& golds) {
  std::map<std::string, std::vector<const GoldAnnotation*>> by_doc;
  for (const auto& g : golds) by_doc[g.doc_id].push_back(&g);

  ErrorCounts counts;
  for (const auto& cs : preds_with_candidates) {
    auto it = by_doc.find(cs.mention.doc_id);
    bool any_overlap = false;
    bool any_covered = false;
    if (it != by_doc.end()) {
      for (const auto* g : it->second) {
        if (overlap(cs.mention.start, cs.mention.end, g->start, g->end) == 0) continue;
        any_overlap = true;
        for (const auto& cand : cs.candidates) {
          if (cand.cui == g->cui) {
            any_covered = true;
            break;
          }
        }
        if (any_covered) break;
      }
    }
    if (!any_overlap)
      ++counts.false_positive_mention;
    else if (!any_covered)
      ++counts.missing_candidate;
    else
      ++counts.matched;
  }
  return counts;
}

SizeStats candidate_size_stats(const std::vector<CandidateSet>& before,
                               const std::vector<LinkedMention>& after) {
  if (before.size() != after.size())
    throw Error(ErrorKind::AlignmentError, "before/after mention counts differ");
  std::vector<std::pair<SpanKey, int>> b, a;
  for (const auto& cs : before) b.emplace_back(key_of(cs), static_cast<int>(cs.candidates.size()));
  for (const auto& lm : after)
    a.emplace_back(key_of(lm.mention), static_cast<int>(lm.surviving.candidates.size()));
  std::sort(b.begin(), b.end());
  std::sort(a.begin(), a.end());

  SizeStats stats;
  std::int64_t reduced = 0, ambiguous = 0, solved = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].first != a[i].first)
      throw Error(ErrorKind::AlignmentError,
                  "mention sets differ at " + b[i].first.doc_id + ":" +
                      std::to_string(b[i].first.start));
    stats.before_histogram[b[i].second] += 1;
    stats.after_histogram[a[i].second] += 1;
    if (a[i].second < b[i].second) ++reduced;
    if (b[i].second > 1) {
      ++ambiguous;
      if (a[i].second == 1) ++solved;
    }
  }
  if (!b.empty()) stats.reduced_fraction = static_cast<double>(reduced) / static_cast<double>(b.size());
  if (ambiguous > 0)
    stats.fully_disambiguated_fraction =
        static_cast<double>(solved) / static_cast<double>(ambiguous);
  return stats;
}

namespace {

double micro_f1(double tp, double n_preds, double n_golds) {
  const double p = n_preds == 0.0 ? 1.0 : tp / n_preds;
  const double r = n_golds == 0.0 ? 1.0 : tp / n_golds;
  return harmonic(p, r);
}

double resampled_f1(const std::vector<DocStat>& side, const std::vector<std::size_t>& idx) {
  double tp = 0.0, preds = 0.0, golds = 0.0;
  for (std::size_t i : idx) {
    tp += side[i].tp;
    preds += side[i].preds;
    golds += side[i].golds;
  }
  return micro_f1(tp, preds, golds);
}

}  // namespace

BootstrapResult paired_bootstrap(const std::vector<DocStat>& a,
                                 const std::vector<DocStat>& b, int replicates,
                                 std::uint64_t seed, int threads) {
  if (a.size() != b.size())
    throw Error(ErrorKind::AlignmentError, "per-document score lists differ in length");
  if (a.size() < 2) throw Error(ErrorKind::ConfigError, "need at least 2 documents");
  if (replicates < 100) throw Error(ErrorKind::ConfigError, "need at least 100 replicates");

  const std::size_t n = a.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  BootstrapResult result;
  result.observed_a = resampled_f1(a, all);
  result.observed_b = resampled_f1(b, all);
  const bool a_wins = result.observed_a >= result.observed_b;
  result.winner = result.observed_a == result.observed_b ? "tie" : (a_wins ? "A" : "B");
  const std::vector<DocStat>& winner = a_wins ? a : b;
  const std::vector<DocStat>& loser = a_wins ? b : a;

  std::int64_t hits = 0;
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) reduction(+ : hits)
  for (std::int64_t rep = 0; rep < static_cast<std::int64_t>(replicates); ++rep) {
    SplitMix64 rng = stream_for(seed, static_cast<std::uint64_t>(rep));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(rng.below(n));
    if (resampled_f1(loser, idx) >= resampled_f1(winner, idx)) ++hits;
  }
  result.p = static_cast<double>(hits) / static_cast<double>(replicates);
  return result;
}

BootstrapResult paired_bootstrap(const std::vector<double>& a,
                                 const std::vector<double>& b, int replicates,
                                 std::uint64_t seed, int threads) {
  std::vector<DocStat> sa, sb;
  sa.reserve(a.size());
  sb.reserve(b.size());
  for (double v : a) sa.push_back({v, 1.0, 1.0});
  for (double v : b) sb.push_back({v, 1.0, 1.0});
  return paired_bootstrap(sa, sb, replicates, seed, threads);
}

std::vector<DocStat> per_doc_exact_stats(const std::vector<LinkedMention>& preds,
                                         const std::vector<GoldAnnotation>& golds) {
  std::map<std::string, std::vector<const LinkedMention*>> preds_by_doc;
  std::map<std::string, std::vector<GoldAnnotation>> golds_by_doc;
  for (const auto& p : preds)
    if (p.chosen_cui.has_value()) preds_by_doc[p.mention.doc_id].push_back(&p);
  for (const auto& g : golds) golds_by_doc[g.doc_id].push_back(g);

  std::set<std::string> doc_ids;
  for (const auto& [id, v] : preds_by_doc) doc_ids.insert(id);
  for (const auto& [id, v] : golds_by_doc) doc_ids.insert(id);

  std::vector<DocStat> out;
  out.reserve(doc_ids.size());
  for (const auto& id : doc_ids) {
    DocStat stat;
    std::map<ExactKey, std::size_t> unmatched;
    if (auto it = golds_by_doc.find(id); it != golds_by_doc.end()) {
      stat.golds = static_cast<double>(it->second.size());
      for (const auto& g : it->second) unmatched[{key_of(g), g.cui}] += 1;
    }
    if (auto it = preds_by_doc.find(id); it != preds_by_doc.end()) {
      stat.preds = static_cast<double>(it->second.size());
      for (const auto* p : it->second) {
        auto hit = unmatched.find({key_of(p->mention), *p->chosen_cui});
        if (hit != unmatched.end() && hit->second > 0) {
          --hit->second;
          stat.tp += 1.0;
        }
      }
    }
    out.push_back(stat);
  }
  return out;
}

std::map<std::string, double> per_group_f1(const std::vector<LinkedMention>& preds,
                                           const std::vector<GoldAnnotation>& golds,
                                           const Lexicon& lexicon, const TypeMap& type_map,
                                           WarningList* warnings) {
  const auto groups_of_cui = [&](const std::string& cui) {
    std::set<std::string> out;
    const Concept* concept = lexicon.find(cui);
    if (concept == nullptr) {
      out.insert(kUnresolvedGroup);
      return out;
    }
    return type_map.groups_of(concept->fine_types);
  };

  std::set<std::string> gold_groups;
  for (const auto& g : golds) {
    if (lexicon.find(g.cui) == nullptr)
      warn(warnings, "gold cui not in lexicon, counted as UNRESOLVED: " + g.cui);
    for (const auto& grp : groups_of_cui(g.cui)) gold_groups.insert(grp);
  }

  std::map<std::string, double> out;
  for (const auto& group : gold_groups) {
    std::vector<GoldAnnotation> sub_golds;
    for (const auto& g : golds)
      if (groups_of_cui(g.cui).count(group) > 0) sub_golds.push_back(g);
    std::vector<LinkedMention> sub_preds;
    for (const auto& p : preds) {
      if (!p.chosen_cui.has_value()) continue;
      if (groups_of_cui(*p.chosen_cui).count(group) > 0) sub_preds.push_back(p);
    }
    out[group] = exact_f1(sub_preds, sub_golds).f1;
  }
  return out;
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  const auto line = [&os](const char* name, const Prf& prf) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-8s P=%.4f R=%.4f F1=%.4f", name, prf.precision,
                  prf.recall, prf.f1);
    os << buf << "\n";
  };
  line("exact", exact);
  line("partial", partial);
  if (!per_group.empty()) {
    os << "per-group exact F1:\n";
    for (const auto& [group, f1] : per_group) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "  %-36s %.4f", group.c_str(), f1);
      os << buf << "\n";
    }
  }
  if (has_errors) {
    os << "error breakdown: false_positive_mention=" << errors.false_positive_mention
       << " missing_candidate=" << errors.missing_candidate << " matched=" << errors.matched
       << "\n";
  }
  if (has_sizes) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "candidate sizes: reduced_fraction=%.4f fully_disambiguated=%.4f",
                  sizes.reduced_fraction, sizes.fully_disambiguated_fraction);
    os << buf << "\n";
  }
  if (bootstrap_p.has_value()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "paired bootstrap: winner=%s p=%.6f",
                  bootstrap_winner.c_str(), *bootstrap_p);
    os << buf << "\n";
  }
  return os.str();
}

std::string EvalReport::to_json() const {
  nlohmann::json doc;
  doc["exact_f1"] = exact.f1;
  doc["exact_precision"] = exact.precision;
  doc["exact_recall"] = exact.recall;
  doc["partial_f1"] = partial.f1;
  doc["partial_precision"] = partial.precision;
  doc["partial_recall"] = partial.recall;
  doc["per_group_f1"] = per_group;
  if (has_errors) {
    doc["error_counts"] = {{"false_positive_mention", errors.false_positive_mention},
                           {"missing_candidate", errors.missing_candidate},
                           {"matched", errors.matched}};
  }
  if (has_sizes) {
    nlohmann::json before, after;
    for (const auto& [size, count] : sizes.before_histogram)
      before[std::to_string(size)] = count;
    for (const auto& [size, count] : sizes.after_histogram)
      after[std::to_string(size)] = count;
    doc["candidate_size_histogram"] = after;
    doc["candidate_size_histogram_before"] = before;
    doc["reduced_fraction"] = sizes.reduced_fraction;
    doc["fully_disambiguated_fraction"] = sizes.fully_disambiguated_fraction;
  }
  if (bootstrap_p.has_value()) {
    doc["bootstrap_p"] = *bootstrap_p;
    doc["bootstrap_winner"] = bootstrap_winner;
  }
  return doc.dump(2) + "\n";
}

}  // namespace typelink
