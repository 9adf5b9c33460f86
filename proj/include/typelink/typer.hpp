#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "typelink/document.hpp"
#include "typelink/error.hpp"

namespace typelink {

/// A mention in its context window. For prediction inputs `labels` is empty
/// and ignored; for training rows mention_tokens must be non-empty and every
/// label must be one of the model's groups.
struct TrainingExample {
  std::vector<std::string> left_context;   // <= window_k tokens, nearest last
  std::vector<std::string> mention_tokens;
  std::vector<std::string> right_context;  // <= window_k tokens, nearest first
  std::set<std::string> labels;
};

/// Hashed bag-of-tokens features, index-sorted with summed counts.
struct SparseFeatures {
  std::vector<std::pair<std::uint32_t, float>> entries;
};

/// Emits "m:"/"l:"/"r:"-prefixed token counts plus "mb:" mention bigrams,
/// hashed into hash_dim buckets (power of two). Stable across runs and
/// platforms.
SparseFeatures featurize(const TrainingExample& example, std::uint32_t hash_dim);

/// One-vs-rest logistic heads over the hashed feature space, one per
/// semantic group. Immutable once trained; concurrent prediction is safe.
struct TyperModel {
  int version = 1;
  std::uint32_t hash_dim = 0;
  int window_k = 64;
  std::uint64_t seed = 0;
  std::vector<std::string> group_names;      // sorted
  std::vector<std::vector<double>> weights;  // [group][hash_dim]
  std::vector<double> bias;                  // [group]

  int group_index(const std::string& group) const;
  void validate() const;
};

void save_model(const TyperModel& model, const std::filesystem::path& path);
TyperModel load_model(const std::filesystem::path& path);

struct TrainConfig {
  std::uint32_t hash_dim = 1u << 14;
  int window_k = 64;
  int epochs = 20;
  double learning_rate = 0.5;
  double l2 = 1e-6;
  int batch_size = 32;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Mini-batch SGD on per-group logistic losses with L2 penalty; shuffling is
/// fixed by config.seed, so training is bit-reproducible. `init`, when given,
/// provides the starting weights (the pretrain -> fine-tune path) and must
/// match hash_dim/window_k. `epoch_losses`, when given, receives the mean
/// training loss after each epoch.
TyperModel train(const std::vector<TrainingExample>& dataset,
                 const TrainConfig& config,
                 const std::vector<std::string>& group_names,
                 const TyperModel* init = nullptr,
                 std::vector<double>* epoch_losses = nullptr);

/// sigmoid(w_g . phi(x) + b_g) per group, aligned with model.group_names.
std::vector<double> predict_scores(const TyperModel& model, const TrainingExample& input);

/// Per-group decision thresholds, each within (0.001, 1).
struct Thresholds {
  std::map<std::string, double> values;

  double for_group(const std::string& group) const;
  void validate(const std::vector<std::string>& group_names) const;
};

void save_thresholds(const Thresholds& thresholds, const std::filesystem::path& path);
Thresholds load_thresholds(const std::filesystem::path& path);

/// 40 log-spaced points strictly inside (0.001, 1), plus 0.5.
std::vector<double> default_threshold_grid();

/// Per group, the grid value maximizing that group's binary F1 on the
/// validation split; ties go to the smaller threshold. Groups absent from
/// the validation gold default to 0.5 with a warning.
Thresholds tune_thresholds(const TyperModel& model,
                           const std::vector<TrainingExample>& validation,
                           const std::vector<double>& grid,
                           WarningList* warnings = nullptr);

/// {g : score_g >= threshold_g}; empty is the "None" abstain outcome.
std::set<std::string> predict_groups(const TyperModel& model,
                                     const Thresholds& thresholds,
                                     const TrainingExample& input);

/// Evaluation carrier: one score per group, aligned with a group inventory.
struct ScoredExample {
  std::vector<double> scores;
  std::set<std::string> gold;
};

enum class AucMode { micro, macro };

/// Area under the precision-recall curve: sort pooled (score, is-gold) pairs
/// descending, sweep distinct scores, integrate precision over recall with
/// step interpolation (precision held from the right). micro pools all
/// (example, group) pairs; macro averages per-group AUC over groups with at
/// least one positive. Throws UndefinedMetric when no positives exist.
double pr_auc(const std::vector<ScoredExample>& scored, AucMode mode,
              const std::vector<std::string>& group_names);

/// Externally computed per-group scores for a mention span.
struct ImportedScores {
  SpanKey key;
  std::vector<double> scores;  // aligned with the group inventory
};

/// Reads JSONL {"doc_id","start","end","scores":{group:real,...}}; group
/// names are validated against the inventory, scores against [0,1]; groups
/// not listed default to 0.0.
std::vector<ImportedScores> import_scores(const std::filesystem::path& path,
                                          const std::vector<std::string>& group_names);

/// Builds the typer input for a mention span from its document: mention
/// tokens are the tokens overlapping [start,end), contexts are the nearest
/// window_k tokens on each side.
TrainingExample make_context_example(const Document& doc, std::size_t start,
                                     std::size_t end, int window_k);

}  // namespace typelink
