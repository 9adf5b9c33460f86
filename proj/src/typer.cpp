#include "typelink/typer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "typelink/hash.hpp"
#include "typelink/text.hpp"
#include "typelink/type_map.hpp"

namespace typelink {
namespace {

bool is_pow2(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-|z|)) + max(z,0) - z*y, the overflow-free binary logistic loss.
double logistic_loss(double z, bool y) {
  return std::max(z, 0.0) - (y ? z : 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void bump(std::map<std::uint32_t, float>& acc, std::string_view key, std::uint32_t hash_dim) {
  const auto index = static_cast<std::uint32_t>(fnv1a64(key) & (hash_dim - 1));
  acc[index] += 1.0f;
}

double dot(const std::vector<double>& w, const SparseFeatures& x) {
  double z = 0.0;
  for (const auto& [idx, val] : x.entries) z += w[idx] * static_cast<double>(val);
  return z;
}

}  // namespace

SparseFeatures featurize(const TrainingExample& example, std::uint32_t hash_dim) {
  if (!is_pow2(hash_dim) || hash_dim < 2)
    throw Error(ErrorKind::ConfigError, "hash_dim must be a power of two");
  std::map<std::uint32_t, float> acc;
  std::string key;
  const auto add = [&](const char* prefix, const std::string& token) {
    key.assign(prefix);
    key += token;
    bump(acc, key, hash_dim);
  };
  for (const auto& t : example.mention_tokens) add("m:", t);
  for (const auto& t : example.left_context) add("l:", t);
  for (const auto& t : example.right_context) add("r:", t);
  for (std::size_t i = 0; i + 1 < example.mention_tokens.size(); ++i) {
    key.assign("mb:");
    key += example.mention_tokens[i];
    key.push_back(' ');
    key += example.mention_tokens[i + 1];
    bump(acc, key, hash_dim);
  }
  SparseFeatures out;
  out.entries.assign(acc.begin(), acc.end());
  return out;
}

int TyperModel::group_index(const std::string& group) const {
  auto it = std::lower_bound(group_names.begin(), group_names.end(), group);
  if (it == group_names.end() || *it != group) return -1;
  return static_cast<int>(it - group_names.begin());
}

void TyperModel::validate() const {
  if (!is_pow2(hash_dim)) throw Error(ErrorKind::ConfigError, "model hash_dim not a power of two");
  if (group_names.empty()) throw Error(ErrorKind::ConfigError, "model has no groups");
  if (!std::is_sorted(group_names.begin(), group_names.end()))
    throw Error(ErrorKind::ConfigError, "model groups not sorted");
  if (weights.size() != group_names.size() || bias.size() != group_names.size())
    throw Error(ErrorKind::ConfigError, "model weight/bias shape mismatch");
  for (std::size_t g = 0; g < weights.size(); ++g) {
    if (weights[g].size() != hash_dim)
      throw Error(ErrorKind::ConfigError, "weight vector length != hash_dim");
    if (!std::isfinite(bias[g]))
      throw Error(ErrorKind::NumericalDivergence, "non-finite bias in group " + group_names[g]);
    for (double w : weights[g])
      if (!std::isfinite(w))
        throw Error(ErrorKind::NumericalDivergence,
                    "non-finite weight in group " + group_names[g]);
  }
}

void TrainConfig::validate() const {
  if (!is_pow2(hash_dim) || hash_dim < (1u << 10))
    throw Error(ErrorKind::ConfigError, "hash_dim must be a power of two >= 1024");
  if (window_k < 0) throw Error(ErrorKind::ConfigError, "window_k must be >= 0");
  if (epochs < 1) throw Error(ErrorKind::ConfigError, "epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::ConfigError, "learning_rate must be > 0");
  if (l2 < 0.0) throw Error(ErrorKind::ConfigError, "l2 must be >= 0");
  if (batch_size < 1) throw Error(ErrorKind::ConfigError, "batch_size must be >= 1");
}

TyperModel train(const std::vector<TrainingExample>& dataset,
                 const TrainConfig& config,
                 const std::vector<std::string>& group_names,
                 const TyperModel* init,
                 std::vector<double>* epoch_losses) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorKind::EmptyDataset, "no training examples");

  TyperModel model;
  model.hash_dim = config.hash_dim;
  model.window_k = config.window_k;
  model.seed = config.seed;
  model.group_names = group_names;
  std::sort(model.group_names.begin(), model.group_names.end());
  model.group_names.erase(std::unique(model.group_names.begin(), model.group_names.end()),
                          model.group_names.end());
  const std::size_t n_groups = model.group_names.size();
  if (n_groups == 0) throw Error(ErrorKind::ConfigError, "empty group inventory");

  if (init != nullptr) {
    init->validate();
    if (init->hash_dim != config.hash_dim || init->window_k != config.window_k)
      throw Error(ErrorKind::ConfigError, "init model hash_dim/window_k do not match config");
    if (init->group_names != model.group_names)
      throw Error(ErrorKind::ConfigError, "init model group inventory does not match");
    model.weights = init->weights;
    model.bias = init->bias;
  } else {
    model.weights.assign(n_groups, std::vector<double>(config.hash_dim, 0.0));
    model.bias.assign(n_groups, 0.0);
  }

  // Featurize once; labels become per-example group bitsets.
  std::vector<SparseFeatures> features;
  features.reserve(dataset.size());
  std::vector<std::vector<bool>> positive(dataset.size(),
                                          std::vector<bool>(n_groups, false));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& ex = dataset[i];
    if (ex.mention_tokens.empty())
      throw Error(ErrorKind::ConfigError,
                  "training example " + std::to_string(i) + " has no mention tokens");
    for (const auto& label : ex.labels) {
      int g = model.group_index(label);
      if (g < 0) throw Error(ErrorKind::UnknownGroup, "label not in group inventory: " + label);
      positive[i][static_cast<std::size_t>(g)] = true;
    }
    features.push_back(featurize(ex, config.hash_dim));
  }

  // L2 decay is applied through a per-group scale factor so each batch
  // update stays O(nnz) instead of O(hash_dim).
  std::vector<double> scale(n_groups, 1.0);
  const auto fold_scale = [&](std::size_t g) {
    for (double& w : model.weights[g]) w *= scale[g];
    scale[g] = 1.0;
  };

  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(config.seed);

  const double lr = config.learning_rate;
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  std::vector<double> errs(batch, 0.0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (std::size_t g = 0; g < n_groups; ++g) {
        auto& w = model.weights[g];
        double grad_b = 0.0;
        for (std::size_t b = begin; b < end; ++b) {
          const std::size_t i = order[b];
          const double z = scale[g] * dot(w, features[i]) + model.bias[g];
          const double err = sigmoid(z) - (positive[i][g] ? 1.0 : 0.0);
          errs[b - begin] = err;
          grad_b += err;
        }
        if (config.l2 > 0.0) {
          scale[g] *= (1.0 - lr * config.l2);
          if (scale[g] < 1e-6) fold_scale(g);
        }
        const double step = lr * inv / scale[g];
        for (std::size_t b = begin; b < end; ++b) {
          const std::size_t i = order[b];
          const double coeff = step * errs[b - begin];
          if (coeff == 0.0) continue;
          for (const auto& [idx, val] : features[i])
            w[idx] -= coeff * static_cast<double>(val);
        }
        model.bias[g] -= lr * inv * grad_b;
      }
    }
    // Mean multi-label data loss over the epoch's end-state weights.
    double loss = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      for (std::size_t g = 0; g < n_groups; ++g) {
        const double z = scale[g] * dot(model.weights[g], features[i]) + model.bias[g];
        loss += logistic_loss(z, positive[i][g]);
      }
    }
    loss /= static_cast<double>(dataset.size());
    if (!std::isfinite(loss))
      throw Error(ErrorKind::NumericalDivergence,
                  "training loss diverged at epoch " + std::to_string(epoch));
    if (epoch_losses != nullptr) epoch_losses->push_back(loss);
  }

  for (std::size_t g = 0; g < n_groups; ++g) fold_scale(g);
  model.validate();
  return model;
}

std::vector<double> predict_scores(const TyperModel& model, const TrainingExample& input) {
  const SparseFeatures x = featurize(input, model.hash_dim);
  std::vector<double> scores(model.group_names.size(), 0.0);
  for (std::size_t g = 0; g < scores.size(); ++g)
    scores[g] = sigmoid(dot(model.weights[g], x) + model.bias[g]);
  return scores;
}

double Thresholds::for_group(const std::string& group) const {
  auto it = values.find(group);
  if (it == values.end())
    throw Error(ErrorKind::UnknownGroup, "no threshold for group: " + group);
  return it->second;
}

void Thresholds::validate(const std::vector<std::string>& group_names) const {
  if (values.size() != group_names.size())
    throw Error(ErrorKind::ConfigError, "thresholds do not cover the group inventory");
  for (const auto& name : group_names) {
    auto it = values.find(name);
    if (it == values.end())
      throw Error(ErrorKind::ConfigError, "missing threshold for group: " + name);
    if (!(it->second > 0.001 && it->second < 1.0))
      throw Error(ErrorKind::RangeError,
                  "threshold for " + name + " outside (0.001, 1)");
  }
}

std::vector<double> default_threshold_grid() {
  // 40 log-spaced interior points of (0.001, 1), plus 0.5.
  std::vector<double> grid;
  const double lo = std::log(0.001);
  const double hi = std::log(1.0);
  for (int i = 1; i <= 40; ++i)
    grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / 41.0));
  grid.push_back(0.5);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

Thresholds tune_thresholds(const TyperModel& model,
                           const std::vector<TrainingExample>& validation,
                           const std::vector<double>& grid,
                           WarningList* warnings) {
  if (grid.empty()) throw Error(ErrorKind::ConfigError, "empty threshold grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.001 && grid[i] < 1.0))
      throw Error(ErrorKind::RangeError, "grid value outside (0.001, 1)");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw Error(ErrorKind::ConfigError, "grid must be strictly increasing");
  }

  std::vector<std::vector<double>> scores;
  scores.reserve(validation.size());
  for (const auto& ex : validation) scores.push_back(predict_scores(model, ex));

  Thresholds out;
  for (std::size_t g = 0; g < model.group_names.size(); ++g) {
    const std::string& group = model.group_names[g];
    std::size_t positives = 0;
    for (const auto& ex : validation) positives += ex.labels.count(group);
    if (positives == 0) {
      out.values[group] = 0.5;
      warn(warnings, "group '" + group +
                         "' absent from validation gold; threshold defaulted to 0.5");
      continue;
    }
    double best_f1 = -1.0;
    double best_t = grid.front();
    for (double t : grid) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < validation.size(); ++i) {
        const bool pred = scores[i][g] >= t;
        const bool gold = validation[i].labels.count(group) > 0;
        if (pred && gold)
          ++tp;
        else if (pred)
          ++fp;
        else if (gold)
          ++fn;
      }
      const std::size_t denom = 2 * tp + fp + fn;
      const double f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
      if (f1 > best_f1) {  // strict: ties keep the smaller threshold
        best_f1 = f1;
        best_t = t;
      }
    }
    out.values[group] = best_t;
  }
  return out;
}

std::set<std::string> predict_groups(const TyperModel& model,
                                     const Thresholds& thresholds,
                                     const TrainingExample& input) {
  const std::vector<double> scores = predict_scores(model, input);
  std::set<std::string> out;
  for (std::size_t g = 0; g < scores.size(); ++g) {
    if (scores[g] >= thresholds.for_group(model.group_names[g]))
      out.insert(model.group_names[g]);
  }
  return out;
}

namespace {

// AUC of one pooled list of (score, is-positive) pairs.
double auc_of_pool(std::vector<std::pair<double, bool>>& pool) {
  std::size_t total_pos = 0;
  for (const auto& [s, y] : pool) total_pos += y ? 1 : 0;
  if (total_pos == 0) throw Error(ErrorKind::UndefinedMetric, "no positive labels in pool");
  std::sort(pool.begin(), pool.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double auc = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < pool.size()) {
    const double score = pool[i].first;
    while (i < pool.size() && pool[i].first == score) {
      if (pool[i].second)
        ++tp;
      else
        ++fp;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    auc += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return auc;
}

}  // namespace

double pr_auc(const std::vector<ScoredExample>& scored, AucMode mode,
              const std::vector<std::string>& group_names) {
  if (scored.empty()) throw Error(ErrorKind::EmptyDataset, "no scored examples");
  for (const auto& ex : scored) {
    if (ex.scores.size() != group_names.size())
      throw Error(ErrorKind::ConfigError, "score vector length != group inventory size");
    for (const auto& g : ex.gold)
      if (!std::binary_search(group_names.begin(), group_names.end(), g))
        throw Error(ErrorKind::UnknownGroup, "gold label not in inventory: " + g);
  }
  if (mode == AucMode::micro) {
    std::vector<std::pair<double, bool>> pool;
    pool.reserve(scored.size() * group_names.size());
    for (const auto& ex : scored)
      for (std::size_t g = 0; g < group_names.size(); ++g)
        pool.emplace_back(ex.scores[g], ex.gold.count(group_names[g]) > 0);
    return auc_of_pool(pool);
  }
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t g = 0; g < group_names.size(); ++g) {
    std::vector<std::pair<double, bool>> pool;
    pool.reserve(scored.size());
    bool any_pos = false;
    for (const auto& ex : scored) {
      const bool y = ex.gold.count(group_names[g]) > 0;
      any_pos = any_pos || y;
      pool.emplace_back(ex.scores[g], y);
    }
    if (!any_pos) continue;
    sum += auc_of_pool(pool);
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::UndefinedMetric, "no group has positive labels");
  return sum / static_cast<double>(used);
}

std::vector<ImportedScores> import_scores(const std::filesystem::path& path,
                                          const std::vector<std::string>& group_names) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open scores: " + path.string());
  std::vector<ImportedScores> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto at = [&](const std::string& what) {
      return path.string() + ":" + std::to_string(lineno) + ": " + what;
    };
    try {
      const nlohmann::json rec = nlohmann::json::parse(line);
      ImportedScores imported;
      imported.key.doc_id = rec.at("doc_id").get<std::string>();
      imported.key.start = rec.at("start").get<std::size_t>();
      imported.key.end = rec.at("end").get<std::size_t>();
      imported.scores.assign(group_names.size(), 0.0);
      for (const auto& [name, value] : rec.at("scores").items()) {
        auto it = std::lower_bound(group_names.begin(), group_names.end(), name);
        if (it == group_names.end() || *it != name)
          throw Error(ErrorKind::UnknownGroup, at("unknown group name: " + name));
        const double score = value.get<double>();
        if (score < 0.0 || score > 1.0)
          throw Error(ErrorKind::RangeError,
                      at("score " + std::to_string(score) + " outside [0,1]"));
        imported.scores[static_cast<std::size_t>(it - group_names.begin())] = score;
      }
      out.push_back(std::move(imported));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, at(e.what()));
    }
  }
  return out;
}

TrainingExample make_context_example(const Document& doc, std::size_t start,
                                     std::size_t end, int window_k) {
  const std::vector<Token> tokens = tokenize(doc.text);
  const std::size_t k = window_k < 0 ? 0 : static_cast<std::size_t>(window_k);

  std::size_t lo = 0;
  while (lo < tokens.size() && tokens[lo].end <= start) ++lo;
  std::size_t hi = lo;
  while (hi < tokens.size() && tokens[hi].start < end) ++hi;

  TrainingExample ex;
  for (std::size_t i = lo; i < hi; ++i) ex.mention_tokens.push_back(tokens[i].norm);
  if (ex.mention_tokens.empty())
    ex.mention_tokens = normalize(scalar_slice(doc.text, start, end));
  const std::size_t left_from = lo > k ? lo - k : 0;
  for (std::size_t i = left_from; i < lo; ++i) ex.left_context.push_back(tokens[i].norm);
  for (std::size_t i = hi; i < tokens.size() && i < hi + k; ++i)
    ex.right_context.push_back(tokens[i].norm);
  return ex;
}

void save_model(const TyperModel& model, const std::filesystem::path& path) {
  model.validate();
  nlohmann::json doc;
  doc["version"] = model.version;
  doc["hash_dim"] = model.hash_dim;
  doc["window_k"] = model.window_k;
  doc["seed"] = model.seed;
  nlohmann::json groups = nlohmann::json::array();
  for (std::size_t g = 0; g < model.group_names.size(); ++g) {
    nlohmann::json entry;
    entry["name"] = model.group_names[g];
    entry["bias"] = model.bias[g];
    entry["weights"] = model.weights[g];
    groups.push_back(std::move(entry));
  }
  doc["groups"] = std::move(groups);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write model: " + path.string());
  out << doc.dump() << "\n";
}

TyperModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open model: " + path.string());
  TyperModel model;
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    model.version = doc.at("version").get<int>();
    model.hash_dim = doc.at("hash_dim").get<std::uint32_t>();
    model.window_k = doc.at("window_k").get<int>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    struct Head {
      std::string name;
      double bias;
      std::vector<double> weights;
    };
    std::vector<Head> heads;
    for (const auto& entry : doc.at("groups")) {
      heads.push_back({entry.at("name").get<std::string>(), entry.at("bias").get<double>(),
                       entry.at("weights").get<std::vector<double>>()});
    }
    std::sort(heads.begin(), heads.end(),
              [](const Head& a, const Head& b) { return a.name < b.name; });
    for (auto& head : heads) {
      if (!model.group_names.empty() && model.group_names.back() == head.name)
        throw Error(ErrorKind::ParseError, "duplicate group in model: " + head.name);
      model.group_names.push_back(std::move(head.name));
      model.bias.push_back(head.bias);
      model.weights.push_back(std::move(head.weights));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  model.validate();
  return model;
}

void save_thresholds(const Thresholds& thresholds, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["thresholds"] = thresholds.values;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write thresholds: " + path.string());
  out << doc.dump() << "\n";
}

Thresholds load_thresholds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open thresholds: " + path.string());
  Thresholds out;
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    for (const auto& [name, value] : doc.at("thresholds").items())
      out.values[name] = value.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace typelink
