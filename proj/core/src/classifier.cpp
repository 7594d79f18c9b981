#include "cstream/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "cstream/util.hpp"

namespace cstream {

double entropy_bits(std::size_t a, std::size_t b) {
  const std::size_t n = a + b;
  if (n == 0 || a == 0 || b == 0) return 0.0;
  const double pa = static_cast<double>(a) / static_cast<double>(n);
  const double pb = static_cast<double>(b) / static_cast<double>(n);
  return -(pa * std::log2(pa) + pb * std::log2(pb));
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Columnar view of a feature-vector set; categorical values are interned
// per feature with "" (missing) always id 0.
struct ColumnSet {
  std::size_t n_rows = 0;
  std::array<std::vector<double>, kFeatureCount> numeric;
  std::array<std::vector<std::int32_t>, kFeatureCount> cats;
  std::array<std::vector<std::string>, kFeatureCount> cat_names;
  std::vector<Label> labels;

  explicit ColumnSet(std::span<const FeatureVector> examples) {
    n_rows = examples.size();
    labels.reserve(n_rows);
    const auto& table = feature_table();
    std::array<std::unordered_map<std::string, std::int32_t>, kFeatureCount> interns;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (table[f].kind == FeatureKind::numeric) {
        numeric[f].reserve(n_rows);
      } else {
        cats[f].reserve(n_rows);
        cat_names[f].push_back("");  // id 0 = missing
        interns[f][""] = 0;
      }
    }
    for (const auto& v : examples) {
      if (!v.label) throw std::invalid_argument("training requires labeled examples");
      labels.push_back(*v.label);
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        if (table[f].kind == FeatureKind::numeric) {
          const auto x = numeric_feature(v, f);
          numeric[f].push_back(x ? *x : kNan);
        } else {
          const std::string s(categorical_feature(v, f));
          auto [it, inserted] = interns[f].try_emplace(s, static_cast<std::int32_t>(cat_names[f].size()));
          if (inserted) cat_names[f].push_back(s);
          cats[f].push_back(it->second);
        }
      }
    }
  }
};

struct SplitChoice {
  bool found = false;
  double gain = 0.0;
  double ratio = 0.0;
  std::size_t feature = 0;
  bool numeric = false;
  double threshold = 0.0;

  // ordering for deterministic argmax: ratio, then gain, then feature asc,
  // then threshold asc
  bool better_than(const SplitChoice& o) const {
    if (!o.found) return found;
    if (!found) return false;
    if (ratio != o.ratio) return ratio > o.ratio;
    if (gain != o.gain) return gain > o.gain;
    if (feature != o.feature) return feature < o.feature;
    return threshold < o.threshold;
  }
};

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;

  void add(Label l) { (l == Label::user_action ? pos : neg)++; }
  std::size_t total() const { return pos + neg; }
  double entropy() const { return entropy_bits(pos, neg); }
};

double split_info(std::span<const std::size_t> cell_sizes, std::size_t n) {
  double s = 0.0;
  for (std::size_t c : cell_sizes) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    s -= p * std::log2(p);
  }
  return s;
}

// Best threshold for one numeric column restricted to `rows`; fills gain and
// gain ratio of the {<=t, >t, missing} partition.
SplitChoice best_numeric_split(const std::vector<double>& column, std::span<const Label> labels,
                               std::span<const std::uint32_t> rows, std::size_t feature,
                               std::vector<std::pair<double, Label>>& scratch) {
  SplitChoice best;
  best.feature = feature;
  best.numeric = true;

  scratch.clear();
  ClassCounts missing;
  ClassCounts present;
  for (std::uint32_t r : rows) {
    const double v = column[r];
    if (std::isnan(v)) {
      missing.add(labels[r]);
    } else {
      scratch.emplace_back(v, labels[r]);
      present.add(labels[r]);
    }
  }
  if (scratch.size() < 2) return best;
  std::sort(scratch.begin(), scratch.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::size_t n = rows.size();
  ClassCounts node;
  node.pos = missing.pos + present.pos;
  node.neg = missing.neg + present.neg;
  const double h_node = node.entropy();
  const double h_missing = missing.entropy();
  const double nd = static_cast<double>(n);

  ClassCounts left;
  for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
    left.add(scratch[i].second);
    if (scratch[i].first == scratch[i + 1].first) continue;

    ClassCounts right;
    right.pos = present.pos - left.pos;
    right.neg = present.neg - left.neg;
    const double cond = (static_cast<double>(left.total()) / nd) * left.entropy() +
                        (static_cast<double>(right.total()) / nd) * right.entropy() +
                        (static_cast<double>(missing.total()) / nd) * h_missing;
    const double gain = h_node - cond;
    const std::size_t cells[] = {left.total(), right.total(), missing.total()};
    const double si = split_info(cells, n);
    if (si <= 0.0) continue;
    SplitChoice cand;
    cand.found = true;
    cand.gain = gain;
    cand.ratio = gain / si;
    cand.feature = feature;
    cand.numeric = true;
    cand.threshold = scratch[i].first + (scratch[i + 1].first - scratch[i].first) / 2.0;
    if (cand.better_than(best)) best = cand;
  }
  return best;
}

SplitChoice best_categorical_split(const std::vector<std::int32_t>& column,
                                   std::span<const std::string> names,
                                   std::span<const Label> labels,
                                   std::span<const std::uint32_t> rows, std::size_t feature,
                                   std::vector<ClassCounts>& cell_scratch) {
  SplitChoice best;
  best.feature = feature;

  cell_scratch.assign(names.size(), ClassCounts{});
  ClassCounts node;
  for (std::uint32_t r : rows) {
    cell_scratch[static_cast<std::size_t>(column[r])].add(labels[r]);
    node.add(labels[r]);
  }
  std::size_t non_empty = 0;
  for (const auto& c : cell_scratch) {
    if (c.total() > 0) ++non_empty;
  }
  if (non_empty < 2) return best;

  const double nd = static_cast<double>(rows.size());
  double cond = 0.0;
  std::vector<std::size_t> sizes;
  sizes.reserve(non_empty);
  for (const auto& c : cell_scratch) {
    if (c.total() == 0) continue;
    cond += (static_cast<double>(c.total()) / nd) * c.entropy();
    sizes.push_back(c.total());
  }
  const double gain = node.entropy() - cond;
  const double si = split_info(sizes, rows.size());
  if (si <= 0.0) return best;
  best.found = true;
  best.gain = gain;
  best.ratio = gain / si;
  return best;
}

class TreeBuilder {
 public:
  TreeBuilder(const ColumnSet& data, const TreeParams& params, std::mt19937_64* rng,
              std::size_t feature_subset)
      : data_(data), params_(params), rng_(rng), feature_subset_(feature_subset) {}

  TreeModel build(std::vector<std::uint32_t> rows) {
    TreeModel model;
    model.params = params_;
    nodes_ = &model.nodes;
    nodes_->emplace_back();
    grow(0, std::move(rows));
    nodes_ = nullptr;
    return model;
  }

 private:
  struct Pending {
    std::int32_t node;
    std::vector<std::uint32_t> rows;
  };

  void grow(std::int32_t root, std::vector<std::uint32_t> rows) {
    std::vector<Pending> stack;
    stack.push_back({root, std::move(rows)});
    while (!stack.empty()) {
      Pending p = std::move(stack.back());
      stack.pop_back();
      expand(p.node, p.rows, stack);
    }
  }

  ClassCounts count(std::span<const std::uint32_t> rows) const {
    ClassCounts c;
    for (std::uint32_t r : rows) c.add(data_.labels[r]);
    return c;
  }

  void make_leaf(std::int32_t node, const ClassCounts& counts) {
    auto& n = (*nodes_)[static_cast<std::size_t>(node)];
    n.kind = TreeNode::Kind::leaf;
    // ties go to automatic, in line with the forest vote rule
    n.klass = counts.pos > counts.neg ? Label::user_action : Label::automatic;
    const std::size_t majority = std::max(counts.pos, counts.neg);
    n.probability =
        counts.total() == 0 ? 1.0 : static_cast<double>(majority) / static_cast<double>(counts.total());
  }

  std::int32_t new_node() {
    nodes_->emplace_back();
    return static_cast<std::int32_t>(nodes_->size() - 1);
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t total = kFeatureCount;
    std::vector<std::size_t> all(total);
    std::iota(all.begin(), all.end(), 0);
    if (!rng_ || feature_subset_ >= total) return all;
    // partial Fisher-Yates; sorted afterwards so tie-breaking never depends
    // on draw order
    for (std::size_t i = 0; i < feature_subset_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>((*rng_)() % (total - i));
      std::swap(all[i], all[j]);
    }
    all.resize(feature_subset_);
    std::sort(all.begin(), all.end());
    return all;
  }

  void expand(std::int32_t node, std::vector<std::uint32_t>& rows, std::vector<Pending>& stack) {
    const ClassCounts counts = count(rows);
    if (counts.pos == 0 || counts.neg == 0 || rows.size() < params_.min_leaf) {
      make_leaf(node, counts);
      return;
    }

    SplitChoice best;
    const auto& table = feature_table();
    std::vector<std::pair<double, Label>> num_scratch;
    std::vector<ClassCounts> cat_scratch;
    for (std::size_t f : candidate_features()) {
      SplitChoice cand;
      if (table[f].kind == FeatureKind::numeric) {
        cand = best_numeric_split(data_.numeric[f], data_.labels, rows, f, num_scratch);
      } else {
        cand = best_categorical_split(data_.cats[f], data_.cat_names[f], data_.labels, rows, f,
                                      cat_scratch);
      }
      if (cand.found && cand.gain >= params_.min_gain && cand.better_than(best)) best = cand;
    }
    if (!best.found) {
      make_leaf(node, counts);
      return;
    }

    if (best.numeric) {
      const auto& column = data_.numeric[best.feature];
      std::vector<std::uint32_t> le, gt, absent;
      for (std::uint32_t r : rows) {
        const double v = column[r];
        if (std::isnan(v)) {
          absent.push_back(r);
        } else if (v <= best.threshold) {
          le.push_back(r);
        } else {
          gt.push_back(r);
        }
      }
      rows.clear();
      rows.shrink_to_fit();

      const std::int32_t le_child = new_node();
      const std::int32_t gt_child = new_node();
      const std::int32_t absent_child = new_node();
      auto& n = (*nodes_)[static_cast<std::size_t>(node)];
      n.kind = TreeNode::Kind::numeric_split;
      n.feature = static_cast<std::uint32_t>(best.feature);
      n.threshold = best.threshold;
      n.le_child = le_child;
      n.gt_child = gt_child;
      n.absent_child = absent_child;

      stack.push_back({le_child, std::move(le)});
      stack.push_back({gt_child, std::move(gt)});
      if (absent.empty()) {
        make_leaf(absent_child, counts);  // falls back to the node majority
      } else {
        stack.push_back({absent_child, std::move(absent)});
      }
    } else {
      const auto& column = data_.cats[best.feature];
      std::unordered_map<std::int32_t, std::vector<std::uint32_t>> by_value;
      for (std::uint32_t r : rows) by_value[column[r]].push_back(r);
      rows.clear();
      rows.shrink_to_fit();

      std::vector<std::int32_t> values;
      values.reserve(by_value.size());
      for (const auto& [value, _] : by_value) values.push_back(value);
      std::sort(values.begin(), values.end());

      const std::int32_t default_child = new_node();
      make_leaf(default_child, counts);
      std::vector<std::pair<std::string, std::int32_t>> branches;
      branches.reserve(values.size());
      for (std::int32_t value : values) {
        const std::int32_t child = new_node();
        branches.emplace_back(data_.cat_names[best.feature][static_cast<std::size_t>(value)], child);
        stack.push_back({child, std::move(by_value[value])});
      }
      std::sort(branches.begin(), branches.end());

      auto& n = (*nodes_)[static_cast<std::size_t>(node)];
      n.kind = TreeNode::Kind::categorical_split;
      n.feature = static_cast<std::uint32_t>(best.feature);
      n.branches = std::move(branches);
      n.default_child = default_child;
    }
  }

  const ColumnSet& data_;
  TreeParams params_;
  std::mt19937_64* rng_;
  std::size_t feature_subset_;
  std::vector<TreeNode>* nodes_ = nullptr;
};

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

// single-class input legitimately trains a one-leaf tree, so only emptiness
// is rejected here
void require_nonempty(std::span<const Label> labels) {
  if (labels.empty()) throw std::invalid_argument("training requires at least one example");
}

}  // namespace

double information_gain_categorical(std::span<const std::int32_t> values,
                                    std::span<const Label> labels) {
  if (values.empty()) throw std::invalid_argument("information_gain: empty input");
  if (values.size() != labels.size()) throw std::invalid_argument("information_gain: size mismatch");
  std::unordered_map<std::int32_t, ClassCounts> cells;
  ClassCounts node;
  for (std::size_t i = 0; i < values.size(); ++i) {
    cells[values[i]].add(labels[i]);
    node.add(labels[i]);
  }
  const double nd = static_cast<double>(values.size());
  double cond = 0.0;
  for (const auto& [_, c] : cells) {
    cond += (static_cast<double>(c.total()) / nd) * c.entropy();
  }
  return node.entropy() - cond;
}

double information_gain_numeric(std::span<const double> values, std::span<const Label> labels) {
  if (values.empty()) throw std::invalid_argument("information_gain: empty input");
  if (values.size() != labels.size()) throw std::invalid_argument("information_gain: size mismatch");

  std::vector<std::pair<double, Label>> present;
  ClassCounts missing;
  ClassCounts node;
  for (std::size_t i = 0; i < values.size(); ++i) {
    node.add(labels[i]);
    if (std::isnan(values[i])) {
      missing.add(labels[i]);
    } else {
      present.emplace_back(values[i], labels[i]);
    }
  }
  if (present.size() < 2) return 0.0;
  std::sort(present.begin(), present.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  ClassCounts totals;
  for (const auto& [_, l] : present) totals.add(l);
  const double nd = static_cast<double>(values.size());
  const double h_node = node.entropy();
  const double h_missing = missing.entropy();

  double best = 0.0;
  ClassCounts left;
  for (std::size_t i = 0; i + 1 < present.size(); ++i) {
    left.add(present[i].second);
    if (present[i].first == present[i + 1].first) continue;
    ClassCounts right;
    right.pos = totals.pos - left.pos;
    right.neg = totals.neg - left.neg;
    const double cond = (static_cast<double>(left.total()) / nd) * left.entropy() +
                        (static_cast<double>(right.total()) / nd) * right.entropy() +
                        (static_cast<double>(missing.total()) / nd) * h_missing;
    best = std::max(best, h_node - cond);
  }
  return best;
}

double information_gain(std::span<const FeatureVector> examples, std::size_t feature) {
  if (examples.empty()) throw std::invalid_argument("information_gain: empty input");
  if (feature >= kFeatureCount) throw std::invalid_argument("information_gain: bad feature index");
  std::vector<Label> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) {
    if (!e.label) throw std::invalid_argument("information_gain: unlabeled example");
    labels.push_back(*e.label);
  }
  if (feature_table()[feature].kind == FeatureKind::numeric) {
    std::vector<double> values;
    values.reserve(examples.size());
    for (const auto& e : examples) {
      const auto v = numeric_feature(e, feature);
      values.push_back(v ? *v : kNan);
    }
    return information_gain_numeric(values, labels);
  }
  std::vector<std::int32_t> values;
  values.reserve(examples.size());
  std::unordered_map<std::string, std::int32_t> intern;
  for (const auto& e : examples) {
    const std::string s(categorical_feature(e, feature));
    auto [it, _] = intern.try_emplace(s, static_cast<std::int32_t>(intern.size()));
    values.push_back(it->second);
  }
  return information_gain_categorical(values, labels);
}

std::vector<std::pair<std::size_t, double>> information_gain_ranking(
    std::span<const FeatureVector> examples) {
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(kFeatureCount);
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    out.emplace_back(f, information_gain(examples, f));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

TreeModel train_tree(std::span<const FeatureVector> examples, const TreeParams& params) {
  ColumnSet data(examples);
  require_nonempty(data.labels);
  TreeBuilder builder(data, params, nullptr, kFeatureCount);
  return builder.build(all_rows(examples.size()));
}

ForestModel train_forest(std::span<const FeatureVector> examples, const ForestParams& params,
                         unsigned jobs) {
  if (params.n_trees == 0) throw std::invalid_argument("train_forest: n_trees must be >= 1");
  ColumnSet data(examples);
  require_nonempty(data.labels);

  std::size_t subset = params.feature_subset_size;
  if (subset == 0) subset = static_cast<std::size_t>(std::sqrt(static_cast<double>(kFeatureCount)));
  subset = std::min<std::size_t>(std::max<std::size_t>(subset, 1), kFeatureCount);

  ForestModel model;
  model.params = params;
  model.params.feature_subset_size = subset;
  model.trees.resize(params.n_trees);

  const std::size_t n = examples.size();
  parallel_for(params.n_trees, jobs, [&](std::size_t t) {
    std::uint64_t state = params.seed + 0x6a09e667f3bcc908ull * (t + 1);
    std::mt19937_64 rng(splitmix64(state));
    std::vector<std::uint32_t> rows;
    if (params.bootstrap) {
      rows.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        rows.push_back(static_cast<std::uint32_t>(rng() % n));
      }
      std::sort(rows.begin(), rows.end());
    } else {
      rows = all_rows(n);
    }
    TreeBuilder builder(data, params.tree, &rng, subset);
    model.trees[t] = builder.build(std::move(rows));
  });
  return model;
}

Prediction predict(const TreeModel& model, const FeatureVector& v) {
  if (model.nodes.empty()) throw std::invalid_argument("predict: empty model");
  std::int32_t at = 0;
  while (true) {
    const TreeNode& n = model.nodes[static_cast<std::size_t>(at)];
    switch (n.kind) {
      case TreeNode::Kind::leaf:
        return {n.klass, n.probability};
      case TreeNode::Kind::numeric_split: {
        const auto x = numeric_feature(v, n.feature);
        if (!x) {
          at = n.absent_child;
        } else {
          at = *x <= n.threshold ? n.le_child : n.gt_child;
        }
        break;
      }
      case TreeNode::Kind::categorical_split: {
        const std::string_view s = categorical_feature(v, n.feature);
        const auto it = std::lower_bound(
            n.branches.begin(), n.branches.end(), s,
            [](const auto& branch, std::string_view key) { return branch.first < key; });
        at = (it != n.branches.end() && it->first == s) ? it->second : n.default_child;
        break;
      }
    }
  }
}

Prediction predict(const ForestModel& model, const FeatureVector& v) {
  if (model.trees.empty()) throw std::invalid_argument("predict: empty forest");
  std::size_t votes_pos = 0;
  for (const auto& tree : model.trees) {
    if (predict(tree, v).label == Label::user_action) ++votes_pos;
  }
  const std::size_t votes_neg = model.trees.size() - votes_pos;
  const Label label = votes_pos > votes_neg ? Label::user_action : Label::automatic;
  const std::size_t majority = std::max(votes_pos, votes_neg);
  return {label, static_cast<double>(majority) / static_cast<double>(model.trees.size())};
}

Prediction predict(const Model& model, const FeatureVector& v) {
  return std::visit([&](const auto& m) { return predict(m, v); }, model);
}

EvalReport compute_metrics(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("compute_metrics: length mismatch");
  }
  if (predictions.empty()) throw std::invalid_argument("compute_metrics: empty input");
  EvalReport r;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i] == Label::user_action;
    const bool true_pos = truths[i] == Label::user_action;
    if (pred_pos && true_pos) ++r.tp;
    else if (pred_pos && !true_pos) ++r.fp;
    else if (!pred_pos && true_pos) ++r.fn;
    else ++r.tn;
  }
  const auto n = static_cast<double>(predictions.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / n;
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  if (r.precision && r.recall && (*r.precision + *r.recall) > 0) {
    r.f_measure = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  }
  return r;
}

Model train_model(std::span<const FeatureVector> examples, const TrainConfig& config,
                  unsigned jobs) {
  if (config.use_forest) return train_forest(examples, config.forest, jobs);
  return train_tree(examples, config.tree);
}

EvalReport cross_validate(std::span<const FeatureVector> examples, const TrainConfig& config,
                          std::size_t k, std::uint64_t seed, unsigned jobs) {
  if (k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
  std::vector<std::size_t> pos_rows;
  std::vector<std::size_t> neg_rows;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!examples[i].label) throw std::invalid_argument("cross_validate: unlabeled example");
    (*examples[i].label == Label::user_action ? pos_rows : neg_rows).push_back(i);
  }
  if (pos_rows.size() < k || neg_rows.size() < k) {
    throw std::invalid_argument("cross_validate: every class needs at least k examples");
  }

  std::mt19937_64 rng(seed);
  std::shuffle(pos_rows.begin(), pos_rows.end(), rng);
  std::shuffle(neg_rows.begin(), neg_rows.end(), rng);

  std::vector<std::size_t> fold_of(examples.size());
  for (std::size_t i = 0; i < pos_rows.size(); ++i) fold_of[pos_rows[i]] = i % k;
  for (std::size_t i = 0; i < neg_rows.size(); ++i) fold_of[neg_rows[i]] = i % k;

  std::vector<Label> pooled(examples.size());
  std::vector<Label> truths(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) truths[i] = *examples[i].label;

  // a forest parallelizes internally; plain trees parallelize across folds
  const unsigned fold_jobs = config.use_forest ? 1 : jobs;
  const unsigned inner_jobs = config.use_forest ? jobs : 1;
  parallel_for(k, fold_jobs, [&](std::size_t fold) {
    std::vector<FeatureVector> train_set;
    std::vector<std::size_t> test_rows;
    train_set.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (fold_of[i] == fold) {
        test_rows.push_back(i);
      } else {
        train_set.push_back(examples[i]);
      }
    }
    const Model model = train_model(train_set, config, inner_jobs);
    for (std::size_t i : test_rows) pooled[i] = predict(model, examples[i]).label;
  });

  return compute_metrics(pooled, truths);
}

std::vector<LearningPoint> learning_curve(const std::vector<std::vector<FeatureVector>>& groups,
                                          const TrainConfig& config, std::size_t k,
                                          std::uint64_t seed, unsigned jobs) {
  if (groups.size() < 2) throw std::invalid_argument("learning_curve: need at least 2 groups");
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<LearningPoint> out;
  for (std::size_t n = 1; n < groups.size(); ++n) {
    std::vector<FeatureVector> train_pool;
    for (std::size_t g = 0; g < n; ++g) {
      const auto& group = groups[order[g]];
      train_pool.insert(train_pool.end(), group.begin(), group.end());
    }
    std::vector<FeatureVector> holdout_pool;
    for (std::size_t g = n; g < groups.size(); ++g) {
      const auto& group = groups[order[g]];
      holdout_pool.insert(holdout_pool.end(), group.begin(), group.end());
    }

    LearningPoint point;
    point.n_groups = n;
    point.cv = cross_validate(train_pool, config, k, seed, jobs);
    const Model model = train_model(train_pool, config, jobs);
    std::vector<Label> predictions;
    std::vector<Label> truths;
    predictions.reserve(holdout_pool.size());
    for (const auto& e : holdout_pool) {
      if (!e.label) throw std::invalid_argument("learning_curve: unlabeled example");
      predictions.push_back(predict(model, e).label);
      truths.push_back(*e.label);
    }
    point.holdout = compute_metrics(predictions, truths);
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace cstream
