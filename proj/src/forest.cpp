#include "foodquiz/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace foodquiz {

std::string to_string(SplitCriterion c) {
  return c == SplitCriterion::gini ? "gini" : "info_gain";
}

SplitCriterion parse_split_criterion(const std::string& s) {
  if (s == "gini") return SplitCriterion::gini;
  if (s == "info_gain") return SplitCriterion::info_gain;
  throw validation_error("bad_criterion", "unknown split criterion '" + s + "'");
}

json to_json(const ForestParams& p) {
  return {{"n_trees", p.n_trees},
          {"max_depth", p.max_depth},
          {"feature_subsample", p.feature_subsample},
          {"bootstrap", p.bootstrap},
          {"seed", p.seed},
          {"split_criterion", to_string(p.criterion)}};
}

ForestParams forest_params_from_json(const json& doc) {
  ForestParams p;
  p.n_trees = doc.at("n_trees").get<int>();
  p.max_depth = doc.at("max_depth").get<int>();
  p.feature_subsample = doc.at("feature_subsample").get<int>();
  p.bootstrap = doc.at("bootstrap").get<bool>();
  p.seed = doc.at("seed").get<std::uint64_t>();
  p.criterion = parse_split_criterion(doc.at("split_criterion").get<std::string>());
  return p;
}

namespace {

int node_depth(const Tree& tree, int idx) {
  const TreeNode& n = tree.nodes[idx];
  if (n.is_leaf()) return 0;
  return 1 + std::max(node_depth(tree, n.no), node_depth(tree, n.yes));
}

double impurity(double n_false, double n_true, SplitCriterion criterion) {
  double n = n_false + n_true;
  if (n == 0) return 0.0;
  double p = n_true / n, q = n_false / n;
  if (criterion == SplitCriterion::gini) return 1.0 - p * p - q * q;
  double h = 0.0;
  if (p > 0) h -= p * std::log2(p);
  if (q > 0) h -= q * std::log2(q);
  return h;
}

// Gain from class counts on both sides of a split.
double gain_from_counts(const std::array<long, 2>& left, const std::array<long, 2>& right,
                        SplitCriterion criterion) {
  double nl = static_cast<double>(left[0] + left[1]);
  double nr = static_cast<double>(right[0] + right[1]);
  double n = nl + nr;
  if (n == 0) return 0.0;
  double parent = impurity(left[0] + right[0], left[1] + right[1], criterion);
  double children = nl / n * impurity(left[0], left[1], criterion) +
                    nr / n * impurity(right[0], right[1], criterion);
  return std::max(0.0, parent - children);
}

constexpr double kGainEpsilon = 1e-12;

class TreeGrower {
 public:
  TreeGrower(const TrainingSet& data, const ForestParams& params, std::uint64_t seed)
      : data_(data), params_(params), rng_(seed) {
    std::size_t f = data.n_cols();
    candidates_ = params.feature_subsample > 0
                      ? std::min<std::size_t>(params.feature_subsample, f)
                      : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(f))));
    candidates_ = std::max<std::size_t>(1, std::min(candidates_, f));
    pool_.resize(f);
  }

  Tree grow(std::vector<std::size_t> samples) {
    Tree tree;
    grow_node(tree, samples, 0);
    return tree;
  }

 private:
  int grow_node(Tree& tree, const std::vector<std::size_t>& samples, int depth) {
    int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode node;
    for (auto s : samples) ++node.counts[data_.labels[s]];
    node.label = node.counts[1] > node.counts[0];

    bool pure = node.counts[0] == 0 || node.counts[1] == 0;
    if (depth >= params_.max_depth || pure || samples.size() < 2 || data_.n_cols() == 0) {
      tree.nodes[idx] = node;
      return idx;
    }

    std::iota(pool_.begin(), pool_.end(), 0);
    for (std::size_t i = 0; i < candidates_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool_.size() - 1);
      std::swap(pool_[i], pool_[pick(rng_)]);
    }
    std::vector<std::size_t> chosen(pool_.begin(), pool_.begin() + candidates_);
    std::sort(chosen.begin(), chosen.end());

    double best_gain = kGainEpsilon;
    int best_feature = -1, best_t = 0;
    for (std::size_t f : chosen) {
      std::array<std::array<long, 2>, 3> per_bin{};
      for (auto s : samples) ++per_bin[data_.bin(s, f)][data_.labels[s]];
      for (int t = 0; t <= 1; ++t) {
        std::array<long, 2> left{}, right{};
        for (int b = 0; b < 3; ++b) {
          auto& side = b > t ? right : left;
          side[0] += per_bin[b][0];
          side[1] += per_bin[b][1];
        }
        double g = gain_from_counts(left, right, params_.criterion);
        if (g > best_gain + kGainEpsilon) {
          best_gain = g;
          best_feature = static_cast<int>(f);
          best_t = t;
        }
      }
    }
    if (best_feature < 0) {
      tree.nodes[idx] = node;
      return idx;
    }

    std::vector<std::size_t> no_side, yes_side;
    for (auto s : samples) {
      (data_.bin(s, best_feature) > best_t ? yes_side : no_side).push_back(s);
    }
    node.feature = best_feature;
    node.threshold = best_t;
    tree.nodes[idx] = node;
    int no = grow_node(tree, no_side, depth + 1);
    int yes = grow_node(tree, yes_side, depth + 1);
    tree.nodes[idx].no = no;
    tree.nodes[idx].yes = yes;
    return idx;
  }

  const TrainingSet& data_;
  const ForestParams& params_;
  std::mt19937_64 rng_;
  std::size_t candidates_ = 1;
  std::vector<std::size_t> pool_;
};

std::string training_fingerprint(const TrainingSet& data, std::span<const std::size_t> rows) {
  std::string buf;
  for (const auto& f : data.features) {
    buf += f.str();
    buf.push_back('\x1f');
  }
  buf.push_back('\x1e');
  for (auto r : rows) {
    buf += data.rows[r];
    buf.push_back('\x1f');
    buf.push_back(static_cast<char>('0' + data.labels[r]));
    for (std::size_t c = 0; c < data.n_cols(); ++c) {
      buf.push_back(static_cast<char>('0' + data.bin(r, c)));
    }
    buf.push_back('\x1e');
  }
  return sha256_hex(buf).substr(0, 16);
}

json node_to_json(const Forest& forest, const Tree& tree, int idx) {
  const TreeNode& n = tree.nodes[idx];
  json out{{"counts", {n.counts[0], n.counts[1]}}};
  if (n.is_leaf()) {
    out["label"] = n.label;
    return out;
  }
  out["feature"] = forest.features[n.feature].str();
  out["threshold"] = n.threshold;
  out["no"] = node_to_json(forest, tree, n.no);
  out["yes"] = node_to_json(forest, tree, n.yes);
  return out;
}

int node_from_json(const json& j, Tree& tree, std::vector<FeatureId>& features,
                   std::map<FeatureId, int>& feature_index) {
  int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  TreeNode node;
  if (j.contains("counts")) {
    node.counts = {j["counts"].at(0).get<int>(), j["counts"].at(1).get<int>()};
  }
  if (!j.contains("feature")) {
    node.label = j.at("label").get<bool>();
    tree.nodes[idx] = node;
    return idx;
  }
  FeatureId f = FeatureId::parse(j.at("feature").get<std::string>());
  auto [it, inserted] = feature_index.emplace(f, static_cast<int>(features.size()));
  if (inserted) features.push_back(f);
  node.feature = it->second;
  node.threshold = j.at("threshold").get<int>();
  if (node.threshold != 0 && node.threshold != 1) {
    throw validation_error("bad_threshold", "node threshold must be 0 or 1");
  }
  tree.nodes[idx] = node;
  int no = node_from_json(j.at("no"), tree, features, feature_index);
  int yes = node_from_json(j.at("yes"), tree, features, feature_index);
  tree.nodes[idx].no = no;
  tree.nodes[idx].yes = yes;
  return idx;
}

}  // namespace

int Tree::depth() const { return nodes.empty() ? 0 : node_depth(*this, 0); }

int Tree::internal_count() const {
  return static_cast<int>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

Vote tally_votes(int votes_true, int votes_total) {
  Vote v;
  v.votes_total = votes_total;
  v.votes_true = votes_true;
  v.tie = 2 * v.votes_true == v.votes_total;
  v.label = 2 * v.votes_true > v.votes_total;
  return v;
}

BinRow TrainingSet::row(std::size_t r) const {
  BinRow out;
  for (std::size_t c = 0; c < n_cols(); ++c) out[features[c]] = bin(r, c);
  return out;
}

TrainingSet make_training_set(const BinnedMatrix& matrix, const CommunityLabels& labels) {
  TrainingSet set;
  set.features = matrix.features;
  set.rows = matrix.communities;
  set.bins = matrix.bins;
  for (const auto& c : matrix.communities) {
    if (!labels.contains(c)) {
      throw validation_error("unlabeled_community", "no label for community " + c);
    }
    set.labels.push_back(labels.label(c) ? 1 : 0);
  }
  return set;
}

double split_gain(std::span<const std::uint8_t> bins, std::span<const std::uint8_t> labels,
                  int t, SplitCriterion criterion) {
  if (t != 0 && t != 1) throw validation_error("bad_threshold", "threshold must be 0 or 1");
  std::array<long, 2> left{}, right{};
  for (std::size_t i = 0; i < bins.size(); ++i) {
    ++(bins[i] > t ? right : left)[labels[i] ? 1 : 0];
  }
  return gain_from_counts(left, right, criterion);
}

Forest train_forest(const TrainingSet& data, const ForestParams& params,
                    std::span<const std::size_t> rows) {
  if (params.n_trees < 1 || params.max_depth < 1) {
    throw validation_error("bad_forest_params", "n_trees and max_depth must be >= 1");
  }
  if (rows.empty()) throw validation_error("too_few_rows", "need at least 1 training row");

  Forest forest;
  forest.params = params;
  forest.fingerprint = training_fingerprint(data, rows);
  long positives = 0;
  for (auto r : rows) positives += data.labels[r];
  if (positives == 0 || positives == static_cast<long>(rows.size())) {
    forest.warnings.push_back("single-class training set; every tree is a single leaf");
  }

  std::vector<Tree> raw_trees;
  for (int t = 0; t < params.n_trees; ++t) {
    std::uint64_t seed = mix_seed(params.seed, static_cast<std::uint64_t>(t));
    std::mt19937_64 sampler(mix_seed(seed, 0xb0075742ULL));
    std::vector<std::size_t> samples(rows.begin(), rows.end());
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
      for (auto& s : samples) s = rows[pick(sampler)];
    }
    TreeGrower grower(data, params, seed);
    raw_trees.push_back(grower.grow(std::move(samples)));
  }

  // Re-index features to the compact first-use table.
  std::map<int, int> remap;
  for (auto& tree : raw_trees) {
    for (auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      auto [it, inserted] = remap.emplace(node.feature, static_cast<int>(forest.features.size()));
      if (inserted) forest.features.push_back(data.features[node.feature]);
      node.feature = it->second;
    }
  }
  forest.trees = std::move(raw_trees);
  return forest;
}

Forest train_forest(const TrainingSet& data, const ForestParams& params) {
  std::vector<std::size_t> rows(data.n_rows());
  std::iota(rows.begin(), rows.end(), 0);
  return train_forest(data, params, rows);
}

Forest train_forest(const BinnedMatrix& matrix, const CommunityLabels& labels,
                    const ForestParams& params) {
  return train_forest(make_training_set(matrix, labels), params);
}

bool tree_label(const Forest& forest, std::size_t tree, const BinRow& row) {
  const Tree& t = forest.trees.at(tree);
  int idx = 0;
  while (!t.nodes[idx].is_leaf()) {
    const TreeNode& n = t.nodes[idx];
    auto it = row.find(forest.features[n.feature]);
    int bin = it == row.end() ? 0 : it->second;
    idx = bin > n.threshold ? n.yes : n.no;
  }
  return t.nodes[idx].label;
}

Vote predict(const Forest& forest, const BinRow& row) {
  int votes_true = 0;
  for (std::size_t t = 0; t < forest.trees.size(); ++t) votes_true += tree_label(forest, t, row);
  return tally_votes(votes_true, static_cast<int>(forest.trees.size()));
}

LoocvReport loocv(const TrainingSet& data, const ForestParams& params) {
  if (data.n_rows() < 2) throw validation_error("too_few_rows", "LOOCV needs at least 2 rows");
  LoocvReport report;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    rows.clear();
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
      if (j != i) rows.push_back(j);
    }
    ForestParams fold = params;
    fold.seed = mix_seed(params.seed, i);
    Forest forest = train_forest(data, fold, rows);
    Vote v = predict(forest, data.row(i));
    LoocvFold f{data.rows[i], data.labels[i] == 1, v.label, v.votes_true};
    if (f.truth == f.predicted) ++report.correct;
    report.folds.push_back(std::move(f));
  }
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(data.n_rows());
  return report;
}

LoocvReport loocv(const BinnedMatrix& matrix, const CommunityLabels& labels,
                  const ForestParams& params) {
  return loocv(make_training_set(matrix, labels), params);
}

double majority_baseline(std::span<const std::uint8_t> labels) {
  if (labels.empty()) return 0.0;
  auto positives = std::count(labels.begin(), labels.end(), 1);
  auto majority = std::max<std::ptrdiff_t>(positives, labels.size() - positives);
  return static_cast<double>(majority) / static_cast<double>(labels.size());
}

double majority_baseline(const CommunityLabels& labels) {
  std::vector<std::uint8_t> v;
  for (const auto& [_, l] : labels.labels) v.push_back(l ? 1 : 0);
  return majority_baseline(v);
}

json to_json(const Forest& forest) {
  json trees = json::array();
  for (const auto& tree : forest.trees) trees.push_back(node_to_json(forest, tree, 0));
  return {{"format", "foodquiz.forest/1"},
          {"params", to_json(forest.params)},
          {"config_fingerprint", sha256_hex(to_json(forest.params).dump()).substr(0, 16)},
          {"training_fingerprint", forest.fingerprint},
          {"trees", std::move(trees)}};
}

Forest forest_from_json(const json& doc) {
  try {
    Forest forest;
    forest.params = forest_params_from_json(doc.at("params"));
    forest.fingerprint = doc.at("training_fingerprint").get<std::string>();
    std::map<FeatureId, int> index;
    for (const auto& t : doc.at("trees")) {
      Tree tree;
      node_from_json(t, tree, forest.features, index);
      forest.trees.push_back(std::move(tree));
    }
    return forest;
  } catch (const json::exception& e) {
    throw validation_error("malformed_forest", e.what());
  }
}

json to_json(const LoocvReport& report) {
  json folds = json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"community", f.community},
                     {"truth", f.truth},
                     {"predicted", f.predicted},
                     {"votes_true", f.votes_true}});
  }
  return {{"accuracy", report.accuracy}, {"correct", report.correct}, {"folds", folds}};
}

}  // namespace foodquiz
