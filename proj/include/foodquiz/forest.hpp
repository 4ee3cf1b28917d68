#ifndef FOODQUIZ_FOREST_HPP_
#define FOODQUIZ_FOREST_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "foodquiz/common.hpp"
#include "foodquiz/corpus.hpp"
#include "foodquiz/features.hpp"

namespace foodquiz {

enum class SplitCriterion { gini, info_gain };

std::string to_string(SplitCriterion c);
SplitCriterion parse_split_criterion(const std::string& s);

struct ForestParams {
  int n_trees = 7;
  int max_depth = 3;
  /// Candidate features per split; 0 means ceil(sqrt(feature count)).
  int feature_subsample = 0;
  bool bootstrap = true;
  std::uint64_t seed = 1;
  SplitCriterion criterion = SplitCriterion::gini;

  bool operator==(const ForestParams&) const = default;
};

json to_json(const ForestParams& p);
ForestParams forest_params_from_json(const json& doc);

/// Internal nodes test `bin(feature) > threshold`; `no` is taken when the
/// predicate is false, `yes` when true. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;  // index into Forest::features
  int threshold = 0;
  int no = -1;
  int yes = -1;
  bool label = false;
  std::array<int, 2> counts{};  // training samples reaching the node: {false, true}

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Nodes in preorder; nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  int depth() const;
  int internal_count() const;
  bool operator==(const Tree&) const = default;
};

struct Forest {
  ForestParams params;
  /// Features referenced by the trees, in first-use order.
  std::vector<FeatureId> features;
  std::vector<Tree> trees;
  /// Hash of the training matrix and labels.
  std::string fingerprint;
  std::vector<std::string> warnings;
};

struct Vote {
  bool label = false;
  int votes_true = 0;
  int votes_total = 0;
  bool tie = false;

  bool operator==(const Vote&) const = default;
};

/// Majority vote; an even split predicts false and is flagged as a tie.
Vote tally_votes(int votes_true, int votes_total);

/// Dense training view: bins row-major, labels as 0/1.
struct TrainingSet {
  std::vector<FeatureId> features;
  std::vector<std::string> rows;
  std::vector<std::uint8_t> bins;
  std::vector<std::uint8_t> labels;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return features.size(); }
  int bin(std::size_t r, std::size_t c) const { return bins[r * n_cols() + c]; }
  BinRow row(std::size_t r) const;
};

TrainingSet make_training_set(const BinnedMatrix& matrix, const CommunityLabels& labels);

/// Parent impurity minus the size-weighted child impurity for the split
/// `bin > t`. An empty side contributes nothing.
double split_gain(std::span<const std::uint8_t> bins, std::span<const std::uint8_t> labels,
                  int t, SplitCriterion criterion);

Forest train_forest(const TrainingSet& data, const ForestParams& params);
Forest train_forest(const TrainingSet& data, const ForestParams& params,
                    std::span<const std::size_t> rows);
Forest train_forest(const BinnedMatrix& matrix, const CommunityLabels& labels,
                    const ForestParams& params);

/// Leaf label reached by one tree.
bool tree_label(const Forest& forest, std::size_t tree, const BinRow& row);
Vote predict(const Forest& forest, const BinRow& row);

struct LoocvFold {
  std::string community;
  bool truth = false;
  bool predicted = false;
  int votes_true = 0;
};

struct LoocvReport {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::vector<LoocvFold> folds;
};

/// Leave-one-out: fold i trains on every other row with seed
/// mix_seed(params.seed, i) and predicts row i.
LoocvReport loocv(const TrainingSet& data, const ForestParams& params);
LoocvReport loocv(const BinnedMatrix& matrix, const CommunityLabels& labels,
                  const ForestParams& params);

double majority_baseline(std::span<const std::uint8_t> labels);
double majority_baseline(const CommunityLabels& labels);

json to_json(const Forest& forest);
Forest forest_from_json(const json& doc);
json to_json(const LoocvReport& report);

}  // namespace foodquiz

#endif  // FOODQUIZ_FOREST_HPP_
