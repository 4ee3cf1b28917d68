#ifndef FOODQUIZ_TESTS_FIXTURES_HPP_
#define FOODQUIZ_TESTS_FIXTURES_HPP_

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "foodquiz/forest.hpp"
#include "foodquiz/quizkit.hpp"

namespace fixtures {

using namespace foodquiz;

inline const FeatureId kFruit{FeatureKind::word, "fruit"};
inline const FeatureId kCook{FeatureKind::hashtag, "#cook"};
inline const FeatureId kCurry{FeatureKind::word, "curry"};
inline const FeatureId kBrunch{FeatureKind::word, "brunch"};

inline TreeNode split(int feature, int t, int no, int yes) {
  TreeNode n;
  n.feature = feature;
  n.threshold = t;
  n.no = no;
  n.yes = yes;
  return n;
}

inline TreeNode leaf(bool label) {
  TreeNode n;
  n.label = label;
  n.counts = label ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 0};
  return n;
}

// fruit > 1
//   no:  #cook > 0
//          no:  overweight
//          yes: curry > 1 (no: not overweight, yes: overweight)
//   yes: brunch > 1 (no: not overweight, yes: overweight)
inline Tree figure2_tree() {
  Tree t;
  t.nodes = {split(0, 1, 1, 6), split(1, 0, 2, 3), leaf(true),  split(2, 1, 4, 5), leaf(false),
             leaf(true),        split(3, 1, 7, 8), leaf(false), leaf(true)};
  return t;
}

inline Forest figure2_forest() {
  Forest f;
  f.params.n_trees = 1;
  f.features = {kFruit, kCook, kCurry, kBrunch};
  f.trees = {figure2_tree()};
  f.fingerprint = "figure2";
  return f;
}

inline TemplateBank figure2_bank() {
  TemplateBank bank;
  bank.food_words = {"fruit", "curry"};
  bank.descriptions = {{"word:brunch", "are brunch"}};
  return bank;
}

inline OverrideMap figure2_overrides() {
  OverrideMap o;
  o[kCook] = QuestionOverride{"What proportion of your meals are home cooked?", {}, {}};
  return o;
}

inline QuizSpec figure2_quiz() {
  return compile_quiz(figure2_forest(), figure2_bank(), figure2_overrides()).spec;
}

// Random tree over `n_features` features, depth <= max_depth.
inline void grow_random(Tree& tree, std::mt19937_64& rng, int depth, int max_depth,
                        int n_features) {
  std::bernoulli_distribution internal(depth == 0 ? 0.95 : 0.75);
  if (depth >= max_depth || !internal(rng)) {
    tree.nodes.push_back(leaf(std::bernoulli_distribution(0.5)(rng)));
    return;
  }
  int self = static_cast<int>(tree.nodes.size());
  int feature = std::uniform_int_distribution<int>(0, n_features - 1)(rng);
  int t = std::uniform_int_distribution<int>(0, 1)(rng);
  tree.nodes.push_back(split(feature, t, -1, -1));
  tree.nodes[self].no = static_cast<int>(tree.nodes.size());
  grow_random(tree, rng, depth + 1, max_depth, n_features);
  tree.nodes[self].yes = static_cast<int>(tree.nodes.size());
  grow_random(tree, rng, depth + 1, max_depth, n_features);
}

// Forest of `n_trees` random trees drawing on a pool of word and hashtag
// features; the feature table is renumbered to first-use order.
inline Forest random_forest(std::uint64_t seed, int n_trees = 7, int max_depth = 3,
                            int pool = 20) {
  std::mt19937_64 rng(seed);
  Forest f;
  f.params.n_trees = n_trees;
  f.params.max_depth = max_depth;
  f.params.seed = seed;
  std::vector<FeatureId> pool_ids;
  for (int i = 0; i < pool; ++i) {
    pool_ids.push_back(i % 3 == 0 ? FeatureId{FeatureKind::hashtag, "#tag" + std::to_string(i)}
                                  : FeatureId{FeatureKind::word, "food" + std::to_string(i)});
  }
  std::map<int, int> renumber;
  for (int t = 0; t < n_trees; ++t) {
    Tree tree;
    grow_random(tree, rng, 0, max_depth, pool);
    for (auto& n : tree.nodes) {
      if (n.is_leaf()) continue;
      auto [it, added] = renumber.emplace(n.feature, static_cast<int>(f.features.size()));
      if (added) f.features.push_back(pool_ids[n.feature]);
      n.feature = it->second;
    }
    f.trees.push_back(std::move(tree));
  }
  f.fingerprint = "random-" + std::to_string(seed);
  return f;
}

inline TemplateBank random_bank() {
  TemplateBank bank;
  for (int i = 0; i < 40; ++i) bank.food_words.insert("food" + std::to_string(i));
  return bank;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "foodquiz-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures

#endif  // FOODQUIZ_TESTS_FIXTURES_HPP_
