#ifndef FOODQUIZ_QUIZKIT_HPP_
#define FOODQUIZ_QUIZKIT_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "foodquiz/common.hpp"
#include "foodquiz/features.hpp"
#include "foodquiz/forest.hpp"

namespace foodquiz {

struct Choice {
  std::string label;
  int bin = 0;
  bool operator==(const Choice&) const = default;
};

enum class QuestionSource { auto_draft, human_edited };

struct Question {
  std::string id;
  FeatureId feature;
  std::string text;
  std::vector<Choice> choices;
  QuestionSource source = QuestionSource::auto_draft;
  bool needs_review = false;
  std::optional<std::string> image;

  bool operator==(const Question&) const = default;
};

/// Question ids hash the feature, never the text, so edited wording keeps
/// tree references intact.
std::string question_id_for(const FeatureId& feature);

struct QuizNode {
  std::string question_id;  // empty for leaves
  int threshold = 0;
  int no = -1;
  int yes = -1;
  bool label = false;

  bool is_leaf() const { return no < 0; }
  bool operator==(const QuizNode&) const = default;
};

struct QuizTree {
  std::vector<QuizNode> nodes;  // preorder, nodes[0] is the root
  bool operator==(const QuizTree&) const = default;
};

struct QuizSpec {
  std::vector<Question> questions;
  std::vector<QuizTree> trees;
  std::string forest_fingerprint;

  const Question* find(const std::string& question_id) const;
  const Question* find(const FeatureId& feature) const;
  /// Hash of the serialized spec; sessions record it.
  std::string fingerprint() const;
  bool operator==(const QuizSpec&) const = default;
};

json to_json(const QuizSpec& spec);
QuizSpec quiz_from_json(const json& doc);

struct QuestionPattern {
  std::string text;
  std::vector<std::string> choices;
};

/// Drafting rules. A food word X gets the frequency pattern; other words
/// and hashtags get the proportion-of-meals pattern with a description
/// (from `descriptions` or the generic `word_description`); topics use the
/// proportion pattern with their top tokens.
struct TemplateBank {
  QuestionPattern food{"How often do you eat {X}?", {"Practically never", "Sometimes", "Often"}};
  QuestionPattern proportion{"What proportion of your meals {desc}?",
                             {"None or very little", "About half", "Most or all"}};
  std::string word_description = "mention {X}";
  std::string topic_description = "include foods like {X}";
  std::set<FeatureKind> draftable_kinds{FeatureKind::word, FeatureKind::hashtag,
                                        FeatureKind::topic};
  std::set<std::string> food_words;
  /// Keyed by feature id text, e.g. "word:supper".
  std::map<std::string, std::string> descriptions;
  /// Keyed by bare word (no '#').
  std::map<std::string, std::string> images;
};

TemplateBank template_bank_from_json(const json& doc);
json to_json(const TemplateBank& bank);

struct QuestionOverride {
  std::string text;
  std::optional<std::vector<std::string>> choices;
  std::optional<std::string> image;
};

using OverrideMap = std::map<FeatureId, QuestionOverride>;

OverrideMap overrides_from_json(const json& doc);

struct PredicateInventory {
  std::set<std::pair<FeatureId, int>> predicates;
  /// Distinct features in first-use order (tree order, then preorder).
  std::vector<FeatureId> features;
  int internal_nodes = 0;
};

PredicateInventory extract_predicates(const Forest& forest);

struct CompileResult {
  QuizSpec spec;
  /// Question ids drafted automatically with generic wording.
  std::vector<std::string> needs_review;
  int overridden = 0;
  int drafted = 0;
};

/// One question per distinct feature: an override when present, else a
/// draft from the bank. `space` supplies topic descriptions. Throws a
/// validation error listing every feature that can be neither drafted nor
/// found in the overrides.
CompileResult compile_quiz(const Forest& forest, const TemplateBank& bank,
                           const OverrideMap& overrides, const FeatureSpace* space = nullptr);

json to_json(const CompileResult& result);

struct CoverageReport {
  bool pass = true;
  std::vector<std::string> failures;
  int questions = 0;
  int internal_nodes = 0;
};

/// Structural checks; with `forest`, also checks the fingerprint and that
/// the trees mirror the forest node for node. Never throws on content.
CoverageReport validate_quiz(const QuizSpec& spec, const Forest* forest = nullptr);

json to_json(const CoverageReport& report);

}  // namespace foodquiz

#endif  // FOODQUIZ_QUIZKIT_HPP_
