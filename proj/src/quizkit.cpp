#include "foodquiz/quizkit.hpp"

#include <algorithm>
#include <sstream>

namespace foodquiz {

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string bare_key(const FeatureId& f) {
  if (f.kind == FeatureKind::hashtag && !f.key.empty() && f.key.front() == '#') {
    return f.key.substr(1);
  }
  return f.key;
}

std::optional<int> topic_index(const FeatureId& f) {
  try {
    std::size_t used = 0;
    int v = std::stoi(f.key, &used);
    if (used == f.key.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::vector<Choice> choices_from(const std::vector<std::string>& labels) {
  std::vector<Choice> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({labels[i], static_cast<int>(i)});
  return out;
}

QuestionPattern pattern_from_json(const json& j) {
  QuestionPattern p{j.at("text").get<std::string>(),
                    j.at("choices").get<std::vector<std::string>>()};
  if (p.choices.size() != 3) {
    throw validation_error("bad_template", "question patterns need exactly 3 choices");
  }
  return p;
}

std::string source_name(QuestionSource s) {
  return s == QuestionSource::auto_draft ? "auto_draft" : "human_edited";
}

json quiz_node_to_json(const QuizTree& tree, int idx) {
  const QuizNode& n = tree.nodes[idx];
  if (n.is_leaf()) return {{"label", n.label}};
  return {{"question", n.question_id},
          {"threshold", n.threshold},
          {"no", quiz_node_to_json(tree, n.no)},
          {"yes", quiz_node_to_json(tree, n.yes)}};
}

int quiz_node_from_json(const json& j, QuizTree& tree) {
  int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  QuizNode node;
  if (!j.contains("question")) {
    node.label = j.at("label").get<bool>();
    tree.nodes[idx] = node;
    return idx;
  }
  node.question_id = j.at("question").get<std::string>();
  node.threshold = j.at("threshold").get<int>();
  tree.nodes[idx] = node;
  int no = quiz_node_from_json(j.at("no"), tree);
  int yes = quiz_node_from_json(j.at("yes"), tree);
  tree.nodes[idx].no = no;
  tree.nodes[idx].yes = yes;
  return idx;
}

QuizTree mirror_tree(const Forest& forest, const Tree& tree) {
  QuizTree out;
  for (const auto& n : tree.nodes) {
    QuizNode q;
    if (n.is_leaf()) {
      q.label = n.label;
    } else {
      q.question_id = question_id_for(forest.features[n.feature]);
      q.threshold = n.threshold;
      q.no = n.no;
      q.yes = n.yes;
    }
    out.nodes.push_back(std::move(q));
  }
  return out;
}

}  // namespace

std::string question_id_for(const FeatureId& feature) {
  return "q_" + sha256_hex(to_string(feature.kind) + '\x1f' + feature.key).substr(0, 12);
}

const Question* QuizSpec::find(const std::string& question_id) const {
  for (const auto& q : questions) {
    if (q.id == question_id) return &q;
  }
  return nullptr;
}

const Question* QuizSpec::find(const FeatureId& feature) const {
  for (const auto& q : questions) {
    if (q.feature == feature) return &q;
  }
  return nullptr;
}

std::string QuizSpec::fingerprint() const {
  return sha256_hex(to_json(*this).dump()).substr(0, 16);
}

json to_json(const QuizSpec& spec) {
  json questions = json::array();
  for (const auto& q : spec.questions) {
    json choices = json::array();
    for (const auto& c : q.choices) choices.push_back({{"label", c.label}, {"bin", c.bin}});
    json jq{{"id", q.id},
            {"feature", q.feature.str()},
            {"text", q.text},
            {"choices", std::move(choices)},
            {"source", source_name(q.source)},
            {"needs_review", q.needs_review}};
    if (q.image) jq["image"] = *q.image;
    questions.push_back(std::move(jq));
  }
  json trees = json::array();
  for (const auto& t : spec.trees) trees.push_back(quiz_node_to_json(t, 0));
  return {{"format", "foodquiz.quiz/1"},
          {"forest_fingerprint", spec.forest_fingerprint},
          {"questions", std::move(questions)},
          {"trees", std::move(trees)}};
}

QuizSpec quiz_from_json(const json& doc) {
  try {
    QuizSpec spec;
    spec.forest_fingerprint = doc.at("forest_fingerprint").get<std::string>();
    for (const auto& jq : doc.at("questions")) {
      Question q;
      q.id = jq.at("id").get<std::string>();
      q.feature = FeatureId::parse(jq.at("feature").get<std::string>());
      q.text = jq.at("text").get<std::string>();
      for (const auto& c : jq.at("choices")) {
        q.choices.push_back({c.at("label").get<std::string>(), c.at("bin").get<int>()});
      }
      q.source = jq.value("source", "auto_draft") == "human_edited" ? QuestionSource::human_edited
                                                                   : QuestionSource::auto_draft;
      q.needs_review = jq.value("needs_review", false);
      if (jq.contains("image")) q.image = jq["image"].get<std::string>();
      spec.questions.push_back(std::move(q));
    }
    for (const auto& jt : doc.at("trees")) {
      QuizTree tree;
      quiz_node_from_json(jt, tree);
      spec.trees.push_back(std::move(tree));
    }
    return spec;
  } catch (const json::exception& e) {
    throw validation_error("malformed_quiz", e.what());
  }
}

TemplateBank template_bank_from_json(const json& doc) {
  try {
    TemplateBank bank;
    if (doc.contains("food")) bank.food = pattern_from_json(doc["food"]);
    if (doc.contains("proportion")) bank.proportion = pattern_from_json(doc["proportion"]);
    bank.word_description = doc.value("word_description", bank.word_description);
    bank.topic_description = doc.value("topic_description", bank.topic_description);
    if (doc.contains("draftable_kinds")) {
      bank.draftable_kinds.clear();
      for (const auto& k : doc["draftable_kinds"]) {
        bank.draftable_kinds.insert(parse_feature_kind(k.get<std::string>()));
      }
    }
    for (const auto& w : doc.value("food_words", json::array())) {
      bank.food_words.insert(to_lower_ascii(w.get<std::string>()));
    }
    bank.descriptions =
        doc.value("descriptions", json::object()).get<std::map<std::string, std::string>>();
    bank.images = doc.value("images", json::object()).get<std::map<std::string, std::string>>();
    return bank;
  } catch (const json::exception& e) {
    throw validation_error("malformed_templates", e.what());
  }
}

json to_json(const TemplateBank& bank) {
  json kinds = json::array();
  for (auto k : bank.draftable_kinds) kinds.push_back(to_string(k));
  return {{"format", "foodquiz.templates/1"},
          {"food", {{"text", bank.food.text}, {"choices", bank.food.choices}}},
          {"proportion", {{"text", bank.proportion.text}, {"choices", bank.proportion.choices}}},
          {"word_description", bank.word_description},
          {"topic_description", bank.topic_description},
          {"draftable_kinds", kinds},
          {"food_words", bank.food_words},
          {"descriptions", bank.descriptions},
          {"images", bank.images}};
}

OverrideMap overrides_from_json(const json& doc) {
  try {
    OverrideMap out;
    for (const auto& o : doc.at("overrides")) {
      QuestionOverride ov;
      ov.text = o.at("text").get<std::string>();
      if (o.contains("choices")) ov.choices = o["choices"].get<std::vector<std::string>>();
      if (o.contains("image")) ov.image = o["image"].get<std::string>();
      FeatureId f = FeatureId::parse(o.at("feature").get<std::string>());
      if (!out.emplace(f, std::move(ov)).second) {
        throw validation_error("duplicate_override", "two overrides for " + f.str());
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw validation_error("malformed_overrides", e.what());
  }
}

PredicateInventory extract_predicates(const Forest& forest) {
  PredicateInventory inv;
  std::set<FeatureId> seen;
  for (const auto& tree : forest.trees) {
    for (const auto& n : tree.nodes) {
      if (n.is_leaf()) continue;
      ++inv.internal_nodes;
      const FeatureId& f = forest.features[n.feature];
      inv.predicates.emplace(f, n.threshold);
      if (seen.insert(f).second) inv.features.push_back(f);
    }
  }
  return inv;
}

CompileResult compile_quiz(const Forest& forest, const TemplateBank& bank,
                           const OverrideMap& overrides, const FeatureSpace* space) {
  CompileResult result;
  result.spec.forest_fingerprint = forest.fingerprint;
  std::vector<std::string> missing;

  for (const auto& f : extract_predicates(forest).features) {
    Question q;
    q.id = question_id_for(f);
    q.feature = f;
    std::string x = bare_key(f);

    if (auto it = overrides.find(f); it != overrides.end()) {
      q.text = it->second.text;
      q.choices = choices_from(it->second.choices.value_or(bank.proportion.choices));
      q.image = it->second.image;
      q.source = QuestionSource::human_edited;
      ++result.overridden;
    } else if (!bank.draftable_kinds.count(f.kind)) {
      missing.push_back(f.str());
      continue;
    } else if (f.kind == FeatureKind::topic) {
      auto index = topic_index(f);
      const TopicSummary* topic = space && index ? space->topic(*index) : nullptr;
      if (!topic || topic->top_tokens.empty()) {
        missing.push_back(f.str());
        continue;
      }
      std::vector<std::string> head(
          topic->top_tokens.begin(),
          topic->top_tokens.begin() + std::min<std::size_t>(3, topic->top_tokens.size()));
      std::ostringstream joined;
      for (std::size_t i = 0; i < head.size(); ++i) joined << (i ? ", " : "") << head[i];
      std::string desc = replace_all(bank.topic_description, "{X}", joined.str());
      q.text = replace_all(bank.proportion.text, "{desc}", desc);
      q.choices = choices_from(bank.proportion.choices);
      q.needs_review = true;
    } else if (bank.food_words.count(to_lower_ascii(x))) {
      q.text = replace_all(bank.food.text, "{X}", x);
      q.choices = choices_from(bank.food.choices);
      if (auto img = bank.images.find(x); img != bank.images.end()) q.image = img->second;
    } else {
      auto d = bank.descriptions.find(f.str());
      std::string desc = d != bank.descriptions.end()
                             ? d->second
                             : replace_all(bank.word_description, "{X}", "\"" + f.key + "\"");
      q.text = replace_all(bank.proportion.text, "{desc}", desc);
      q.choices = choices_from(bank.proportion.choices);
      q.needs_review = d == bank.descriptions.end();
    }
    if (q.source == QuestionSource::auto_draft) ++result.drafted;
    if (q.needs_review) result.needs_review.push_back(q.id);
    result.spec.questions.push_back(std::move(q));
  }

  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw validation_error("uncompilable_features",
                           "no template or override for: " + list);
  }
  for (const auto& tree : forest.trees) result.spec.trees.push_back(mirror_tree(forest, tree));
  return result;
}

json to_json(const CompileResult& result) {
  return {{"questions", result.spec.questions.size()},
          {"drafted", result.drafted},
          {"overridden", result.overridden},
          {"needs_review", result.needs_review}};
}

CoverageReport validate_quiz(const QuizSpec& spec, const Forest* forest) {
  CoverageReport report;
  auto fail = [&](std::string msg) {
    report.pass = false;
    report.failures.push_back(std::move(msg));
  };

  std::map<std::string, int> usage;
  std::set<FeatureId> features;
  for (const auto& q : spec.questions) {
    if (!usage.emplace(q.id, 0).second) fail("duplicate_question_id " + q.id);
    if (!features.insert(q.feature).second) {
      fail("duplicate_feature " + q.feature.str() + " question=" + q.id);
    }
    std::vector<int> bins;
    for (const auto& c : q.choices) bins.push_back(c.bin);
    std::sort(bins.begin(), bins.end());
    if (bins != std::vector<int>{0, 1, 2}) {
      fail("choice_bins_not_bijective question=" + q.id);
    }
  }
  report.questions = static_cast<int>(spec.questions.size());

  for (std::size_t t = 0; t < spec.trees.size(); ++t) {
    const auto& nodes = spec.trees[t].nodes;
    if (nodes.empty()) fail("empty_tree tree=" + std::to_string(t));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const QuizNode& n = nodes[i];
      if (n.is_leaf()) continue;
      ++report.internal_nodes;
      std::string where = " tree=" + std::to_string(t) + " node=" + std::to_string(i);
      if (n.threshold != 0 && n.threshold != 1) fail("bad_threshold" + where);
      auto it = usage.find(n.question_id);
      if (it == usage.end()) {
        fail("orphaned_node" + where + " question=" + n.question_id);
      } else {
        ++it->second;
      }
      auto in_range = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(nodes.size()); };
      if (!in_range(n.no) || !in_range(n.yes)) fail("bad_child_index" + where);
    }
  }
  for (const auto& [id, count] : usage) {
    if (count == 0) fail("unused_question " + id);
  }

  if (forest) {
    if (forest->fingerprint != spec.forest_fingerprint) {
      fail("fingerprint_mismatch quiz=" + spec.forest_fingerprint + " forest=" +
           forest->fingerprint);
    }
    if (forest->trees.size() != spec.trees.size()) {
      fail("tree_count_mismatch");
    } else {
      for (std::size_t t = 0; t < spec.trees.size(); ++t) {
        const auto& ft = forest->trees[t].nodes;
        const auto& qt = spec.trees[t].nodes;
        bool same = ft.size() == qt.size();
        for (std::size_t i = 0; same && i < ft.size(); ++i) {
          if (ft[i].is_leaf() != qt[i].is_leaf()) {
            same = false;
          } else if (ft[i].is_leaf()) {
            same = ft[i].label == qt[i].label;
          } else {
            const Question* q = spec.find(qt[i].question_id);
            same = q && q->feature == forest->features[ft[i].feature] &&
                   ft[i].threshold == qt[i].threshold && ft[i].no == qt[i].no &&
                   ft[i].yes == qt[i].yes;
          }
        }
        if (!same) fail("tree_mismatch tree=" + std::to_string(t));
      }
    }
  }
  return report;
}

json to_json(const CoverageReport& report) {
  return {{"status", report.pass ? "PASS" : "FAIL"},
          {"failures", report.failures},
          {"questions", report.questions},
          {"internal_nodes", report.internal_nodes}};
}

}  // namespace foodquiz
