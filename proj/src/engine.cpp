#include "foodquiz/engine.hpp"

#include <algorithm>
#include <random>

namespace foodquiz {

QuizEngine::QuizEngine(QuizSpec spec) : spec_(std::move(spec)) {
  CoverageReport report = validate_quiz(spec_);
  if (!report.pass) {
    throw EngineError("invalid_spec", "quiz fails validation: " + report.failures.front());
  }
  fingerprint_ = spec_.fingerprint();
  for (const auto& tree : spec_.trees) {
    std::vector<int> index;
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        index.push_back(-1);
        continue;
      }
      const Question* q = spec_.find(node.question_id);
      index.push_back(static_cast<int>(q - spec_.questions.data()));
    }
    node_question_.push_back(std::move(index));
  }
}

QuizEngine::Walk QuizEngine::walk(std::size_t tree, const BinRow& answers) const {
  const auto& nodes = spec_.trees[tree].nodes;
  Walk w;
  while (true) {
    const QuizNode& n = nodes[w.node];
    if (n.is_leaf()) {
      w.at_leaf = true;
      return w;
    }
    const Question& q = spec_.questions[node_question_[tree][w.node]];
    auto it = answers.find(q.feature);
    if (it == answers.end()) return w;
    w.node = it->second > n.threshold ? n.yes : n.no;
    ++w.depth;
  }
}

void QuizEngine::refresh(Session& session) const {
  std::vector<bool> labels;
  for (std::size_t t = 0; t < spec_.trees.size(); ++t) {
    Walk w = walk(t, session.answers);
    if (!w.at_leaf) {
      session.status = SessionStatus::in_progress;
      session.prediction.reset();
      session.tree_labels.clear();
      return;
    }
    labels.push_back(spec_.trees[t].nodes[w.node].label);
  }
  int votes_true = static_cast<int>(std::count(labels.begin(), labels.end(), true));
  session.status = SessionStatus::complete;
  session.prediction = tally_votes(votes_true, static_cast<int>(labels.size()));
  session.tree_labels = std::move(labels);
}

Session QuizEngine::start_session(std::string session_id) const {
  Session s;
  s.id = std::move(session_id);
  s.quiz_fingerprint = fingerprint_;
  refresh(s);
  return s;
}

const Question* QuizEngine::next_question(const Session& session) const {
  for (std::size_t t = 0; t < spec_.trees.size(); ++t) {
    Walk w = walk(t, session.answers);
    if (!w.at_leaf) return &spec_.questions[node_question_[t][w.node]];
  }
  return nullptr;
}

void QuizEngine::answer(Session& session, const std::string& question_id, int choice_index,
                        std::int64_t timestamp) const {
  const Question* q = spec_.find(question_id);
  if (!q) throw EngineError("unknown_question", "no question " + question_id);
  if (session.answers.count(q->feature)) {
    throw EngineError("already_answered", "question " + question_id + " already answered");
  }
  if (session.complete()) {
    throw EngineError("session_complete", "session " + session.id + " is complete");
  }
  if (choice_index < 0 || choice_index >= static_cast<int>(q->choices.size())) {
    throw EngineError("invalid_choice", "choice " + std::to_string(choice_index) +
                                            " out of range for " + question_id);
  }
  session.answers[q->feature] = q->choices[choice_index].bin;
  session.transcript.push_back({question_id, choice_index, timestamp});
  refresh(session);
}

Vote QuizEngine::predict_session(const Session& session) const {
  if (!session.complete() || !session.prediction) {
    throw EngineError("incomplete", "session " + session.id + " is still in progress");
  }
  return *session.prediction;
}

std::vector<int> QuizEngine::path_lengths(const Session& session) const {
  std::vector<int> out;
  for (std::size_t t = 0; t < spec_.trees.size(); ++t) out.push_back(walk(t, session.answers).depth);
  return out;
}

Session QuizEngine::replay(std::string session_id,
                           const std::vector<AnswerEvent>& transcript) const {
  Session s = start_session(std::move(session_id));
  for (const auto& e : transcript) answer(s, e.question_id, e.choice_index, e.timestamp);
  return s;
}

std::string random_session_id() {
  std::random_device rd;
  std::uint64_t hi = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  std::uint64_t lo = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

std::string seeded_session_id(std::uint64_t seed) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "sim-%016llx",
                static_cast<unsigned long long>(mix_seed(seed, 0x5e55)));
  return buf;
}

AnswerPolicy named_policy(const std::string& name) {
  if (name == "uniform") {
    return [](const Question&) { return std::array<double, 3>{1.0, 1.0, 1.0}; };
  }
  int fixed = name == "never" ? 0 : name == "sometimes" ? 1 : name == "often" ? 2 : -1;
  if (fixed < 0) {
    throw Error(ErrorKind::usage, "unknown_policy",
                "unknown policy '" + name + "' (uniform|never|sometimes|often)");
  }
  return [fixed](const Question&) {
    std::array<double, 3> p{};
    p[fixed] = 1.0;
    return p;
  };
}

Session simulate_session(const QuizEngine& engine, const AnswerPolicy& policy,
                         std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0xa115));
  Session s = engine.start_session(seeded_session_id(seed));
  std::int64_t step = 0;
  while (const Question* q = engine.next_question(s)) {
    auto p = policy(*q);
    std::discrete_distribution<int> pick(p.begin(), p.end());
    engine.answer(s, q->id, pick(rng), step++);
  }
  return s;
}

json to_json(const Session& session) {
  json transcript = json::array();
  for (const auto& e : session.transcript) {
    transcript.push_back({{"question_id", e.question_id},
                          {"choice_index", e.choice_index},
                          {"timestamp", e.timestamp}});
  }
  json answers = json::object();
  for (const auto& [f, bin] : session.answers) answers[f.str()] = bin;
  json out{{"session_id", session.id},
           {"quiz_fingerprint", session.quiz_fingerprint},
           {"status", session.complete() ? "complete" : "in_progress"},
           {"transcript", std::move(transcript)},
           {"answers", std::move(answers)}};
  if (session.prediction) {
    const Vote& v = *session.prediction;
    out["prediction"] = {{"label", v.label},
                         {"votes_true", v.votes_true},
                         {"votes_total", v.votes_total},
                         {"tie", v.tie},
                         {"tree_labels", session.tree_labels}};
  }
  return out;
}

Session session_from_json(const json& doc) {
  try {
    Session s;
    s.id = doc.at("session_id").get<std::string>();
    s.quiz_fingerprint = doc.at("quiz_fingerprint").get<std::string>();
    s.status = doc.at("status").get<std::string>() == "complete" ? SessionStatus::complete
                                                                 : SessionStatus::in_progress;
    for (const auto& e : doc.at("transcript")) {
      s.transcript.push_back({e.at("question_id").get<std::string>(),
                              e.at("choice_index").get<int>(),
                              e.at("timestamp").get<std::int64_t>()});
    }
    for (const auto& [k, v] : doc.at("answers").items()) s.answers[FeatureId::parse(k)] = v.get<int>();
    if (doc.contains("prediction")) {
      const auto& p = doc["prediction"];
      s.prediction = Vote{p.at("label").get<bool>(), p.at("votes_true").get<int>(),
                          p.at("votes_total").get<int>(), p.value("tie", false)};
      s.tree_labels = p.value("tree_labels", std::vector<bool>{});
    }
    return s;
  } catch (const json::exception& e) {
    throw validation_error("malformed_session", e.what());
  }
}

}  // namespace foodquiz
