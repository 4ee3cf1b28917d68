#ifndef FOODQUIZ_ENGINE_HPP_
#define FOODQUIZ_ENGINE_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "foodquiz/common.hpp"
#include "foodquiz/forest.hpp"
#include "foodquiz/quizkit.hpp"

namespace foodquiz {

/// Codes: invalid_spec, unknown_question, already_answered, invalid_choice,
/// incomplete.
class EngineError : public Error {
 public:
  EngineError(std::string code, const std::string& message)
      : Error(ErrorKind::validation, std::move(code), message) {}
};

enum class SessionStatus { in_progress, complete };

struct AnswerEvent {
  std::string question_id;
  int choice_index = 0;
  std::int64_t timestamp = 0;
  bool operator==(const AnswerEvent&) const = default;
};

struct Session {
  std::string id;
  std::string quiz_fingerprint;
  std::vector<AnswerEvent> transcript;
  /// Keyed by feature, so one answer resolves that feature in every tree.
  BinRow answers;
  SessionStatus status = SessionStatus::in_progress;
  std::optional<Vote> prediction;
  /// Leaf label per tree; filled once complete.
  std::vector<bool> tree_labels;

  bool complete() const { return status == SessionStatus::complete; }
  bool operator==(const Session&) const = default;
};

/// Drives sessions over one validated quiz. Immutable after construction
/// and safe to share between threads; each Session must be used serially.
class QuizEngine {
 public:
  /// Throws EngineError("invalid_spec") unless validate_quiz passes.
  explicit QuizEngine(QuizSpec spec);

  const QuizSpec& spec() const { return spec_; }
  const std::string& fingerprint() const { return fingerprint_; }

  Session start_session(std::string session_id) const;

  /// Trees are scanned in index order; within a tree the answered
  /// predicates are followed from the root and the first node with an
  /// unanswered feature yields its question. nullptr once every tree has
  /// reached a leaf.
  const Question* next_question(const Session& session) const;

  /// Records `choice_index` for the question. Rejects unknown questions,
  /// repeated features and choices outside the question's list, leaving
  /// the session untouched.
  void answer(Session& session, const std::string& question_id, int choice_index,
              std::int64_t timestamp) const;

  /// Throws EngineError("incomplete") while the session is in progress.
  Vote predict_session(const Session& session) const;

  /// Number of internal nodes visited per tree under the current answers.
  std::vector<int> path_lengths(const Session& session) const;

  /// Applies a recorded transcript to a fresh session.
  Session replay(std::string session_id, const std::vector<AnswerEvent>& transcript) const;

 private:
  struct Walk {
    bool at_leaf = false;
    int node = 0;
    int depth = 0;
  };
  Walk walk(std::size_t tree, const BinRow& answers) const;
  void refresh(Session& session) const;

  QuizSpec spec_;
  std::string fingerprint_;
  /// Per tree, per node: index into spec_.questions (-1 for leaves).
  std::vector<std::vector<int>> node_question_;
};

/// 128 random bits from std::random_device, hex encoded.
std::string random_session_id();
/// Deterministic id for simulations.
std::string seeded_session_id(std::uint64_t seed);

/// Probability of each choice index for a question.
using AnswerPolicy = std::function<std::array<double, 3>(const Question&)>;

/// "uniform", "never" (always choice 0), "sometimes" (1), "often" (2).
AnswerPolicy named_policy(const std::string& name);

/// Loops next_question/answer until done. Timestamps are the step index,
/// the session id is derived from the seed; equal seeds give equal sessions.
Session simulate_session(const QuizEngine& engine, const AnswerPolicy& policy,
                         std::uint64_t seed);

json to_json(const Session& session);
Session session_from_json(const json& doc);

}  // namespace foodquiz

#endif  // FOODQUIZ_ENGINE_HPP_
