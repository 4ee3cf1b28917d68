#ifndef FOODQUIZ_SESSION_STORE_HPP_
#define FOODQUIZ_SESSION_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "foodquiz/common.hpp"
#include "foodquiz/engine.hpp"
#include "foodquiz/stats.hpp"

namespace foodquiz {

/// Append-only JSONL file. Each event is written with a single write(2)
/// on an O_APPEND descriptor and synced before append() returns.
class EventLog {
 public:
  explicit EventLog(const std::filesystem::path& path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append(const json& event);
  const std::filesystem::path& path() const { return path_; }

  /// Complete lines only; a torn final line is ignored.
  static std::vector<json> read_all(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mu_;
};

/// Demographics as submitted; imperial units are pounds and inches.
struct DemographicsInput {
  std::optional<double> height;
  std::optional<double> weight;
  bool imperial = false;
  std::optional<double> age;
  std::optional<std::string> gender;
  std::optional<std::string> location;
  std::map<std::string, std::string> handles;  // raw, hashed on intake
  std::optional<std::string> comment;
};

DemographicsInput demographics_from_json(const json& body);

struct DemographicsResult {
  std::optional<double> bmi;
  std::optional<bool> agreed;
};

/// Codes: not_found, already_submitted, plus EngineError codes.
class StoreError : public Error {
 public:
  StoreError(std::string code, const std::string& message)
      : Error(ErrorKind::validation, std::move(code), message) {}
};

using Clock = std::function<std::int64_t()>;
std::int64_t wall_clock_ms();

/// Sessions of one quiz, persisted to `<data_dir>/events.jsonl`. The log is
/// replayed on construction. Operations on one session id are serialized;
/// different sessions proceed concurrently.
class SessionStore {
 public:
  SessionStore(const QuizEngine& engine, const std::filesystem::path& data_dir,
               std::string salt, double cutoff = kDefaultBmiCutoff, Clock clock = wall_clock_ms);

  /// New id from `id` when given, else random.
  std::string create_session(std::optional<std::string> id = std::nullopt);
  Session snapshot(const std::string& id) const;
  const Question* next_question(const std::string& id) const;
  Session answer(const std::string& id, const std::string& question_id, int choice_index);
  Vote result(const std::string& id) const;
  DemographicsResult submit_demographics(const std::string& id, const DemographicsInput& input);

  /// Records of completed sessions, ordered by session id.
  std::vector<RespondentRecord> completed_records() const;
  /// Every session and record, ordered by id; equal stores give equal json.
  json state() const;
  std::size_t size() const;
  std::size_t replayed_events() const { return replayed_; }
  const QuizEngine& engine() const { return engine_; }
  double cutoff() const { return cutoff_; }

 private:
  struct Entry {
    mutable std::mutex mu;
    Session session;
    std::optional<RespondentRecord> record;
  };

  Entry& find(const std::string& id) const;
  void apply(const json& event);
  RespondentRecord build_record(const Session& session, const DemographicsInput& input) const;

  const QuizEngine& engine_;
  std::string salt_;
  double cutoff_;
  Clock clock_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::unique_ptr<EventLog> log_;
  std::size_t replayed_ = 0;
};

}  // namespace foodquiz

#endif  // FOODQUIZ_SESSION_STORE_HPP_
