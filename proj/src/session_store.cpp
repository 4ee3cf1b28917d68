#include "foodquiz/session_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace foodquiz {

EventLog::EventLog(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw io_error("log_open_failed", path.string() + ": " + std::strerror(errno));
  }
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLog::append(const json& event) {
  std::string line = event.dump() + "\n";
  std::lock_guard<std::mutex> lock(mu_);
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw io_error("log_write_failed", path_.string() + ": " + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) {
    throw io_error("log_sync_failed", path_.string() + ": " + std::strerror(errno));
  }
}

std::vector<json> EventLog::read_all(const std::filesystem::path& path) {
  std::vector<json> out;
  if (!std::filesystem::exists(path)) return out;
  std::string text = read_file(path);
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) break;  // torn tail
    ++lineno;
    std::string line = text.substr(start, nl - start);
    start = nl + 1;
    if (trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      throw io_error("corrupt_log", path.string() + " line " + std::to_string(lineno));
    }
  }
  return out;
}

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

namespace {

template <typename T>
std::optional<T> opt_field(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw validation_error("bad_field", std::string("field '") + key + "' has the wrong type");
  }
}

json demographics_event_fields(const RespondentRecord& r) {
  json j = json::object();
  if (r.height_m) j["height_m"] = *r.height_m;
  if (r.weight_kg) j["weight_kg"] = *r.weight_kg;
  if (r.age) j["age"] = *r.age;
  if (r.gender) j["gender"] = to_string(*r.gender);
  if (r.location) j["location"] = *r.location;
  if (!r.handles.empty()) j["handles"] = r.handles;
  if (r.comment) j["comment"] = *r.comment;
  return j;
}

}  // namespace

DemographicsInput demographics_from_json(const json& body) {
  if (!body.is_object()) throw validation_error("bad_body", "expected a JSON object");
  DemographicsInput in;
  in.height = opt_field<double>(body, "height");
  in.weight = opt_field<double>(body, "weight");
  std::string units = opt_field<std::string>(body, "units").value_or("metric");
  if (units != "metric" && units != "imperial") {
    throw validation_error("bad_units", "units must be metric or imperial");
  }
  in.imperial = units == "imperial";
  in.age = opt_field<double>(body, "age");
  in.gender = opt_field<std::string>(body, "gender");
  in.location = opt_field<std::string>(body, "location");
  for (const char* network : {"twitter", "instagram", "facebook"}) {
    auto h = opt_field<std::string>(body, network);
    if (h && !trim(*h).empty()) in.handles[network] = trim(*h);
  }
  in.comment = opt_field<std::string>(body, "comment");
  return in;
}

SessionStore::SessionStore(const QuizEngine& engine, const std::filesystem::path& data_dir,
                           std::string salt, double cutoff, Clock clock)
    : engine_(engine), salt_(std::move(salt)), cutoff_(cutoff), clock_(std::move(clock)) {
  std::filesystem::path log_path = data_dir / "events.jsonl";
  for (const auto& event : EventLog::read_all(log_path)) {
    apply(event);
    ++replayed_;
  }
  log_ = std::make_unique<EventLog>(log_path);
}

void SessionStore::apply(const json& e) {
  try {
    std::string type = e.at("event").get<std::string>();
    std::string id = e.at("session_id").get<std::string>();
    if (type == "session_created") {
      if (e.at("quiz_fingerprint").get<std::string>() != engine_.fingerprint()) {
        throw io_error("log_quiz_mismatch", "event log was written for a different quiz");
      }
      auto entry = std::make_unique<Entry>();
      entry->session = engine_.start_session(id);
      sessions_[id] = std::move(entry);
      return;
    }
    Entry& entry = find(id);
    if (type == "answer") {
      engine_.answer(entry.session, e.at("question_id").get<std::string>(),
                     e.at("choice_index").get<int>(), e.at("ts").get<std::int64_t>());
    } else if (type == "demographics") {
      json fields = e.at("fields");
      fields["session_id"] = id;
      RespondentRecord r = record_from_json(fields);
      r.transcript = entry.session.transcript;
      r.prediction = entry.session.prediction;
      derive_outcome(r, cutoff_);
      entry.record = std::move(r);
    } else {
      throw io_error("corrupt_log", "unknown event type " + type);
    }
  } catch (const json::exception& ex) {
    throw io_error("corrupt_log", ex.what());
  }
}

SessionStore::Entry& SessionStore::find(const std::string& id) const {
  std::shared_lock lock(map_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw StoreError("not_found", "no session " + id);
  return *it->second;
}

std::string SessionStore::create_session(std::optional<std::string> id) {
  std::string sid = id.value_or(random_session_id());
  {
    std::shared_lock lock(map_mu_);
    while (sessions_.count(sid)) {
      if (id) throw StoreError("duplicate_session", "session " + sid + " exists");
      sid = random_session_id();
    }
  }
  auto entry = std::make_unique<Entry>();
  entry->session = engine_.start_session(sid);
  log_->append({{"event", "session_created"},
                {"session_id", sid},
                {"quiz_fingerprint", engine_.fingerprint()},
                {"ts", clock_()}});
  std::unique_lock lock(map_mu_);
  sessions_[sid] = std::move(entry);
  return sid;
}

Session SessionStore::snapshot(const std::string& id) const {
  Entry& e = find(id);
  std::lock_guard<std::mutex> lock(e.mu);
  return e.session;
}

const Question* SessionStore::next_question(const std::string& id) const {
  Entry& e = find(id);
  std::lock_guard<std::mutex> lock(e.mu);
  return engine_.next_question(e.session);
}

Session SessionStore::answer(const std::string& id, const std::string& question_id,
                             int choice_index) {
  Entry& e = find(id);
  std::lock_guard<std::mutex> lock(e.mu);
  Session updated = e.session;
  std::int64_t ts = clock_();
  engine_.answer(updated, question_id, choice_index, ts);
  log_->append({{"event", "answer"},
                {"session_id", id},
                {"question_id", question_id},
                {"choice_index", choice_index},
                {"ts", ts}});
  e.session = std::move(updated);
  return e.session;
}

Vote SessionStore::result(const std::string& id) const {
  Entry& e = find(id);
  std::lock_guard<std::mutex> lock(e.mu);
  return engine_.predict_session(e.session);
}

RespondentRecord SessionStore::build_record(const Session& session,
                                            const DemographicsInput& in) const {
  RespondentRecord r;
  r.session_id = session.id;
  r.transcript = session.transcript;
  r.prediction = session.prediction;
  if (in.height) r.height_m = in.imperial ? inches_to_m(*in.height) : *in.height;
  if (in.weight) r.weight_kg = in.imperial ? lbs_to_kg(*in.weight) : *in.weight;
  if (r.height_m && !(*r.height_m > 0.5 && *r.height_m < 2.8)) {
    throw validation_error("implausible_anthropometry", "height out of range");
  }
  if (r.weight_kg && !(*r.weight_kg > 20.0 && *r.weight_kg < 400.0)) {
    throw validation_error("implausible_anthropometry", "weight out of range");
  }
  if (in.age) {
    if (!(*in.age >= 0.0 && *in.age < 130.0)) throw validation_error("bad_age", "age out of range");
    r.age = *in.age;
  }
  if (in.gender) r.gender = parse_gender(*in.gender);
  if (in.location && !trim(*in.location).empty()) r.location = trim(*in.location);
  for (const auto& [network, handle] : in.handles) r.handles[network] = salted_hash(salt_, handle);
  if (in.comment && !trim(*in.comment).empty()) r.comment = *in.comment;
  derive_outcome(r, cutoff_);
  return r;
}

DemographicsResult SessionStore::submit_demographics(const std::string& id,
                                                     const DemographicsInput& input) {
  Entry& e = find(id);
  std::lock_guard<std::mutex> lock(e.mu);
  if (!e.session.complete()) {
    throw EngineError("incomplete", "session " + id + " is still in progress");
  }
  if (e.record) throw StoreError("already_submitted", "demographics already recorded");
  RespondentRecord r = build_record(e.session, input);
  log_->append({{"event", "demographics"},
                {"session_id", id},
                {"fields", demographics_event_fields(r)},
                {"ts", clock_()}});
  DemographicsResult out;
  out.bmi = r.bmi;
  out.agreed = r.correct;
  e.record = std::move(r);
  return out;
}

std::vector<RespondentRecord> SessionStore::completed_records() const {
  std::shared_lock lock(map_mu_);
  std::vector<RespondentRecord> out;
  for (const auto& [id, entry] : sessions_) {
    std::lock_guard<std::mutex> elock(entry->mu);
    if (!entry->session.complete()) continue;
    if (entry->record) {
      out.push_back(*entry->record);
    } else {
      RespondentRecord r;
      r.session_id = id;
      r.transcript = entry->session.transcript;
      r.prediction = entry->session.prediction;
      out.push_back(std::move(r));
    }
  }
  return out;
}

json SessionStore::state() const {
  std::shared_lock lock(map_mu_);
  json out = json::array();
  for (const auto& [id, entry] : sessions_) {
    std::lock_guard<std::mutex> elock(entry->mu);
    json j{{"session", to_json(entry->session)}};
    if (entry->record) j["record"] = to_json(*entry->record);
    out.push_back(std::move(j));
  }
  return out;
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(map_mu_);
  return sessions_.size();
}

}  // namespace foodquiz
