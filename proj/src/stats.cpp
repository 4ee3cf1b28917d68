#include "foodquiz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

namespace foodquiz {

double bmi(double weight_kg, double height_m) {
  if (!(height_m > 0.5 && height_m < 2.8) || !(weight_kg > 20.0 && weight_kg < 400.0)) {
    std::ostringstream msg;
    msg << "weight " << weight_kg << " kg / height " << height_m << " m out of range";
    throw validation_error("implausible_anthropometry", msg.str());
  }
  return weight_kg / (height_m * height_m);
}

std::string to_string(Gender g) {
  switch (g) {
    case Gender::female: return "female";
    case Gender::male: return "male";
    case Gender::other: return "other";
    case Gender::undisclosed: return "undisclosed";
  }
  return "undisclosed";
}

Gender parse_gender(const std::string& s) {
  std::string v = to_lower_ascii(trim(s));
  if (v == "female" || v == "f") return Gender::female;
  if (v == "male" || v == "m") return Gender::male;
  if (v == "other") return Gender::other;
  if (v == "undisclosed" || v.empty()) return Gender::undisclosed;
  throw validation_error("bad_gender", "unknown gender '" + s + "'");
}

void derive_outcome(RespondentRecord& r, double cutoff) {
  r.bmi.reset();
  r.true_label.reset();
  r.correct.reset();
  if (!r.height_m || !r.weight_kg) return;
  r.bmi = bmi(*r.weight_kg, *r.height_m);
  r.true_label = label_individual(*r.bmi, cutoff);
  if (r.prediction) r.correct = r.prediction->label == *r.true_label;
}

namespace {

json vote_json(const Vote& v) {
  return {{"label", v.label}, {"votes_true", v.votes_true},
          {"votes_total", v.votes_total}, {"tie", v.tie}};
}

Vote vote_from_json(const json& j) {
  return {j.at("label").get<bool>(), j.at("votes_true").get<int>(),
          j.at("votes_total").get<int>(), j.value("tie", false)};
}

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

bool has_text(const std::optional<std::string>& s) { return s && !trim(*s).empty(); }

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

// Contiguous histogram over bins [k*w, (k+1)*w).
std::string histogram_csv(const std::vector<double>& values, double width,
                          const std::string& prefix_header = "",
                          const std::string& prefix = "") {
  std::ostringstream out;
  if (values.empty()) return out.str();
  std::map<long, std::size_t> counts;
  for (double v : values) ++counts[static_cast<long>(std::floor(v / width))];
  for (long k = counts.begin()->first; k <= counts.rbegin()->first; ++k) {
    if (!prefix_header.empty()) out << prefix << ',';
    auto it = counts.find(k);
    out << fmt_double(k * width) << ',' << fmt_double((k + 1) * width) << ','
        << (it == counts.end() ? 0 : it->second) << '\n';
  }
  return out.str();
}

std::string redact(std::string text, const std::map<std::string, std::string>& handles) {
  for (const auto& [_, handle] : handles) {
    std::string h = trim(handle);
    if (!h.empty() && h.front() == '@') h.erase(0, 1);
    if (h.empty()) continue;
    std::string lower_h = to_lower_ascii(h);
    std::string lower_t = to_lower_ascii(text);
    std::size_t pos = 0;
    while ((pos = lower_t.find(lower_h, pos)) != std::string::npos) {
      text.replace(pos, h.size(), "[redacted]");
      lower_t.replace(pos, h.size(), "[redacted]");
      pos += 10;
    }
  }
  static const std::regex mention(R"(@[A-Za-z0-9_.]+)");
  return std::regex_replace(text, mention, "[redacted]");
}

}  // namespace

json to_json(const RespondentRecord& r) {
  json transcript = json::array();
  for (const auto& e : r.transcript) {
    transcript.push_back({{"question_id", e.question_id},
                          {"choice_index", e.choice_index},
                          {"timestamp", e.timestamp}});
  }
  json out{{"session_id", r.session_id}, {"transcript", std::move(transcript)}};
  if (r.prediction) out["prediction"] = vote_json(*r.prediction);
  put(out, "height_m", r.height_m);
  put(out, "weight_kg", r.weight_kg);
  put(out, "age", r.age);
  if (r.gender) out["gender"] = to_string(*r.gender);
  put(out, "location", r.location);
  if (!r.handles.empty()) out["handles"] = r.handles;
  put(out, "comment", r.comment);
  put(out, "bmi", r.bmi);
  put(out, "true_label", r.true_label);
  put(out, "correct", r.correct);
  return out;
}

RespondentRecord record_from_json(const json& j) {
  try {
    RespondentRecord r;
    r.session_id = j.at("session_id").get<std::string>();
    for (const auto& e : j.value("transcript", json::array())) {
      r.transcript.push_back({e.at("question_id").get<std::string>(),
                              e.at("choice_index").get<int>(), e.value("timestamp", 0LL)});
    }
    if (j.contains("prediction")) r.prediction = vote_from_json(j["prediction"]);
    r.height_m = get<double>(j, "height_m");
    r.weight_kg = get<double>(j, "weight_kg");
    r.age = get<double>(j, "age");
    if (auto g = get<std::string>(j, "gender")) r.gender = parse_gender(*g);
    r.location = get<std::string>(j, "location");
    if (j.contains("handles")) r.handles = j["handles"].get<std::map<std::string, std::string>>();
    r.comment = get<std::string>(j, "comment");
    return r;
  } catch (const json::exception& e) {
    throw validation_error("malformed_record", e.what());
  }
}

std::vector<RespondentRecord> read_records_jsonl(const std::string& text, double cutoff) {
  std::vector<RespondentRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw validation_error("malformed_line", "records line " + std::to_string(lineno));
    }
    RespondentRecord r = record_from_json(j);
    derive_outcome(r, cutoff);
    out.push_back(std::move(r));
  }
  return out;
}

std::string write_records_jsonl(const std::vector<RespondentRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

AccuracyReport accuracy_report(const std::vector<RespondentRecord>& records, double cutoff) {
  AccuracyReport rep;
  rep.cutoff = cutoff;
  for (const auto& r : records) {
    if (!r.height_m || !r.weight_kg) {
      ++rep.missing_bmi;
      continue;
    }
    if (!r.prediction) {
      ++rep.missing_prediction;
      continue;
    }
    double b = bmi(*r.weight_kg, *r.height_m);
    bool truth = label_individual(b, cutoff);
    bool ok = r.prediction->label == truth;
    if (r.prediction->tie) ++rep.ties;
    ClassAccuracy& c = truth ? rep.at_or_above : rep.below;
    ++c.n;
    ++rep.n;
    if (ok) {
      ++c.correct;
      ++rep.correct;
    }
  }
  if (rep.n > 0) {
    rep.overall = static_cast<double>(rep.correct) / rep.n;
    for (ClassAccuracy* c : {&rep.at_or_above, &rep.below}) {
      c->proportion = static_cast<double>(c->n) / rep.n;
      c->accuracy = c->n ? static_cast<double>(c->correct) / c->n : 0.0;
    }
  }
  return rep;
}

json to_json(const AccuracyReport& r) {
  auto cls = [](const ClassAccuracy& c) {
    return json{{"n", c.n}, {"correct", c.correct}, {"proportion", c.proportion},
                {"accuracy", c.accuracy}};
  };
  return {{"cutoff", r.cutoff},
          {"n", r.n},
          {"correct", r.correct},
          {"overall", r.overall},
          {"bmi_at_or_above_cutoff", cls(r.at_or_above)},
          {"bmi_below_cutoff", cls(r.below)},
          {"ties", r.ties},
          {"missing_bmi", r.missing_bmi},
          {"missing_prediction", r.missing_prediction}};
}

EngagementStats engagement_from_counts(std::size_t commented_correct, std::size_t n_correct,
                                       std::size_t commented_incorrect, std::size_t n_incorrect) {
  EngagementStats s;
  s.n_correct = n_correct;
  s.commented_correct = commented_correct;
  s.n_incorrect = n_incorrect;
  s.commented_incorrect = commented_incorrect;
  s.rate_correct = n_correct ? static_cast<double>(commented_correct) / n_correct : 0.0;
  s.rate_incorrect = n_incorrect ? static_cast<double>(commented_incorrect) / n_incorrect : 0.0;
  if (s.rate_correct > 0.0) s.ratio = s.rate_incorrect / s.rate_correct;
  return s;
}

EngagementStats engagement_stats(const std::vector<RespondentRecord>& records) {
  std::size_t cc = 0, nc = 0, ci = 0, ni = 0;
  for (const auto& r : records) {
    if (!r.correct) continue;
    bool commented = has_text(r.comment);
    if (*r.correct) {
      ++nc;
      cc += commented;
    } else {
      ++ni;
      ci += commented;
    }
  }
  return engagement_from_counts(cc, nc, ci, ni);
}

json to_json(const EngagementStats& s) {
  json out{{"n_correct", s.n_correct},
           {"commented_correct", s.commented_correct},
           {"n_incorrect", s.n_incorrect},
           {"commented_incorrect", s.commented_incorrect},
           {"rate_correct", s.rate_correct},
           {"rate_incorrect", s.rate_incorrect}};
  out["ratio"] = s.ratio ? json(*s.ratio) : json("undefined");
  return out;
}

std::map<std::string, std::string> demographics_summary(
    const std::vector<RespondentRecord>& records) {
  std::vector<double> ages, bmis;
  std::map<std::string, std::vector<double>> bmi_by_gender;
  std::map<std::string, std::size_t> genders, locations;
  std::size_t n_age = 0, n_bmi = 0, n_gender = 0, n_location = 0;

  for (const auto& r : records) {
    if (r.age) {
      ++n_age;
      ages.push_back(*r.age);
    }
    std::optional<double> b;
    if (r.height_m && r.weight_kg) {
      ++n_bmi;
      b = bmi(*r.weight_kg, *r.height_m);
      bmis.push_back(*b);
    }
    if (r.gender && *r.gender != Gender::undisclosed) {
      ++n_gender;
      ++genders[to_string(*r.gender)];
      if (b) bmi_by_gender[to_string(*r.gender)].push_back(*b);
    }
    if (has_text(r.location)) {
      ++n_location;
      ++locations[coarsen_location(*r.location)];
    }
  }

  std::map<std::string, std::string> out;
  out["age_histogram"] = "bin_lo,bin_hi,count\n" + histogram_csv(ages, kAgeBinWidth);
  out["bmi_histogram"] = "bin_lo,bin_hi,count\n" + histogram_csv(bmis, kBmiBinWidth);
  std::string by_gender = "gender,bin_lo,bin_hi,count\n";
  for (const auto& [g, values] : bmi_by_gender) {
    by_gender += histogram_csv(values, kBmiBinWidth, "gender", g);
  }
  out["bmi_by_gender"] = by_gender;
  std::string g_csv = "gender,count\n";
  for (const auto& [g, n] : genders) g_csv += g + "," + std::to_string(n) + "\n";
  out["gender_counts"] = g_csv;
  std::string l_csv = "location,count\n";
  for (const auto& [l, n] : locations) l_csv += l + "," + std::to_string(n) + "\n";
  out["location_counts"] = l_csv;
  std::string total = std::to_string(records.size());
  std::string comp = "field,provided,total\n";
  if (!records.empty()) {
    comp += "age," + std::to_string(n_age) + "," + total + "\n";
    comp += "bmi," + std::to_string(n_bmi) + "," + total + "\n";
    comp += "gender," + std::to_string(n_gender) + "," + total + "\n";
    comp += "location," + std::to_string(n_location) + "," + total + "\n";
  }
  out["completeness"] = comp;
  return out;
}

std::string salted_hash(const std::string& salt, const std::string& value) {
  return sha256_hex(salt + '\x1f' + value);
}

std::string export_anonymized(const std::vector<RespondentRecord>& records,
                              const std::string& salt) {
  std::string out;
  for (const auto& r : records) {
    json answers = json::array();
    for (const auto& e : r.transcript) {
      answers.push_back({{"question_id", e.question_id}, {"choice_index", e.choice_index}});
    }
    json j{{"respondent", salted_hash(salt, "session:" + r.session_id).substr(0, 16)},
           {"answers", std::move(answers)}};
    if (r.prediction) {
      j["prediction"] = r.prediction->label ? "overweight" : "not_overweight";
      j["votes_true"] = r.prediction->votes_true;
      j["votes_total"] = r.prediction->votes_total;
    }
    put(j, "correct", r.correct);
    put(j, "height_m", r.height_m);
    put(j, "weight_kg", r.weight_kg);
    put(j, "age", r.age);
    if (r.gender) j["gender"] = to_string(*r.gender);
    if (has_text(r.location)) j["location"] = coarsen_location(*r.location);
    if (!r.handles.empty()) {
      json h = json::object();
      for (const auto& [network, handle] : r.handles) h[network] = salted_hash(salt, handle);
      j["handles"] = std::move(h);
    }
    if (has_text(r.comment)) j["comment"] = redact(*r.comment, r.handles);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<RespondentRecord> read_export(const std::string& jsonl, double cutoff) {
  std::vector<RespondentRecord> out;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    RespondentRecord r;
    r.session_id = j.at("respondent").get<std::string>();
    for (const auto& a : j.value("answers", json::array())) {
      r.transcript.push_back({a.at("question_id").get<std::string>(),
                              a.at("choice_index").get<int>(), 0});
    }
    if (j.contains("prediction")) {
      int vt = j.value("votes_true", 0), total = j.value("votes_total", 0);
      r.prediction = Vote{j["prediction"].get<std::string>() == "overweight", vt, total,
                          2 * vt == total};
    }
    r.height_m = get<double>(j, "height_m");
    r.weight_kg = get<double>(j, "weight_kg");
    r.age = get<double>(j, "age");
    if (auto g = get<std::string>(j, "gender")) r.gender = parse_gender(*g);
    r.location = get<std::string>(j, "location");
    r.comment = get<std::string>(j, "comment");
    derive_outcome(r, cutoff);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace foodquiz
