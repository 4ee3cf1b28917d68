#include "foodquiz/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "foodquiz/common.hpp"
#include "foodquiz/tokenizer.hpp"

namespace foodquiz {

namespace {

std::set<std::string> normalize_filter(const std::set<std::string>& filter) {
  std::set<std::string> out;
  for (const auto& tag : filter) {
    std::string t = to_lower_ascii(trim(tag));
    if (t.empty()) continue;
    if (t.front() != '#') t.insert(t.begin(), '#');
    out.insert(std::move(t));
  }
  return out;
}

double parse_rate(const std::string& field, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size()) {
    throw validation_error("malformed_rate", "labels line " + std::to_string(line) +
                                                 ": cannot parse rate '" + field + "'");
  }
  return v;
}

}  // namespace

std::set<std::string> default_hashtag_filter() {
  return {"#breakfast", "#brunch", "#lunch", "#dinner", "#supper", "#snack", "#meal"};
}

std::size_t CommunityLabels::count_positive() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const auto& kv) { return kv.second; }));
}

CommunityLabels make_labels(const std::vector<std::pair<std::string, double>>& rates,
                            bool median_is_positive) {
  if (rates.empty()) throw validation_error("empty_labels", "no communities listed");
  CommunityLabels out;
  out.median_is_positive = median_is_positive;
  std::vector<double> sorted;
  for (const auto& [id, rate] : rates) {
    if (!(rate >= 0.0 && rate <= 100.0)) {
      throw validation_error("rate_out_of_range",
                             "community " + id + " has rate outside [0,100]");
    }
    if (!out.rates.emplace(id, rate).second) {
      throw validation_error("duplicate_community", "duplicate community id " + id);
    }
    out.communities.push_back(id);
    sorted.push_back(rate);
  }
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  out.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  for (const auto& [id, rate] : out.rates) {
    out.labels[id] = median_is_positive ? rate >= out.median : rate > out.median;
  }
  return out;
}

CommunityLabels parse_labels(std::istream& in, bool median_is_positive) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "community,overweight_rate") {
    throw validation_error("bad_header",
                           "labels header must be 'community,overweight_rate'");
  }
  std::vector<std::pair<std::string, double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string row = trim(line);
    if (row.empty()) continue;
    auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
      throw validation_error("malformed_line",
                             "labels line " + std::to_string(lineno) + ": expected 2 fields");
    }
    std::string id = trim(row.substr(0, comma));
    if (id.empty()) {
      throw validation_error("malformed_line",
                             "labels line " + std::to_string(lineno) + ": empty community");
    }
    rows.emplace_back(id, parse_rate(trim(row.substr(comma + 1)), lineno));
  }
  return make_labels(rows, median_is_positive);
}

CommunityLabels load_labels(const std::filesystem::path& path, bool median_is_positive) {
  std::ifstream in(path);
  if (!in) throw io_error("unreadable_file", "cannot open " + path.string());
  return parse_labels(in, median_is_positive);
}

std::vector<std::string> CommunityCorpus::empty_communities() const {
  std::vector<std::string> out;
  for (const auto& [id, docs] : documents) {
    if (docs.empty()) out.push_back(id);
  }
  return out;
}

bool matches_filter(const std::string& text, const std::set<std::string>& filter) {
  for (const auto& token : tokenize(text)) {
    if (is_hashtag(token) && filter.count(token)) return true;
  }
  return false;
}

CommunityCorpus parse_documents(std::istream& in, const std::set<std::string>& filter,
                                const CommunityLabels& labels) {
  CommunityCorpus corpus;
  corpus.hashtag_filter = normalize_filter(filter);
  for (const auto& id : labels.communities) corpus.documents[id];

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error&) {
      throw validation_error("malformed_line",
                             "corpus line " + std::to_string(lineno) + ": invalid JSON");
    }
    if (!obj.is_object() || !obj.contains("community") || !obj["community"].is_string() ||
        !obj.contains("text") || !obj["text"].is_string()) {
      throw validation_error("malformed_line",
                             "corpus line " + std::to_string(lineno) +
                                 ": need string fields 'community' and 'text'");
    }
    std::string community = obj["community"].get<std::string>();
    std::string text = obj["text"].get<std::string>();
    if (!labels.contains(community)) {
      corpus.rejects.push_back({lineno, community});
      continue;
    }
    if (trim(text).empty() || !matches_filter(text, corpus.hashtag_filter)) {
      ++corpus.discarded;
      continue;
    }
    corpus.documents[community].push_back(std::move(text));
    ++corpus.kept;
  }
  return corpus;
}

CommunityCorpus load_documents(const std::filesystem::path& path,
                               const std::set<std::string>& filter,
                               const CommunityLabels& labels) {
  std::ifstream in(path);
  if (!in) throw io_error("unreadable_file", "cannot open " + path.string());
  return parse_documents(in, filter, labels);
}

void write_documents(const CommunityCorpus& corpus, std::ostream& out) {
  for (const auto& [id, docs] : corpus.documents) {
    for (const auto& text : docs) {
      out << json{{"community", id}, {"text", text}}.dump() << '\n';
    }
  }
}

}  // namespace foodquiz
