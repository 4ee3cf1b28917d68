#include "foodquiz/features.hpp"

#include <algorithm>
#include <unordered_map>

#include "foodquiz/tokenizer.hpp"

namespace foodquiz {

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::word: return "word";
    case FeatureKind::hashtag: return "hashtag";
    case FeatureKind::topic: return "topic";
  }
  return "word";
}

FeatureKind parse_feature_kind(const std::string& s) {
  if (s == "word") return FeatureKind::word;
  if (s == "hashtag") return FeatureKind::hashtag;
  if (s == "topic") return FeatureKind::topic;
  throw validation_error("bad_feature_kind", "unknown feature kind '" + s + "'");
}

FeatureId FeatureId::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon + 1 == text.size()) {
    throw validation_error("bad_feature_id", "feature id must be kind:key, got '" + text + "'");
  }
  return FeatureId{parse_feature_kind(text.substr(0, colon)), text.substr(colon + 1)};
}

std::string to_string(Normalization n) {
  return n == Normalization::raw_count ? "raw_count" : "relative_frequency";
}

Normalization parse_normalization(const std::string& s) {
  if (s == "raw_count") return Normalization::raw_count;
  if (s == "relative_frequency") return Normalization::relative_frequency;
  throw validation_error("bad_normalization", "unknown normalization '" + s + "'");
}

BinThresholds tertile_thresholds(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return {values[(n - 1) / 3], values[2 * (n - 1) / 3]};
}

std::vector<double> RawMatrix::column(std::size_t col) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
  return out;
}

std::optional<std::size_t> RawMatrix::row_of(const std::string& community) const {
  auto it = std::find(communities.begin(), communities.end(), community);
  if (it == communities.end()) return std::nullopt;
  return static_cast<std::size_t>(it - communities.begin());
}

std::optional<std::size_t> FeatureSpace::index_of(const FeatureId& id) const {
  auto it = std::find(features.begin(), features.end(), id);
  if (it == features.end()) return std::nullopt;
  return static_cast<std::size_t>(it - features.begin());
}

const TopicSummary* FeatureSpace::topic(int index) const {
  for (const auto& t : topics) {
    if (t.index == index) return &t;
  }
  return nullptr;
}

BinRow BinnedMatrix::row(std::size_t r) const {
  BinRow out;
  for (std::size_t c = 0; c < cols(); ++c) out[features[c]] = at(r, c);
  return out;
}

FeatureCounts count_features(const CommunityCorpus& corpus, int min_count,
                             Normalization normalization) {
  if (corpus.documents.empty()) {
    throw validation_error("empty_corpus", "corpus has no communities");
  }
  std::map<std::string, std::unordered_map<std::string, std::size_t>> per_community;
  std::unordered_map<std::string, std::size_t> global;
  FeatureCounts out;
  for (const auto& [community, docs] : corpus.documents) {
    auto& counts = per_community[community];
    std::size_t total = 0;
    for (const auto& text : docs) {
      for (auto& tok : tokenize(text)) {
        ++global[tok];
        ++counts[tok];
        ++total;
      }
    }
    out.community_tokens[community] = total;
  }

  std::vector<FeatureId> features;
  for (const auto& [tok, n] : global) {
    if (n < static_cast<std::size_t>(min_count)) continue;
    features.push_back({is_hashtag(tok) ? FeatureKind::hashtag : FeatureKind::word, tok});
  }
  if (features.empty()) {
    throw validation_error("empty_vocabulary",
                           "no token occurs at least " + std::to_string(min_count) +
                               " times across " + std::to_string(global.size()) +
                               " distinct tokens");
  }
  std::sort(features.begin(), features.end());

  RawMatrix& raw = out.raw;
  raw.features = features;
  for (const auto& [community, _] : corpus.documents) raw.communities.push_back(community);
  raw.values.assign(raw.rows() * raw.cols(), 0.0);
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    const auto& counts = per_community[raw.communities[r]];
    double total = static_cast<double>(out.community_tokens[raw.communities[r]]);
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      auto it = counts.find(features[c].key);
      if (it == counts.end()) continue;
      double v = static_cast<double>(it->second);
      if (normalization == Normalization::relative_frequency) v = total > 0 ? v / total : 0.0;
      raw.at(r, c) = v;
    }
  }

  out.space.features = features;
  out.space.min_count = min_count;
  out.space.normalization = normalization;
  return out;
}

FeatureSpace fit_bins(const RawMatrix& raw, FeatureSpace space) {
  if (raw.rows() == 0) throw validation_error("empty_matrix", "fit_bins needs at least one row");
  space.features = raw.features;
  space.thresholds.clear();
  space.thresholds.reserve(raw.cols());
  for (std::size_t c = 0; c < raw.cols(); ++c) {
    space.thresholds.push_back(tertile_thresholds(raw.column(c)));
  }
  return space;
}

BinnedMatrix apply_bins(const RawMatrix& raw, const FeatureSpace& space) {
  if (!space.fitted()) throw validation_error("unfitted_space", "thresholds not fitted");
  std::map<FeatureId, std::size_t> raw_col;
  for (std::size_t c = 0; c < raw.cols(); ++c) raw_col[raw.features[c]] = c;

  BinnedMatrix out;
  out.communities = raw.communities;
  out.features = space.features;
  out.bins.assign(out.rows() * out.cols(), 0);
  for (std::size_t c = 0; c < out.cols(); ++c) {
    auto it = raw_col.find(space.features[c]);
    if (it == raw_col.end()) continue;
    for (std::size_t r = 0; r < out.rows(); ++r) {
      out.bins[r * out.cols() + c] =
          static_cast<std::uint8_t>(bin_value(raw.at(r, it->second), space.thresholds[c]));
    }
  }
  out.raw = raw;
  return out;
}

BinRow apply_bins(const std::map<FeatureId, double>& row, const FeatureSpace& space) {
  if (!space.fitted()) throw validation_error("unfitted_space", "thresholds not fitted");
  BinRow out;
  for (std::size_t c = 0; c < space.features.size(); ++c) {
    auto it = row.find(space.features[c]);
    double v = it == row.end() ? 0.0 : it->second;
    out[space.features[c]] = bin_value(v, space.thresholds[c]);
  }
  return out;
}

json to_json(const FeatureSpace& space) {
  json features = json::array();
  for (std::size_t i = 0; i < space.features.size(); ++i) {
    json f{{"kind", to_string(space.features[i].kind)}, {"key", space.features[i].key}};
    if (i < space.thresholds.size()) {
      f["t1"] = space.thresholds[i].t1;
      f["t2"] = space.thresholds[i].t2;
    }
    features.push_back(std::move(f));
  }
  json topics = json::array();
  for (const auto& t : space.topics) {
    topics.push_back({{"index", t.index}, {"top_tokens", t.top_tokens}});
  }
  return {{"format", "foodquiz.featurespace/1"},
          {"features", std::move(features)},
          {"normalization", to_string(space.normalization)},
          {"min_count", space.min_count},
          {"topics", std::move(topics)},
          {"provenance", space.provenance}};
}

FeatureSpace feature_space_from_json(const json& doc) {
  try {
    FeatureSpace space;
    space.min_count = doc.at("min_count").get<int>();
    space.normalization = parse_normalization(doc.at("normalization").get<std::string>());
    bool all_fitted = true;
    for (const auto& f : doc.at("features")) {
      space.features.push_back(
          {parse_feature_kind(f.at("kind").get<std::string>()), f.at("key").get<std::string>()});
      if (f.contains("t1") && f.contains("t2")) {
        space.thresholds.push_back({f["t1"].get<double>(), f["t2"].get<double>()});
      } else {
        all_fitted = false;
      }
    }
    if (!all_fitted) space.thresholds.clear();
    for (const auto& t : doc.value("topics", json::array())) {
      space.topics.push_back(
          {t.at("index").get<int>(), t.at("top_tokens").get<std::vector<std::string>>()});
    }
    space.provenance = doc.value("provenance", json::object());
    return space;
  } catch (const json::exception& e) {
    throw validation_error("malformed_featurespace", e.what());
  }
}

}  // namespace foodquiz
