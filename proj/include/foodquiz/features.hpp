#ifndef FOODQUIZ_FEATURES_HPP_
#define FOODQUIZ_FEATURES_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foodquiz/common.hpp"
#include "foodquiz/corpus.hpp"

namespace foodquiz {

enum class FeatureKind { word, hashtag, topic };

std::string to_string(FeatureKind kind);
FeatureKind parse_feature_kind(const std::string& s);

/// A feature is a (kind, key) pair. Its text form is "kind:key", e.g.
/// "word:fruit", "hashtag:#cook", "topic:3".
struct FeatureId {
  FeatureKind kind = FeatureKind::word;
  std::string key;

  auto operator<=>(const FeatureId&) const = default;

  std::string str() const { return to_string(kind) + ":" + key; }
  static FeatureId parse(const std::string& text);
};

/// Feature -> bin in {0, 1, 2}. Missing features read as bin 0.
using BinRow = std::map<FeatureId, int>;

enum class Normalization { raw_count, relative_frequency };

std::string to_string(Normalization n);
Normalization parse_normalization(const std::string& s);

/// Raw cut points: bin 0 if v <= t1, 1 if t1 < v <= t2, 2 if v > t2.
struct BinThresholds {
  double t1 = 0.0;
  double t2 = 0.0;
  bool operator==(const BinThresholds&) const = default;
};

/// Nearest-rank tertiles: t1 = sorted[(n-1)/3], t2 = sorted[2(n-1)/3].
BinThresholds tertile_thresholds(std::vector<double> values);

inline int bin_value(double raw, const BinThresholds& t) {
  if (raw <= t.t1) return 0;
  if (raw <= t.t2) return 1;
  return 2;
}

/// Community x feature matrix of raw values, row-major.
struct RawMatrix {
  std::vector<std::string> communities;
  std::vector<FeatureId> features;
  std::vector<double> values;

  std::size_t rows() const { return communities.size(); }
  std::size_t cols() const { return features.size(); }
  double at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
  double& at(std::size_t row, std::size_t col) { return values[row * cols() + col]; }
  std::vector<double> column(std::size_t col) const;
  std::optional<std::size_t> row_of(const std::string& community) const;
};

struct TopicSummary {
  int index = 0;
  std::vector<std::string> top_tokens;
};

struct FeatureSpace {
  std::vector<FeatureId> features;
  /// Parallel to `features`; empty until fit_bins has run.
  std::vector<BinThresholds> thresholds;
  int min_count = 3;
  Normalization normalization = Normalization::relative_frequency;
  std::vector<TopicSummary> topics;
  /// Provenance recorded by the pipeline (seed, LDA settings, ...).
  json provenance = json::object();

  bool fitted() const { return !features.empty() && thresholds.size() == features.size(); }
  std::optional<std::size_t> index_of(const FeatureId& id) const;
  const TopicSummary* topic(int index) const;
};

struct BinnedMatrix {
  std::vector<std::string> communities;
  std::vector<FeatureId> features;
  std::vector<std::uint8_t> bins;  // row-major
  RawMatrix raw;

  std::size_t rows() const { return communities.size(); }
  std::size_t cols() const { return features.size(); }
  int at(std::size_t row, std::size_t col) const { return bins[row * cols() + col]; }
  BinRow row(std::size_t r) const;
};

struct FeatureCounts {
  RawMatrix raw;
  FeatureSpace space;  // thresholds unset
  /// Tokens per community before min-count filtering.
  std::map<std::string, std::size_t> community_tokens;
};

/// Counts word and hashtag tokens per community, dropping tokens seen
/// fewer than `min_count` times over the whole corpus. Under
/// relative_frequency each count is divided by the community's total
/// token count (before filtering). Features are ordered words first,
/// then hashtags, each alphabetically.
FeatureCounts count_features(const CommunityCorpus& corpus, int min_count,
                             Normalization normalization);

/// Fits per-feature tertile thresholds over the rows of `raw`.
FeatureSpace fit_bins(const RawMatrix& raw, FeatureSpace space);

BinnedMatrix apply_bins(const RawMatrix& raw, const FeatureSpace& space);

/// Bins an unseen row with training thresholds; absent features read as 0.
BinRow apply_bins(const std::map<FeatureId, double>& row, const FeatureSpace& space);

json to_json(const FeatureSpace& space);
FeatureSpace feature_space_from_json(const json& doc);

}  // namespace foodquiz

#endif  // FOODQUIZ_FEATURES_HPP_
