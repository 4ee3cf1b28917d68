#ifndef FOODQUIZ_PIPELINE_HPP_
#define FOODQUIZ_PIPELINE_HPP_

#include <optional>

#include "foodquiz/corpus.hpp"
#include "foodquiz/features.hpp"
#include "foodquiz/lda.hpp"

namespace foodquiz {

struct FeatureConfig {
  int min_count = 3;
  Normalization normalization = Normalization::relative_frequency;
  /// lda.topics == 0 disables topic features.
  LdaParams lda;
  std::size_t top_tokens = 20;
};

json to_json(const FeatureConfig& config);

struct FeatureBuild {
  RawMatrix raw;  // words, hashtags, then topics
  FeatureSpace space;
  BinnedMatrix binned;
  std::optional<TopicModel> topics;
};

/// count_features, then LDA topic proportions appended as topic:<k>
/// columns, then tertile binning over all columns.
FeatureBuild build_features(const CommunityCorpus& corpus, const FeatureConfig& config);

}  // namespace foodquiz

#endif  // FOODQUIZ_PIPELINE_HPP_
