#include "foodquiz/pipeline.hpp"

namespace foodquiz {

json to_json(const FeatureConfig& c) {
  json lda = nullptr;
  if (c.lda.topics > 0) {
    lda = {{"topics", c.lda.topics},
           {"alpha", c.lda.effective_alpha()},
           {"beta", c.lda.beta},
           {"iterations", c.lda.iterations},
           {"seed", c.lda.seed}};
  }
  return {{"min_count", c.min_count},
          {"normalization", to_string(c.normalization)},
          {"lda", lda},
          {"top_tokens", c.top_tokens}};
}

FeatureBuild build_features(const CommunityCorpus& corpus, const FeatureConfig& config) {
  FeatureCounts counts = count_features(corpus, config.min_count, config.normalization);
  FeatureBuild out;
  out.raw = std::move(counts.raw);
  FeatureSpace space = std::move(counts.space);

  if (config.lda.topics > 0) {
    std::vector<std::string> vocab;
    for (const auto& f : out.raw.features) vocab.push_back(f.key);
    LdaCorpus lda_corpus = make_lda_corpus(corpus, vocab);
    out.topics = train_lda(lda_corpus, config.lda);
    auto means = community_topic_means(*out.topics, lda_corpus, out.raw.communities);

    std::size_t old_cols = out.raw.cols();
    std::size_t k = static_cast<std::size_t>(config.lda.topics);
    std::vector<double> values(out.raw.rows() * (old_cols + k));
    for (std::size_t r = 0; r < out.raw.rows(); ++r) {
      for (std::size_t c = 0; c < old_cols; ++c) values[r * (old_cols + k) + c] = out.raw.at(r, c);
      for (std::size_t t = 0; t < k; ++t) values[r * (old_cols + k) + old_cols + t] = means[r][t];
    }
    out.raw.values = std::move(values);
    for (std::size_t t = 0; t < k; ++t) {
      out.raw.features.push_back({FeatureKind::topic, std::to_string(t)});
      space.topics.push_back(
          {static_cast<int>(t), out.topics->top_tokens(static_cast<int>(t), config.top_tokens)});
    }
  }

  space.provenance = {{"feature_config", to_json(config)},
                      {"config_fingerprint", sha256_hex(to_json(config).dump()).substr(0, 16)}};
  out.space = fit_bins(out.raw, std::move(space));
  out.binned = apply_bins(out.raw, out.space);
  return out;
}

}  // namespace foodquiz
