#ifndef FOODQUIZ_SYNTH_HPP_
#define FOODQUIZ_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "foodquiz/engine.hpp"
#include "foodquiz/lda.hpp"
#include "foodquiz/stats.hpp"

namespace foodquiz {

/// Community corpus with a known signal: half of the planted tokens grow
/// with a community's overweight rate and half shrink, on a log scale
/// with multiplicative noise. Noise tokens are uniform and unrelated.
struct SyntheticCorpusParams {
  int communities = 51;
  int planted_tokens = 10;
  int noise_tokens = 200;
  int min_docs = 80;
  int max_docs = 200;
  int tokens_per_doc = 8;
  /// Share of non-hashtag tokens drawn from the planted set.
  double planted_share = 0.12;
  /// Log-rate slope per standard deviation of the overweight rate.
  double signal = 1.2;
  double log_noise = 0.25;
  /// Share of posts emitted without a meal hashtag (dropped on load).
  double unfiltered_share = 0.05;
};

struct SyntheticCorpus {
  std::vector<std::pair<std::string, std::string>> documents;  // (community, text)
  std::vector<std::pair<std::string, double>> rates;
  std::vector<std::string> planted;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusParams& params,
                                          std::uint64_t seed);

void write_synthetic_corpus(const SyntheticCorpus& corpus,
                            const std::filesystem::path& corpus_jsonl,
                            const std::filesystem::path& labels_csv);

/// Documents mixing two topics with disjoint vocabularies.
struct PlantedTopics {
  LdaCorpus corpus;
  std::vector<std::vector<double>> phi;  // 2 x vocabulary
};

PlantedTopics generate_planted_topics(int words_per_topic, int docs, int doc_length,
                                      std::uint64_t seed);

/// Completed sessions plus synthetic demographics loosely matched to a
/// young online sample. Some fields are left blank at random.
std::vector<RespondentRecord> simulate_respondents(const QuizEngine& engine,
                                                   const AnswerPolicy& policy, std::size_t n,
                                                   std::uint64_t seed,
                                                   double cutoff = kDefaultBmiCutoff);

}  // namespace foodquiz

#endif  // FOODQUIZ_SYNTH_HPP_
