#ifndef FOODQUIZ_LDA_HPP_
#define FOODQUIZ_LDA_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "foodquiz/corpus.hpp"
#include "foodquiz/features.hpp"

namespace foodquiz {

struct LdaParams {
  int topics = 50;
  /// Non-positive means 50 / topics.
  double alpha = 0.0;
  double beta = 0.01;
  int iterations = 500;
  std::uint64_t seed = 1;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / topics; }
};

/// Documents as vocabulary indices, with the owning community per document.
struct LdaCorpus {
  std::vector<std::string> vocabulary;
  std::vector<std::vector<int>> docs;
  std::vector<std::string> doc_community;

  std::size_t token_count() const;
};

/// Tokenizes every document and keeps only tokens in `vocabulary`.
LdaCorpus make_lda_corpus(const CommunityCorpus& corpus,
                          const std::vector<std::string>& vocabulary);

struct TopicModel {
  int topics = 0;
  std::vector<std::string> vocabulary;
  std::vector<std::vector<double>> phi;    // topic -> token distribution
  std::vector<std::vector<double>> theta;  // document -> topic distribution
  double alpha = 0.0;
  double beta = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;

  std::vector<std::string> top_tokens(int topic, std::size_t n) const;
};

/// Collapsed Gibbs sampler. Exposed as a class so callers can observe the
/// count tables between sweeps.
class GibbsLda {
 public:
  GibbsLda(const LdaCorpus& corpus, const LdaParams& params);

  void sweep();
  int sweeps_done() const { return sweeps_; }

  /// Tokens currently assigned to each topic.
  const std::vector<long>& topic_totals() const { return topic_totals_; }
  TopicModel model() const;

 private:
  const LdaCorpus& corpus_;
  int k_;
  int v_;
  double alpha_;
  double beta_;
  LdaParams params_;
  std::mt19937_64 rng_;
  std::vector<std::vector<int>> assignment_;
  std::vector<long> doc_topic_;    // D x K
  std::vector<long> topic_word_;   // K x V
  std::vector<long> topic_totals_;
  std::vector<double> scratch_;
  int sweeps_ = 0;
};

TopicModel train_lda(const LdaCorpus& corpus, const LdaParams& params);

/// Mean document-topic proportions per community, in `communities` order.
/// Communities without documents get the uniform distribution.
std::vector<std::vector<double>> community_topic_means(const TopicModel& model,
                                                       const LdaCorpus& corpus,
                                                       const std::vector<std::string>& communities);

}  // namespace foodquiz

#endif  // FOODQUIZ_LDA_HPP_
