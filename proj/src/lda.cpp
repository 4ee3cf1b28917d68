#include "foodquiz/lda.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "foodquiz/tokenizer.hpp"

namespace foodquiz {

std::size_t LdaCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.size();
  return n;
}

LdaCorpus make_lda_corpus(const CommunityCorpus& corpus,
                          const std::vector<std::string>& vocabulary) {
  LdaCorpus out;
  out.vocabulary = vocabulary;
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) index[vocabulary[i]] = static_cast<int>(i);
  for (const auto& [community, docs] : corpus.documents) {
    for (const auto& text : docs) {
      std::vector<int> ids;
      for (const auto& tok : tokenize(text)) {
        auto it = index.find(tok);
        if (it != index.end()) ids.push_back(it->second);
      }
      out.docs.push_back(std::move(ids));
      out.doc_community.push_back(community);
    }
  }
  return out;
}

std::vector<std::string> TopicModel::top_tokens(int topic, std::size_t n) const {
  const auto& dist = phi.at(static_cast<std::size_t>(topic));
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) out.push_back(vocabulary[order[i]]);
  return out;
}

GibbsLda::GibbsLda(const LdaCorpus& corpus, const LdaParams& params)
    : corpus_(corpus),
      k_(params.topics),
      v_(static_cast<int>(corpus.vocabulary.size())),
      alpha_(params.effective_alpha()),
      beta_(params.beta),
      params_(params),
      rng_(params.seed) {
  if (k_ < 2) throw validation_error("bad_lda_params", "LDA needs at least 2 topics");
  if (params.iterations < 1) throw validation_error("bad_lda_params", "LDA needs >= 1 iteration");
  if (v_ == 0) throw validation_error("empty_vocabulary", "LDA vocabulary is empty");
  if (k_ > v_) {
    throw validation_error("bad_lda_params", "topic count " + std::to_string(k_) +
                                                 " exceeds vocabulary size " +
                                                 std::to_string(v_));
  }
  std::size_t d_count = corpus.docs.size();
  doc_topic_.assign(d_count * k_, 0);
  topic_word_.assign(static_cast<std::size_t>(k_) * v_, 0);
  topic_totals_.assign(k_, 0);
  scratch_.assign(k_, 0.0);
  assignment_.resize(d_count);
  std::uniform_int_distribution<int> pick(0, k_ - 1);
  for (std::size_t d = 0; d < d_count; ++d) {
    assignment_[d].resize(corpus.docs[d].size());
    for (std::size_t i = 0; i < corpus.docs[d].size(); ++i) {
      int z = pick(rng_);
      int w = corpus.docs[d][i];
      assignment_[d][i] = z;
      ++doc_topic_[d * k_ + z];
      ++topic_word_[static_cast<std::size_t>(z) * v_ + w];
      ++topic_totals_[z];
    }
  }
}

void GibbsLda::sweep() {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double vbeta = v_ * beta_;
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d) {
    const auto& doc = corpus_.docs[d];
    long* dt = &doc_topic_[d * k_];
    for (std::size_t i = 0; i < doc.size(); ++i) {
      int w = doc[i];
      int z = assignment_[d][i];
      --dt[z];
      --topic_word_[static_cast<std::size_t>(z) * v_ + w];
      --topic_totals_[z];

      double total = 0.0;
      for (int k = 0; k < k_; ++k) {
        total += (dt[k] + alpha_) * (topic_word_[static_cast<std::size_t>(k) * v_ + w] + beta_) /
                 (topic_totals_[k] + vbeta);
        scratch_[k] = total;
      }
      double u = unit(rng_) * total;
      int nz = static_cast<int>(std::upper_bound(scratch_.begin(), scratch_.end(), u) -
                                scratch_.begin());
      if (nz >= k_) nz = k_ - 1;

      assignment_[d][i] = nz;
      ++dt[nz];
      ++topic_word_[static_cast<std::size_t>(nz) * v_ + w];
      ++topic_totals_[nz];
    }
  }
  ++sweeps_;
}

TopicModel GibbsLda::model() const {
  TopicModel m;
  m.topics = k_;
  m.vocabulary = corpus_.vocabulary;
  m.alpha = alpha_;
  m.beta = beta_;
  m.iterations = sweeps_;
  m.seed = params_.seed;
  m.phi.assign(k_, std::vector<double>(v_));
  for (int k = 0; k < k_; ++k) {
    double denom = topic_totals_[k] + v_ * beta_;
    for (int w = 0; w < v_; ++w) {
      m.phi[k][w] = (topic_word_[static_cast<std::size_t>(k) * v_ + w] + beta_) / denom;
    }
  }
  m.theta.assign(corpus_.docs.size(), std::vector<double>(k_));
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d) {
    double denom = corpus_.docs[d].size() + k_ * alpha_;
    for (int k = 0; k < k_; ++k) m.theta[d][k] = (doc_topic_[d * k_ + k] + alpha_) / denom;
  }
  return m;
}

TopicModel train_lda(const LdaCorpus& corpus, const LdaParams& params) {
  GibbsLda sampler(corpus, params);
  for (int it = 0; it < params.iterations; ++it) sampler.sweep();
  return sampler.model();
}

std::vector<std::vector<double>> community_topic_means(const TopicModel& model,
                                                       const LdaCorpus& corpus,
                                                       const std::vector<std::string>& communities) {
  std::map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < communities.size(); ++i) row[communities[i]] = i;
  std::vector<std::vector<double>> sums(communities.size(),
                                        std::vector<double>(model.topics, 0.0));
  std::vector<std::size_t> counts(communities.size(), 0);
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    auto it = row.find(corpus.doc_community[d]);
    if (it == row.end()) continue;
    for (int k = 0; k < model.topics; ++k) sums[it->second][k] += model.theta[d][k];
    ++counts[it->second];
  }
  for (std::size_t r = 0; r < communities.size(); ++r) {
    for (int k = 0; k < model.topics; ++k) {
      sums[r][k] = counts[r] ? sums[r][k] / counts[r] : 1.0 / model.topics;
    }
  }
  return sums;
}

}  // namespace foodquiz
