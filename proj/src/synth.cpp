#include "foodquiz/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace foodquiz {

namespace {

constexpr std::array<const char*, 51> kStateCodes{
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "DC", "FL", "GA", "HI", "ID",
    "IL", "IN", "IA", "KS", "KY", "LA", "ME", "MD", "MA", "MI", "MN", "MS", "MO",
    "MT", "NE", "NV", "NH", "NJ", "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA",
    "RI", "SC", "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY"};

// Planted vocabulary: the first half rises with the overweight rate.
constexpr std::array<const char*, 20> kPlantedWords{
    "fried", "gravy", "biscuits", "soda", "bacon", "nachos", "donuts", "ranch",
    "casserole", "fries", "fruit", "kale", "quinoa", "salad", "yogurt", "hummus",
    "avocado", "smoothie", "lentils", "sushi"};

constexpr std::array<const char*, 7> kMealTags{"#breakfast", "#brunch", "#lunch", "#dinner",
                                               "#supper", "#snack", "#meal"};

std::string community_name(int i, int n) {
  if (n <= static_cast<int>(kStateCodes.size())) return kStateCodes[i];
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%03d", i);
  return buf;
}

std::string planted_name(int j) {
  if (j < static_cast<int>(kPlantedWords.size())) return kPlantedWords[j];
  return "planted" + std::to_string(j);
}

std::string noise_name(int j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "tok%03d", j);
  return buf;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0xc0de));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticCorpus out;
  for (int j = 0; j < p.planted_tokens; ++j) out.planted.push_back(planted_name(j));

  // Distinct rates spread over a plausible band.
  std::vector<double> rates;
  for (int c = 0; c < p.communities; ++c) rates.push_back(55.0 + 15.0 * unit(rng));
  double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / rates.size();
  double var = 0.0;
  for (double r : rates) var += (r - mean) * (r - mean);
  double sd = std::sqrt(var / rates.size());
  if (sd == 0.0) sd = 1.0;

  int half = (p.planted_tokens + 1) / 2;
  for (int c = 0; c < p.communities; ++c) {
    std::string id = community_name(c, p.communities);
    out.rates.emplace_back(id, rates[c]);
    double z = (rates[c] - mean) / sd;

    std::vector<double> weights(p.planted_tokens);
    for (int j = 0; j < p.planted_tokens; ++j) {
      double direction = j < half ? 1.0 : -1.0;
      weights[j] = std::exp(p.signal * direction * z + p.log_noise * gauss(rng));
    }
    std::discrete_distribution<int> planted_pick(weights.begin(), weights.end());
    std::uniform_int_distribution<int> noise_pick(0, std::max(0, p.noise_tokens - 1));
    std::uniform_int_distribution<int> tag_pick(0, static_cast<int>(kMealTags.size()) - 1);
    std::uniform_int_distribution<int> doc_count(p.min_docs, p.max_docs);

    int docs = doc_count(rng);
    for (int d = 0; d < docs; ++d) {
      std::string text;
      for (int t = 0; t < p.tokens_per_doc; ++t) {
        bool planted = p.planted_tokens > 0 && (p.noise_tokens == 0 || unit(rng) < p.planted_share);
        text += planted ? out.planted[planted_pick(rng)] : noise_name(noise_pick(rng));
        text += ' ';
      }
      if (unit(rng) >= p.unfiltered_share) text += kMealTags[tag_pick(rng)];
      out.documents.emplace_back(id, trim(text));
    }
  }
  return out;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus,
                            const std::filesystem::path& corpus_jsonl,
                            const std::filesystem::path& labels_csv) {
  std::string docs;
  for (const auto& [community, text] : corpus.documents) {
    docs += json{{"community", community}, {"text", text}}.dump() + "\n";
  }
  write_file(corpus_jsonl, docs);
  std::string labels = "community,overweight_rate\n";
  for (const auto& [community, rate] : corpus.rates) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", rate);
    labels += community + "," + buf + "\n";
  }
  write_file(labels_csv, labels);
}

PlantedTopics generate_planted_topics(int words_per_topic, int docs, int doc_length,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0x70b1c));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int v = 2 * words_per_topic;

  PlantedTopics out;
  for (int w = 0; w < v; ++w) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%02d", w);
    out.corpus.vocabulary.push_back(buf);
  }
  out.phi.assign(2, std::vector<double>(v, 0.0));
  for (int k = 0; k < 2; ++k) {
    double total = 0.0;
    for (int i = 0; i < words_per_topic; ++i) {
      double w = 0.5 + unit(rng);
      out.phi[k][k * words_per_topic + i] = w;
      total += w;
    }
    for (double& x : out.phi[k]) x /= total;
  }
  std::discrete_distribution<int> topic0(out.phi[0].begin(), out.phi[0].end());
  std::discrete_distribution<int> topic1(out.phi[1].begin(), out.phi[1].end());
  for (int d = 0; d < docs; ++d) {
    // Mostly-pure documents: one dominant topic per document.
    double share = unit(rng) < 0.5 ? 0.9 : 0.1;
    std::vector<int> doc;
    for (int i = 0; i < doc_length; ++i) {
      doc.push_back(unit(rng) < share ? topic0(rng) : topic1(rng));
    }
    out.corpus.docs.push_back(std::move(doc));
    out.corpus.doc_community.push_back("D" + std::to_string(d % 10));
  }
  return out;
}

std::vector<RespondentRecord> simulate_respondents(const QuizEngine& engine,
                                                   const AnswerPolicy& policy, std::size_t n,
                                                   std::uint64_t seed, double cutoff) {
  static constexpr std::array<const char*, 8> kLocations{
      "Tucson, AZ", "Phoenix, Arizona", "Austin, Texas", "Toronto, Ontario",
      "London, UK", "Seattle, WA", "somewhere", "Sydney, Australia"};
  std::vector<RespondentRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t s = mix_seed(seed, i);
    std::mt19937_64 rng(mix_seed(s, 0xdea0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Session session = simulate_session(engine, policy, s);
    RespondentRecord r;
    r.session_id = session.id;
    r.transcript = session.transcript;
    r.prediction = session.prediction;
    if (unit(rng) > 0.09) {
      double h = std::clamp(1.73 + 0.09 * gauss(rng), 1.45, 2.05);
      double b = std::clamp(std::exp(std::log(24.3) + 0.17 * gauss(rng)), 16.0, 55.0);
      r.height_m = h;
      r.weight_kg = std::clamp(b * h * h, 30.0, 250.0);
    }
    if (unit(rng) > 0.12) r.age = std::floor(18.0 + 25.0 * std::pow(unit(rng), 2.5));
    if (unit(rng) > 0.10) {
      double g = unit(rng);
      r.gender = g < 0.48 ? Gender::female : g < 0.97 ? Gender::male : Gender::other;
    }
    if (unit(rng) > 0.34) r.location = kLocations[static_cast<std::size_t>(unit(rng) * kLocations.size()) % kLocations.size()];
    if (unit(rng) < 0.3) {
      r.handles["twitter"] = salted_hash("simulation", "user" + std::to_string(s % 100000));
    }
    derive_outcome(r, cutoff);
    double comment_rate = r.correct && !*r.correct ? 0.065 : 0.004;
    if (unit(rng) < comment_rate) r.comment = "the quiz got me wrong";
    if (r.correct && *r.correct && r.comment) r.comment = "spot on";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace foodquiz
