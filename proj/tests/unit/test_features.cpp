#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "foodquiz/corpus.hpp"
#include "foodquiz/features.hpp"
#include "foodquiz/pipeline.hpp"

using namespace foodquiz;

namespace {

CommunityCorpus corpus_of(const std::map<std::string, std::vector<std::string>>& docs) {
  std::vector<std::pair<std::string, double>> rates;
  int i = 0;
  for (const auto& [c, _] : docs) rates.emplace_back(c, 10.0 + i++);
  auto labels = make_labels(rates);
  std::ostringstream jsonl;
  for (const auto& [c, texts] : docs) {
    for (const auto& t : texts) jsonl << json{{"community", c}, {"text", t}}.dump() << "\n";
  }
  std::istringstream in(jsonl.str());
  return parse_documents(in, default_hashtag_filter(), labels);
}

double raw_of(const FeatureCounts& fc, const std::string& community, const FeatureId& f) {
  auto col = fc.space.index_of(f);
  REQUIRE(col.has_value());
  return fc.raw.at(*fc.raw.row_of(community), *col);
}

// Oracle: count the values at or below each candidate cut, pick the
// nearest-rank positions by walking the sorted copy.
std::pair<double, double> oracle_tertiles(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  std::size_t i1 = 0, i2 = 0;
  while (3 * (i1 + 1) <= n - 1) ++i1;
  while (3 * (i2 + 1) <= 2 * (n - 1)) ++i2;
  return {v[i1], v[i2]};
}

}  // namespace

TEST_CASE("FeatureId text form") {
  FeatureId f{FeatureKind::hashtag, "#cook"};
  CHECK(f.str() == "hashtag:#cook");
  CHECK(FeatureId::parse("hashtag:#cook") == f);
  CHECK(FeatureId::parse("topic:3") == FeatureId{FeatureKind::topic, "3"});
  CHECK_THROWS_AS(FeatureId::parse("nokind"), Error);
  CHECK_THROWS_AS(FeatureId::parse("colour:red"), Error);
}

TEST_CASE("count_features: min count and raw counts") {
  auto c = corpus_of({{"A", {"fruit fruit fruit #meal", "fruit fruit curry #meal"}},
                      {"B", {"fruit curry #meal"}}});
  auto fc = count_features(c, 3, Normalization::raw_count);
  FeatureId fruit{FeatureKind::word, "fruit"};
  CHECK(raw_of(fc, "A", fruit) == 5.0);
  CHECK(raw_of(fc, "B", fruit) == 1.0);
  CHECK_FALSE(fc.space.index_of({FeatureKind::word, "curry"}).has_value());
  CHECK(fc.space.index_of({FeatureKind::hashtag, "#meal"}).has_value());
  CHECK(fc.space.features.front().kind == FeatureKind::word);
}

TEST_CASE("count_features: relative frequency") {
  std::string pad;
  for (int i = 0; i < 44; ++i) pad += "pad ";
  // A: 5 fruit + 44 pad + #meal = 50 tokens.
  auto c = corpus_of({{"A", {"fruit fruit fruit fruit fruit " + pad + "#meal"}},
                      {"B", {"fruit #meal", "fruit fruit #meal"}}});
  auto fc = count_features(c, 3, Normalization::relative_frequency);
  CHECK(fc.community_tokens.at("A") == 50);
  CHECK(raw_of(fc, "A", {FeatureKind::word, "fruit"}) == doctest::Approx(0.10));
  CHECK(raw_of(fc, "B", {FeatureKind::word, "fruit"}) == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("count_features: empty vocabulary is fatal") {
  auto c = corpus_of({{"A", {"one #meal"}}, {"B", {"two #snack"}}});
  try {
    count_features(c, 3, Normalization::raw_count);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == "empty_vocabulary");
  }
}

TEST_CASE("tertile thresholds: examples") {
  auto t = tertile_thresholds({0, 0, 1, 1, 2, 3, 5, 8, 13});
  CHECK(t.t1 == 1.0);
  CHECK(t.t2 == 3.0);
  CHECK(bin_value(1, t) == 0);
  CHECK(bin_value(2, t) == 1);
  CHECK(bin_value(13, t) == 2);
  CHECK(bin_value(0, t) == 0);
  auto c = tertile_thresholds({4, 4, 4, 4});
  CHECK(c.t1 == 4.0);
  CHECK(c.t2 == 4.0);
  CHECK(bin_value(4, c) == 0);
  auto one = tertile_thresholds({2.5});
  CHECK(one.t1 == 2.5);
  CHECK(one.t2 == 2.5);
}

TEST_CASE("fit_bins/apply_bins agree with the sort-and-index oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(1, 100);
  std::uniform_int_distribution<int> small(0, 6);
  std::uniform_real_distribution<double> real(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = len(rng);
    bool ties = trial % 2 == 0;
    RawMatrix raw;
    raw.features = {{FeatureKind::word, "x"}};
    for (int i = 0; i < n; ++i) {
      raw.communities.push_back("c" + std::to_string(i));
      raw.values.push_back(ties ? small(rng) : real(rng));
    }
    FeatureSpace space;
    space.features = raw.features;
    space = fit_bins(raw, space);
    auto [o1, o2] = oracle_tertiles(raw.values);
    REQUIRE(space.thresholds[0].t1 == o1);
    REQUIRE(space.thresholds[0].t2 == o2);
    auto binned = apply_bins(raw, space);
    std::array<int, 3> occupancy{};
    for (int i = 0; i < n; ++i) {
      double v = raw.values[i];
      int expect = v <= o1 ? 0 : (v <= o2 ? 1 : 2);
      REQUIRE(binned.at(i, 0) == expect);
      ++occupancy[expect];
    }
    if (!ties) {
      for (int b = 0; b < 3; ++b) CHECK(std::abs(occupancy[b] - n / 3.0) <= 1.0);
    }
  }
}

TEST_CASE("binning properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    double a = u(rng), b = u(rng);
    BinThresholds t{std::min(a, b), std::max(a, b)};
    double x = u(rng), y = u(rng);
    if (x > y) std::swap(x, y);
    CHECK(bin_value(x, t) <= bin_value(y, t));
  }
  RawMatrix raw;
  raw.features = {{FeatureKind::word, "flat"}, {FeatureKind::word, "zero"}};
  for (int i = 0; i < 10; ++i) {
    raw.communities.push_back("c" + std::to_string(i));
    raw.values.push_back(3.5);
    raw.values.push_back(0.0);
  }
  FeatureSpace space;
  space.features = raw.features;
  auto binned = apply_bins(raw, fit_bins(raw, space));
  for (auto b : binned.bins) CHECK(b == 0);
}

TEST_CASE("apply_bins on unseen rows uses training thresholds") {
  FeatureSpace space;
  space.features = {{FeatureKind::word, "fruit"}, {FeatureKind::word, "kale"}};
  space.thresholds = {{1, 3}, {0.5, 0.7}};
  auto row = apply_bins({{{FeatureKind::word, "fruit"}, 2.0}}, space);
  CHECK(row.at({FeatureKind::word, "fruit"}) == 1);
  CHECK(row.at({FeatureKind::word, "kale"}) == 0);
  row = apply_bins({{{FeatureKind::word, "fruit"}, 13.0}, {{FeatureKind::word, "kale"}, 0.9}},
                   space);
  CHECK(row.at({FeatureKind::word, "fruit"}) == 2);
  CHECK(row.at({FeatureKind::word, "kale"}) == 2);
}

TEST_CASE("feature space json round trip") {
  FeatureSpace space;
  space.features = {{FeatureKind::word, "fruit"}, {FeatureKind::topic, "0"}};
  space.thresholds = {{0.1, 0.30000000000000004}, {0.2, 0.25}};
  space.min_count = 4;
  space.normalization = Normalization::raw_count;
  space.topics = {{0, {"a", "b"}}};
  space.provenance = {{"seed", 9}};
  auto back = feature_space_from_json(to_json(space));
  CHECK(back.features == space.features);
  CHECK(back.thresholds == space.thresholds);
  CHECK(back.min_count == 4);
  CHECK(back.normalization == Normalization::raw_count);
  REQUIRE(back.topic(0) != nullptr);
  CHECK(back.topic(0)->top_tokens == std::vector<std::string>{"a", "b"});
  CHECK(to_json(back) == to_json(space));
}

TEST_CASE("build_features: topic columns and provenance") {
  std::map<std::string, std::vector<std::string>> docs;
  std::mt19937_64 rng(1);
  const std::vector<std::string> words{"apple", "pear", "kale", "fries", "gravy", "soda"};
  for (int c = 0; c < 6; ++c) {
    for (int d = 0; d < 20; ++d) {
      std::string t;
      for (int k = 0; k < 6; ++k) t += words[rng() % words.size()] + " ";
      docs["c" + std::to_string(c)].push_back(t + "#meal");
    }
  }
  auto corpus = corpus_of(docs);
  FeatureConfig cfg;
  cfg.lda.topics = 3;
  cfg.lda.iterations = 20;
  cfg.top_tokens = 4;
  auto fb = build_features(corpus, cfg);
  CHECK(fb.space.fitted());
  CHECK(fb.space.topics.size() == 3);
  CHECK(fb.space.topics[0].top_tokens.size() == 4);
  CHECK(fb.binned.cols() == fb.space.features.size());
  CHECK(fb.space.index_of({FeatureKind::topic, "2"}).has_value());
  CHECK(fb.space.provenance.contains("config_fingerprint"));
  for (std::size_t r = 0; r < fb.raw.rows(); ++r) {
    double s = 0;
    for (int k = 0; k < 3; ++k) s += fb.raw.at(r, *fb.space.index_of({FeatureKind::topic, std::to_string(k)}));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  cfg.lda.topics = 0;
  auto plain = build_features(corpus, cfg);
  CHECK(plain.space.topics.empty());
  CHECK_FALSE(plain.topics.has_value());
}
