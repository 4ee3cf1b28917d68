#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "foodquiz/stats.hpp"
#include "foodquiz/synth.hpp"
#include "support/fixtures.hpp"

using namespace foodquiz;

namespace {

RespondentRecord rec(std::optional<double> kg, std::optional<double> m,
                     std::optional<bool> predicted, double cutoff = kDefaultBmiCutoff) {
  RespondentRecord r;
  r.session_id = "s";
  r.weight_kg = kg;
  r.height_m = m;
  if (predicted) r.prediction = tally_votes(*predicted ? 7 : 0, 7);
  derive_outcome(r, cutoff);
  return r;
}

// Record whose bmi class and correctness are chosen directly.
RespondentRecord outcome(bool heavy, bool correct) {
  double height = 1.75;
  double weight = (heavy ? 32.0 : 22.0) * height * height;
  return rec(weight, height, correct ? heavy : !heavy);
}

std::vector<std::string> lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("bmi examples and conversions") {
  CHECK(bmi(100, 2.0) == doctest::Approx(25.0));
  CHECK(bmi(74.4, 1.73) == doctest::Approx(24.86).epsilon(0.0005));
  CHECK(std::abs(bmi(74.4, 1.73) - 24.9) < 0.05);
  CHECK(lbs_to_kg(164) == doctest::Approx(74.39).epsilon(0.0002));
  CHECK(inches_to_m(68) == doctest::Approx(1.7272));
  CHECK(bmi(lbs_to_kg(164), inches_to_m(68)) == doctest::Approx(24.94).epsilon(0.0003));
  for (auto [w, h] : std::vector<std::pair<double, double>>{
           {1000, 1.7}, {20, 1.7}, {70, 0.5}, {70, 2.8}, {NAN, 1.7}}) {
    try {
      bmi(w, h);
      FAIL("expected implausible_anthropometry");
    } catch (const Error& e) {
      CHECK(e.code() == "implausible_anthropometry");
    }
  }
}

TEST_CASE("bmi monotonicity and unit round trip") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> h(0.6, 2.7), w(21, 399);
  for (int i = 0; i < 1000; ++i) {
    double a = h(rng), b = h(rng), x = w(rng), y = w(rng);
    if (a > b) std::swap(a, b);
    if (x > y) std::swap(x, y);
    if (a < b) CHECK(bmi(x, a) > bmi(x, b));
    if (x < y) CHECK(bmi(x, a) < bmi(y, a));
    CHECK(std::abs(lbs_to_kg(kg_to_lbs(x)) - x) <= 1e-9 * x);
    CHECK(bmi(x, a) == doctest::Approx(x / (a * a)).epsilon(1e-12));
  }
}

TEST_CASE("label_individual boundary") {
  CHECK(label_individual(28.7));
  CHECK_FALSE(label_individual(24.9));
  CHECK_FALSE(label_individual(28.69));
  CHECK(label_individual(30, 30));
}

TEST_CASE("derive_outcome") {
  auto r = rec(74.4, 1.73, false);
  CHECK(r.bmi);
  CHECK(*r.true_label == false);
  CHECK(*r.correct == true);
  auto missing = rec(std::nullopt, 1.73, true);
  CHECK_FALSE(missing.bmi);
  CHECK_FALSE(missing.true_label);
  CHECK_FALSE(missing.correct);
  auto no_pred = rec(90, 1.73, std::nullopt);
  CHECK(no_pred.bmi);
  CHECK_FALSE(no_pred.correct);
}

TEST_CASE("accuracy report: decomposition identity") {
  std::vector<RespondentRecord> rs;
  // 177 heavy with 16.0% right rounded to counts, 823 light with 92.2%.
  for (int i = 0; i < 177; ++i) rs.push_back(outcome(true, i < 28));
  for (int i = 0; i < 823; ++i) rs.push_back(outcome(false, i < 759));
  auto r = accuracy_report(rs);
  CHECK(r.n == 1000);
  CHECK(r.at_or_above.proportion == doctest::Approx(0.177));
  CHECK(r.below.proportion == doctest::Approx(0.823));
  double identity = r.at_or_above.proportion * r.at_or_above.accuracy +
                    r.below.proportion * r.below.accuracy;
  CHECK(std::abs(r.overall - identity) <= 1e-9);
  CHECK(std::abs(r.overall - 0.787) <= 0.001);

  std::vector<RespondentRecord> all;
  for (int i = 0; i < 20; ++i) all.push_back(outcome(i % 3 == 0, true));
  all.push_back(rec(std::nullopt, std::nullopt, true));
  all.push_back(rec(80, 1.8, std::nullopt));
  auto perfect = accuracy_report(all);
  CHECK(perfect.overall == 1.0);
  CHECK(perfect.at_or_above.accuracy == 1.0);
  CHECK(perfect.below.accuracy == 1.0);
  CHECK(perfect.missing_bmi == 1);
  CHECK(perfect.missing_prediction == 1);
}

TEST_CASE("accuracy report matches a brute-force recount") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> h(1.5, 2.0), b(17, 40);
  std::bernoulli_distribution coin(0.5), gap(0.05);
  std::vector<RespondentRecord> rs;
  for (int i = 0; i < 1000; ++i) {
    double height = h(rng);
    bool has = !gap(rng);
    rs.push_back(rec(has ? std::optional<double>(b(rng) * height * height) : std::nullopt, height,
                     coin(rng)));
  }
  auto r = accuracy_report(rs);
  std::size_t n = 0, right = 0, heavy = 0, heavy_right = 0;
  for (const auto& x : rs) {
    if (!x.weight_kg) continue;
    double v = *x.weight_kg / (*x.height_m * *x.height_m);
    bool truth = v >= 28.7;
    bool ok = x.prediction->label == truth;
    ++n;
    right += ok;
    heavy += truth;
    heavy_right += truth && ok;
  }
  CHECK(r.n == n);
  CHECK(r.correct == right);
  CHECK(r.at_or_above.n == heavy);
  CHECK(r.at_or_above.correct == heavy_right);
  CHECK(r.below.n == n - heavy);
  CHECK(r.overall == doctest::Approx(static_cast<double>(right) / n));
  CHECK(std::abs(r.overall - (r.at_or_above.proportion * r.at_or_above.accuracy +
                              r.below.proportion * r.below.accuracy)) <= 1e-9);
  auto j = to_json(r);
  CHECK(j.contains("bmi_at_or_above_cutoff"));
}

TEST_CASE("engagement") {
  auto e = engagement_from_counts(3, 744, 13, 201);
  CHECK(e.rate_correct == doctest::Approx(0.0040).epsilon(0.01));
  CHECK(e.rate_incorrect == doctest::Approx(0.0647).epsilon(0.001));
  REQUIRE(e.ratio);
  CHECK(std::abs(*e.ratio - 16.0) <= 0.5);
  auto none = engagement_from_counts(0, 10, 0, 10);
  CHECK(none.rate_correct == 0.0);
  CHECK(none.rate_incorrect == 0.0);
  CHECK_FALSE(none.ratio);
  CHECK(to_json(none)["ratio"] == "undefined");
  auto equal = engagement_from_counts(1, 10, 2, 20);
  CHECK(*equal.ratio == doctest::Approx(1.0));

  std::vector<RespondentRecord> rs;
  for (int i = 0; i < 10; ++i) {
    auto r = outcome(false, i < 6);
    if (i == 0 || i == 7 || i == 8) r.comment = "hmm";
    if (i == 1) r.comment = "   ";
    rs.push_back(r);
  }
  auto s = engagement_stats(rs);
  CHECK(s.n_correct == 6);
  CHECK(s.commented_correct == 1);
  CHECK(s.n_incorrect == 4);
  CHECK(s.commented_incorrect == 2);
}

TEST_CASE("demographics summary") {
  auto empty = demographics_summary({});
  CHECK(lines(empty.at("completeness")) == std::vector<std::string>{"field,provided,total"});
  CHECK(lines(empty.at("age_histogram")).size() == 1);

  std::vector<RespondentRecord> rs;
  const double ages[] = {18, 19, 22, 24, 24, 31, 45};
  for (int i = 0; i < 10; ++i) {
    RespondentRecord r = i < 8 ? rec(22.5 * 1.7 * 1.7 + i * 3, 1.7, true) : rec({}, {}, true);
    if (i < 7) r.age = ages[i];
    if (i < 5) r.gender = i % 2 ? Gender::male : Gender::female;
    if (i < 3) r.location = "Austin, Texas";
    rs.push_back(r);
  }
  auto d = demographics_summary(rs);
  auto age = lines(d.at("age_histogram"));
  CHECK(age == std::vector<std::string>{"bin_lo,bin_hi,count", "15,20,2", "20,25,3", "25,30,0",
                                        "30,35,1", "35,40,0", "40,45,0", "45,50,1"});
  auto comp = lines(d.at("completeness"));
  CHECK(comp == std::vector<std::string>{"field,provided,total", "age,7,10", "bmi,8,10",
                                         "gender,5,10", "location,3,10"});
  int bmi_total = 0;
  for (std::size_t i = 1; i < lines(d.at("bmi_histogram")).size(); ++i) {
    auto l = lines(d.at("bmi_histogram"))[i];
    bmi_total += std::stoi(l.substr(l.rfind(',') + 1));
  }
  CHECK(bmi_total == 8);
  auto g = lines(d.at("gender_counts"));
  CHECK(std::find(g.begin(), g.end(), "female,3") != g.end());
  CHECK(std::find(g.begin(), g.end(), "male,2") != g.end());
  auto loc = lines(d.at("location_counts"));
  CHECK(std::find(loc.begin(), loc.end(), "US/Texas,3") != loc.end());
  CHECK(d.count("bmi_by_gender"));

  std::vector<RespondentRecord> many(945);
  for (int i = 0; i < 833; ++i) many[i].age = 30;
  CHECK(lines(demographics_summary(many).at("completeness"))[1] == "age,833,945");
}

TEST_CASE("location coarsening") {
  CHECK(coarsen_location("Austin, Texas") == "US/Texas");
  CHECK(coarsen_location("Portland OR") == "US/Oregon");
  CHECK(coarsen_location("west virginia") == "US/West Virginia");
  CHECK(coarsen_location("Toronto, Ontario") == "Canada/Ontario");
  CHECK(coarsen_location("London, UK") == "United Kingdom");
  CHECK(coarsen_location("somewhere") == "other");
  CHECK(coarsen_location("") == "other");
}

TEST_CASE("export anonymization") {
  std::vector<RespondentRecord> rs;
  const std::vector<std::string> handles{"@FoodieJane", "bob_eats_1999", "carla.k"};
  for (int i = 0; i < 3; ++i) {
    auto r = rec(70 + i * 10, 1.7, i % 2 == 0);
    r.session_id = "session-secret-" + std::to_string(i);
    r.handles["twitter"] = handles[i];
    r.handles["instagram"] = handles[(i + 1) % 3];
    r.comment = "follow me " + handles[i] + " and @someone_else, thanks";
    r.location = "123 Main St, Springfield, Illinois";
    rs.push_back(r);
  }
  std::string a = export_anonymized(rs, "salt-1");
  for (const auto& h : handles) {
    CHECK(a.find(h) == std::string::npos);
    std::string bare = h[0] == '@' ? h.substr(1) : h;
    CHECK(a.find(bare) == std::string::npos);
  }
  CHECK(a.find("someone_else") == std::string::npos);
  CHECK(a.find("session-secret") == std::string::npos);
  CHECK(a.find("Main St") == std::string::npos);
  CHECK(a.find("US/Illinois") != std::string::npos);
  CHECK(a.find(salted_hash("salt-1", handles[0])) != std::string::npos);
  CHECK(a == export_anonymized(rs, "salt-1"));
  std::string b = export_anonymized(rs, "salt-2");
  CHECK(b.find(salted_hash("salt-1", handles[0])) == std::string::npos);

  auto back = read_export(a);
  REQUIRE(back.size() == rs.size());
  auto r1 = accuracy_report(rs), r2 = accuracy_report(back);
  CHECK(r1.n == r2.n);
  CHECK(r1.correct == r2.correct);
  CHECK(r1.overall == r2.overall);
  CHECK(r1.at_or_above.n == r2.at_or_above.n);
}

TEST_CASE("records jsonl round trip") {
  QuizEngine engine(fixtures::figure2_quiz());
  auto rs = simulate_respondents(engine, named_policy("uniform"), 200, 4);
  std::string text = write_records_jsonl(rs);
  auto back = read_records_jsonl(text);
  CHECK(write_records_jsonl(back) == text);
  CHECK(to_json(accuracy_report(back)) == to_json(accuracy_report(rs)));
  CHECK(write_records_jsonl(simulate_respondents(engine, named_policy("uniform"), 200, 4)) == text);
}
