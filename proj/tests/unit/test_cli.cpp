#include <doctest.h>

#include <algorithm>
#include <regex>

#include "foodquiz/common.hpp"
#include "support/cli.hpp"
#include "support/fixtures.hpp"

using namespace foodquiz;
using fixtures::run_cli;
using fixtures::slurp;

namespace {

const std::string kData = FOODQUIZ_DATA_DIR;

bool one_error_line(const std::string& err) {
  static const std::regex line(R"(error code=[a-z_]+ kind=(usage|validation|io) message=".*"\n)");
  return std::regex_match(err, line);
}

std::vector<std::string> train_args(const fixtures::TempDir& dir, const std::string& out,
                                    const std::string& seed) {
  return {"train", "--corpus", (dir / "corpus.jsonl").string(), "--labels",
          (dir / "labels.csv").string(), "--seed", seed, "--topics", "4",
          "--lda-iterations", "20", "--out-dir", (dir / out).string()};
}

}  // namespace

TEST_CASE("cli: --help documents every flag") {
  fixtures::TempDir dir;
  std::map<std::string, std::vector<std::string>> flags{
      {"train",
       {"--corpus", "--labels", "--hashtags", "--median-positive", "--seed", "--trees", "--depth",
        "--subsample", "--no-bootstrap", "--criterion", "--min-count", "--normalization",
        "--topics", "--lda-iterations", "--alpha", "--beta", "--out-dir"}},
      {"compile-quiz", {"--forest", "--bank", "--overrides", "--featurespace", "--out", "--report"}},
      {"validate-quiz", {"--quiz", "--forest"}},
      {"serve", {"--bind", "--quiz", "--data-dir", "--cutoff", "FOODQUIZ_ADMIN_TOKEN",
                 "FOODQUIZ_EXPORT_SALT"}},
      {"simulate", {"--quiz", "--n", "--policy", "--seed", "--cutoff", "--out"}},
      {"eval", {"--records", "--cutoff", "--out-dir"}},
      {"synth", {"--out-dir", "--seed", "--communities", "--planted", "--noise"}}};
  flags["loocv"] = flags["train"];
  auto top = run_cli({"--help"}, dir.path());
  CHECK(top.code == 0);
  for (const auto& [cmd, list] : flags) {
    CHECK(top.out.find(cmd) != std::string::npos);
    auto help = run_cli({cmd, "--help"}, dir.path());
    CHECK(help.code == 0);
    for (const auto& f : list) {
      INFO(cmd << " " << f);
      CHECK(help.out.find(f) != std::string::npos);
    }
    // Every long flag the help shows is one we expect.
    std::regex long_flag(R"(--[a-z][a-z-]+)");
    for (auto it = std::sregex_iterator(help.out.begin(), help.out.end(), long_flag);
         it != std::sregex_iterator(); ++it) {
      std::string f = it->str();
      if (f == "--help") continue;
      INFO(cmd << " shows " << f);
      CHECK(std::find(list.begin(), list.end(), f) != list.end());
    }
  }
}

TEST_CASE("cli: exit codes and single-line errors") {
  fixtures::TempDir dir;
  auto none = run_cli({}, dir.path());
  CHECK(none.code == 1);
  CHECK(one_error_line(none.err));
  auto unknown = run_cli({"train", "--bogus"}, dir.path());
  CHECK(unknown.code == 1);
  CHECK(one_error_line(unknown.err));
  auto missing = run_cli({"eval", "--records", (dir / "nope.jsonl").string()}, dir.path());
  CHECK(missing.code == 3);
  CHECK(one_error_line(missing.err));
  CHECK(missing.err.find("code=missing_input") != std::string::npos);

  write_file(dir / "labels.csv", "community,overweight_rate\nAZ,60\nTX,65\n");
  write_file(dir / "corpus.jsonl", "{\"community\":\"AZ\",\"text\":\"x #meal\"}\nnot json\n");
  auto bad = run_cli({"train", "--corpus", (dir / "corpus.jsonl").string(), "--labels",
                      (dir / "labels.csv").string(), "--out-dir", dir.path().string()},
                     dir.path());
  CHECK(bad.code == 2);
  CHECK(one_error_line(bad.err));
  CHECK(bad.err.find("line 2") != std::string::npos);

  auto policy = run_cli({"simulate", "--quiz", (dir / "labels.csv").string(), "--policy", "odd"},
                        dir.path());
  CHECK(policy.code == 1);
}

TEST_CASE("cli: train, compile, simulate, eval") {
  fixtures::TempDir dir;
  REQUIRE(run_cli({"synth", "--out-dir", dir.path().string(), "--seed", "2"}, dir.path()).code == 0);

  auto a = run_cli(train_args(dir, "a", "7"), dir.path());
  REQUIRE(a.code == 0);
  REQUIRE(run_cli(train_args(dir, "b", "7"), dir.path()).code == 0);
  REQUIRE(run_cli(train_args(dir, "c", "8"), dir.path()).code == 0);
  for (const char* f : {"forest.json", "featurespace.json", "loocv.json"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  CHECK(slurp(dir / "a" / "forest.json") != slurp(dir / "c" / "forest.json"));
  json forest = read_json_file(dir / "a" / "forest.json");
  json space = read_json_file(dir / "a" / "featurespace.json");
  json cv = read_json_file(dir / "a" / "loocv.json");
  for (const json* doc : {&forest, &space, &cv}) {
    bool stamped = (*doc)["provenance"].contains("config_fingerprint") ||
                   (*doc)["provenance"]["pipeline"].contains("config_fingerprint");
    CHECK(stamped);
  }
  CHECK(forest["provenance"]["seed"] == 7);
  CHECK(space["provenance"]["pipeline"]["seed"] == 7);
  CHECK(cv["provenance"]["config_fingerprint"] == forest["provenance"]["config_fingerprint"]);
  CHECK(cv["loocv"]["folds"].size() == 51);

  std::string quiz = (dir / "quiz.json").string();
  auto compiled = run_cli({"compile-quiz", "--forest", (dir / "a" / "forest.json").string(),
                           "--bank", kData + "/templates.json", "--overrides",
                           kData + "/overrides.json", "--featurespace",
                           (dir / "a" / "featurespace.json").string(), "--out", quiz},
                          dir.path());
  REQUIRE(compiled.code == 0);
  CHECK(json::parse(compiled.out)["coverage"]["status"] == "PASS");
  CHECK(read_json_file(quiz)["provenance"]["seed"] == 7);
  auto valid = run_cli({"validate-quiz", "--quiz", quiz, "--forest",
                        (dir / "a" / "forest.json").string()},
                       dir.path());
  CHECK(valid.code == 0);

  json tampered = read_json_file(quiz);
  tampered["questions"].erase(tampered["questions"].begin());
  write_file(dir / "tampered.json", tampered.dump());
  auto bad = run_cli({"validate-quiz", "--quiz", (dir / "tampered.json").string()}, dir.path());
  CHECK(bad.code == 2);
  CHECK(json::parse(bad.out)["status"] == "FAIL");
  auto other = run_cli({"validate-quiz", "--quiz", quiz, "--forest",
                        (dir / "c" / "forest.json").string()},
                       dir.path());
  CHECK(other.code == 2);

  for (const char* run : {"r1", "r2"}) {
    std::string records = (dir / (std::string(run) + ".jsonl")).string();
    REQUIRE(run_cli({"simulate", "--quiz", quiz, "--n", "1000", "--seed", "1", "--out", records},
                    dir.path())
                .code == 0);
    REQUIRE(run_cli({"eval", "--records", records, "--cutoff", "28.7", "--out-dir",
                     (dir / run).string()},
                    dir.path())
                .code == 0);
  }
  CHECK(slurp(dir / "r1.jsonl") == slurp(dir / "r2.jsonl"));
  for (const char* f : {"accuracy.json", "engagement.json", "demographics_completeness.csv",
                        "demographics_age_histogram.csv", "demographics_bmi_histogram.csv",
                        "demographics_bmi_by_gender.csv", "demographics_gender_counts.csv",
                        "demographics_location_counts.csv"}) {
    INFO(f);
    CHECK(std::filesystem::exists(dir / "r1" / f));
  }
  json acc = read_json_file(dir / "r1" / "accuracy.json");
  double identity = 0;
  for (const char* c : {"bmi_at_or_above_cutoff", "bmi_below_cutoff"}) {
    identity += acc[c]["proportion"].get<double>() * acc[c]["accuracy"].get<double>();
  }
  CHECK(std::abs(acc["overall"].get<double>() - identity) <= 1e-9);
  CHECK(acc["provenance"]["simulation"]["seed"] == 1);
}
