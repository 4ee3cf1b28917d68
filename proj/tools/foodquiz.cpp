// foodquiz: train -> compile-quiz -> serve, plus simulate / eval / loocv.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "foodquiz/common.hpp"
#include "foodquiz/corpus.hpp"
#include "foodquiz/engine.hpp"
#include "foodquiz/features.hpp"
#include "foodquiz/forest.hpp"
#include "foodquiz/pipeline.hpp"
#include "foodquiz/quizkit.hpp"
#include "foodquiz/service.hpp"
#include "foodquiz/stats.hpp"
#include "foodquiz/synth.hpp"

namespace fs = std::filesystem;
using namespace foodquiz;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kIo = 3 };

struct TrainOptions {
  std::string corpus;
  std::string labels;
  std::vector<std::string> hashtags;
  bool median_positive = false;
  std::uint64_t seed = 7;
  int trees = 7;
  int depth = 3;
  int subsample = 0;
  bool no_bootstrap = false;
  std::string criterion = "gini";
  int min_count = 3;
  std::string normalization = "relative_frequency";
  int topics = 50;
  int lda_iterations = 500;
  double alpha = 0.0;
  double beta = 0.01;
  std::string out_dir = ".";
};

void add_train_flags(CLI::App* cmd, TrainOptions& o) {
  cmd->add_option("--corpus", o.corpus, "JSONL posts: {\"community\",\"text\"}")
      ->required();
  cmd->add_option("--labels", o.labels, "CSV with header community,overweight_rate")
      ->required();
  cmd->add_option("--hashtags", o.hashtags, "admission hashtags (default: meal hashtags)");
  cmd->add_flag("--median-positive", o.median_positive,
                "label the exact-median community positive");
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--trees", o.trees, "number of trees")->capture_default_str();
  cmd->add_option("--depth", o.depth, "maximum tree depth")->capture_default_str();
  cmd->add_option("--subsample", o.subsample,
                  "candidate features per split (0 = ceil(sqrt(features)))")
      ->capture_default_str();
  cmd->add_flag("--no-bootstrap", o.no_bootstrap, "grow every tree on all rows");
  cmd->add_option("--criterion", o.criterion, "split criterion")
      ->check(CLI::IsMember({"gini", "info_gain"}))
      ->capture_default_str();
  cmd->add_option("--min-count", o.min_count, "drop tokens rarer than this")->capture_default_str();
  cmd->add_option("--normalization", o.normalization, "count normalization")
      ->check(CLI::IsMember({"raw_count", "relative_frequency"}))
      ->capture_default_str();
  cmd->add_option("--topics", o.topics, "LDA topics (0 disables topic features)")
      ->capture_default_str();
  cmd->add_option("--lda-iterations", o.lda_iterations, "Gibbs sweeps")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "LDA document prior (<= 0 means 50/topics)")
      ->capture_default_str();
  cmd->add_option("--beta", o.beta, "LDA topic prior")->capture_default_str();
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
}

ForestParams forest_params(const TrainOptions& o) {
  ForestParams p;
  p.n_trees = o.trees;
  p.max_depth = o.depth;
  p.feature_subsample = o.subsample;
  p.bootstrap = !o.no_bootstrap;
  p.seed = o.seed;
  p.criterion = parse_split_criterion(o.criterion);
  return p;
}

struct Prepared {
  CommunityLabels labels;
  CommunityCorpus corpus;
  FeatureBuild features;
};

FeatureConfig feature_config(const TrainOptions& o) {
  FeatureConfig fc;
  fc.min_count = o.min_count;
  fc.normalization = parse_normalization(o.normalization);
  fc.lda.topics = o.topics;
  fc.lda.iterations = o.lda_iterations;
  fc.lda.alpha = o.alpha;
  fc.lda.beta = o.beta;
  fc.lda.seed = o.seed;
  return fc;
}

// Seed plus a fingerprint of every setting that shapes the artifacts.
json provenance(const TrainOptions& o) {
  json config{{"features", to_json(feature_config(o))},
              {"forest", to_json(forest_params(o))},
              {"hashtags", o.hashtags.empty() ? default_hashtag_filter()
                                              : std::set<std::string>(o.hashtags.begin(),
                                                                      o.hashtags.end())},
              {"median_positive", o.median_positive}};
  return {{"seed", o.seed},
          {"config_fingerprint", sha256_hex(config.dump()).substr(0, 16)},
          {"config", config}};
}

void require_inputs(std::initializer_list<std::string> paths) {
  for (const auto& p : paths) {
    if (!p.empty() && !fs::is_regular_file(p)) throw io_error("missing_input", "no such file: " + p);
  }
}

Prepared prepare(const TrainOptions& o) {
  Prepared p;
  p.labels = load_labels(o.labels, o.median_positive);
  std::set<std::string> filter = o.hashtags.empty()
                                     ? default_hashtag_filter()
                                     : std::set<std::string>(o.hashtags.begin(), o.hashtags.end());
  p.corpus = load_documents(o.corpus, filter, p.labels);
  p.features = build_features(p.corpus, feature_config(o));
  p.features.space.provenance["pipeline"] = provenance(o);
  return p;
}

json corpus_report(const Prepared& p) {
  json rejects = json::array();
  for (const auto& r : p.corpus.rejects) rejects.push_back({{"line", r.line}, {"community", r.community}});
  return {{"kept", p.corpus.kept},
          {"discarded", p.corpus.discarded},
          {"rejects", rejects},
          {"empty_communities", p.corpus.empty_communities()},
          {"median_rate", p.labels.median},
          {"positive_communities", p.labels.count_positive()},
          {"communities", p.labels.communities.size()}};
}

int run_train(const TrainOptions& o, bool write_model) {
  require_inputs({o.corpus, o.labels});
  Prepared p = prepare(o);
  ForestParams params = forest_params(o);
  fs::path out(o.out_dir);

  LoocvReport cv = loocv(p.features.binned, p.labels, params);
  json report{{"loocv", to_json(cv)},
              {"majority_baseline", majority_baseline(p.labels)},
              {"corpus", corpus_report(p)},
              {"features", p.features.space.features.size()},
              {"params", to_json(params)},
              {"provenance", provenance(o)}};
  write_file(out / "loocv.json", dump_pretty(report));

  if (write_model) {
    Forest forest = train_forest(p.features.binned, p.labels, params);
    for (const auto& w : forest.warnings) std::cerr << "warning: " << w << "\n";
    json forest_doc = to_json(forest);
    forest_doc["provenance"] = provenance(o);
    write_file(out / "forest.json", dump_pretty(forest_doc));
    write_file(out / "featurespace.json", dump_pretty(to_json(p.features.space)));
  }
  std::cout << "loocv_accuracy=" << cv.accuracy
            << " majority_baseline=" << majority_baseline(p.labels)
            << " features=" << p.features.space.features.size() << "\n";
  return kOk;
}

json load_json_or_empty(const std::string& path) {
  return path.empty() ? json::object() : read_json_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile a compact random forest into an adaptive food quiz"};
  app.require_subcommand(1);

  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "fit features and forest; writes forest.json, "
                                            "featurespace.json, loocv.json");
  add_train_flags(train, train_opts);

  TrainOptions cv_opts;
  auto* cv = app.add_subcommand("loocv", "leave-one-out evaluation only; writes loocv.json");
  add_train_flags(cv, cv_opts);

  std::string forest_path, bank_path, overrides_path, featurespace_path, quiz_out = "quiz.json",
                                                                         report_out;
  auto* compile = app.add_subcommand("compile-quiz", "turn forest.json into quiz.json");
  compile->add_option("--forest", forest_path, "forest.json")->required();
  compile->add_option("--bank", bank_path, "templates.json")->required();
  compile->add_option("--overrides", overrides_path, "overrides.json");
  compile->add_option("--featurespace", featurespace_path, "featurespace.json (topic wording)");
  compile->add_option("--out", quiz_out, "output quiz spec")->capture_default_str();
  compile->add_option("--report", report_out, "draft report path (default: stdout)");

  std::string validate_quiz_path, validate_forest_path;
  auto* validate = app.add_subcommand("validate-quiz", "coverage check; exit 2 on FAIL");
  validate->add_option("--quiz", validate_quiz_path, "quiz.json")->required();
  validate->add_option("--forest", validate_forest_path, "forest.json the quiz came from");

  ServiceConfig svc;
  std::string bind = "127.0.0.1:8080", svc_quiz, svc_data = "data";
  auto* serve = app.add_subcommand(
      "serve", "HTTP quiz API; admin token and export salt come from FOODQUIZ_ADMIN_TOKEN "
               "and FOODQUIZ_EXPORT_SALT");
  serve->add_option("--bind", bind, "host:port")->capture_default_str();
  serve->add_option("--quiz", svc_quiz, "quiz.json")->required();
  serve->add_option("--data-dir", svc_data, "event log directory")->capture_default_str();
  serve->add_option("--cutoff", svc.cutoff, "BMI cutoff")->capture_default_str();

  std::string sim_quiz, sim_policy = "uniform", sim_out = "records.jsonl";
  std::size_t sim_n = 1000;
  std::uint64_t sim_seed = 1;
  double sim_cutoff = kDefaultBmiCutoff;
  auto* simulate = app.add_subcommand("simulate", "simulated respondents -> records.jsonl");
  simulate->add_option("--quiz", sim_quiz, "quiz.json")->required();
  simulate->add_option("--n", sim_n, "respondents")->capture_default_str();
  simulate->add_option("--policy", sim_policy, "answer policy")
      ->check(CLI::IsMember({"uniform", "never", "sometimes", "often"}))
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  simulate->add_option("--cutoff", sim_cutoff, "BMI cutoff")->capture_default_str();
  simulate->add_option("--out", sim_out, "output records")->capture_default_str();

  std::string eval_records, eval_out = ".";
  double eval_cutoff = kDefaultBmiCutoff;
  auto* eval = app.add_subcommand("eval", "accuracy, engagement and demographic reports");
  eval->add_option("--records", eval_records, "records.jsonl")->required();
  eval->add_option("--cutoff", eval_cutoff, "BMI cutoff")->capture_default_str();
  eval->add_option("--out-dir", eval_out, "report directory")->capture_default_str();

  std::string synth_out = ".";
  std::uint64_t synth_seed = 1;
  SyntheticCorpusParams synth_params;
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus.jsonl + labels.csv");
  synth->add_option("--out-dir", synth_out, "output directory")->capture_default_str();
  synth->add_option("--seed", synth_seed, "random seed")->capture_default_str();
  synth->add_option("--communities", synth_params.communities, "communities")->capture_default_str();
  synth->add_option("--planted", synth_params.planted_tokens, "predictive tokens")
      ->capture_default_str();
  synth->add_option("--noise", synth_params.noise_tokens, "noise tokens")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error code=usage kind=usage message=" << json(std::string(e.what())).dump()
              << "\n";
    return kUsage;
  }

  try {
    if (*train) return run_train(train_opts, true);
    if (*cv) return run_train(cv_opts, false);

    if (*compile) {
      require_inputs({forest_path, bank_path, overrides_path, featurespace_path});
      json forest_doc = read_json_file(forest_path);
      Forest forest = forest_from_json(forest_doc);
      TemplateBank bank = template_bank_from_json(read_json_file(bank_path));
      json ov = load_json_or_empty(overrides_path);
      OverrideMap overrides = ov.contains("overrides") ? overrides_from_json(ov) : OverrideMap{};
      std::optional<FeatureSpace> space;
      if (!featurespace_path.empty()) {
        space = feature_space_from_json(read_json_file(featurespace_path));
      }
      CompileResult result = compile_quiz(forest, bank, overrides, space ? &*space : nullptr);
      CoverageReport coverage = validate_quiz(result.spec, &forest);
      json quiz_doc = to_json(result.spec);
      quiz_doc["provenance"] = forest_doc.value("provenance", json::object());
      quiz_doc["provenance"]["templates_sha256"] = sha256_hex(read_file(bank_path));
      if (!overrides_path.empty()) {
        quiz_doc["provenance"]["overrides_sha256"] = sha256_hex(read_file(overrides_path));
      }
      write_file(quiz_out, dump_pretty(quiz_doc));
      json report = to_json(result);
      report["coverage"] = to_json(coverage);
      if (report_out.empty()) {
        std::cout << dump_pretty(report);
      } else {
        write_file(report_out, dump_pretty(report));
      }
      return coverage.pass ? kOk : kValidation;
    }

    if (*validate) {
      require_inputs({validate_quiz_path, validate_forest_path});
      QuizSpec spec = quiz_from_json(read_json_file(validate_quiz_path));
      std::optional<Forest> forest;
      if (!validate_forest_path.empty()) forest = forest_from_json(read_json_file(validate_forest_path));
      CoverageReport report = validate_quiz(spec, forest ? &*forest : nullptr);
      std::cout << dump_pretty(to_json(report));
      return report.pass ? kOk : kValidation;
    }

    if (*serve) {
      require_inputs({svc_quiz});
      auto colon = bind.rfind(':');
      if (colon == std::string::npos) {
        throw Error(ErrorKind::usage, "bad_bind", "--bind must be host:port");
      }
      svc.host = bind.substr(0, colon);
      svc.port = std::stoi(bind.substr(colon + 1));
      svc.quiz_path = svc_quiz;
      svc.data_dir = svc_data;
      if (const char* t = std::getenv("FOODQUIZ_ADMIN_TOKEN")) svc.admin_token = t;
      if (const char* s = std::getenv("FOODQUIZ_EXPORT_SALT")) svc.export_salt = s;
      if (svc.export_salt.empty()) {
        throw Error(ErrorKind::usage, "missing_salt", "set FOODQUIZ_EXPORT_SALT");
      }
      QuizService service(load_service_quiz(svc), svc);
      std::cerr << "serving on " << svc.host << ":" << svc.port << " ("
                << service.store().size() << " sessions replayed)\n";
      HttpServer server(service);
      server.listen(svc.host, svc.port);
      return kOk;
    }

    if (*simulate) {
      require_inputs({sim_quiz});
      QuizEngine engine(quiz_from_json(read_json_file(sim_quiz)));
      auto records = simulate_respondents(engine, named_policy(sim_policy), sim_n, sim_seed,
                                          sim_cutoff);
      write_file(sim_out, write_records_jsonl(records));
      json meta{{"seed", sim_seed},
                {"policy", sim_policy},
                {"n", sim_n},
                {"cutoff", sim_cutoff},
                {"quiz_fingerprint", engine.fingerprint()}};
      write_file(fs::path(sim_out).string() + ".meta.json", dump_pretty(meta));
      std::cout << "records=" << records.size() << "\n";
      return kOk;
    }

    if (*eval) {
      require_inputs({eval_records});
      auto records = read_records_jsonl(read_file(eval_records), eval_cutoff);
      fs::path out(eval_out);
      AccuracyReport acc = accuracy_report(records, eval_cutoff);
      EngagementStats eng = engagement_stats(records);
      json prov{{"records_sha256", sha256_hex(read_file(eval_records))}, {"cutoff", eval_cutoff}};
      std::string meta_path = eval_records + ".meta.json";
      if (fs::is_regular_file(meta_path)) prov["simulation"] = read_json_file(meta_path);
      json acc_doc = to_json(acc), eng_doc = to_json(eng);
      acc_doc["provenance"] = prov;
      eng_doc["provenance"] = prov;
      write_file(out / "accuracy.json", dump_pretty(acc_doc));
      write_file(out / "engagement.json", dump_pretty(eng_doc));
      for (const auto& [name, csv] : demographics_summary(records)) {
        write_file(out / ("demographics_" + name + ".csv"), csv);
      }
      std::cout << "overall=" << acc.overall << " n=" << acc.n
                << " acc_at_or_above=" << acc.at_or_above.accuracy
                << " acc_below=" << acc.below.accuracy << "\n";
      return kOk;
    }

    if (*synth) {
      SyntheticCorpus corpus = generate_synthetic_corpus(synth_params, synth_seed);
      fs::path out(synth_out);
      write_synthetic_corpus(corpus, out / "corpus.jsonl", out / "labels.csv");
      std::cout << "documents=" << corpus.documents.size() << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    const char* kind = e.kind() == ErrorKind::io ? "io"
                       : e.kind() == ErrorKind::usage ? "usage"
                                                      : "validation";
    std::cerr << "error code=" << e.code() << " kind=" << kind
              << " message=" << json(std::string(e.what())).dump() << "\n";
    return e.kind() == ErrorKind::io ? kIo : e.kind() == ErrorKind::usage ? kUsage : kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error code=internal kind=io message=" << json(std::string(e.what())).dump()
              << "\n";
    return kIo;
  }
  return kUsage;
}
