#include "cebread/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cebread/csv.hpp"
#include "cebread/interpret.hpp"
#include "cebread/report.hpp"
#include "cebread/rng.hpp"
#include "cebread/textproc.hpp"
#include "cebread/unicode.hpp"
#include "cebread/validation.hpp"

namespace cebread::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kTopImportance = 5;
constexpr std::size_t kTopCorrelations = 10;
constexpr std::size_t kDefaultRepeats = 10;

Corpus load(const RunConfig& c) {
  if (c.corpus.empty()) throw CorpusError("--corpus is required");
  return load_corpus(c.corpus, c.format.value_or(guess_corpus_format(c.corpus)));
}

std::optional<EmbeddingStore> load_optional_embeddings(const RunConfig& c) {
  if (!c.embeddings) return std::nullopt;
  return load_embeddings(*c.embeddings);
}

FoldAssignment make_folds(const Corpus& corpus, const RunConfig& c) {
  const auto seed = derive_seed(c.seed, "folds");
  return c.plain_folds ? plain_folds(corpus, c.k, seed) : stratified_folds(corpus, c.k, seed);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

std::string slug(const FeatureSets& sets) {
  std::string s = unicode::to_lower(sets.name());
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

// Which groups a model schema was built from.
FeatureSets sets_for_schema(const std::vector<std::string>& schema) {
  FeatureSets sets;
  for (const auto& name : schema) {
    const auto group = feature_group(name);
    if (group == "TRAD") sets.trad = true;
    else if (group == "SYLL") sets.syll = true;
    else sets.neural = true;
  }
  return sets;
}

std::map<ModelKind, GridSpec> build_grids(const RunConfig& c) {
  std::map<ModelKind, GridSpec> grids;
  for (ModelKind kind : kAllModelKinds) {
    GridSpec g = default_grid(kind);
    if (kind == ModelKind::rforest) g.fixed = "seed=" + std::to_string(derive_seed(c.seed, "rforest"));
    grids[kind] = std::move(g);
  }
  for (const auto& o : c.grid_overrides) {
    const auto colon = o.find(':');
    if (colon == std::string::npos) {
      throw EvalError("grid override '" + o + "' must look like kind:key=v1|v2");
    }
    const ModelKind kind = parse_model_kind(unicode::trim(o.substr(0, colon)));
    grids[kind] = override_grid(grids[kind], o.substr(colon + 1));
  }
  return grids;
}

std::vector<ModelKind> models_or_all(const RunConfig& c) {
  if (!c.models.empty()) return c.models;
  return {kAllModelKinds.begin(), kAllModelKinds.end()};
}

json config_json(const RunConfig& c) {
  json sets = json::array();
  for (const auto& s : c.feature_sets) sets.push_back(s.name());
  json models = json::array();
  for (auto m : c.models) models.push_back(to_string(m));
  return {{"corpus", c.corpus.string()},
          {"embeddings", c.embeddings ? json(c.embeddings->string()) : json(nullptr)},
          {"feature_sets", sets},
          {"models", models},
          {"grid_overrides", c.grid_overrides},
          {"k", c.k},
          {"seed", c.seed},
          {"stratified", !c.plain_folds}};
}

void print_top(std::ostream& out, const std::string& title,
               std::vector<std::pair<std::string, double>> scores) {
  std::stable_sort(scores.begin(), scores.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  out << title << '\n';
  for (std::size_t i = 0; i < scores.size() && i < kTopImportance; ++i) {
    char line[96];
    std::snprintf(line, sizeof line, "  %zu. %-24s %.4f\n", i + 1, scores[i].first.c_str(),
                  scores[i].second);
    out << line;
  }
}

}  // namespace

void cmd_extract(const RunConfig& config, std::ostream& out) {
  const Corpus corpus = load(config);
  const auto embeddings = load_optional_embeddings(config);
  ensure_dir(config.out);
  auto write_matrix = [&](const FeatureSets& sets, const std::string& file) {
    const FeatureMatrix m = assemble(corpus, sets, embeddings ? &*embeddings : nullptr);
    std::ostringstream os;
    write_feature_csv(os, m);
    write_text(config.out / file, os.str());
    out << "wrote " << (config.out / file).string() << " (" << m.rows() << " rows x "
        << m.cols() << " features)\n";
  };
  write_matrix({true, false, false}, "trad.csv");
  write_matrix({false, true, false}, "syll.csv");
  if (embeddings) write_matrix({true, true, true}, "combined.csv");
}

void cmd_evaluate(const RunConfig& config, std::ostream& out) {
  const bool explicit_sets = !config.feature_sets.empty();
  AblationRequest request;
  if (explicit_sets) request.feature_sets = config.feature_sets;
  request.kinds = models_or_all(config);
  request.grids = build_grids(config);
  request.jobs = config.jobs;
  if (explicit_sets && !config.embeddings) {
    for (const auto& s : request.feature_sets) {
      if (s.neural) {
        throw FeatureError("feature set " + s.name() + " needs --embeddings");
      }
    }
  }

  const Corpus corpus = load(config);
  const auto embeddings = load_optional_embeddings(config);
  const EmbeddingStore* emb = embeddings ? &*embeddings : nullptr;
  if (emb) {
    for (const auto& d : corpus.documents()) emb->at(d.id);
  }
  const FoldAssignment folds = make_folds(corpus, config);
  const AblationTable table = run_ablations(corpus, emb, folds, request);

  ensure_dir(config.out / "models");
  json importance = json::array();
  TrainOptions train_options{config.jobs};
  for (const auto& cell : table.cells) {
    if (!cell.result) continue;
    const FeatureMatrix matrix = assemble(corpus, cell.sets, emb);
    const TrainedModel model = train(matrix, cell.result->best_result().hp, train_options);
    save_model(model, config.out / "models" / (slug(cell.sets) + "__" +
                                               std::string(to_string(cell.kind)) + ".json"));
    if (cell.kind == ModelKind::rforest && !cell.sets.neural) {
      const FeatureVector mdi = mdi_importance(model);
      const auto perm = permutation_importance(model, matrix, kDefaultRepeats,
                                               derive_seed(config.seed, "permutation"));
      json mdi_json = json::object();
      for (std::size_t i = 0; i < mdi.size(); ++i) mdi_json[mdi.names[i]] = mdi.values[i];
      importance.push_back({{"feature_set", cell.sets.name()},
                            {"model", to_string(cell.kind)},
                            {"mdi", mdi_json},
                            {"permutation", to_json(perm)}});
    }
  }

  const FeatureMatrix linguistic = assemble(corpus, {true, true, false});
  json label_counts = json::object();
  for (auto [label, n] : corpus.label_counts()) label_counts[std::to_string(label)] = n;

  json results = {{"tool", "cebread"},
                  {"version", 1},
                  {"config", config_json(config)},
                  {"corpus", {{"documents", corpus.size()}, {"label_counts", label_counts}}},
                  {"folds", to_json(folds)},
                  {"cells", to_json(table)},
                  {"importance", importance},
                  {"spearman", to_json(spearman_ranking(linguistic))}};
  write_text(config.out / "results.json", results.dump(2) + "\n");
  const std::string report = format_ablation_table(table);
  write_text(config.out / "report.txt", report);
  for (const auto& w : folds.warnings) out << "warning: " << w << '\n';
  out << report;
  out << "wrote " << (config.out / "results.json").string() << '\n';
}

void cmd_train(const RunConfig& config, const std::string& params, const fs::path& model_path,
               std::ostream& out) {
  if (config.models.size() != 1) throw ModelError("train needs exactly one --models value");
  if (config.feature_sets.size() > 1) throw FeatureError("train takes a single --features set");
  const ModelKind kind = config.models.front();
  const FeatureSets sets =
      config.feature_sets.empty() ? FeatureSets{true, true, false} : config.feature_sets.front();
  if (sets.neural && !config.embeddings) {
    throw FeatureError("feature set " + sets.name() + " needs --embeddings");
  }
  const Corpus corpus = load(config);
  const auto embeddings = load_optional_embeddings(config);
  const FeatureMatrix matrix = assemble(corpus, sets, embeddings ? &*embeddings : nullptr);

  std::optional<Hyperparameters> hp;
  if (!params.empty()) {
    std::string text = params;
    if (kind == ModelKind::rforest && params.find("seed=") == std::string::npos) {
      text = "seed=" + std::to_string(derive_seed(config.seed, "rforest")) + "," + text;
    }
    hp = parse_hyperparameters(kind, text);
  } else {
    const auto grids = build_grids(config);
    const auto folds = make_folds(corpus, config);
    const auto result = grid_search(matrix, folds, grids.at(kind), sets.name(), config.jobs);
    const auto& best = result.best_result();
    hp = best.hp;
    char line[128];
    std::snprintf(line, sizeof line, "grid search: %zu points, best mean accuracy %.3f, macro-F1 %.3f\n",
                  result.results.size(), best.accuracy.mean, best.macro_f1.mean);
    out << line;
  }
  const TrainedModel model = train(matrix, *hp, TrainOptions{config.jobs});
  if (model_path.has_parent_path()) ensure_dir(model_path.parent_path());
  save_model(model, model_path);
  out << "trained " << to_string(kind) << " on " << sets.name() << " (" << hp->describe()
      << ")\nwrote " << model_path.string() << '\n';
}

void cmd_importance(const RunConfig& config, const fs::path& model_path, std::size_t repeats,
                    std::ostream& out) {
  const TrainedModel model = load_model(model_path);
  const Corpus corpus = load(config);
  const auto embeddings = load_optional_embeddings(config);
  const FeatureSets sets = sets_for_schema(model.schema());
  if (sets.neural && !embeddings) {
    throw FeatureError("model uses NEURAL features; pass --embeddings");
  }
  const FeatureMatrix matrix = assemble(corpus, sets, embeddings ? &*embeddings : nullptr);
  if (matrix.schema() != model.schema()) {
    throw ModelError("schema mismatch: model features differ from those extracted for " +
                     sets.name());
  }
  ensure_dir(config.out);
  if (model.kind() == ModelKind::rforest) {
    const FeatureVector mdi = mdi_importance(model);
    write_text(config.out / "mdi.csv", importance_csv(mdi));
    std::vector<std::pair<std::string, double>> scores;
    for (std::size_t i = 0; i < mdi.size(); ++i) scores.emplace_back(mdi.names[i], mdi.values[i]);
    print_top(out, "MDI importance (top 5):", scores);
  } else {
    out << "MDI skipped: model is " << to_string(model.kind()) << ", not a random forest\n";
  }
  const auto perm =
      permutation_importance(model, matrix, repeats, derive_seed(config.seed, "permutation"));
  write_text(config.out / "permutation.csv", permutation_csv(perm));
  std::vector<std::pair<std::string, double>> scores;
  for (const auto& s : perm.features) scores.emplace_back(s.feature, s.mean_drop);
  char line[96];
  std::snprintf(line, sizeof line, "Permutation importance (baseline accuracy %.4f, top 5):",
                perm.baseline_accuracy);
  print_top(out, line, scores);
}

void cmd_correlate(const RunConfig& config, std::ostream& out) {
  if (config.feature_sets.size() > 1) throw FeatureError("correlate takes a single --features set");
  const FeatureSets sets =
      config.feature_sets.empty() ? FeatureSets{true, true, false} : config.feature_sets.front();
  const Corpus corpus = load(config);
  const auto embeddings = load_optional_embeddings(config);
  const FeatureMatrix matrix = assemble(corpus, sets, embeddings ? &*embeddings : nullptr);
  const auto ranking = spearman_ranking(matrix);
  ensure_dir(config.out);
  write_text(config.out / "correlation.csv", correlation_csv(ranking));
  out << format_correlation_table(ranking, kTopCorrelations);
}

void cmd_predict(const fs::path& model_path, const std::vector<std::string>& texts,
                 const std::optional<fs::path>& embeddings_path, std::ostream& out) {
  const TrainedModel model = load_model(model_path);
  const FeatureSets sets = sets_for_schema(model.schema());
  std::optional<EmbeddingStore> embeddings;
  if (sets.neural) {
    if (!embeddings_path) {
      throw FeatureError("model uses NEURAL features; pass --embeddings keyed doc-1, doc-2, ...");
    }
    embeddings = load_embeddings(*embeddings_path);
  }
  std::vector<Document> docs;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    docs.push_back({"doc-" + std::to_string(i + 1), unicode::nfc(texts[i]), 1, std::nullopt});
  }
  if (docs.empty()) throw Error("no input text to classify");
  const Corpus corpus(std::move(docs));
  const FeatureMatrix matrix = assemble(corpus, sets, embeddings ? &*embeddings : nullptr);
  if (matrix.schema() != model.schema()) {
    throw ModelError("schema mismatch between model and extracted features");
  }
  const auto labels = predict(model, matrix);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out << matrix.doc_ids()[r] << "\tlevel=" << labels[r];
    if (!sets.neural) {
      for (std::size_t c = 0; c < matrix.cols(); ++c) {
        out << '\t' << matrix.schema()[c] << '=' << csv::format_number(matrix(r, c));
      }
    }
    out << '\n';
  }
}

void cmd_syllabify(const std::string& text, std::ostream& out) {
  for (const auto& sentence : textproc::split_sentences(text)) {
    for (const auto& tok : textproc::tokenize(sentence)) {
      const auto units = textproc::phoneme_units(tok.surface);
      const auto seg = textproc::syllabify(tok.skeleton);
      std::string letters, pattern;
      std::size_t u = 0;
      for (std::size_t s = 0; s < seg.syllables.size(); ++s) {
        if (s) {
          letters += '.';
          pattern += '.';
        }
        pattern += seg.syllables[s].str();
        for (std::size_t i = 0; i < seg.syllables[s].size() && u < units.size(); ++i) {
          letters += units[u++];
        }
      }
      out << tok.surface << '\t' << tok.skeleton.str() << '\t' << pattern << '\t' << letters
          << '\n';
    }
  }
}

namespace {

struct CommonFlags {
  std::string corpus;
  std::string format;
  std::string embeddings;
  std::vector<std::string> features;
  std::vector<std::string> models;
  std::vector<std::string> grids;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool plain = false;
  std::string out = "out";

  RunConfig to_config() const {
    RunConfig c;
    c.corpus = corpus;
    if (!format.empty()) c.format = parse_corpus_format(format);
    if (!embeddings.empty()) c.embeddings = embeddings;
    for (const auto& f : features) {
      std::stringstream ss(f);
      std::string item;
      while (std::getline(ss, item, ';')) {
        item = unicode::trim(item);
        if (item == "ablation") {
          auto rows = ablation_feature_sets();
          c.feature_sets.insert(c.feature_sets.end(), rows.begin(), rows.end());
        } else if (!item.empty()) {
          c.feature_sets.push_back(parse_feature_sets(item));
        }
      }
    }
    for (const auto& m : models) {
      std::stringstream ss(m);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = unicode::trim(item);
        if (item == "all") {
          c.models.assign(kAllModelKinds.begin(), kAllModelKinds.end());
        } else if (!item.empty()) {
          c.models.push_back(parse_model_kind(item));
        }
      }
    }
    c.grid_overrides = grids;
    if (k < 2) throw EvalError("--k must be at least 2");
    c.k = k;
    c.seed = seed;
    c.jobs = std::max<std::size_t>(jobs, 1);
    c.plain_folds = plain;
    c.out = out;
    return c;
  }
};

void add_corpus_flags(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--corpus", f.corpus, "Corpus path (JSONL file, CSV file or label directory tree)");
  sub->add_option("--format", f.format, "Corpus format: jsonl, csv or directory (default: by path)");
  sub->add_option("--embeddings", f.embeddings, "Embeddings JSONL ({\"id\",\"vector\"} per line)");
  sub->add_option("--seed", f.seed, "Root seed; every random stream is derived from it");
  sub->add_option("--out", f.out, "Output directory");
}

void add_training_flags(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--features", f.features,
                  "Feature set(s): trad, syll, neural joined by ',' or '+'; ';' or repeats for "
                  "several sets; 'ablation' for the five standard rows");
  sub->add_option("--models", f.models, "Models: logreg, svm, rforest, all (comma separated)");
  sub->add_option("--grid", f.grids, "Grid override, e.g. rforest:max_depth=10|20;n_estimators=100");
  sub->add_option("--k", f.k, "Cross-validation folds");
  sub->add_option("--jobs", f.jobs, "Worker threads");
  sub->add_flag("--plain-folds", f.plain, "Unstratified folds");
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!unicode::trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Readability features, classifiers and model interpretation for graded texts"};
  app.set_config("--config", "", "TOML-style key = value file; command-line flags take precedence");
  app.require_subcommand(1);

  CommonFlags flags;
  std::string model_path;
  std::string params;
  std::string text;
  std::string input;
  std::size_t repeats = kDefaultRepeats;

  auto* extract = app.add_subcommand("extract", "Write TRAD/SYLL (and combined) feature CSVs");
  add_corpus_flags(extract, flags);

  auto* evaluate = app.add_subcommand("evaluate", "Grid-searched cross-validation over the ablation table");
  add_corpus_flags(evaluate, flags);
  add_training_flags(evaluate, flags);

  auto* trainc = app.add_subcommand("train", "Fit one model on the whole corpus and save it");
  add_corpus_flags(trainc, flags);
  add_training_flags(trainc, flags);
  trainc->add_option("--params", params, "Hyperparameters key=value,...; grid search when omitted");
  trainc->add_option("--model", model_path, "Output model path (default <out>/model.json)");

  auto* importance = app.add_subcommand("importance", "MDI and permutation importance of a saved model");
  add_corpus_flags(importance, flags);
  importance->add_option("--model", model_path, "Saved model")->required();
  importance->add_option("--repeats", repeats, "Permutations per feature");

  auto* correlate = app.add_subcommand("correlate", "Spearman correlation of features with grade level");
  add_corpus_flags(correlate, flags);
  correlate->add_option("--features", flags.features, "Feature set (default trad,syll)");

  auto* predictc = app.add_subcommand("predict", "Predict grade levels with a saved model");
  predictc->add_option("--model", model_path, "Saved model")->required();
  predictc->add_option("--text", text, "Text to classify");
  predictc->add_option("--input", input, "File with one document per line");
  predictc->add_option("--embeddings", flags.embeddings, "Embeddings keyed doc-1, doc-2, ... in input order");

  auto* syll = app.add_subcommand("syllabify", "Show skeleton and syllables for every word");
  syll->add_option("text", text, "Text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (extract->parsed()) {
      cmd_extract(flags.to_config(), out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(flags.to_config(), out);
    } else if (trainc->parsed()) {
      RunConfig c = flags.to_config();
      cmd_train(c, params, model_path.empty() ? c.out / "model.json" : fs::path(model_path), out);
    } else if (importance->parsed()) {
      cmd_importance(flags.to_config(), model_path, repeats, out);
    } else if (correlate->parsed()) {
      cmd_correlate(flags.to_config(), out);
    } else if (predictc->parsed()) {
      std::vector<std::string> texts;
      if (!text.empty()) texts.push_back(text);
      if (!input.empty()) {
        auto lines = read_lines(input);
        texts.insert(texts.end(), lines.begin(), lines.end());
      }
      if (texts.empty()) throw Error("predict needs --text or --input");
      std::optional<fs::path> emb;
      if (!flags.embeddings.empty()) emb = flags.embeddings;
      cmd_predict(model_path, texts, emb, out);
    } else if (syll->parsed()) {
      cmd_syllabify(text, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cebread::cli
