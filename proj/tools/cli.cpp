#include "cli.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsd/classify.hpp"
#include "wsd/corpus.hpp"
#include "wsd/decomposable.hpp"
#include "wsd/error.hpp"
#include "wsd/text.hpp"

namespace wsd::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr const char* kSchemaFile = "schema.json";
constexpr const char* kTrainFile = "train.tsv";
constexpr const char* kTestFile = "test.tsv";
constexpr const char* kCollocationFile = "collocations.tsv";
constexpr const char* kSummaryFile = "extract_summary.tsv";
constexpr const char* kSearchReportFile = "search_report.tsv";
constexpr const char* kBestModelFile = "best_model.json";
constexpr const char* kEvaluationFile = "evaluation.tsv";
constexpr const char* kPredictionsFile = "predictions.tsv";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

fs::path require_input(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw ConfigError(what + " not found: " + path.string());
  return path;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

SearchStrategy parse_strategy(const std::string& name) {
  if (name == "exhaustive") return SearchStrategy::exhaustive;
  if (name == "greedy") return SearchStrategy::greedy;
  throw ConfigError("unknown search strategy '" + name + "' (expected exhaustive or greedy)");
}

void validate(const RunConfig& config) {
  if (!(config.search.alpha > 0.0 && config.search.alpha < 1.0)) throw ConfigError("search.alpha must be in (0, 1)");
  if (!(config.search.sparsity_threshold >= 0.0 && config.search.sparsity_threshold <= 1.0))
    throw ConfigError("search.sparsity_threshold must be in [0, 1]");
  if (config.search.max_vars < 1) throw ConfigError("search.max_vars must be at least 1");
  if (config.candidate_count < 1) throw ConfigError("collocations.candidates must be at least 1");
  try {
    config.features.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

// --- assignment files ---------------------------------------------------------

struct Rows {
  std::vector<std::string> ids;
  std::vector<Codes> codes;
};

std::string format_rows(const VariableSchema& schema, const std::vector<std::string>& ids,
                        const std::vector<Assignment>& rows) {
  std::string out = "id";
  for (const auto& name : schema.names()) out += "\t" + name;
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += ids[r];
    for (const auto& v : schema.variables()) out += "\t" + std::string(*rows[r].get(v.name));
    out += '\n';
  }
  return out;
}

Rows read_rows(const fs::path& path, const VariableSchema& schema) {
  const auto text = read_file(require_input(path, "assignment file"));
  Rows rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split(line, '\t');
    if (line_no == 1) {
      auto expected = schema.names();
      expected.insert(expected.begin(), "id");
      if (fields != expected) throw SchemaError(path.string() + ": header does not match the schema");
      continue;
    }
    if (line.empty()) continue;
    if (fields.size() != schema.size() + 1)
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": wrong number of fields");
    Codes codes(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) codes[i] = schema.value_index(i, fields[i + 1]);
    rows.ids.push_back(fields[0]);
    rows.codes.push_back(std::move(codes));
  }
  return rows;
}

// --- commands -----------------------------------------------------------------

int cmd_extract(const RunConfig& config, std::ostream& out) {
  const auto sentences = parse_corpus(read_file(require_input(config.corpus, "corpus file")));
  auto targets = config.target_forms.empty() ? config.features.target_forms() : config.target_forms;
  auto dataset = collect_instances(sentences, targets, config.noun_tags);
  dataset.source = config.corpus.filename().string();
  dataset.seed = config.seed;
  const auto [train, test] = split(dataset, config.n_test, config.seed);
  const auto senses = config.senses.empty() ? dataset.senses() : config.senses;

  FeatureSpec spec = config.features;
  std::vector<ScoredForm> selected;
  if (spec.collocation_forms.empty() && config.select_count > 0) {
    // Candidates come from the training split only, never from the test set.
    auto excluded = spec.target_forms();
    excluded.insert(excluded.end(), {std::string(kTagVariable), std::string(kEndingVariable)});
    for (int o : spec.pos_offsets) excluded.push_back(pos_variable_name(o));
    const auto candidates = candidate_collocations(train.instances, config.candidate_count, excluded);
    selected = select_collocations(train.instances, candidates, config.select_count, senses);
    for (const auto& s : selected) spec.collocation_forms.push_back(s.form);
  } else {
    selected = rank_collocations(train.instances, spec.collocation_forms, senses);
  }

  std::vector<InstanceRecord> all = train.instances;
  all.insert(all.end(), test.instances.begin(), test.instances.end());
  const auto matrix = vectorize(all, spec, senses);
  const std::vector<Assignment> train_rows(matrix.rows.begin(), matrix.rows.begin() + static_cast<long>(train.instances.size()));
  const std::vector<Assignment> test_rows(matrix.rows.begin() + static_cast<long>(train.instances.size()), matrix.rows.end());
  std::vector<std::string> train_ids, test_ids;
  for (const auto& i : train.instances) train_ids.push_back(i.id);
  for (const auto& i : test.instances) test_ids.push_back(i.id);

  fs::create_directories(config.output_dir);
  write_file(config.output_dir / kSchemaFile, schema_to_json(matrix.schema));
  write_file(config.output_dir / kTrainFile, format_rows(matrix.schema, train_ids, train_rows));
  write_file(config.output_dir / kTestFile, format_rows(matrix.schema, test_ids, test_rows));

  std::ostringstream colloc;
  colloc << "rank\tform\tg2\tdf\tp_value\n";
  for (std::size_t i = 0; i < selected.size(); ++i) {
    colloc << (i + 1) << '\t' << selected[i].form << '\t' << format_fixed(selected[i].report.g2, 6) << '\t'
           << selected[i].report.df << '\t' << format_double(selected[i].report.p_value) << '\n';
  }
  write_file(config.output_dir / kCollocationFile, colloc.str());

  // Sense distribution per split.
  std::map<std::string, std::array<std::size_t, 2>> distribution;
  for (const auto& s : senses) distribution[s] = {0, 0};
  for (const auto& i : train.instances) ++distribution[*i.sense][0];
  for (const auto& i : test.instances) ++distribution[*i.sense][1];
  std::ostringstream summary;
  summary << "corpus\t" << dataset.source << '\n'
          << "sentences\t" << sentences.size() << '\n'
          << "instances\t" << dataset.instances.size() << '\n'
          << "unannotated_targets\t" << dataset.unannotated_targets << '\n'
          << "train\t" << train.instances.size() << '\n'
          << "test\t" << test.instances.size() << '\n'
          << "seed\t" << config.seed << '\n'
          << "\nsense\ttotal\ttrain\ttest\n";
  for (const auto& s : senses) {
    const auto [tr, te] = distribution[s];
    summary << s << '\t' << (tr + te) << '\t' << tr << '\t' << te << '\n';
  }
  write_file(config.output_dir / kSummaryFile, summary.str());

  out << "extracted " << dataset.instances.size() << " instances (" << train.instances.size() << " train, "
      << test.instances.size() << " test) over " << matrix.schema.size() << " variables\n";
  return kOk;
}

int cmd_search(const RunConfig& config, std::ostream& out) {
  const auto schema = schema_from_json(read_file(require_input(config.output_dir / kSchemaFile, "schema file")));
  const auto train = read_rows(config.output_dir / kTrainFile, schema);
  auto data = ObservedCells::from_rows(schema, train.codes);
  if (!config.search_variables.empty()) {
    std::vector<std::size_t> keep;
    for (const auto& name : config.search_variables) keep.push_back(schema.index_of(name));
    std::sort(keep.begin(), keep.end());
    data = data.project(keep);
  }
  const auto result = search_models(data, config.search);
  write_file(config.output_dir / kSearchReportFile, format_search_report(result));
  if (!result.ranked.empty()) {
    const auto& best = result.ranked.front();
    write_file(config.output_dir / kBestModelFile, model_to_json(best.model));
    out << "best model " << best.model.formula() << " g2=" << format_fixed(best.report.g2, 4)
        << " df=" << best.report.df << " p=" << format_double(best.report.p_value) << '\n';
  }
  out << result.ranked.size() << " models ranked\n";
  return kOk;
}

int cmd_evaluate(const RunConfig& config, const fs::path& model_path, const std::vector<std::string>& only_senses,
                 std::ostream& out) {
  auto schema = schema_from_json(read_file(require_input(config.output_dir / kSchemaFile, "schema file")));
  const auto graph = graph_from_json(read_file(require_input(model_path, "model file")));
  const auto model = junction_tree(graph);

  for (const auto& v : graph.vertices()) {
    if (!schema.find(v)) throw SchemaError("model variable '" + v + "' is not in the extracted schema");
  }
  const auto tag = schema.find(kTagVariable);
  if (!tag || !graph.find(kTagVariable)) throw SchemaError("model and schema must both contain 'tag'");

  auto train = read_rows(config.output_dir / kTrainFile, schema);
  auto test = read_rows(config.output_dir / kTestFile, schema);

  if (!only_senses.empty()) {
    // Drop every usage outside the kept senses from both splits, then shrink the tag domain.
    std::vector<std::size_t> keep_codes;
    for (const auto& s : only_senses) keep_codes.push_back(schema.value_index(*tag, s));
    std::vector<std::size_t> remap(schema.cardinality(*tag), SIZE_MAX);
    std::vector<std::string> kept_values;
    for (std::size_t v = 0; v < schema.cardinality(*tag); ++v) {
      if (std::find(keep_codes.begin(), keep_codes.end(), v) == keep_codes.end()) continue;
      remap[v] = kept_values.size();
      kept_values.push_back(schema[*tag].values[v]);
    }
    auto filter = [&](Rows& rows) {
      Rows kept;
      for (std::size_t r = 0; r < rows.codes.size(); ++r) {
        if (remap[rows.codes[r][*tag]] == SIZE_MAX) continue;
        rows.codes[r][*tag] = remap[rows.codes[r][*tag]];
        kept.ids.push_back(rows.ids[r]);
        kept.codes.push_back(rows.codes[r]);
      }
      rows = std::move(kept);
    };
    filter(train);
    filter(test);
    schema = schema.with_values(*tag, kept_values);
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (graph.find(schema[i].name)) keep.push_back(i);
  const auto data = ObservedCells::from_rows(schema, train.codes).project(keep);
  const auto fitted = fit_mle(model, data);

  std::vector<LabeledInstance> labeled;
  labeled.reserve(test.codes.size());
  for (std::size_t r = 0; r < test.codes.size(); ++r) {
    LabeledInstance inst{test.ids[r], {}, schema[*tag].values[test.codes[r][*tag]]};
    for (auto i : keep)
      if (i != *tag) inst.features.set(schema[i].name, schema[i].values[test.codes[r][i]]);
    labeled.push_back(std::move(inst));
  }

  std::vector<Prediction> predictions;
  const auto report = Classifier(fitted).evaluate(labeled, &predictions);
  fs::create_directories(config.output_dir);
  std::string header = "model\t" + model.formula() + "\n";
  if (!only_senses.empty()) header += "senses\t" + join(only_senses, ",") + "\n";
  write_file(config.output_dir / kEvaluationFile, header + format_evaluation(report));
  write_file(config.output_dir / kPredictionsFile, format_predictions(predictions));

  if (report.total == 0) out << "empty test set; nothing to evaluate\n";
  out << "percent correct " << format_fixed(100.0 * report.percent_correct(), 2) << "% (" << report.correct << "/"
      << report.total << ", untagged " << report.untagged << ")\n";
  return kOk;
}

int cmd_export(const fs::path& model_path, const std::string& view, const std::string& root, std::ostream& out) {
  if (view != "markov" && view != "bayes") throw ConfigError("unknown view '" + view + "' (expected markov or bayes)");
  const auto model = junction_tree(graph_from_json(read_file(require_input(model_path, "model file"))));
  out << (view == "markov" ? export_markov_dot(model) : export_bayes_dot(model, root));
  return kOk;
}

}  // namespace

RunConfig load_config(const fs::path& path) {
  const auto text = read_file(require_input(path, "config file"));
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  RunConfig config;
  try {
    const auto j = Json::parse(text);
    config.corpus = resolve(j.at("corpus").get<std::string>());
    config.target_forms = get_or(j, "target_forms", config.target_forms);
    config.noun_tags = get_or(j, "noun_tags", config.noun_tags);
    config.senses = get_or(j, "senses", config.senses);
    config.output_dir = resolve(get_or<std::string>(j, "output_dir", "out"));
    config.root = get_or(j, "root", config.root);

    if (j.contains("features")) {
      const auto& f = j.at("features");
      auto& spec = config.features;
      spec.lemma = get_or(f, "lemma", spec.lemma);
      spec.plural_suffixes = get_or(f, "plural_suffixes", spec.plural_suffixes);
      spec.use_ending = get_or(f, "ending", spec.use_ending);
      spec.pos_offsets = get_or(f, "pos_offsets", spec.pos_offsets);
      spec.pos_collapse_map = get_or(f, "pos_collapse_map", spec.pos_collapse_map);
      if (f.contains("collocations")) {
        const auto& c = f.at("collocations");
        spec.collocation_forms = get_or(c, "forms", spec.collocation_forms);
        config.candidate_count = get_or(c, "candidates", config.candidate_count);
        config.select_count = get_or(c, "select", config.select_count);
      }
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      config.n_test = get_or(s, "n_test", config.n_test);
      config.seed = get_or(s, "seed", config.seed);
    }
    if (j.contains("search")) {
      const auto& s = j.at("search");
      config.search.strategy = parse_strategy(get_or<std::string>(s, "strategy", "exhaustive"));
      config.search.alpha = get_or(s, "alpha", config.search.alpha);
      config.search.sparsity_threshold = get_or(s, "sparsity_threshold", config.search.sparsity_threshold);
      config.search.max_vars = get_or(s, "max_vars", config.search.max_vars);
      config.search_variables = get_or(s, "variables", config.search_variables);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  validate(config);
  return config;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decomposable-model word-sense disambiguation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::string> strategy;
  std::string four_senses;
  std::string model_path;
  std::string view = "markov";
  std::optional<std::string> root;

  auto* extract = app.add_subcommand("extract", "Parse the corpus, split it, select features, write datasets");
  auto* search = app.add_subcommand("search", "Rank decomposable models on the training data");
  auto* evaluate = app.add_subcommand("evaluate", "Fit a model on training data and score the test set");
  auto* exporter = app.add_subcommand("export", "Write a model graph as DOT to standard output");

  for (auto* sub : {extract, search, evaluate}) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--seed", seed, "Override the split seed");
    sub->add_option("--alpha", alpha, "Override the significance level");
    sub->add_option("--strategy", strategy, "Override the search strategy (exhaustive|greedy)");
  }
  evaluate->add_option("--model", model_path, "Model file (default: <output_dir>/best_model.json)");
  evaluate->add_option("--four-senses", four_senses, "Comma-separated sense labels to keep");
  exporter->add_option("--config", config_path, "Run configuration (JSON), for the root variable");
  exporter->add_option("--model", model_path, "Model file")->required();
  exporter->add_option("--view", view, "markov or bayes");
  exporter->add_option("--root", root, "Root variable of the bayes view (default: tag)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*exporter) {
      std::string root_name = "tag";
      if (!config_path.empty()) root_name = load_config(config_path).root;
      if (root) root_name = *root;
      return cmd_export(model_path, view, root_name, out);
    }
    auto config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (alpha) config.search.alpha = *alpha;
    if (strategy) config.search.strategy = parse_strategy(*strategy);
    validate(config);

    if (*extract) return cmd_extract(config, out);
    if (*search) return cmd_search(config, out);
    const fs::path model = model_path.empty() ? config.output_dir / kBestModelFile : fs::path(model_path);
    std::vector<std::string> only;
    if (!four_senses.empty()) only = split(four_senses, ',');
    return cmd_evaluate(config, model, only, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kCapability;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kMismatch;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace wsd::cli
