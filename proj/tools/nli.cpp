// nli: command-line driver for the native-language-identification toolkit.
//
// Every subcommand accepts --config FILE.json; keys in the file supply
// defaults for the flags of the same name (dashes become underscores) and
// explicit flags win. Outputs go under --out together with manifest.json,
// which records the effective configuration and its hash.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 solver non-convergence.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <list>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nli/nli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNonConvergence = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag values bound to config keys. Each option keeps its CLI11 handle so we
// can tell whether it was given explicitly.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  void text(const std::string& flag, const std::string& key, std::string def, const std::string& help) {
    auto& slot = slots_[key];
    slot.def = def;
    slot.opt = app_->add_option(flag, slot.raw, help);
  }
  void integer(const std::string& flag, const std::string& key, std::int64_t def, const std::string& help) {
    auto& slot = slots_[key];
    slot.def = def;
    slot.opt = app_->add_option(flag, slot.raw, help);
  }
  void real(const std::string& flag, const std::string& key, double def, const std::string& help) {
    auto& slot = slots_[key];
    slot.def = def;
    slot.opt = app_->add_option(flag, slot.raw, help);
  }
  void flag(const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = slots_[key];
    slot.def = false;
    slot.opt = app_->add_flag(flag, slot.flag, help);
  }
  void list(const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = slots_[key];
    slot.def = json::array();
    slot.opt = app_->add_option(flag, slot.many, help);
  }

  bool given(const std::string& key) const {
    const auto it = slots_.find(key);
    return it != slots_.end() && it->second.opt->count() > 0;
  }

  // Effective configuration: defaults < config file < explicit flags.
  json resolve(const json& config) const {
    json eff = json::object();
    for (const auto& [key, slot] : slots_) {
      if (slot.opt->count() > 0) {
        eff[key] = convert(slot);
      } else if (config.contains(key)) {
        eff[key] = config.at(key);
      } else {
        eff[key] = slot.def;
      }
    }
    return eff;
  }

 private:
  struct Slot {
    json def;
    CLI::Option* opt = nullptr;
    std::string raw;
    bool flag = false;
    std::vector<std::string> many;
  };

  static json convert(const Slot& s) {
    try {
      switch (s.def.type()) {
        case json::value_t::boolean: return s.flag;
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return std::stoll(s.raw);
        case json::value_t::number_float: return std::stod(s.raw);
        case json::value_t::array: return s.many;
        default: return s.raw;
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad value '" + s.raw + "' for " + s.opt->get_name());
    }
  }

  CLI::App* app_;
  std::map<std::string, Slot> slots_;
};

struct Command {
  CLI::App* app = nullptr;
  std::unique_ptr<Options> options;
  std::string config_path;
};

// Hash of the settings that determine results (output location and thread
// count excluded).
std::string config_hash(json eff) {
  eff.erase("out");
  eff.erase("workers");
  eff.erase("timing");
  nli::Fnv1a h;
  h.update(eff.dump());
  return h.hex();
}

class Output {
 public:
  Output(fs::path dir, std::string command, json config)
      : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)),
        hash_(config_hash(config_)) {
    fs::create_directories(dir_);
  }

  const std::string& hash() const { return hash_; }

  std::ostream& open(const std::string& name) {
    artifacts_.push_back(name);
    auto& out = streams_.emplace_back(dir_ / name, std::ios::binary);
    if (!out) throw nli::ValidationError("cannot write '" + (dir_ / name).string() + "'");
    return out;
  }

  void write_json(const std::string& name, json j) {
    j["config_hash"] = hash_;
    open(name) << j.dump(2) << '\n';
  }

  void finish(const json& extra = json::object()) {
    for (auto& s : streams_) s.close();
    json m;
    m["command"] = command_;
    m["config"] = config_;
    m["config_hash"] = hash_;
    m["seed"] = config_.contains("seed") ? config_.at("seed") : json();
    m["artifacts"] = artifacts_;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    std::ofstream(dir_ / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  std::string command_;
  json config_;
  std::string hash_;
  std::vector<std::string> artifacts_;
  std::list<std::ofstream> streams_;
};

unsigned workers_of(const json& eff) {
  const auto w = eff.value("workers", std::int64_t{0});
  return w > 0 ? static_cast<unsigned>(w) : nli::default_workers();
}

std::string feature_list(const json& v) {
  if (v.is_array()) {
    std::vector<std::string> parts;
    for (const auto& e : v) parts.push_back(e.get<std::string>());
    return nli::join(parts, ",");
  }
  return v.get<std::string>();
}

// A dataset given as a path (flag: relative to the working directory;
// config file: relative to the config's directory) or embedded as an object.
nli::NamedDataset dataset_from(const json& eff, const std::string& key, const Options& options,
                               const fs::path& config_dir) {
  const json v = eff.value(key, json());
  if (v.is_object()) return nli::load_dataset(v, config_dir);
  if (v.is_string() && !v.get<std::string>().empty()) {
    const fs::path p = v.get<std::string>();
    return nli::load_dataset(options.given(key) || p.is_absolute() ? p : config_dir / p);
  }
  throw UsageError("--" + key + " is required");
}

bool has_dataset(const json& eff, const std::string& key) {
  const json v = eff.value(key, json());
  return v.is_object() || (v.is_string() && !v.get<std::string>().empty());
}

nli::SolverParams solver_of(const json& eff) {
  nli::SolverParams p;
  p.c = eff.at("c").get<double>();
  p.tol = eff.at("tol").get<double>();
  p.max_epochs = static_cast<int>(eff.at("max_epochs").get<std::int64_t>());
  p.seed = eff.at("seed").get<std::uint64_t>();
  return p;
}

nli::ProjectionOptions projection_of(const json& eff) {
  nli::ProjectionOptions p;
  p.coarse_ms_tags = eff.value("coarse_ms", false);
  return p;
}

void add_common(Options& o) {
  o.text("--out,-o", "out", "out", "output directory");
  o.integer("--workers", "workers", 0, "worker threads (0 = NLI_WORKERS or all cores)");
}

void add_solver(Options& o) {
  o.real("--c", "c", 1.0, "SVM regularisation constant");
  o.real("--tol", "tol", 1e-4, "projected-gradient stopping tolerance");
  o.integer("--max-epochs", "max_epochs", 1000, "solver epoch cap");
  o.integer("--seed", "seed", 42, "random seed");
  o.flag("--coarse-ms", "coarse_ms", "use universal POS tags in MS features");
}

json summary_with_id(const nli::NamedDataset& d) {
  auto j = nli::dataset_summary(d.dataset);
  j["id"] = d.id;
  return j;
}

std::vector<nli::ProficiencyBand> bands_of(const std::string& text) {
  std::vector<nli::ProficiencyBand> out;
  for (const auto& part : nli::split(text, ','))
    if (!nli::trim(part).empty()) out.push_back(nli::parse_band(part));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explainable native language identification toolkit"};
  app.require_subcommand(1);
  std::map<std::string, Command> commands;

  const auto define = [&](const std::string& name, const std::string& help) -> Command& {
    auto& c = commands[name];
    c.app = app.add_subcommand(name, help);
    c.options = std::make_unique<Options>(c.app);
    c.app->add_option("--config", c.config_path, "JSON config supplying flag defaults");
    add_common(*c.options);
    return c;
  };

  {
    auto& c = define("ingest", "load a dataset manifest, write canonical CoNLL-U and a summary");
    c.options->text("--dataset,-d", "dataset", "", "dataset manifest (JSON)");
  }
  {
    auto& c = define("sample", "balanced sampling: the same number of documents per label");
    c.options->text("--dataset,-d", "dataset", "", "dataset manifest (JSON)");
    c.options->integer("--per-label", "per_label", 0, "documents per label");
    c.options->integer("--seed", "seed", 42, "random seed");
  }
  {
    auto& c = define("pair", "build an L1-vs-native binary dataset");
    c.options->text("--non-native", "non_native", "", "non-native dataset manifest");
    c.options->text("--native", "native", "", "native dataset manifest");
    c.options->text("--l1", "l1", "", "L1 label to pair");
    c.options->integer("--native-sample", "native_sample", 1100, "native documents to sample");
    c.options->integer("--seed", "seed", 42, "random seed");
  }
  {
    auto& c = define("extract", "dump feature counts");
    c.options->text("--dataset,-d", "dataset", "", "dataset manifest (JSON)");
    c.options->text("--features,-f", "features", "all", "feature specs, comma separated, or 'all'");
    c.options->flag("--coarse-ms", "coarse_ms", "use universal POS tags in MS features");
  }
  {
    auto& c = define("vocab", "build the filtered feature vocabulary");
    c.options->text("--dataset,-d", "dataset", "", "dataset manifest (JSON)");
    c.options->text("--features,-f", "features", "all", "feature specs, comma separated, or 'all'");
    c.options->flag("--coarse-ms", "coarse_ms", "use universal POS tags in MS features");
  }
  {
    auto& c = define("train", "train a calibrated one-vs-rest model on a whole dataset");
    c.options->text("--dataset,-d", "dataset", "", "dataset manifest (JSON)");
    c.options->text("--features,-f", "features", "T1", "feature specs, comma separated, or 'all'");
    add_solver(*c.options);
  }
  {
    auto& c = define("cv", "stratified k-fold cross-validation");
    c.options->text("--dataset,-d", "dataset", "", "dataset manifest (JSON)");
    c.options->text("--features,-f", "features", "T1", "feature specs, comma separated, or 'all'");
    c.options->integer("--k", "k", 10, "number of folds");
    c.options->flag("--timing", "timing", "include wall time in the report");
    add_solver(*c.options);
  }
  {
    auto& c = define("grid", "cross-validate many feature sets over many datasets");
    c.options->list("--dataset,-d", "datasets", "dataset manifests (repeatable)");
    c.options->text("--families", "families", "all", "single-family rows: comma list or 'all'");
    c.options->list("--union", "unions", "union rows, e.g. T1+T2+T3 or all (repeatable)");
    c.options->integer("--k", "k", 10, "number of folds");
    c.options->flag("--timing", "timing", "include wall time in the report");
    add_solver(*c.options);
  }
  {
    auto& c = define("explain", "rank overuse/underuse features of a trained model");
    c.options->text("--model,-m", "model", "", "model file written by 'train'");
    c.options->text("--vocab", "vocab", "", "vocabulary file (default: vocab.tsv next to the model)");
    c.options->text("--dataset,-d", "dataset", "", "dataset for concordance lines and NE filtering");
    c.options->integer("--top-k", "top_k", 10, "features per direction");
    c.options->integer("--kwic", "kwic", 3, "concordance lines per feature");
    c.options->integer("--window", "window", 5, "context tokens each side");
    c.options->flag("--exclude-ne", "exclude_ne", "drop named-entity features");
    c.options->flag("--coarse-ms", "coarse_ms", "use universal POS tags in MS features");
  }
  {
    auto& c = define("kwic", "keyword-in-context lines for one feature");
    c.options->text("--dataset,-d", "dataset", "", "dataset manifest (JSON)");
    c.options->text("--feature", "feature", "", "namespaced feature, e.g. 'T2:de train'");
    c.options->integer("--window", "window", 5, "context tokens each side");
    c.options->flag("--coarse-ms", "coarse_ms", "use universal POS tags in MS features");
  }
  {
    auto& c = define("stats", "means and distributions of WL/SL/DD");
    c.options->text("--dataset,-d", "dataset", "", "dataset manifest (JSON)");
    c.options->text("--kind", "kind", "all", "WL, SL, DD or all");
    c.options->text("--bands", "bands", "", "proficiency bands, e.g. 1-5,6-12,13+");
    c.options->flag("--raw", "raw", "unnormalised histograms");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    for (auto& [name, cmd] : commands) {
      if (!cmd.app->parsed()) continue;
      json config = json::object();
      fs::path config_dir = fs::current_path();
      if (!cmd.config_path.empty()) {
        config = nli::read_json_file(cmd.config_path);
        config_dir = fs::path(cmd.config_path).parent_path();
      }
      const json eff = cmd.options->resolve(config);
      const Options& opts = *cmd.options;
      const fs::path out_dir = eff.at("out").get<std::string>();
      const unsigned workers = workers_of(eff);
      Output out(out_dir, name, eff);
      json extra = json::object();
      int rc = kOk;

      if (name == "ingest") {
        const auto d = dataset_from(eff, "dataset", opts, config_dir);
        nli::serialize_conllu(out.open("dataset.conllu"), d.dataset.documents());
        out.write_json("summary.json", summary_with_id(d));
        std::cout << d.dataset.size() << " documents, " << d.dataset.label_space().size() << " labels\n";
      } else if (name == "sample") {
        const auto d = dataset_from(eff, "dataset", opts, config_dir);
        const auto per = eff.at("per_label").get<std::int64_t>();
        if (per <= 0) throw UsageError("--per-label must be positive");
        const auto s = nli::sample_balanced(d.dataset, static_cast<std::size_t>(per),
                                            eff.at("seed").get<std::uint64_t>());
        nli::serialize_conllu(out.open("sampled.conllu"), s.documents());
        out.write_json("summary.json", summary_with_id({d.id, s}));
        std::cout << s.size() << " documents sampled\n";
      } else if (name == "pair") {
        const auto nn = dataset_from(eff, "non_native", opts, config_dir);
        const auto nat = dataset_from(eff, "native", opts, config_dir);
        const auto ns = eff.at("native_sample").get<std::int64_t>();
        if (ns <= 0) throw UsageError("--native-sample must be positive");
        const auto p = nli::pair_binary(nn.dataset, nat.dataset, eff.at("l1").get<std::string>(),
                                        static_cast<std::size_t>(ns), eff.at("seed").get<std::uint64_t>());
        nli::serialize_conllu(out.open("paired.conllu"), p.documents());
        out.write_json("summary.json", summary_with_id({nn.id + "/" + nat.id, p}));
        std::cout << p.size() << " documents paired\n";
      } else if (name == "extract" || name == "vocab") {
        const auto d = dataset_from(eff, "dataset", opts, config_dir);
        const auto specs = nli::parse_feature_specs(feature_list(eff.at("features")));
        const auto counts = nli::extract_dataset(d.dataset, specs, nli::default_suffix_lexicon(),
                                                 projection_of(eff), workers);
        if (name == "extract") {
          nli::write_feature_dump(out.open("features.tsv"), counts);
        } else {
          const auto vocab = nli::build_vocabulary(counts);
          nli::write_vocabulary(out.open("vocab.tsv"), vocab);
          extra["vocabulary_hash"] = vocab.hash();
          std::cout << vocab.size() << " features\n";
        }
      } else if (name == "train") {
        const auto d = dataset_from(eff, "dataset", opts, config_dir);
        d.dataset.require_trainable();
        const auto specs = nli::parse_feature_specs(feature_list(eff.at("features")));
        const auto counts = nli::extract_dataset(d.dataset, specs, nli::default_suffix_lexicon(),
                                                 projection_of(eff), workers);
        auto vocab = std::make_shared<const nli::FeatureVocabulary>(nli::build_vocabulary(counts));
        const auto x = nli::tfidf_all(counts, *vocab);
        const auto model = nli::train_ovr(x, d.dataset.labels(), vocab, solver_of(eff), workers);
        nli::write_vocabulary(out.open("vocab.tsv"), *vocab);
        {
          auto j = nli::model_to_json(model);
          j["config_hash"] = out.hash();
          j["features"] = feature_list(eff.at("features"));
          out.open("model.json") << j.dump() << '\n';
        }
        extra["vocabulary_hash"] = vocab->hash();
        extra["converged"] = model.all_converged();
        if (!model.all_converged()) rc = kNonConvergence;
        std::cout << model.models.size() << " binary models, " << vocab->size() << " features\n";
      } else if (name == "cv") {
        const auto d = dataset_from(eff, "dataset", opts, config_dir);
        nli::ExperimentConfig ec;
        ec.dataset_id = d.id;
        ec.specs = nli::parse_feature_specs(feature_list(eff.at("features")));
        const auto k = eff.at("k").get<std::int64_t>();
        if (k < 2) throw UsageError("--k must be at least 2");
        ec.k = static_cast<std::size_t>(k);
        ec.seed = eff.at("seed").get<std::uint64_t>();
        ec.solver = solver_of(eff);
        ec.projection = projection_of(eff);
        const auto report = nli::cross_validate(d.dataset, ec, workers);
        out.write_json("report.json", nli::report_to_json(report, eff.value("timing", false)));
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
        extra["accuracy"] = report.pooled_accuracy;
        extra["nonconverged_folds"] = report.nonconverged_folds;
        if (report.nonconverged_folds > 0) rc = kNonConvergence;
        std::cout << "accuracy " << nli::format_fixed(report.pooled_accuracy, 4) << '\n';
      } else if (name == "grid") {
        std::vector<nli::NamedDataset> datasets;
        auto paths = eff.at("datasets");
        if (paths.empty() && config.contains("dataset"))
          datasets.push_back(nli::load_dataset(config, config_dir));
        for (const auto& p : paths) {
          if (p.is_object()) {
            datasets.push_back(nli::load_dataset(p, config_dir));
          } else {
            datasets.push_back(nli::load_dataset(fs::path(p.get<std::string>())));
          }
        }
        if (datasets.empty()) throw UsageError("grid needs at least one --dataset");
        std::vector<std::vector<nli::FeatureSpec>> rows;
        const auto fam = feature_list(eff.at("families"));
        if (!nli::trim(fam).empty() && fam != "none")
          for (const auto& s : nli::parse_feature_specs(fam)) rows.push_back({s});
        for (const auto& u : eff.at("unions")) {
          auto text = u.get<std::string>();
          std::replace(text.begin(), text.end(), '+', ',');
          rows.push_back(nli::parse_feature_specs(text));
        }
        std::map<std::string, const nli::LabeledDataset*> by_id;
        std::vector<nli::ExperimentConfig> configs;
        for (const auto& d : datasets) {
          if (by_id.count(d.id)) throw UsageError("duplicate dataset id '" + d.id + "'");
          by_id[d.id] = &d.dataset;
        }
        const auto k = eff.at("k").get<std::int64_t>();
        if (k < 2) throw UsageError("--k must be at least 2");
        for (const auto& specs : rows) {
          for (const auto& d : datasets) {
            nli::ExperimentConfig ec;
            ec.dataset_id = d.id;
            ec.specs = specs;
            ec.k = static_cast<std::size_t>(k);
            ec.seed = eff.at("seed").get<std::uint64_t>();
            ec.solver = solver_of(eff);
            ec.projection = projection_of(eff);
            configs.push_back(std::move(ec));
          }
        }
        const auto grid = nli::run_grid(configs, by_id, workers);
        out.write_json("grid.json", nli::grid_to_json(grid, eff.value("timing", false)));
        nli::write_grid_tsv(out.open("grid.tsv"), grid, false);
        nli::write_grid_tsv(out.open("grid_marked.tsv"), grid, true);
        std::size_t nonconv = 0;
        for (std::size_t r = 0; r < grid.rows.size(); ++r)
          for (std::size_t col = 0; col < grid.columns.size(); ++col) {
            const auto& cell = grid.cells[r][col];
            if (!cell.error.empty())
              std::cerr << "error: " << grid.rows[r] << " / " << grid.columns[col] << ": " << cell.error << '\n';
            if (cell.report && cell.report->nonconverged_folds > 0) ++nonconv;
          }
        extra["failed"] = grid.any_failed();
        extra["nonconverged_configs"] = nonconv;
        if (grid.any_failed()) {
          rc = kDataError;
        } else if (nonconv > 0) {
          rc = kNonConvergence;
        }
        std::cout << grid.rows.size() << " rows x " << grid.columns.size() << " datasets\n";
      } else if (name == "explain") {
        const fs::path model_path = eff.at("model").get<std::string>();
        if (model_path.empty()) throw UsageError("--model is required");
        fs::path vocab_path = eff.at("vocab").get<std::string>();
        if (vocab_path.empty()) vocab_path = model_path.parent_path() / "vocab.tsv";
        std::ifstream vin(vocab_path);
        if (!vin) throw nli::ValidationError("cannot open vocabulary '" + vocab_path.string() + "'");
        auto vocab = std::make_shared<const nli::FeatureVocabulary>(nli::read_vocabulary(vin));
        std::ifstream min(model_path);
        if (!min) throw nli::ValidationError("cannot open model '" + model_path.string() + "'");
        const auto model = nli::read_model(min, vocab);
        std::optional<nli::NamedDataset> d;
        if (has_dataset(eff, "dataset")) d = dataset_from(eff, "dataset", opts, config_dir);
        nli::ReportOptions ro;
        const auto top_k = eff.at("top_k").get<std::int64_t>();
        if (top_k < 1) throw UsageError("--top-k must be at least 1");
        ro.top_k = static_cast<std::size_t>(top_k);
        ro.kwic_samples = static_cast<std::size_t>(std::max<std::int64_t>(0, eff.at("kwic").get<std::int64_t>()));
        ro.window = static_cast<std::size_t>(std::max<std::int64_t>(0, eff.at("window").get<std::int64_t>()));
        ro.exclude_named_entities = eff.value("exclude_ne", false);
        ro.projection = projection_of(eff);
        const auto r = nli::report(model, d ? &d->dataset : nullptr, ro, nli::default_suffix_lexicon(), workers);
        out.write_json("explain.json", nli::explain_to_json(r));
        nli::write_explain_text(out.open("explain.txt"), r);
        std::cout << r.labels.size() << " label sections\n";
      } else if (name == "kwic") {
        const auto d = dataset_from(eff, "dataset", opts, config_dir);
        const auto feature = eff.at("feature").get<std::string>();
        if (feature.empty()) throw UsageError("--feature is required");
        const auto window = eff.at("window").get<std::int64_t>();
        if (window < 0) throw UsageError("--window must be non-negative");
        const auto lines = nli::kwic(d.dataset, feature, static_cast<std::size_t>(window),
                                     nli::default_suffix_lexicon(), projection_of(eff));
        nli::write_kwic_tsv(out.open("kwic.tsv"), lines);
        std::cout << lines.size() << " lines\n";
      } else if (name == "stats") {
        const auto d = dataset_from(eff, "dataset", opts, config_dir);
        const auto kind_text = eff.at("kind").get<std::string>();
        std::vector<nli::Family> kinds;
        if (kind_text == "all") {
          kinds = {nli::Family::WL, nli::Family::SL, nli::Family::DD};
        } else {
          const auto f = nli::family_from_name(kind_text);
          if (!f || !nli::is_statistical(*f)) throw UsageError("--kind must be WL, SL, DD or all");
          kinds = {*f};
        }
        const bool normalize = !eff.value("raw", false);
        const auto emit = [&](const nli::NamedDatasets& groups, const std::string& stem) {
          std::map<nli::Family, std::optional<std::vector<nli::StatSummary>>> means;
          std::vector<nli::StatHistogram> hists;
          for (auto k : kinds) {
            try {
              means[k] = nli::mean_stat(groups, k);
              auto h = nli::histogram(groups, k, normalize);
              hists.insert(hists.end(), h.begin(), h.end());
            } catch (const nli::ValidationError& e) {
              if (kind_text != "all") throw;
              std::cerr << "warning: " << e.what() << '\n';
            }
          }
          nli::write_means_csv(out.open(stem + "_means.csv"), means[nli::Family::WL], means[nli::Family::SL],
                               means[nli::Family::DD]);
          nli::write_histogram_csv(out.open(stem + "_histogram.csv"), hists);
        };
        emit(nli::groups_by_label(d.dataset), "labels");
        if (const auto bands_text = eff.at("bands").get<std::string>(); !bands_text.empty()) {
          const auto grouped = nli::group_by_proficiency(d.dataset, bands_of(bands_text));
          emit(grouped.bands, "bands");
          extra["dropped_documents"] = grouped.dropped;
        }
      }
      out.finish(extra);
      return rc;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const nli::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const nli::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}
