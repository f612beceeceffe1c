#ifndef NLI_DATASET_IO_HPP
#define NLI_DATASET_IO_HPP

// Dataset manifests.
//
//   { "id": "toefl",
//     "documents": [ {"path": "essays/", "label": "ITA", "proficiency": 3, "source": "toefl"},
//                    {"path": "annotated.conllu"} ],
//     "filter_min_chars": 300,                       optional
//     "sample": {"per_label": 2000, "seed": 1} }     optional
//
//   { "id": "planted", "synthetic": {"kind": "planted", "labels": 11, ...} }
//
// A run config that embeds a dataset under "dataset" (object or path) is
// accepted wherever a manifest is. Relative paths resolve against the
// manifest's directory.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nli/conllu.hpp"
#include "nli/corpus.hpp"
#include "nli/error.hpp"
#include "nli/synthetic.hpp"

namespace nli {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

struct NamedDataset {
  std::string id;
  LabeledDataset dataset;
};

namespace detail {

inline void load_path(const fs::path& path, const fs::path& display_root, const ConlluDefaults& defaults,
                      std::vector<AnnotatedDocument>& docs) {
  const auto ext = path.extension().string();
  if (ext == ".conllu") {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    try {
      auto parsed = parse_conllu(in, defaults);
      docs.insert(docs.end(), std::make_move_iterator(parsed.begin()), std::make_move_iterator(parsed.end()));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  } else if (ext == ".txt") {
    if (!defaults.label) throw ValidationError("plain-text file '" + path.string() + "' needs a label");
    auto id = fs::relative(path, display_root).replace_extension().generic_string();
    auto doc = tokenize_plain(read_file(path), *defaults.label, id);
    doc.proficiency = defaults.proficiency;
    if (!defaults.source.empty()) doc.source = defaults.source;
    docs.push_back(std::move(doc));
  } else {
    throw ValidationError("unsupported document file '" + path.string() + "' (expected .conllu or .txt)");
  }
}

inline LabeledDataset synthetic_dataset(const nlohmann::json& j) {
  const auto kind = j.value("kind", std::string("planted"));
  if (kind == "planted") {
    synthetic::PlantedConfig c;
    c.labels = j.value("labels", c.labels);
    c.docs_per_label = j.value("docs_per_label", c.docs_per_label);
    c.tokens_per_doc = j.value("tokens_per_doc", c.tokens_per_doc);
    c.salt_rate = j.value("salt_rate", c.salt_rate);
    c.vocabulary = j.value("vocabulary", c.vocabulary);
    c.seed = j.value("seed", c.seed);
    auto d = synthetic::make_planted(c);
    if (j.value("shuffle_labels", false)) d = synthetic::shuffle_labels(d, j.value("shuffle_seed", c.seed + 1));
    return d;
  }
  if (kind == "bands") {
    synthetic::BandConfig c;
    c.levels = j.value("levels", c.levels);
    c.sentence_length = j.value("sentence_length", c.sentence_length);
    c.docs_per_band = j.value("docs_per_band", c.docs_per_band);
    c.sentences_per_doc = j.value("sentences_per_doc", c.sentences_per_doc);
    c.seed = j.value("seed", c.seed);
    if (c.levels.size() != c.sentence_length.size())
      throw ValidationError("bands: levels and sentence_length differ in size");
    return synthetic::make_proficiency_corpus(c);
  }
  throw ValidationError("unknown synthetic dataset kind '" + kind + "'");
}

}  // namespace detail

inline NamedDataset load_dataset(const nlohmann::json& spec, const fs::path& base_dir);

inline NamedDataset load_dataset(const fs::path& manifest) {
  return load_dataset(read_json_file(manifest), manifest.parent_path());
}

inline NamedDataset load_dataset(const nlohmann::json& spec, const fs::path& base_dir) {
  try {
    if (spec.contains("dataset")) {
      const auto& inner = spec.at("dataset");
      if (inner.is_string()) return load_dataset(base_dir / inner.get<std::string>());
      return load_dataset(inner, base_dir);
    }
    NamedDataset out;
    out.id = spec.value("id", std::string("dataset"));
    if (spec.contains("synthetic")) {
      out.dataset = detail::synthetic_dataset(spec.at("synthetic"));
    } else if (spec.contains("documents")) {
      std::vector<AnnotatedDocument> docs;
      for (const auto& entry : spec.at("documents")) {
        ConlluDefaults defaults;
        if (entry.contains("label")) defaults.label = entry.at("label").get<std::string>();
        if (entry.contains("proficiency")) defaults.proficiency = entry.at("proficiency").get<int>();
        defaults.source = entry.value("source", std::string());
        const fs::path path = base_dir / entry.at("path").get<std::string>();
        if (fs::is_directory(path)) {
          std::vector<fs::path> files;
          for (const auto& f : fs::directory_iterator(path)) {
            const auto ext = f.path().extension();
            if (f.is_regular_file() && (ext == ".conllu" || ext == ".txt")) files.push_back(f.path());
          }
          std::sort(files.begin(), files.end());
          for (const auto& f : files) detail::load_path(f, base_dir, defaults, docs);
        } else {
          detail::load_path(path, base_dir, defaults, docs);
        }
      }
      out.dataset = LabeledDataset(std::move(docs));
    } else {
      throw ValidationError("dataset manifest needs 'documents', 'synthetic' or 'dataset'");
    }
    if (spec.contains("filter_min_chars"))
      out.dataset = filter_min_chars(out.dataset, spec.at("filter_min_chars").get<std::size_t>());
    if (spec.contains("sample")) {
      const auto& s = spec.at("sample");
      out.dataset = sample_balanced(out.dataset, s.at("per_label").get<std::size_t>(),
                                    s.value("seed", std::uint64_t{1}));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed dataset manifest: ") + e.what());
  }
}

// Per-label and total counts of documents, sentences, tokens, characters.
inline nlohmann::json dataset_summary(const LabeledDataset& d) {
  struct Tally {
    std::size_t docs = 0, sentences = 0, tokens = 0, chars = 0;
  };
  std::map<std::string, Tally> per;
  Tally total;
  for (const auto& l : d.label_space()) per[l];
  for (const auto& doc : d.documents()) {
    for (auto* t : {&per[doc.label], &total}) {
      ++t->docs;
      t->sentences += doc.sentences.size();
      t->tokens += doc.token_count();
      t->chars += doc.char_length;
    }
  }
  const auto to_json = [](const Tally& t) {
    return nlohmann::json{{"documents", t.docs}, {"sentences", t.sentences}, {"tokens", t.tokens},
                          {"characters", t.chars}};
  };
  nlohmann::json j;
  j["labels"] = nlohmann::json::object();
  for (const auto& [l, t] : per) j["labels"][l] = to_json(t);
  j["total"] = to_json(total);
  return j;
}

}  // namespace nli

#endif  // NLI_DATASET_IO_HPP
