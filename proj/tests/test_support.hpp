#ifndef NLI_TEST_SUPPORT_HPP
#define NLI_TEST_SUPPORT_HPP

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "nli/nli.hpp"

namespace nli::test {

inline std::string fixture_path(const std::string& name) { return std::string(NLI_FIXTURE_DIR) + "/" + name; }

inline std::vector<AnnotatedDocument> load_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  return parse_conllu(in);
}

inline const AnnotatedDocument& find_doc(const std::vector<AnnotatedDocument>& docs, const std::string& id) {
  for (const auto& d : docs)
    if (d.doc_id == id) return d;
  throw std::runtime_error("no fixture document " + id);
}

inline std::string joined(const std::vector<std::string>& v) { return join(v, " "); }

inline std::string joined(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

// Document built from whitespace-separated words, one sentence per string.
inline AnnotatedDocument words_doc(const std::vector<std::string>& sentences, const std::string& label = "A",
                                   const std::string& id = "d") {
  AnnotatedDocument d;
  d.doc_id = id;
  d.label = label;
  std::size_t chars = 0;
  for (const auto& s : sentences) {
    Sentence sent;
    for (const auto& w : split(s, ' ')) {
      if (w.empty()) continue;
      TokenAnnotation t;
      t.surface = w;
      t.lemma = to_lower_ascii(w);
      t.is_punct = w == "." || w == "," || w == "!" || w == "?";
      chars += w.size() + 1;
      sent.push_back(t);
    }
    d.sentences.push_back(sent);
  }
  d.char_length = chars;
  return d;
}

struct Vectorized {
  std::shared_ptr<const FeatureVocabulary> vocabulary;
  std::vector<SparseVector> x;
  std::vector<std::string> labels;
};

// Whole-dataset features, vocabulary and tf-idf vectors.
inline Vectorized vectorize(const LabeledDataset& ds, const std::string& specs = "T1") {
  const auto parsed = parse_feature_specs(specs);
  const auto counts = extract_dataset(ds, parsed);
  Vectorized v;
  v.vocabulary = std::make_shared<const FeatureVocabulary>(build_vocabulary(counts));
  v.x = tfidf_all(counts, *v.vocabulary);
  v.labels = ds.labels();
  return v;
}

}  // namespace nli::test

#endif  // NLI_TEST_SUPPORT_HPP
