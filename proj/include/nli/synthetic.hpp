#ifndef NLI_SYNTHETIC_HPP
#define NLI_SYNTHETIC_HPP

// Synthetic, fully annotated corpora with known structure:
//  - planted-marker: every label's documents are salted with a token unique
//    to that label at a fixed rate; everything else is shared noise.
//  - proficiency bands: sentence length grows with proficiency level.

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "nli/corpus.hpp"
#include "nli/util.hpp"

namespace nli::synthetic {

inline constexpr std::array<const char*, 11> kToeflLabels = {"ARA", "CHI", "FRE", "GER", "HIN", "ITA",
                                                             "JPN", "KOR", "SPA", "TEL", "TUR"};

inline std::string label_name(std::size_t i) {
  if (i < kToeflLabels.size()) return kToeflLabels[i];
  char buf[32];
  std::snprintf(buf, sizeof buf, "L%02zu", i);
  return buf;
}

inline std::string salt_token(const std::string& label) { return "zqx" + to_lower_ascii(label); }

// Pronounceable pseudo-word for index i (distinct for distinct i).
inline std::string pseudo_word(std::size_t i) {
  static constexpr std::array<const char*, 16> kSyl = {"ba", "ko", "ri", "te", "mu", "sa", "lo", "ne",
                                                       "di", "fa", "gu", "pe", "vo", "ju", "ha", "ci"};
  std::string w;
  std::size_t x = i;
  do {
    w += kSyl[x % kSyl.size()];
    x /= kSyl.size();
  } while (x > 0);
  if (i % 5 == 1) w += "ing";
  if (i % 7 == 2) w += "ly";
  return w;
}

struct WordClass {
  const char* pos;
  const char* upos;
  const char* dep;
};

inline constexpr std::array<WordClass, 10> kClasses = {{{"NN", "NOUN", "nsubj"},
                                                        {"VBZ", "VERB", "ccomp"},
                                                        {"JJ", "ADJ", "amod"},
                                                        {"RB", "ADV", "advmod"},
                                                        {"IN", "ADP", "prep"},
                                                        {"DT", "DET", "det"},
                                                        {"PRP", "PRON", "nsubj"},
                                                        {"VBG", "VERB", "xcomp"},
                                                        {"NNS", "NOUN", "dobj"},
                                                        {"CC", "CCONJ", "cc"}}};

struct PlantedConfig {
  std::size_t labels = 11;
  std::size_t docs_per_label = 200;
  std::size_t tokens_per_doc = 100;
  double salt_rate = 0.05;
  std::size_t vocabulary = 400;
  std::uint64_t seed = 7;
};

namespace detail {

// Builds one sentence of `words` (plus a final period) with a random
// projective-enough tree: token 0 is the root, every other token attaches
// to an earlier token.
inline Sentence make_sentence(Rng& rng, const std::vector<std::string>& words,
                              const std::vector<std::size_t>& classes) {
  Sentence s;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& wc = kClasses[classes[i]];
    TokenAnnotation t;
    t.surface = words[i];
    t.lemma = to_lower_ascii(words[i]);
    t.pos = wc.pos;
    t.coarse_pos = wc.upos;
    if (i == 0) {
      t.dep_label = "root";
    } else {
      t.head = static_cast<std::size_t>(rng.below(i));
      t.dep_label = wc.dep;
    }
    s.push_back(std::move(t));
  }
  TokenAnnotation stop;
  stop.surface = ".";
  stop.lemma = ".";
  stop.pos = ".";
  stop.coarse_pos = "PUNCT";
  stop.dep_label = "punct";
  stop.head = 0;
  stop.is_punct = true;
  s.push_back(std::move(stop));
  return s;
}

inline std::size_t char_length(const AnnotatedDocument& d) {
  std::size_t n = 0;
  for (const auto& s : d.sentences)
    for (const auto& t : s) n += utf8_length(t.surface) + 1;
  return n > 0 ? n - 1 : 0;
}

inline constexpr std::size_t kNoWord = static_cast<std::size_t>(-1);

inline void mark_entities(Sentence& s, const std::vector<std::size_t>& word_ids) {
  for (std::size_t i = 0; i < word_ids.size(); ++i)
    if (word_ids[i] != kNoWord && word_ids[i] % 37 == 3) {
      s[i].ne_tag = "B-PERSON";
      s[i].pos = "NNP";
      s[i].coarse_pos = "PROPN";
    }
}

}  // namespace detail

inline LabeledDataset make_planted(const PlantedConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<AnnotatedDocument> docs;
  using detail::kNoWord;
  for (std::size_t l = 0; l < cfg.labels; ++l) {
    const auto label = label_name(l);
    const auto salt = salt_token(label);
    for (std::size_t d = 0; d < cfg.docs_per_label; ++d) {
      AnnotatedDocument doc;
      char id[32];
      std::snprintf(id, sizeof id, "%s-%04zu", label.c_str(), d);
      doc.doc_id = id;
      doc.label = label;
      doc.source = "synthetic-planted";
      doc.proficiency = static_cast<int>(1 + rng.below(15));
      std::size_t produced = 0;
      while (produced < cfg.tokens_per_doc) {
        const std::size_t len = 6 + rng.below(13);
        std::vector<std::string> words;
        std::vector<std::size_t> classes, ids;
        for (std::size_t i = 0; i < len; ++i) {
          if (rng.uniform() < cfg.salt_rate) {
            words.push_back(salt);
            classes.push_back(2);  // JJ: survives POS masking
            ids.push_back(kNoWord);
          } else {
            const double u = rng.uniform();
            const auto w = static_cast<std::size_t>(u * u * static_cast<double>(cfg.vocabulary));
            words.push_back(pseudo_word(w));
            classes.push_back(w % kClasses.size());
            ids.push_back(w);
          }
        }
        auto sentence = detail::make_sentence(rng, words, classes);
        detail::mark_entities(sentence, ids);
        produced += sentence.size();
        doc.sentences.push_back(std::move(sentence));
      }
      doc.char_length = detail::char_length(doc);
      docs.push_back(std::move(doc));
    }
  }
  return LabeledDataset(std::move(docs));
}

// Same documents, labels permuted across documents (label histogram kept).
inline LabeledDataset shuffle_labels(const LabeledDataset& dataset, std::uint64_t seed) {
  auto labels = dataset.labels();
  Rng rng(seed);
  rng.shuffle(labels);
  std::vector<AnnotatedDocument> docs = dataset.documents();
  for (std::size_t i = 0; i < docs.size(); ++i) docs[i].label = labels[i];
  return LabeledDataset(std::move(docs), dataset.label_space());
}

struct BandConfig {
  std::vector<int> levels = {3, 8, 14};               // one proficiency level per band
  std::vector<std::size_t> sentence_length = {8, 12, 16};  // mean words per sentence
  std::size_t docs_per_band = 30;
  std::size_t sentences_per_doc = 8;
  std::uint64_t seed = 11;
};

// Documents whose sentence length (in words) is drawn uniformly from
// mean +- 2 for their band; labels alternate between two L1s.
inline LabeledDataset make_proficiency_corpus(const BandConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<AnnotatedDocument> docs;
  for (std::size_t b = 0; b < cfg.levels.size(); ++b) {
    for (std::size_t d = 0; d < cfg.docs_per_band; ++d) {
      AnnotatedDocument doc;
      char id[32];
      std::snprintf(id, sizeof id, "G%zu-%04zu", b + 1, d);
      doc.doc_id = id;
      doc.label = label_name(d % 2);
      doc.source = "synthetic-bands";
      doc.proficiency = cfg.levels[b];
      for (std::size_t s = 0; s < cfg.sentences_per_doc; ++s) {
        const std::size_t mean = cfg.sentence_length[b];
        const std::size_t len = mean - 2 + rng.below(5);
        std::vector<std::string> words;
        std::vector<std::size_t> classes;
        for (std::size_t i = 0; i < len; ++i) {
          const auto w = static_cast<std::size_t>(rng.below(200));
          words.push_back(pseudo_word(w));
          classes.push_back(w % kClasses.size());
        }
        doc.sentences.push_back(detail::make_sentence(rng, words, classes));
      }
      doc.char_length = detail::char_length(doc);
      docs.push_back(std::move(doc));
    }
  }
  return LabeledDataset(std::move(docs));
}

}  // namespace nli::synthetic

#endif  // NLI_SYNTHETIC_HPP
