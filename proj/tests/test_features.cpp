#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

namespace nli {
namespace {

const std::vector<AnnotatedDocument>& example_docs() {
  static const auto docs = test::load_fixture("worked_examples.conllu");
  return docs;
}

const AnnotatedDocument& example(const std::string& id) { return test::find_doc(example_docs(), id); }

TEST(ProjectStream, PosOfRunFast) {
  EXPECT_EQ(test::joined(project_stream(example("run-fast"), Family::P)), "PRP VBP RB");
}

TEST(ProjectStream, TokenPosMaskingOfEmailAddress) {
  EXPECT_EQ(test::joined(project_stream(example("reach-me"), Family::TP)), "Reach me at ADD");
  EXPECT_EQ(test::joined(project_stream(example("reach-me"), Family::LP)), "reach I at ADD");
}

TEST(ProjectStream, MorphoSyntacticUnits) {
  EXPECT_EQ(test::joined(project_stream(example("election"), Family::MS)),
            "DT NN-ction IN DT NN-ent VBZ VBG-ing RB-ly");
  ProjectionOptions coarse;
  coarse.coarse_ms_tags = true;
  EXPECT_EQ(test::joined(project_stream(example("election"), Family::MS, default_suffix_lexicon(), coarse)),
            "DET NOUN-ction ADP DET NOUN-ent AUX VERB-ing ADV-ly");
}

TEST(ProjectStream, EntityPlaceholder) {
  EXPECT_EQ(test::joined(project_stream(example("france"), Family::TN)), "I have lived in ENT all my life .");
  EXPECT_EQ(test::joined(project_stream(example("france"), Family::LN)), "I have live in ENT all my life .");
  // NNP and NN are masked classes, so the TP stream shows the tags instead.
  EXPECT_EQ(test::joined(project_stream(example("france"), Family::TP)), "I have lived in NNP all my NN .");
}

TEST(ProjectStream, DependencyLabels) {
  EXPECT_EQ(test::joined(project_stream(example("run-fast"), Family::D)), "nsubj root advmod");
}

TEST(ProjectStream, MissingLayerNamesFamilyAndDocument) {
  const auto bare = test::words_doc({"I run fast"}, "A", "bare");
  for (auto f : {Family::P, Family::MS, Family::TP, Family::LP, Family::D}) {
    try {
      project_stream(bare, f);
      FAIL() << family_name(f);
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      EXPECT_NE(msg.find("family " + std::string(family_name(f))), std::string::npos) << msg;
      EXPECT_NE(msg.find("'bare'"), std::string::npos) << msg;
    }
  }
  EXPECT_NO_THROW(project_stream(bare, Family::T));
  EXPECT_NO_THROW(project_stream(bare, Family::TN));
  EXPECT_THROW(project_stream(bare, Family::WL), InvalidArgument);
}

TEST(Statistical, WordLengthsSkipPunctuation) {
  EXPECT_EQ(test::joined(statistical_values(example("france"), Family::WL)), "1 4 5 2 6 3 2 4");
}

TEST(Statistical, DependencyDepths) {
  EXPECT_EQ(test::joined(statistical_values(example("cookies"), Family::DD)), "1 0 1 3 2 3");
}

TEST(Statistical, SentenceLength) {
  const auto d = test::words_doc({"a b c d e f g"});
  EXPECT_EQ(encode_statistical(d, Family::SL), (CountMap{{"SL:7", 1}}));
  EXPECT_EQ(encode_statistical(example("france"), Family::SL), (CountMap{{"SL:9", 1}}));
}

TEST(Statistical, DepthNeedsParse) {
  EXPECT_THROW(statistical_values(test::words_doc({"a b"}), Family::DD), ValidationError);
}

TEST(ExtractNgrams, Definition) {
  const std::vector<std::string> abc = {"a", "b", "c"};
  EXPECT_EQ(extract_ngrams(abc, 2, "X2"), (CountMap{{"X2:a b", 1}, {"X2:b c", 1}}));
  const std::vector<std::string> two = {"a", "b"};
  EXPECT_TRUE(extract_ngrams(two, 3, "X3").empty());
  EXPECT_THROW(extract_ngrams(two, 4, "X4"), InvalidArgument);
}

TEST(ExtractNgrams, CrossesSentenceBoundaries) {
  const auto d = test::words_doc({"quiero vivir .", "so far away"});
  const auto units = project_stream(d, Family::T);
  EXPECT_EQ(extract_ngrams(units, 2, "T2").count("T2:. so"), 1u);
}

TEST(ExtractFeatures, UnigramCounts) {
  const std::vector<FeatureSpec> t1 = {FeatureSpec::parse("T1")};
  EXPECT_EQ(extract_features(test::words_doc({"a a b"}), t1).counts, (CountMap{{"T1:a", 2}, {"T1:b", 1}}));
}

TEST(ExtractFeatures, FamiliesAreNamespaced) {
  AnnotatedDocument d = test::words_doc({"Running"});
  d.sentences[0][0].lemma = "run";
  const auto specs = parse_feature_specs("T1,L1");
  EXPECT_EQ(extract_features(d, specs).counts, (CountMap{{"L1:run", 1}, {"T1:Running", 1}}));
  // Same unit in two families stays two features.
  const auto same = extract_features(test::words_doc({"x"}), parse_feature_specs("T1,L1,TN1")).counts;
  EXPECT_EQ(same.size(), 3u);
}

// Five parsed sentences of nine words plus a period: 50 tokens.
AnnotatedDocument fifty_token_doc(std::uint64_t seed) {
  Rng rng(seed);
  AnnotatedDocument d;
  d.doc_id = "fifty";
  d.label = "A";
  for (int s = 0; s < 5; ++s) {
    std::vector<std::string> words;
    std::vector<std::size_t> classes;
    for (int i = 0; i < 9; ++i) {
      const auto w = rng.below(60);
      words.push_back(synthetic::pseudo_word(w));
      classes.push_back(w % synthetic::kClasses.size());
    }
    d.sentences.push_back(synthetic::detail::make_sentence(rng, words, classes));
  }
  d.char_length = synthetic::detail::char_length(d);
  return d;
}

TEST(ExtractFeatures, AllThirtyFamiliesMatchArithmeticCount) {
  const auto d = fifty_token_doc(3);
  ASSERT_EQ(d.token_count(), 50u);
  const auto specs = all_feature_specs();
  ASSERT_EQ(specs.size(), 30u);
  const auto fc = extract_features(d, specs);
  // 9 n-gram families x (50 + 49 + 48) n-gram tokens, plus 45 word lengths
  // (periods excluded), 5 sentence lengths and 50 depths.
  const std::uint64_t expected = 9 * (50 + 49 + 48) + 45 + 5 + 50;
  EXPECT_EQ(fc.total(), expected);
  for (const auto& spec : specs) {
    std::uint64_t per_spec = 0;
    for (const auto& [f, c] : fc.counts)
      if (f.rfind(spec.prefix(), 0) == 0) per_spec += c;
    const std::uint64_t want = spec.statistical()
                                   ? (spec.family() == Family::WL ? 45 : spec.family() == Family::SL ? 5 : 50)
                                   : 51 - static_cast<std::uint64_t>(*spec.order());
    EXPECT_EQ(per_spec, want) << spec.name();
  }
}

TEST(ExtractFeatures, OrderIndependentAndDeterministic) {
  const auto d = fifty_token_doc(8);
  auto specs = all_feature_specs();
  const auto a = extract_features(d, specs);
  std::reverse(specs.begin(), specs.end());
  EXPECT_EQ(extract_features(d, specs).counts, a.counts);
}

TEST(Properties, StreamsPreserveLengthAndReproduceLayers) {
  const auto ds = synthetic::make_planted({3, 10, 60, 0.05, 200, 17});
  for (const auto& d : ds.documents()) {
    std::vector<std::string> surfaces, lemmas;
    for (const auto& s : d.sentences)
      for (const auto& t : s) {
        surfaces.push_back(t.surface);
        lemmas.push_back(t.lemma);
      }
    EXPECT_EQ(project_stream(d, Family::T), surfaces);
    EXPECT_EQ(project_stream(d, Family::L), lemmas);
    for (auto f : {Family::TN, Family::LN, Family::TP, Family::LP, Family::MS, Family::P, Family::D})
      EXPECT_EQ(project_stream(d, f).size(), surfaces.size()) << family_name(f);
    for (int n = 1; n <= 3; ++n) {
      std::uint64_t total = 0;
      for (const auto& [f, c] : extract_ngrams(surfaces, n, "T")) total += c;
      EXPECT_EQ(total, surfaces.size() + 1 - static_cast<std::size_t>(n));
    }
  }
}

TEST(Properties, MsUnitsHaveTagSuffixShape) {
  const auto ds = synthetic::make_planted({4, 10, 60, 0.05, 300, 5});
  const auto& lex = default_suffix_lexicon();
  const std::set<std::string> suffixes(lex.suffixes().begin(), lex.suffixes().end());
  for (const auto& d : ds.documents()) {
    const auto units = project_stream(d, Family::MS);
    std::size_t i = 0;
    for (const auto& s : d.sentences)
      for (const auto& t : s) {
        const auto& u = units[i++];
        if (u == t.pos) continue;
        ASSERT_EQ(u.rfind(t.pos + "-", 0), 0u) << u;
        const auto suffix = u.substr(t.pos.size() + 1);
        EXPECT_TRUE(suffixes.count(suffix)) << u;
        const auto lower = to_lower_ascii(t.surface);
        EXPECT_TRUE(lower.size() > suffix.size() && lower.ends_with(suffix)) << u;
      }
  }
}

TEST(Properties, DepthInvariant) {
  const auto ds = synthetic::make_planted({2, 20, 80, 0.05, 200, 23});
  for (const auto& d : ds.documents()) {
    const auto depths = statistical_values(d, Family::DD);
    std::size_t offset = 0;
    for (const auto& s : d.sentences) {
      int zeros = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const int depth = depths[offset + i];
        if (!s[i].head) {
          EXPECT_EQ(depth, 0);
          ++zeros;
        } else {
          EXPECT_EQ(depth, depths[offset + *s[i].head] + 1);
        }
      }
      EXPECT_EQ(zeros, 1);
      offset += s.size();
    }
  }
}

TEST(FeatureSpec, LegalCombinations) {
  const auto all = all_feature_specs();
  EXPECT_EQ(std::set<FeatureSpec>(all.begin(), all.end()).size(), 30u);
  EXPECT_EQ(all.front().name(), "T1");
  EXPECT_EQ(all.back().name(), "DD");
  EXPECT_EQ(FeatureSpec::parse("MS3").prefix(), "MS3:");
  for (const char* bad : {"T4", "T0", "WL1", "P", "X1", "T12", ""})
    EXPECT_THROW(FeatureSpec::parse(bad), InvalidArgument) << bad;
  EXPECT_EQ(parse_feature_specs("T1, T1 ,L2").size(), 2u);
  EXPECT_EQ(parse_feature_specs("all").size(), 30u);
  const auto [spec, body] = split_feature("T2:. so");
  EXPECT_EQ(spec.name(), "T2");
  EXPECT_EQ(body, ". so");
}

TEST(SuffixLexicon, ValidatesAndPrefersLongest) {
  EXPECT_THROW(SuffixLexicon({"ing", "ing"}), InvalidArgument);
  EXPECT_THROW(SuffixLexicon({"ING"}), InvalidArgument);
  EXPECT_THROW(SuffixLexicon({""}), InvalidArgument);
  const SuffixLexicon lex({"on", "tion", "ion"});
  EXPECT_EQ(lex.match("nation"), std::optional<std::string_view>("tion"));
  EXPECT_EQ(lex.match("tion"), std::optional<std::string_view>("ion"));  // proper suffixes only
  EXPECT_FALSE(lex.match("on").has_value());
  EXPECT_FALSE(lex.match("cat").has_value());
}

TEST(FeatureDump, SortedAggregatedLines) {
  const std::vector<FeatureCounts> counts = {{"a", {{"T1:b", 1}, {"T1:a", 2}}}, {"b", {{"T1:b", 3}}}};
  std::ostringstream out;
  write_feature_dump(out, counts);
  EXPECT_EQ(out.str(), "T1:a\t2\nT1:b\t4\n");
}

}  // namespace
}  // namespace nli
