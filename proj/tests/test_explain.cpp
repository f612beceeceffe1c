#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

namespace nli {
namespace {

struct Trained {
  LabeledDataset dataset;
  test::Vectorized v;
  MulticlassModel model;
};

const Trained& planted() {
  static const Trained t = [] {
    Trained out{synthetic::make_planted({11, 30, 100, 0.05, 400, 7}), {}, {}};
    out.v = test::vectorize(out.dataset);
    out.model = train_ovr(out.v.x, out.v.labels, out.v.vocabulary);
    return out;
  }();
  return t;
}

std::vector<std::string> features_of(const std::vector<FeatureAttribution>& list) {
  std::vector<std::string> out;
  for (const auto& a : list) out.push_back(a.feature);
  return out;
}

TEST(RankFeatures, SaltTokenLeadsItsOwnLabel) {
  const auto& t = planted();
  for (const auto& label : t.model.labels()) {
    const auto salt = "T1:" + synthetic::salt_token(label);
    const auto own = features_of(rank_features(t.model, label, 3).overuse);
    EXPECT_NE(std::find(own.begin(), own.end(), salt), own.end()) << label;
    for (const auto& other : t.model.labels()) {
      if (other == label) continue;
      const auto top10 = features_of(rank_features(t.model, other, 10).overuse);
      EXPECT_EQ(std::find(top10.begin(), top10.end(), salt), top10.end()) << salt << " in " << other;
    }
  }
}

TEST(RankFeatures, OrderingAndSigns) {
  const auto& t = planted();
  const auto r = rank_features(t.model, "ITA", 25);
  EXPECT_EQ(r.overuse.size(), 25u);
  for (const auto* list : {&r.overuse, &r.underuse}) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      const auto& a = (*list)[i];
      EXPECT_EQ(a.rank, i + 1);
      EXPECT_EQ(a.direction == Direction::Overuse, a.coefficient > 0);
      if (i > 0) EXPECT_GE(std::abs((*list)[i - 1].coefficient), std::abs(a.coefficient));
    }
  }
  EXPECT_THROW(rank_features(t.model, "XXX", 5), InvalidArgument);
  EXPECT_THROW(rank_features(t.model, "ITA", 0), InvalidArgument);
}

TEST(RankFeatures, ZeroModelHasNoFeatures) {
  MulticlassModel m;
  m.vocabulary = std::make_shared<const FeatureVocabulary>(
      FeatureVocabulary({{"T1:a", 1, 2}, {"T1:b", 1, 2}}, 2));
  m.dimension = 2;
  BinaryLinearModel b;
  b.positive_label = "A";
  b.weights = {0.0, 0.0};
  b.bias = 0.3;
  m.models = {b};
  const auto r = rank_features(m, "A", 10);
  EXPECT_TRUE(r.overuse.empty());
  EXPECT_TRUE(r.underuse.empty());
}

TEST(RankFeatures, LabelFlipSwapsDirections) {
  const auto ds = synthetic::make_planted({2, 25, 80, 0.05, 200, 19});
  const auto v = test::vectorize(ds, "T1,P1");
  const auto model = train_ovr(v.x, v.labels, v.vocabulary);
  // The two one-vs-rest problems are label flips of each other.
  const auto a = rank_features(model, "ARA", 15);
  const auto b = rank_features(model, "CHI", 15);
  ASSERT_EQ(a.overuse.size(), b.underuse.size());
  ASSERT_EQ(a.underuse.size(), b.overuse.size());
  for (std::size_t i = 0; i < a.overuse.size(); ++i) {
    EXPECT_EQ(a.overuse[i].feature, b.underuse[i].feature);
    EXPECT_EQ(a.overuse[i].coefficient, -b.underuse[i].coefficient);
  }
  for (std::size_t i = 0; i < a.underuse.size(); ++i) EXPECT_EQ(a.underuse[i].feature, b.overuse[i].feature);
}

TEST(Kwic, DeTrainInFourDocs) {
  const LabeledDataset ds(test::load_fixture("four_docs.conllu"));
  const auto lines = kwic(ds, "T2:de train", 2);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].doc_id, "spa-1");
  EXPECT_EQ(lines[0].match, "de train");
  EXPECT_EQ(lines[0].left, "We take");
  EXPECT_EQ(lines[0].right, "to Madrid");
  EXPECT_EQ(lines[1].doc_id, "spa-2");
  EXPECT_TRUE(kwic(ds, "T2:de bus", 2).empty());
  EXPECT_THROW(kwic(ds, "WL:3", 2), InvalidArgument);
  EXPECT_THROW(kwic(ds, "T2:de", 2), InvalidArgument);
}

TEST(Kwic, PosFeatureOnRunFast) {
  const LabeledDataset ds(test::load_fixture("worked_examples.conllu"));
  const auto lines = kwic(ds, "P1:RB", 5);
  std::vector<std::string> in_run_fast;
  for (const auto& l : lines)
    if (l.doc_id == "run-fast") in_run_fast.push_back(l.match);
  EXPECT_EQ(in_run_fast, (std::vector<std::string>{"fast"}));
}

TEST(Kwic, EveryLineReprojectsToTheFeature) {
  const auto& t = planted();
  const LabeledDataset sample = t.dataset.subset({0, 31, 62, 93, 124});
  const auto counts = extract_dataset(sample, parse_feature_specs("T2,L1,P2,MS1,D3,TP2,LN1"));
  std::set<std::string> features;
  for (const auto& fc : counts)
    for (const auto& [f, c] : fc.counts)
      if (features.size() < 80 && c >= 1 && f.size() % 3 == 0) features.insert(f);
  ASSERT_FALSE(features.empty());
  std::size_t checked = 0;
  for (const auto& f : features) {
    const auto [spec, body] = split_feature(f);
    const auto units = split(body, ' ');
    const auto lines = kwic(sample, f, 3);
    EXPECT_FALSE(lines.empty()) << f;
    for (const auto& l : lines) {
      std::size_t d = 0;
      while (sample[d].doc_id != l.doc_id) ++d;
      const auto stream = project_stream(sample[d], spec.family());
      ASSERT_LE(l.offset + units.size(), stream.size());
      EXPECT_TRUE(std::equal(units.begin(), units.end(), stream.begin() + static_cast<std::ptrdiff_t>(l.offset)))
          << f;
      ++checked;
    }
    for (std::size_t i = 1; i < lines.size(); ++i)
      EXPECT_TRUE(lines[i - 1].doc_id < lines[i].doc_id ||
                  (lines[i - 1].doc_id == lines[i].doc_id && lines[i - 1].offset < lines[i].offset));
  }
  EXPECT_GT(checked, 0u);
}

TEST(Report, BoundsAndSections) {
  const auto& t = planted();
  ReportOptions opts;
  opts.top_k = 10;
  opts.kwic_samples = 3;
  const auto r = report(t.model, &t.dataset, opts);
  ASSERT_EQ(r.labels.size(), 11u);
  for (const auto& s : r.labels) {
    EXPECT_LE(s.ranked.overuse.size(), 10u);
    EXPECT_LE(s.ranked.underuse.size(), 10u);
    for (const auto& [f, lines] : s.concordance) EXPECT_LE(lines.size(), 3u);
    // the label's planted token is listed as overuse here and nowhere else
    const auto salt = "T1:" + synthetic::salt_token(s.label);
    for (const auto& other : r.labels) {
      const auto over = features_of(other.ranked.overuse);
      const bool listed = std::find(over.begin(), over.end(), salt) != over.end();
      EXPECT_EQ(listed, other.label == s.label) << salt << " / " << other.label;
    }
    // overuse examples come from the label's own documents
    for (const auto& a : s.ranked.overuse)
      for (const auto& l : s.concordance.at(a.feature)) EXPECT_EQ(l.doc_id.substr(0, 3), s.label);
  }
  const auto j = explain_to_json(r);
  EXPECT_EQ(j["labels"].size(), 11u);
  std::ostringstream text;
  write_explain_text(text, r);
  EXPECT_NE(text.str().find("== ARA =="), std::string::npos);
}

TEST(Report, TwoLabelModelHasTwoSections) {
  const auto ds = synthetic::make_planted({2, 10, 50, 0.05, 100, 3});
  const auto v = test::vectorize(ds);
  const auto model = train_ovr(v.x, v.labels, v.vocabulary);
  EXPECT_EQ(report(model, nullptr, {}).labels.size(), 2u);
}

TEST(Report, NamedEntityFilter) {
  const auto& t = planted();
  ReportOptions opts;
  opts.top_k = 200;
  opts.kwic_samples = 0;
  opts.exclude_named_entities = true;
  const auto filter = named_entity_filter(t.dataset);
  std::set<std::string> entity_forms;
  for (const auto& d : t.dataset.documents())
    for (const auto& s : d.sentences)
      for (const auto& tok : s)
        if (!tok.ne_tag.empty()) entity_forms.insert(tok.surface);
  ASSERT_FALSE(entity_forms.empty());
  EXPECT_TRUE(filter("T1:" + *entity_forms.begin()));
  EXPECT_TRUE(filter("TN2:ENT x"));
  EXPECT_FALSE(filter("WL:3"));
  const auto r = report(t.model, &t.dataset, opts);
  for (const auto& s : r.labels)
    for (const auto* list : {&s.ranked.overuse, &s.ranked.underuse})
      for (const auto& a : *list) EXPECT_FALSE(entity_forms.count(a.feature.substr(3))) << a.feature;
}

TEST(Kwic, TsvFormat) {
  std::ostringstream out;
  write_kwic_tsv(out, {{"d", 4, "a b", "de train", "to"}});
  EXPECT_EQ(out.str(), "doc_id\toffset\tleft\tmatch\tright\nd\t4\ta b\tde train\tto\n");
}

}  // namespace
}  // namespace nli
