#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "slateq/corpus.h"

namespace slateq {
namespace {

TEST(TopicCatalog, DefaultMeansAreEvenlySpaced) {
  const TopicCatalog c = TopicCatalog::make_default();
  ASSERT_EQ(c.num_topics(), 20);
  for (int t = 0; t < 14; ++t) {
    EXPECT_NEAR(c.mean_quality[t], -3.0 + 3.0 * t / 13.0, 1e-12) << t;
  }
  for (int t = 14; t < 20; ++t) {
    EXPECT_NEAR(c.mean_quality[t], 3.0 * (t - 14) / 5.0, 1e-12) << t;
  }
  EXPECT_DOUBLE_EQ(c.mean_quality[0], -3.0);
  EXPECT_DOUBLE_EQ(c.mean_quality[13], 0.0);
  EXPECT_DOUBLE_EQ(c.mean_quality[14], 0.0);
  EXPECT_DOUBLE_EQ(c.mean_quality[19], 3.0);
}

TEST(TopicCatalog, RejectsEmptyAndBadSpread) {
  TopicCatalog c;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.mean_quality = {0.0};
  c.quality_stddev = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(TopicCatalog::make_default(0, 0), std::invalid_argument);
}

TEST(Corpus, ZeroVarianceDrawEqualsMean) {
  Corpus corpus(TopicCatalog::make_default(14, 6, -3, 3, 0.0), 4.0);
  Rng rng = make_rng(3);
  const Document d = corpus.sample_document_with_topic(19, rng);
  EXPECT_EQ(d.quality, 3.0);
  EXPECT_EQ(d.length, 4.0);
  for (const Document& doc : corpus.sample_candidates(10, rng)) {
    EXPECT_EQ(doc.quality, corpus.catalog().mean_quality[doc.topic]);
  }
}

TEST(Corpus, CandidateSetsHaveUniqueIds) {
  Corpus corpus(TopicCatalog::make_default(), 4.0);
  Rng rng = make_rng(5);
  EXPECT_EQ(corpus.sample_candidates(1, rng).size(), 1u);
  std::set<std::uint64_t> ids;
  for (int round = 0; round < 50; ++round) {
    const auto cands = corpus.sample_candidates(10, rng);
    ASSERT_EQ(cands.size(), 10u);
    for (const Document& d : cands) EXPECT_TRUE(ids.insert(d.id).second);
  }
}

TEST(Corpus, RejectsBadArguments) {
  EXPECT_THROW(Corpus(TopicCatalog::make_default(), 0.0), std::invalid_argument);
  Corpus corpus(TopicCatalog::make_default(), 4.0);
  Rng rng = make_rng(1);
  EXPECT_THROW(corpus.sample_document_with_topic(20, rng), std::out_of_range);
  EXPECT_THROW(corpus.sample_candidates(0, rng), std::invalid_argument);
}

TEST(CorpusProperty, MeanQualityMatchesCatalogAverage) {
  const TopicCatalog c = TopicCatalog::make_default();
  double analytic = 0.0;
  for (double mu : c.mean_quality) analytic += mu;
  analytic /= c.num_topics();
  EXPECT_NEAR(analytic, -0.6, 1e-12);

  Corpus corpus(c, 4.0);
  Rng rng = make_rng(11);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += corpus.sample_document(rng).quality;
  EXPECT_NEAR(sum / n, analytic, 0.02);
}

TEST(CorpusProperty, TopicFrequenciesAreUniform) {
  Corpus corpus(TopicCatalog::make_default(), 4.0);
  Rng rng = make_rng(12);
  const int n = 100000;
  std::vector<int> counts(20, 0);
  for (int i = 0; i < n; ++i) ++counts[corpus.sample_document(rng).topic];
  const double p = 1.0 / 20.0;
  const double sd = std::sqrt(n * p * (1 - p));
  for (int t = 0; t < 20; ++t) EXPECT_NEAR(counts[t], n * p, 3 * sd) << t;
}

TEST(CorpusProperty, QualitiesStayInsideClamp) {
  TopicCatalog c = TopicCatalog::make_default(14, 6, -3, 3, 2.0);
  Corpus corpus(c, 4.0);
  Rng rng = make_rng(13);
  bool hit_edge = false;
  for (int i = 0; i < 20000; ++i) {
    const double q = corpus.sample_document(rng).quality;
    ASSERT_LE(std::abs(q), 3.4);
    hit_edge |= std::abs(q) == 3.4;
  }
  EXPECT_TRUE(hit_edge);
}

TEST(CorpusProperty, SameSeedSameDocuments) {
  Corpus a(TopicCatalog::make_default(), 4.0), b(TopicCatalog::make_default(), 4.0);
  Rng ra = make_rng(99), rb = make_rng(99);
  for (int i = 0; i < 1000; ++i) {
    const Document x = a.sample_document(ra);
    const Document y = b.sample_document(rb);
    ASSERT_EQ(x.id, y.id);
    ASSERT_EQ(x.topic, y.topic);
    ASSERT_EQ(x.quality, y.quality);
  }
}

}  // namespace
}  // namespace slateq
