#pragma once

#include <cstdint>
#include <vector>

#include "slateq/rng.h"

namespace slateq {

// Topic-level content model. Every document carries exactly one topic; its
// quality is drawn from Normal(mean_quality[topic], quality_stddev^2) and
// clamped to [-quality_clamp, quality_clamp].
struct TopicCatalog {
  std::vector<double> mean_quality;
  double quality_stddev = 0.1;
  double quality_clamp = 3.4;

  int num_topics() const { return static_cast<int>(mean_quality.size()); }

  // Throws std::invalid_argument when the catalog is unusable.
  void validate() const;

  // `num_low` topics with means evenly spaced over [low_min, 0] followed by
  // `num_high` topics evenly spaced over [0, high_max]. The defaults give the
  // 20-topic catalog (14 low-quality, 6 high-quality) used in experiments.
  static TopicCatalog make_default(int num_low = 14, int num_high = 6,
                                   double low_min = -3.0, double high_max = 3.0,
                                   double quality_stddev = 0.1);

  bool operator==(const TopicCatalog&) const = default;
};

struct Document {
  std::uint64_t id = 0;
  int topic = 0;
  double quality = 0.0;
  double length = 4.0;
};

// Generates documents on demand from the content distribution (uniform over
// topics). Ids are run-scoped counters; nothing is materialized.
class Corpus {
 public:
  Corpus(TopicCatalog catalog, double doc_length);

  Document sample_document(Rng& rng);
  Document sample_document_with_topic(int topic, Rng& rng);
  std::vector<Document> sample_candidates(int m, Rng& rng);

  const TopicCatalog& catalog() const { return catalog_; }
  double doc_length() const { return doc_length_; }
  std::uint64_t documents_issued() const { return next_id_; }

 private:
  TopicCatalog catalog_;
  double doc_length_;
  std::uint64_t next_id_ = 0;
};

}  // namespace slateq
