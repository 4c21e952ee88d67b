#include "slateq/corpus.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slateq {
namespace {

void append_evenly_spaced(std::vector<double>& out, int count, double lo,
                          double hi) {
  if (count == 1) {
    out.push_back(lo);
    return;
  }
  for (int i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
}

}  // namespace

void TopicCatalog::validate() const {
  if (mean_quality.empty()) {
    throw std::invalid_argument("topic catalog needs at least one topic");
  }
  if (!(quality_stddev >= 0.0) || !std::isfinite(quality_stddev)) {
    throw std::invalid_argument("quality_stddev must be finite and >= 0");
  }
  if (!(quality_clamp > 0.0)) {
    throw std::invalid_argument("quality_clamp must be > 0");
  }
  for (double mu : mean_quality) {
    if (!std::isfinite(mu)) {
      throw std::invalid_argument("topic mean quality must be finite");
    }
  }
}

TopicCatalog TopicCatalog::make_default(int num_low, int num_high,
                                        double low_min, double high_max,
                                        double quality_stddev) {
  if (num_low < 0 || num_high < 0 || num_low + num_high < 1) {
    throw std::invalid_argument("catalog needs a positive topic count, got " +
                                std::to_string(num_low) + "+" +
                                std::to_string(num_high));
  }
  TopicCatalog catalog;
  catalog.quality_stddev = quality_stddev;
  append_evenly_spaced(catalog.mean_quality, num_low, low_min, 0.0);
  append_evenly_spaced(catalog.mean_quality, num_high, 0.0, high_max);
  catalog.validate();
  return catalog;
}

Corpus::Corpus(TopicCatalog catalog, double doc_length)
    : catalog_(std::move(catalog)), doc_length_(doc_length) {
  catalog_.validate();
  if (!(doc_length_ > 0.0)) {
    throw std::invalid_argument("document length must be > 0");
  }
}

Document Corpus::sample_document(Rng& rng) {
  std::uniform_int_distribution<int> topic_dist(0, catalog_.num_topics() - 1);
  return sample_document_with_topic(topic_dist(rng), rng);
}

Document Corpus::sample_document_with_topic(int topic, Rng& rng) {
  if (topic < 0 || topic >= catalog_.num_topics()) {
    throw std::out_of_range("topic index " + std::to_string(topic) +
                            " outside catalog");
  }
  double quality = catalog_.mean_quality[topic];
  if (catalog_.quality_stddev > 0.0) {
    quality += catalog_.quality_stddev *
               std::normal_distribution<double>(0.0, 1.0)(rng);
  }
  quality = std::clamp(quality, -catalog_.quality_clamp, catalog_.quality_clamp);
  return Document{next_id_++, topic, quality, doc_length_};
}

std::vector<Document> Corpus::sample_candidates(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("candidate count must be >= 1");
  std::vector<Document> docs;
  docs.reserve(m);
  for (int i = 0; i < m; ++i) docs.push_back(sample_document(rng));
  return docs;
}

}  // namespace slateq
