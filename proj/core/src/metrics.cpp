#include "sectree/metrics.hpp"

#include "sectree/error.hpp"

namespace sectree {

void PredictionSet::validate() const {
  if (probabilities.empty()) throw Error("metrics: no documents");
  if (truth.size() != probabilities.size()) {
    throw Error("metrics: " + std::to_string(probabilities.size()) + " prediction rows but " +
                std::to_string(truth.size()) + " truth rows");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("metrics: threshold must lie in (0, 1)");
  const std::size_t labels = label_count();
  if (labels == 0) throw Error("metrics: no labels");
  for (std::size_t d = 0; d < probabilities.size(); ++d) {
    if (probabilities[d].size() != labels || truth[d].size() != labels) {
      throw Error("metrics: document " + std::to_string(d) + " does not have " + std::to_string(labels) + " labels");
    }
  }
}

std::vector<LabelCounts> label_counts(const PredictionSet& ps) {
  ps.validate();
  std::vector<LabelCounts> counts(ps.label_count());
  for (std::size_t d = 0; d < ps.document_count(); ++d) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
      const bool predicted = ps.probabilities[d][j] >= ps.threshold;
      const bool actual = ps.truth[d][j] != 0;
      if (predicted && actual) ++counts[j].true_positive;
      else if (predicted) ++counts[j].false_positive;
      else if (actual) ++counts[j].false_negative;
    }
  }
  return counts;
}

double f1_score(const LabelCounts& c) {
  const double tp = static_cast<double>(c.true_positive);
  const double predicted = tp + static_cast<double>(c.false_positive);
  const double actual = tp + static_cast<double>(c.false_negative);
  if (predicted == 0.0 || actual == 0.0) return 0.0;
  const double precision = tp / predicted;
  const double recall = tp / actual;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double micro_f1(const PredictionSet& ps) {
  LabelCounts pooled;
  for (const auto& c : label_counts(ps)) {
    pooled.true_positive += c.true_positive;
    pooled.false_positive += c.false_positive;
    pooled.false_negative += c.false_negative;
  }
  return f1_score(pooled);
}

double macro_f1(const PredictionSet& ps) {
  const auto counts = label_counts(ps);
  double total = 0.0;
  for (const auto& c : counts) total += f1_score(c);
  return total / static_cast<double>(counts.size());
}

}  // namespace sectree
