#pragma once

#include <cstdint>
#include <vector>

namespace sectree {

/// Per-document label probabilities and 0/1 ground truth. A label counts as
/// predicted when its probability is at least `threshold`.
struct PredictionSet {
  std::vector<std::vector<double>> probabilities;
  std::vector<std::vector<std::uint8_t>> truth;
  double threshold = 0.5;

  std::size_t document_count() const { return probabilities.size(); }
  std::size_t label_count() const { return probabilities.empty() ? 0 : probabilities.front().size(); }

  /// Throws `Error` for an empty set, ragged rows, or a threshold outside (0, 1).
  void validate() const;
};

struct LabelCounts {
  std::int64_t true_positive = 0;
  std::int64_t false_positive = 0;
  std::int64_t false_negative = 0;
};

/// Confusion counts per label.
std::vector<LabelCounts> label_counts(const PredictionSet& ps);

/// 2PR / (P + R), 0 when P + R = 0.
double f1_score(const LabelCounts& c);

/// F1 of the TP/FP/FN counts pooled over every (document, label) pair.
double micro_f1(const PredictionSet& ps);

/// Unweighted mean of per-label F1 over all labels. A label that is never
/// true and never predicted scores 0.
double macro_f1(const PredictionSet& ps);

}  // namespace sectree
