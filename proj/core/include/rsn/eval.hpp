#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsn/dataset.hpp"
#include "rsn/mlp.hpp"

namespace rsn {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<std::int64_t> counts;  // row-major
  std::vector<std::string> labels;

  std::int64_t& at(int true_class, int predicted) {
    return counts[static_cast<std::size_t>(true_class) * num_classes + predicted];
  }
  std::int64_t at(int true_class, int predicted) const {
    return counts[static_cast<std::size_t>(true_class) * num_classes + predicted];
  }
  std::int64_t total() const;
  std::int64_t trace() const;
};

struct MisclassRecord {
  std::string subject_id;
  int component_index = -1;
  int true_class = -1;
  int predicted_class = -1;
  std::vector<std::pair<int, float>> top;  // (class id, prob), descending
};

struct EvalResult {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<MisclassRecord> misclassified;
  // Fraction of misclassifications whose top-3 contains the true label;
  // reported, never asserted. NaN when there are no misclassifications.
  double top3_recovery = 0.0;
};

struct BenchResult {
  int samples = 0;
  double seconds = 0.0;
  double throughput = 0.0;  // samples / seconds
  std::string model_shape;
};

// Batched inference over the dataset; one MisclassRecord (top-3) per error.
EvalResult evaluate(const MlpModel& model, const Dataset& data);

// Top-k (class, prob) pairs, descending by probability; ties break toward
// the lower class id.
std::vector<std::pair<int, double>> topk(std::span<const float> probs, int k);

// "label:prob" pairs with lowercase labels and 3-decimal probabilities,
// space separated (the misclassification report format).
std::string format_topk(std::span<const float> probs,
                        std::span<const std::string> labels, int k);

// Row-normalized heatmap (all-zero rows stay zero). Cell intensity is
// log10(1 + 9p) mapped to [0,255]; rows/columns follow class-table order.
// Writes a grayscale PPM plus a sidecar CSV of the normalized values.
void write_confusion_heatmap(const ConfusionMatrix& cm,
                             const std::string& ppm_path,
                             const std::string& csv_path);

// Raw counts as CSV with a label header row/column.
void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path);

// One line per record: subject, component, true, predicted, top-3 pairs.
void write_misclass_report(const EvalResult& result,
                           std::span<const std::string> labels,
                           const std::string& path);

// Seeded random inputs (generation excluded from timing); batched
// inference on a single thread; wall time covers the prediction loop only.
BenchResult throughput_bench(const MlpModel& model, int n_samples,
                             std::uint64_t seed, int batch_size = 64,
                             std::vector<int>* predictions = nullptr);

}  // namespace rsn
