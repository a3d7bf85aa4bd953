#include "rsn/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "rsn/error.hpp"
#include "rsn/rng.hpp"
#include "rsn/volume_ops.hpp"

namespace rsn {
namespace {

std::string lowercase(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

}  // namespace

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t sum = 0;
  for (int c = 0; c < num_classes; ++c) sum += at(c, c);
  return sum;
}

EvalResult evaluate(const MlpModel& model, const Dataset& data) {
  if (data.samples.empty()) fail(errc::empty_dataset, "nothing to evaluate");
  if (data.feature_dim != model.config().input_dim)
    fail(errc::dimension_mismatch,
         "dataset features are " + std::to_string(data.feature_dim) +
             "-dimensional, model expects " +
             std::to_string(model.config().input_dim));
  const int num_classes = model.config().num_classes;

  EvalResult result;
  result.confusion.num_classes = num_classes;
  result.confusion.labels = data.class_labels;
  result.confusion.counts.assign(
      static_cast<std::size_t>(num_classes) * num_classes, 0);

  constexpr std::size_t kChunk = 256;
  std::int64_t correct = 0;
  std::int64_t top3_hits = 0;
  Eigen::MatrixXf inputs;
  for (std::size_t start = 0; start < data.samples.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, data.samples.size() - start);
    inputs.resize(data.feature_dim, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& values = data.samples[start + i].features.values;
      std::copy(values.begin(), values.end(),
                inputs.col(static_cast<Eigen::Index>(i)).data());
    }
    Eigen::MatrixXf probs;
    const std::vector<int> predicted = predict_batch(model, inputs, &probs);
    for (std::size_t i = 0; i < n; ++i) {
      const Sample& sample = data.samples[start + i];
      const int truth = sample.class_id;
      if (truth < 0 || truth >= num_classes)
        fail(errc::bad_class, "sample class " + std::to_string(truth));
      ++result.confusion.at(truth, predicted[i]);
      if (predicted[i] == truth) {
        ++correct;
        continue;
      }
      MisclassRecord record;
      record.subject_id = sample.subject_id;
      record.component_index = sample.component_index;
      record.true_class = truth;
      record.predicted_class = predicted[i];
      const auto column = probs.col(static_cast<Eigen::Index>(i));
      const auto ranked =
          topk(std::span<const float>(column.data(),
                                      static_cast<std::size_t>(column.size())),
               std::min(3, num_classes));
      for (const auto& [cls, prob] : ranked) {
        record.top.emplace_back(cls, static_cast<float>(prob));
        if (cls == truth) ++top3_hits;
      }
      result.misclassified.push_back(std::move(record));
    }
  }

  const auto total = static_cast<std::int64_t>(data.samples.size());
  result.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  result.top3_recovery =
      result.misclassified.empty()
          ? std::numeric_limits<double>::quiet_NaN()
          : static_cast<double>(top3_hits) /
                static_cast<double>(result.misclassified.size());
  return result;
}

std::vector<std::pair<int, double>> topk(std::span<const float> probs, int k) {
  if (k < 1 || k > static_cast<int>(probs.size()))
    fail(errc::bad_k, "k = " + std::to_string(k) + " with " +
                          std::to_string(probs.size()) + " classes");
  std::vector<int> ids(probs.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(),
                    [&](int a, int b) {
                      if (probs[static_cast<std::size_t>(a)] !=
                          probs[static_cast<std::size_t>(b)])
                        return probs[static_cast<std::size_t>(a)] >
                               probs[static_cast<std::size_t>(b)];
                      return a < b;  // ties: lower class id first
                    });
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    out.emplace_back(ids[static_cast<std::size_t>(i)],
                     static_cast<double>(probs[static_cast<std::size_t>(
                         ids[static_cast<std::size_t>(i)])]));
  return out;
}

std::string format_topk(std::span<const float> probs,
                        std::span<const std::string> labels, int k) {
  const auto ranked = topk(probs, k);
  std::string out;
  char buf[32];
  for (const auto& [cls, prob] : ranked) {
    if (!out.empty()) out += ' ';
    out += lowercase(labels[static_cast<std::size_t>(cls)]);
    std::snprintf(buf, sizeof(buf), ":%.3f", prob);
    out += buf;
  }
  return out;
}

void write_confusion_heatmap(const ConfusionMatrix& cm,
                             const std::string& ppm_path,
                             const std::string& csv_path) {
  const int k = cm.num_classes;
  std::vector<double> normalized(static_cast<std::size_t>(k) * k, 0.0);
  for (int t = 0; t < k; ++t) {
    std::int64_t row_sum = 0;
    for (int p = 0; p < k; ++p) row_sum += cm.at(t, p);
    if (row_sum == 0) continue;
    for (int p = 0; p < k; ++p)
      normalized[static_cast<std::size_t>(t) * k + p] =
          static_cast<double>(cm.at(t, p)) / static_cast<double>(row_sum);
  }

  Image2D image;
  image.width = k;
  image.height = k;
  image.pixels.resize(static_cast<std::size_t>(k) * k);
  for (std::size_t i = 0; i < normalized.size(); ++i)
    image.pixels[i] =
        static_cast<float>(std::log10(1.0 + 9.0 * normalized[i]));  // p=1 -> 1
  write_ppm_gray(image, ppm_path);

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) fail(errc::io_failure, "cannot create " + csv_path);
  csv << "true\\predicted";
  for (int p = 0; p < k; ++p) csv << ',' << lowercase(cm.labels[static_cast<std::size_t>(p)]);
  csv << '\n';
  char buf[32];
  for (int t = 0; t < k; ++t) {
    csv << lowercase(cm.labels[static_cast<std::size_t>(t)]);
    for (int p = 0; p < k; ++p) {
      std::snprintf(buf, sizeof(buf), ",%.9f",
                    normalized[static_cast<std::size_t>(t) * k + p]);
      csv << buf;
    }
    csv << '\n';
  }
  if (!csv) fail(errc::io_failure, "write failed for " + csv_path);
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path) {
  std::ofstream csv(path, std::ios::trunc);
  if (!csv) fail(errc::io_failure, "cannot create " + path);
  csv << "true\\predicted";
  for (int p = 0; p < cm.num_classes; ++p)
    csv << ',' << lowercase(cm.labels[static_cast<std::size_t>(p)]);
  csv << '\n';
  for (int t = 0; t < cm.num_classes; ++t) {
    csv << lowercase(cm.labels[static_cast<std::size_t>(t)]);
    for (int p = 0; p < cm.num_classes; ++p) csv << ',' << cm.at(t, p);
    csv << '\n';
  }
  if (!csv) fail(errc::io_failure, "write failed for " + path);
}

void write_misclass_report(const EvalResult& result,
                           std::span<const std::string> labels,
                           const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(errc::io_failure, "cannot create " + path);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", result.top3_recovery);
  out << "# misclassifications=" << result.misclassified.size()
      << " top3_recovery=" << (result.misclassified.empty() ? "nan" : buf)
      << '\n';
  for (const MisclassRecord& r : result.misclassified) {
    out << r.subject_id << '\t' << r.component_index << '\t'
        << lowercase(labels[static_cast<std::size_t>(r.true_class)]) << '\t'
        << lowercase(labels[static_cast<std::size_t>(r.predicted_class)]);
    out << '\t';
    for (std::size_t i = 0; i < r.top.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%s:%.3f", i ? " " : "",
                    lowercase(labels[static_cast<std::size_t>(r.top[i].first)]).c_str(),
                    static_cast<double>(r.top[i].second));
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(errc::io_failure, "write failed for " + path);
}

BenchResult throughput_bench(const MlpModel& model, int n_samples,
                             std::uint64_t seed, int batch_size,
                             std::vector<int>* predictions) {
  if (n_samples < 1) fail(errc::empty_input, "n_samples must be >= 1");
  if (batch_size < 1) fail(errc::bad_config, "batch_size must be >= 1");
  const int dim = model.config().input_dim;

  // Input generation is excluded from the timed section.
  Rng rng(seed);
  Eigen::MatrixXf inputs(dim, n_samples);
  for (Eigen::Index col = 0; col < inputs.cols(); ++col)
    for (Eigen::Index row = 0; row < inputs.rows(); ++row)
      inputs(row, col) = static_cast<float>(rng.normal());

  std::vector<int> predicted;
  predicted.reserve(static_cast<std::size_t>(n_samples));

  const auto start = std::chrono::steady_clock::now();
  for (int begin = 0; begin < n_samples; begin += batch_size) {
    const int n = std::min(batch_size, n_samples - begin);
    const std::vector<int> batch =
        predict_batch(model, inputs.middleCols(begin, n));
    predicted.insert(predicted.end(), batch.begin(), batch.end());
  }
  const auto stop = std::chrono::steady_clock::now();

  BenchResult result;
  result.samples = n_samples;
  result.seconds = std::chrono::duration<double>(stop - start).count();
  result.throughput = static_cast<double>(n_samples) / result.seconds;
  result.model_shape = model.config().shape_string();
  if (predictions) *predictions = std::move(predicted);
  return result;
}

}  // namespace rsn
