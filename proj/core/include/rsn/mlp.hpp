#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsn/dataset.hpp"
#include "rsn/error.hpp"
#include "rsn/rng.hpp"
#include "rsn/taxonomy.hpp"

namespace rsn {

struct MlpConfig {
  int input_dim = 0;
  std::vector<int> hidden_layers{200, 200, 200};
  int num_classes = 0;
  double dropout_rate = 0.66;   // drop probability
  int dropout_after_layer = 2;  // 1-based hidden layer index
  double learning_rate = 1e-5;
  int batch_size = 32;
  int max_epochs = 100;
  std::optional<double> stop_loss_threshold;  // epoch mean loss
  WeightScheme weight_scheme = WeightScheme::inverse_frequency;
  std::uint64_t seed = 0;
  // Whether training features were per-sample z-scored; recorded in the
  // model file so inference applies the same transform to raw volumes.
  bool standardized_inputs = false;

  void validate() const;
  std::string shape_string() const;  // "109350-200-200-200-58"
};

// Fully connected ReLU network with a linear output layer and inverted
// dropout after one hidden layer. Scalar is float in production; tests
// instantiate double for finite-difference comparisons. Batches are held
// column-wise: an input matrix is input_dim x batch.
template <typename Scalar>
class BasicMlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct ForwardCache {
    Matrix input;
    std::vector<Matrix> post_relu;  // per hidden layer, before dropout
    std::vector<Matrix> fed;        // what the next layer consumed
    Matrix dropout_mask;            // scaled 0 / 1/(1-p); empty if unused
  };

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  struct BackwardResult {
    Gradients gradients;
    Scalar mean_loss{};
  };

  // He-normal weights (sd = sqrt(2/fan_in)) drawn row-major from the
  // seeded generator; zero biases. Deterministic given config.seed.
  static BasicMlp init(const MlpConfig& config);

  // Correctly shaped, all parameters zero.
  static BasicMlp with_shape(const MlpConfig& config);

  // Hidden layers apply ReLU; train mode draws a fresh dropout mask after
  // hidden layer config.dropout_after_layer. Returns logits
  // (num_classes x batch). rng may be null when no mask will be drawn.
  // Accepts contiguous blocks of a larger matrix without copying.
  Matrix forward(const Eigen::Ref<const Matrix>& input, bool train_mode,
                 Rng* rng, ForwardCache* cache = nullptr) const;

  // Exact gradient of the mean weighted cross-entropy over the batch,
  // through softmax, ReLU, and the dropout mask recorded in the cache.
  BackwardResult backward(const ForwardCache& cache, const Matrix& logits,
                          std::span<const int> labels,
                          const Eigen::VectorXd& class_weights) const;

  // theta <- theta - lr * grad; plain SGD, no momentum or decay.
  void sgd_step(const Gradients& gradients, Scalar learning_rate);

  const MlpConfig& config() const { return config_; }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }
  std::vector<Matrix>& mutable_weights() { return weights_; }
  std::vector<Vector>& mutable_biases() { return biases_; }
  std::int64_t parameter_count() const;

 private:
  MlpConfig config_;
  std::vector<Matrix> weights_;  // fan_out x fan_in per layer
  std::vector<Vector> biases_;
};

using MlpModel = BasicMlp<float>;

// Numerically stable column-wise softmax: shift by the column max.
template <typename Derived>
auto softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> probs =
      logits.derived();
  for (Eigen::Index col = 0; col < probs.cols(); ++col) {
    auto column = probs.col(col);
    column.array() -= column.maxCoeff();
    column = column.array().exp();
    column /= column.sum();
  }
  return probs;
}

// -w[true] * ln(max(p[true], 1e-12)) for one sample.
template <typename Scalar>
Scalar weighted_cross_entropy(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& probs, int true_class,
    const Eigen::VectorXd& class_weights) {
  if (true_class < 0 || true_class >= probs.size())
    fail(errc::bad_class, "class " + std::to_string(true_class));
  const Scalar p = std::max(probs[true_class], Scalar(1e-12));
  return static_cast<Scalar>(-class_weights[true_class] * std::log(double(p)));
}

enum class StopReason { loss_threshold, max_epochs, val_plateau };
const char* stop_reason_name(StopReason reason) noexcept;

struct EpochStats {
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;  // NaN when no validation set
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  StopReason stop_reason = StopReason::max_epochs;
  int epochs_run = 0;
  int best_epoch = 0;  // 1-based; 0 when no validation snapshotting
};

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

// Seeded mini-batch SGD. Stops when the epoch mean loss drops below
// stop_loss_threshold (if set) or after max_epochs. With a non-empty
// validation set the best-validation snapshot is returned (ties go to the
// later epoch); otherwise the final weights. Single-threaded and
// bit-deterministic given (config, data).
TrainResult train(const MlpConfig& config, const Dataset& train_set,
                  const Dataset& val_set);

struct Prediction {
  int class_id = -1;
  Eigen::VectorXf probs;
};

// Inference-mode forward + softmax; argmax ties resolve to the lowest id.
Prediction predict(const MlpModel& model, std::span<const float> input);

// Batched inference: samples are matrix columns. Used wherever throughput
// matters; one weight pass serves the whole batch.
std::vector<int> predict_batch(const MlpModel& model,
                               const Eigen::Ref<const Eigen::MatrixXf>& inputs,
                               Eigen::MatrixXf* probs_out = nullptr);

// Model file: magic "RSNM", u32 version, length-prefixed key=value config
// text, then per layer the row-major little-endian float32 weight matrix
// followed by the bias vector. Round-trips bit-exactly.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

void write_train_report_csv(const TrainReport& report, const std::string& path);

}  // namespace rsn

#include "rsn/detail/mlp_impl.hpp"
