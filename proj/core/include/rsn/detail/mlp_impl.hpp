#pragma once

// Template bodies for BasicMlp. Included at the end of rsn/mlp.hpp.

namespace rsn {

template <typename Scalar>
BasicMlp<Scalar> BasicMlp<Scalar>::with_shape(const MlpConfig& config) {
  config.validate();
  BasicMlp net;
  net.config_ = config;
  std::vector<int> widths;
  widths.push_back(config.input_dim);
  widths.insert(widths.end(), config.hidden_layers.begin(),
                config.hidden_layers.end());
  widths.push_back(config.num_classes);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    net.weights_.push_back(Matrix::Zero(widths[l + 1], widths[l]));
    net.biases_.push_back(Vector::Zero(widths[l + 1]));
  }
  return net;
}

template <typename Scalar>
BasicMlp<Scalar> BasicMlp<Scalar>::init(const MlpConfig& config) {
  BasicMlp net = with_shape(config);
  Rng rng(config.seed);
  for (Matrix& w : net.weights_) {
    const double sd = std::sqrt(2.0 / static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)  // row-major draw order
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = static_cast<Scalar>(sd * rng.normal());
  }
  return net;
}

template <typename Scalar>
typename BasicMlp<Scalar>::Matrix BasicMlp<Scalar>::forward(
    const Eigen::Ref<const Matrix>& input, bool train_mode, Rng* rng,
    ForwardCache* cache) const {
  if (input.rows() != config_.input_dim)
    fail(errc::dimension_mismatch,
         "input has " + std::to_string(input.rows()) + " features, model expects " +
             std::to_string(config_.input_dim));
  const int hidden_count = static_cast<int>(config_.hidden_layers.size());
  const bool use_dropout = train_mode && config_.dropout_rate > 0.0;

  if (cache) {
    cache->input = input;
    cache->post_relu.clear();
    cache->fed.clear();
    cache->dropout_mask.resize(0, 0);
  }

  Matrix activation;
  for (int l = 0; l < hidden_count; ++l) {
    if (l == 0)
      activation = (weights_.front() * input).colwise() + biases_.front();
    else
      activation = (weights_[static_cast<std::size_t>(l)] * activation).colwise() +
                   biases_[static_cast<std::size_t>(l)];
    activation = activation.cwiseMax(Scalar(0));
    if (cache) cache->post_relu.push_back(activation);

    if (use_dropout && l + 1 == config_.dropout_after_layer) {
      if (!rng) fail(errc::bad_config, "dropout requires an RNG in train mode");
      const Scalar keep = Scalar(1) - static_cast<Scalar>(config_.dropout_rate);
      const Scalar boost = Scalar(1) / keep;
      Matrix mask(activation.rows(), activation.cols());
      // Fixed draw order: column (sample) outer, row inner.
      for (Eigen::Index col = 0; col < mask.cols(); ++col)
        for (Eigen::Index row = 0; row < mask.rows(); ++row)
          mask(row, col) =
              rng->uniform() < static_cast<double>(keep) ? boost : Scalar(0);
      activation = activation.cwiseProduct(mask);
      if (cache) cache->dropout_mask = std::move(mask);
    }
    if (cache) cache->fed.push_back(activation);
  }
  if (hidden_count == 0)
    return (weights_.back() * input).colwise() + biases_.back();
  return (weights_.back() * activation).colwise() + biases_.back();
}

template <typename Scalar>
typename BasicMlp<Scalar>::BackwardResult BasicMlp<Scalar>::backward(
    const ForwardCache& cache, const Matrix& logits,
    std::span<const int> labels, const Eigen::VectorXd& class_weights) const {
  const auto batch = logits.cols();
  if (batch == 0) fail(errc::empty_dataset, "backward on an empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != batch)
    fail(errc::dimension_mismatch, "labels do not match batch size");

  Matrix probs = softmax(logits);

  Scalar loss_sum{};
  // dL/dlogits for the mean weighted CE: w_y * (p - onehot_y) / batch.
  Matrix delta = probs;
  for (Eigen::Index s = 0; s < batch; ++s) {
    const int y = labels[static_cast<std::size_t>(s)];
    if (y < 0 || y >= logits.rows())
      fail(errc::bad_class, "label " + std::to_string(y));
    const Scalar w = static_cast<Scalar>(class_weights[y]);
    const Scalar p = std::max(probs(y, s), Scalar(1e-12));
    loss_sum += -w * std::log(p);
    delta(y, s) -= Scalar(1);
    delta.col(s) *= w / static_cast<Scalar>(batch);
  }

  const int hidden_count = static_cast<int>(config_.hidden_layers.size());
  BackwardResult result;
  result.mean_loss = loss_sum / static_cast<Scalar>(batch);
  result.gradients.weights.resize(weights_.size());
  result.gradients.biases.resize(biases_.size());

  const Matrix& last_fed =
      hidden_count > 0 ? cache.fed.back() : cache.input;
  result.gradients.weights.back() = delta * last_fed.transpose();
  result.gradients.biases.back() = delta.rowwise().sum();

  Matrix upstream = weights_.back().transpose() * delta;
  for (int l = hidden_count - 1; l >= 0; --l) {
    if (cache.dropout_mask.size() > 0 && l + 1 == config_.dropout_after_layer)
      upstream = upstream.cwiseProduct(cache.dropout_mask);
    // ReLU gate: the pre-dropout activation is positive iff the unit fired.
    upstream = (cache.post_relu[static_cast<std::size_t>(l)].array() > Scalar(0))
                   .template cast<Scalar>()
                   .matrix()
                   .cwiseProduct(upstream);
    const Matrix& below = l > 0 ? cache.fed[static_cast<std::size_t>(l - 1)]
                                : cache.input;
    result.gradients.weights[static_cast<std::size_t>(l)] =
        upstream * below.transpose();
    result.gradients.biases[static_cast<std::size_t>(l)] =
        upstream.rowwise().sum();
    if (l > 0)
      upstream = weights_[static_cast<std::size_t>(l)].transpose() * upstream;
  }
  return result;
}

template <typename Scalar>
void BasicMlp<Scalar>::sgd_step(const Gradients& gradients,
                                Scalar learning_rate) {
  if (gradients.weights.size() != weights_.size())
    fail(errc::shape_mismatch, "gradient layer count differs from model");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (gradients.weights[l].rows() != weights_[l].rows() ||
        gradients.weights[l].cols() != weights_[l].cols())
      fail(errc::shape_mismatch, "gradient shape differs from layer " +
                                     std::to_string(l));
    weights_[l] -= learning_rate * gradients.weights[l];
    biases_[l] -= learning_rate * gradients.biases[l];
  }
}

template <typename Scalar>
std::int64_t BasicMlp<Scalar>::parameter_count() const {
  std::int64_t count = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    count += static_cast<std::int64_t>(weights_[l].size()) + biases_[l].size();
  return count;
}

}  // namespace rsn
