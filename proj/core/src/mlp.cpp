#include "rsn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "rsn/detail/binary_io.hpp"

namespace rsn {
namespace {

constexpr std::uint32_t kModelVersion = 1;

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    fail(errc::bad_config, "bad numeric value '" + text + "'");
  }
}

long parse_long(const std::string& text) {
  try {
    return std::stol(text);
  } catch (const std::exception&) {
    fail(errc::bad_config, "bad integer value '" + text + "'");
  }
}

// Gathers dataset samples by index into a column-per-sample matrix.
Eigen::MatrixXf gather(const Dataset& data, std::span<const std::size_t> ids) {
  Eigen::MatrixXf out(data.feature_dim, static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& values = data.samples[ids[i]].features.values;
    std::copy(values.begin(), values.end(),
              out.col(static_cast<Eigen::Index>(i)).data());
  }
  return out;
}

double dataset_accuracy(const MlpModel& model, const Dataset& data) {
  if (data.samples.empty())
    return std::numeric_limits<double>::quiet_NaN();
  constexpr std::size_t kChunk = 256;
  std::size_t correct = 0;
  std::vector<std::size_t> ids(kChunk);
  for (std::size_t start = 0; start < data.samples.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, data.samples.size() - start);
    ids.resize(n);
    std::iota(ids.begin(), ids.end(), start);
    const Eigen::MatrixXf inputs = gather(data, ids);
    const std::vector<int> predicted = predict_batch(model, inputs);
    for (std::size_t i = 0; i < n; ++i)
      if (predicted[i] == data.samples[start + i].class_id) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

int argmax_lowest(const Eigen::Ref<const Eigen::VectorXf>& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

void MlpConfig::validate() const {
  if (input_dim < 1) fail(errc::bad_config, "input_dim must be >= 1");
  if (num_classes < 2) fail(errc::bad_config, "num_classes must be >= 2");
  for (int w : hidden_layers)
    if (w < 1) fail(errc::bad_config, "hidden layer widths must be >= 1");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    fail(errc::bad_config, "dropout_rate must lie in [0,1)");
  if (dropout_rate > 0.0 &&
      (dropout_after_layer < 1 ||
       dropout_after_layer > static_cast<int>(hidden_layers.size())))
    fail(errc::bad_config,
         "dropout_after_layer must name a hidden layer when dropout is on");
  if (learning_rate < 0.0) fail(errc::bad_config, "learning_rate must be >= 0");
  if (batch_size < 1) fail(errc::bad_config, "batch_size must be >= 1");
  if (max_epochs < 1) fail(errc::bad_config, "max_epochs must be >= 1");
  if (stop_loss_threshold && *stop_loss_threshold <= 0.0)
    fail(errc::bad_config, "stop_loss_threshold must be positive");
}

std::string MlpConfig::shape_string() const {
  std::string s = std::to_string(input_dim);
  for (int w : hidden_layers) s += "-" + std::to_string(w);
  s += "-" + std::to_string(num_classes);
  return s;
}

const char* stop_reason_name(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::loss_threshold: return "loss_threshold";
    case StopReason::max_epochs: return "max_epochs";
    case StopReason::val_plateau: return "val_plateau";
  }
  return "unknown";
}

TrainResult train(const MlpConfig& config, const Dataset& train_set,
                  const Dataset& val_set) {
  config.validate();
  if (train_set.samples.empty()) fail(errc::empty_dataset, "no training samples");
  if (train_set.feature_dim != config.input_dim)
    fail(errc::dimension_mismatch,
         "dataset features are " + std::to_string(train_set.feature_dim) +
             "-dimensional, config expects " + std::to_string(config.input_dim));
  if (train_set.num_classes() != config.num_classes)
    fail(errc::dimension_mismatch,
         "dataset has " + std::to_string(train_set.num_classes()) +
             " classes, config expects " + std::to_string(config.num_classes));

  const std::vector<std::int64_t> counts = train_set.per_class_counts();
  std::vector<double> weights_vec =
      class_weights(counts, config.weight_scheme);
  Eigen::VectorXd weights =
      Eigen::Map<Eigen::VectorXd>(weights_vec.data(),
                                  static_cast<Eigen::Index>(weights_vec.size()));

  // The data, not the caller, knows how features were normalized.
  MlpConfig effective = config;
  effective.standardized_inputs = train_set.standardized;
  MlpModel model = MlpModel::init(effective);
  Rng rng(mix_seed(config.seed, 0x7261696Eull));  // shuffles + dropout masks

  const std::size_t n = train_set.samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.report.stop_reason = StopReason::max_epochs;
  MlpModel best = model;
  double best_val = -1.0;
  const bool have_val = !val_set.samples.empty();

  MlpModel::ForwardCache cache;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t batch_n =
          std::min(static_cast<std::size_t>(config.batch_size), n - start);
      const std::span<const std::size_t> ids(order.data() + start, batch_n);
      const Eigen::MatrixXf inputs = gather(train_set, ids);
      std::vector<int> labels(batch_n);
      for (std::size_t i = 0; i < batch_n; ++i)
        labels[i] = train_set.samples[ids[i]].class_id;

      const Eigen::MatrixXf logits = model.forward(inputs, true, &rng, &cache);
      auto bw = model.backward(cache, logits, labels, weights);
      model.sgd_step(bw.gradients, static_cast<float>(config.learning_rate));
      loss_sum += static_cast<double>(bw.mean_loss) * static_cast<double>(batch_n);
    }

    EpochStats stats;
    stats.mean_loss = loss_sum / static_cast<double>(n);
    stats.train_accuracy = dataset_accuracy(model, train_set);
    stats.val_accuracy = have_val
                             ? dataset_accuracy(model, val_set)
                             : std::numeric_limits<double>::quiet_NaN();
    result.report.epochs.push_back(stats);

    if (have_val && stats.val_accuracy >= best_val) {  // ties: later epoch
      best_val = stats.val_accuracy;
      best = model;
      result.report.best_epoch = epoch;
    }
    if (config.stop_loss_threshold &&
        stats.mean_loss < *config.stop_loss_threshold) {
      result.report.stop_reason = StopReason::loss_threshold;
      break;
    }
  }
  result.report.epochs_run = static_cast<int>(result.report.epochs.size());
  result.model = have_val ? std::move(best) : std::move(model);
  return result;
}

Prediction predict(const MlpModel& model, std::span<const float> input) {
  if (static_cast<int>(input.size()) != model.config().input_dim)
    fail(errc::dimension_mismatch,
         "input has " + std::to_string(input.size()) + " features, model expects " +
             std::to_string(model.config().input_dim));
  Eigen::MatrixXf column(input.size(), 1);
  std::copy(input.begin(), input.end(), column.data());
  const Eigen::MatrixXf logits = model.forward(column, false, nullptr);
  Prediction p;
  p.probs = softmax(logits).col(0);
  p.class_id = argmax_lowest(p.probs);
  return p;
}

std::vector<int> predict_batch(const MlpModel& model,
                               const Eigen::Ref<const Eigen::MatrixXf>& inputs,
                               Eigen::MatrixXf* probs_out) {
  const Eigen::MatrixXf logits = model.forward(inputs, false, nullptr);
  Eigen::MatrixXf probs = softmax(logits);
  std::vector<int> predicted(static_cast<std::size_t>(inputs.cols()));
  for (Eigen::Index s = 0; s < inputs.cols(); ++s)
    predicted[static_cast<std::size_t>(s)] = argmax_lowest(probs.col(s));
  if (probs_out) *probs_out = std::move(probs);
  return predicted;
}

void save_model(const MlpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::io_failure, "cannot create " + path);

  const MlpConfig& cfg = model.config();
  std::string config_text;
  config_text += "input_dim=" + std::to_string(cfg.input_dim) + "\n";
  config_text += "hidden=";
  for (std::size_t i = 0; i < cfg.hidden_layers.size(); ++i)
    config_text += (i ? "," : "") + std::to_string(cfg.hidden_layers[i]);
  config_text += "\n";
  config_text += "num_classes=" + std::to_string(cfg.num_classes) + "\n";
  config_text += "dropout_rate=" + format_double(cfg.dropout_rate) + "\n";
  config_text += "dropout_after_layer=" + std::to_string(cfg.dropout_after_layer) + "\n";
  config_text += "learning_rate=" + format_double(cfg.learning_rate) + "\n";
  config_text += "batch_size=" + std::to_string(cfg.batch_size) + "\n";
  config_text += "max_epochs=" + std::to_string(cfg.max_epochs) + "\n";
  config_text += "stop_loss_threshold=";
  config_text += cfg.stop_loss_threshold ? format_double(*cfg.stop_loss_threshold)
                                         : std::string("none");
  config_text += "\n";
  config_text += std::string("weight_scheme=") +
                 (cfg.weight_scheme == WeightScheme::uniform
                      ? "uniform"
                      : "inverse_frequency") +
                 "\n";
  config_text += "seed=" + std::to_string(cfg.seed) + "\n";
  config_text += "standardized_inputs=";
  config_text += cfg.standardized_inputs ? "1" : "0";
  config_text += "\n";
  config_text += "init=he_normal\n";

  out.write("RSNM", 4);
  detail::write_le<std::uint32_t>(out, kModelVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_text.size()));
  out.write(config_text.data(), static_cast<std::streamsize>(config_text.size()));

  std::vector<float> row;
  for (int l = 0; l < model.num_layers(); ++l) {
    const auto& w = model.weights()[static_cast<std::size_t>(l)];
    row.resize(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        row[static_cast<std::size_t>(c)] = w(r, c);
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    const auto& b = model.biases()[static_cast<std::size_t>(l)];
    out.write(reinterpret_cast<const char*>(b.data()),
              static_cast<std::streamsize>(
                  static_cast<std::size_t>(b.size()) * sizeof(float)));
  }
  if (!out) fail(errc::io_failure, "write failed for " + path);
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path);

  detail::expect_magic(in, "RSNM");
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kModelVersion)
    fail(errc::version_mismatch,
         "model format version " + std::to_string(version) + ", expected " +
             std::to_string(kModelVersion));

  const auto config_len = detail::read_le<std::uint32_t>(in);
  std::string config_text(config_len, '\0');
  if (config_len > 0 && !in.read(config_text.data(), config_len))
    fail(errc::truncated_file, "config block ends early");

  MlpConfig cfg;
  cfg.hidden_layers.clear();
  cfg.stop_loss_threshold.reset();
  std::istringstream lines(config_text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(errc::bad_config, "malformed config line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "input_dim") cfg.input_dim = static_cast<int>(parse_long(value));
    else if (key == "hidden") {
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ','))
        if (!item.empty())
          cfg.hidden_layers.push_back(static_cast<int>(parse_long(item)));
    } else if (key == "num_classes") cfg.num_classes = static_cast<int>(parse_long(value));
    else if (key == "dropout_rate") cfg.dropout_rate = parse_double(value);
    else if (key == "dropout_after_layer") cfg.dropout_after_layer = static_cast<int>(parse_long(value));
    else if (key == "learning_rate") cfg.learning_rate = parse_double(value);
    else if (key == "batch_size") cfg.batch_size = static_cast<int>(parse_long(value));
    else if (key == "max_epochs") cfg.max_epochs = static_cast<int>(parse_long(value));
    else if (key == "stop_loss_threshold") {
      if (value != "none") cfg.stop_loss_threshold = parse_double(value);
    } else if (key == "weight_scheme") {
      if (value == "uniform") cfg.weight_scheme = WeightScheme::uniform;
      else if (value == "inverse_frequency") cfg.weight_scheme = WeightScheme::inverse_frequency;
      else fail(errc::bad_config, "unknown weight scheme '" + value + "'");
    } else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value));
    else if (key == "standardized_inputs") cfg.standardized_inputs = value == "1";
    // Unknown keys are ignored for forward compatibility.
  }
  cfg.validate();

  MlpModel model = MlpModel::with_shape(cfg);
  std::vector<float> row;
  for (int l = 0; l < model.num_layers(); ++l) {
    auto& w = model.mutable_weights()[static_cast<std::size_t>(l)];
    row.resize(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      if (!in.read(reinterpret_cast<char*>(row.data()),
                   static_cast<std::streamsize>(row.size() * sizeof(float))))
        fail(errc::truncated_file, "weight data ends early");
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = row[static_cast<std::size_t>(c)];
    }
    auto& b = model.mutable_biases()[static_cast<std::size_t>(l)];
    if (!in.read(reinterpret_cast<char*>(b.data()),
                 static_cast<std::streamsize>(
                     static_cast<std::size_t>(b.size()) * sizeof(float))))
      fail(errc::truncated_file, "bias data ends early");
  }
  in.peek();
  if (!in.eof())
    fail(errc::shape_mismatch, "file holds more data than the config describes");
  return model;
}

void write_train_report_csv(const TrainReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(errc::io_failure, "cannot create " + path);
  out << "epoch,mean_loss,train_accuracy,val_accuracy\n";
  char buf[128];
  for (std::size_t i = 0; i < report.epochs.size(); ++i) {
    const EpochStats& e = report.epochs[i];
    if (std::isnan(e.val_accuracy))
      std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.6f,\n", i + 1, e.mean_loss,
                    e.train_accuracy);
    else
      std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.6f,%.6f\n", i + 1,
                    e.mean_loss, e.train_accuracy, e.val_accuracy);
    out << buf;
  }
  if (!out) fail(errc::io_failure, "write failed for " + path);
}

}  // namespace rsn
