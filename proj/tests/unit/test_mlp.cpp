#include "doctest.h"

#include <cmath>
#include <cstring>

#include "gradcheck.hpp"
#include "rsn/error.hpp"
#include "rsn/mlp.hpp"
#include "test_support.hpp"

using namespace rsn;
using namespace rsn::test;

namespace {

MlpConfig toy_config(int input, std::vector<int> hidden, int classes,
                     std::uint64_t seed = 0) {
  MlpConfig cfg;
  cfg.input_dim = input;
  cfg.hidden_layers = std::move(hidden);
  cfg.num_classes = classes;
  cfg.dropout_rate = 0.0;
  cfg.seed = seed;
  return cfg;
}

bool models_identical(const MlpModel& a, const MlpModel& b) {
  if (a.num_layers() != b.num_layers()) return false;
  for (int l = 0; l < a.num_layers(); ++l) {
    const auto& wa = a.weights()[static_cast<std::size_t>(l)];
    const auto& wb = b.weights()[static_cast<std::size_t>(l)];
    if (wa.rows() != wb.rows() || wa.cols() != wb.cols()) return false;
    if (std::memcmp(wa.data(), wb.data(),
                    static_cast<std::size_t>(wa.size()) * sizeof(float)) != 0)
      return false;
    const auto& ba = a.biases()[static_cast<std::size_t>(l)];
    const auto& bb = b.biases()[static_cast<std::size_t>(l)];
    if (std::memcmp(ba.data(), bb.data(),
                    static_cast<std::size_t>(ba.size()) * sizeof(float)) != 0)
      return false;
  }
  return true;
}

// Linearly separable 3-class clusters in 12 dimensions.
Dataset separable_dataset(int per_class, std::uint64_t seed) {
  Dataset ds;
  ds.feature_dim = 12;
  ds.class_labels = {"RED", "GREEN", "BLUE"};
  Rng rng(seed);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < per_class; ++i) {
      Sample s;
      s.class_id = c;
      s.subject_id = "subj-" + std::to_string(i % 7);
      s.component_index = c * per_class + i;
      for (int d = 0; d < 12; ++d) {
        const double center = (d % 3 == c) ? 2.0 : 0.0;
        s.features.values.push_back(
            static_cast<float>(center + 0.25 * rng.normal()));
      }
      ds.samples.push_back(std::move(s));
    }
  return ds;
}

}  // namespace

TEST_CASE("init is deterministic and He-scaled") {
  const MlpConfig cfg = toy_config(40, {16, 8}, 5, 7);
  const MlpModel a = MlpModel::init(cfg);
  const MlpModel b = MlpModel::init(cfg);
  CHECK(models_identical(a, b));

  MlpConfig other = cfg;
  other.seed = 8;
  CHECK_FALSE(models_identical(a, MlpModel::init(other)));

  for (const auto& bias : a.biases())
    for (Eigen::Index i = 0; i < bias.size(); ++i) CHECK(bias[i] == 0.0f);

  // sample sd of the first layer's weights ~ sqrt(2/40)
  const auto& w = a.weights()[0];
  double sq = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    sq += static_cast<double>(w.data()[i]) * w.data()[i];
  const double sd = std::sqrt(sq / static_cast<double>(w.size()));
  CHECK(sd == doctest::Approx(std::sqrt(2.0 / 40.0)).epsilon(0.15));
}

TEST_CASE("parameter counts match the shape arithmetic") {
  // oracle: sum over layers of fan_out*fan_in + fan_out
  auto count = [](int input, const std::vector<int>& hidden, int classes) {
    std::int64_t total = 0;
    int fan_in = input;
    for (int w : hidden) {
      total += static_cast<std::int64_t>(w) * fan_in + w;
      fan_in = w;
    }
    total += static_cast<std::int64_t>(classes) * fan_in + classes;
    return total;
  };
  CHECK(count(109350, {200, 200, 200}, 58) == 21962258);
  CHECK(count(109350, {20}, 58) == 2188238);

  const MlpModel paper =
      MlpModel::init(toy_config(109350, {200, 200, 200}, 58));
  CHECK(paper.parameter_count() == 21962258);
  const MlpModel compact = MlpModel::init(toy_config(109350, {20}, 58));
  CHECK(compact.parameter_count() == 2188238);
}

TEST_CASE("forward: zero parameters give zero logits") {
  const MlpModel m = MlpModel::with_shape(toy_config(6, {4}, 3));
  Eigen::MatrixXf x(6, 2);
  x.setRandom();
  const Eigen::MatrixXf logits = m.forward(x, false, nullptr);
  for (Eigen::Index i = 0; i < logits.size(); ++i)
    CHECK(logits.data()[i] == 0.0f);
}

TEST_CASE("forward: hand-computed single-hidden-unit network") {
  MlpModel m = MlpModel::with_shape(toy_config(2, {1}, 2));
  m.mutable_weights()[0](0, 0) = 0.5f;
  m.mutable_weights()[0](0, 1) = -0.25f;
  m.mutable_biases()[0][0] = 0.1f;
  m.mutable_weights()[1](0, 0) = 2.0f;
  m.mutable_weights()[1](1, 0) = -1.0f;
  m.mutable_biases()[1][0] = 0.3f;
  m.mutable_biases()[1][1] = -0.2f;

  Eigen::MatrixXf x(2, 1);
  x << 1.0f, 2.0f;  // pre-activation = 0.5 - 0.5 + 0.1 = 0.1
  const Eigen::MatrixXf logits = m.forward(x, false, nullptr);
  CHECK(logits(0, 0) == doctest::Approx(0.5f));   // 2*0.1 + 0.3
  CHECK(logits(1, 0) == doctest::Approx(-0.3f));  // -0.1 - 0.2

  // negative pre-activation is clamped by ReLU
  Eigen::MatrixXf y(2, 1);
  y << -1.0f, 2.0f;  // pre-activation = -0.5 - 0.5 + 0.1 < 0 -> h = 0
  const Eigen::MatrixXf clamped = m.forward(y, false, nullptr);
  CHECK(clamped(0, 0) == doctest::Approx(0.3f));
  CHECK(clamped(1, 0) == doctest::Approx(-0.2f));
}

TEST_CASE("forward: train and infer agree when dropout is off") {
  const MlpModel m = MlpModel::init(toy_config(10, {8, 8}, 4, 3));
  Eigen::MatrixXf x(10, 5);
  x.setRandom();
  Rng rng(1);
  const Eigen::MatrixXf train_logits = m.forward(x, true, &rng);
  const Eigen::MatrixXf infer_logits = m.forward(x, false, nullptr);
  CHECK(std::memcmp(train_logits.data(), infer_logits.data(),
                    static_cast<std::size_t>(train_logits.size()) *
                        sizeof(float)) == 0);
}

TEST_CASE("forward rejects mismatched input dimension") {
  const MlpModel m = MlpModel::init(toy_config(10, {4}, 3));
  Eigen::MatrixXf x(9, 1);
  x.setZero();
  CHECK_THROWS_WITH_AS(m.forward(x, false, nullptr),
                       doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("softmax: uniform, closed form, shift invariance") {
  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(58);
  const Eigen::VectorXd uniform = softmax(zeros);
  for (Eigen::Index i = 0; i < uniform.size(); ++i)
    CHECK(uniform[i] == doctest::Approx(1.0 / 58.0).epsilon(1e-9));

  Eigen::VectorXd two(2);
  two << std::log(2.0), 0.0;
  const Eigen::VectorXd probs = softmax(two);
  CHECK(probs[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd z(7);
    for (Eigen::Index i = 0; i < 7; ++i) z[i] = 10.0 * rng.normal();
    const Eigen::VectorXd p = softmax(z);
    CHECK(std::abs(p.sum() - 1.0) < 1e-6);
    for (Eigen::Index i = 0; i < 7; ++i) CHECK(p[i] >= 0.0);
    const Eigen::VectorXd shifted = softmax((z.array() + 123.5).matrix());
    for (Eigen::Index i = 0; i < 7; ++i)
      CHECK(shifted[i] == doctest::Approx(p[i]).epsilon(1e-12));
  }
}

TEST_CASE("weighted cross-entropy closed forms") {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(58);

  Eigen::VectorXd certain = Eigen::VectorXd::Zero(58);
  certain[7] = 1.0;
  CHECK(weighted_cross_entropy<double>(certain, 7, w) == doctest::Approx(0.0));

  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  Eigen::VectorXd w2(2);
  w2 << 2.0, 1.0;
  CHECK(weighted_cross_entropy<double>(half, 0, w2) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(58, 1.0 / 58.0);
  CHECK(weighted_cross_entropy<double>(uniform, 3, w) ==
        doctest::Approx(std::log(58.0)).epsilon(1e-9));

  CHECK_THROWS_WITH_AS(weighted_cross_entropy<double>(uniform, 58, w),
                       doctest::Contains("BadClass"), Error);
}

TEST_CASE("backward matches central finite differences on a 10x8x5 net") {
  Rng rng(2024);
  MlpConfig cfg = toy_config(10, {8}, 5, 11);
  DoubleNet net = DoubleNet::init(cfg);
  DoubleNet::Matrix inputs(10, 6);
  for (Eigen::Index i = 0; i < inputs.size(); ++i)
    inputs.data()[i] = rng.normal();
  std::vector<int> labels{0, 4, 2, 2, 1, 3};
  Eigen::VectorXd weights(5);
  weights << 1.0, 0.5, 2.0, 1.5, 0.25;

  const auto stats =
      gradcheck(net, inputs, labels, weights, 400, rng);
  CHECK(stats.failures == 0);
  CHECK(stats.worst_rel < 1e-4);
}

TEST_CASE("output bias gradient equals w*(p - onehot)/batch for zero nets") {
  const MlpModel m = MlpModel::with_shape(toy_config(6, {4}, 3));
  Eigen::MatrixXf x(6, 2);
  x.setRandom();
  MlpModel::ForwardCache cache;
  const Eigen::MatrixXf logits = m.forward(x, true, nullptr, &cache);
  const std::vector<int> labels{2, 0};
  Eigen::VectorXd w(3);
  w << 1.5, 1.0, 0.5;
  const auto result = m.backward(cache, logits, labels, w);

  // zero weights -> uniform probabilities 1/3; labels {2, 0} carry class
  // weights w[2]=0.5 and w[0]=1.5, so db = mean_s w_{y_s} (p - onehot_{y_s})
  const auto& db = result.gradients.biases.back();
  const double third = 1.0 / 3.0;
  CHECK(db[0] == doctest::Approx(0.5 * (0.5 * third + 1.5 * (third - 1.0))));
  CHECK(db[1] == doctest::Approx(0.5 * (0.5 * third + 1.5 * third)));
  CHECK(db[2] == doctest::Approx(0.5 * (0.5 * (third - 1.0) + 1.5 * third)));
}

TEST_CASE("duplicating a sample leaves the mean gradient unchanged") {
  const MlpModel m = MlpModel::init(toy_config(5, {6}, 3, 2));
  Eigen::MatrixXf one(5, 1);
  one.setRandom();
  Eigen::MatrixXf two(5, 2);
  two.col(0) = one.col(0);
  two.col(1) = one.col(0);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(3);

  MlpModel::ForwardCache cache1, cache2;
  const auto r1 = m.backward(cache1, m.forward(one, true, nullptr, &cache1),
                             std::vector<int>{1}, w);
  const auto r2 = m.backward(cache2, m.forward(two, true, nullptr, &cache2),
                             std::vector<int>{1, 1}, w);
  for (int l = 0; l < m.num_layers(); ++l) {
    const auto& ga = r1.gradients.weights[static_cast<std::size_t>(l)];
    const auto& gb = r2.gradients.weights[static_cast<std::size_t>(l)];
    for (Eigen::Index i = 0; i < ga.size(); ++i)
      CHECK(ga.data()[i] == doctest::Approx(gb.data()[i]).epsilon(1e-6));
  }
  CHECK(r1.mean_loss == doctest::Approx(r2.mean_loss));
}

TEST_CASE("sgd_step arithmetic") {
  MlpModel m = MlpModel::with_shape(toy_config(1, {}, 2));
  m.mutable_weights()[0](0, 0) = 1.0f;
  MlpModel::Gradients grads;
  grads.weights.push_back(Eigen::MatrixXf::Zero(2, 1));
  grads.biases.push_back(Eigen::VectorXf::Zero(2));
  grads.weights[0](0, 0) = 2.0f;

  MlpModel frozen = m;
  frozen.sgd_step(grads, 0.0f);
  CHECK(models_identical(frozen, m));

  m.sgd_step(grads, 0.1f);
  CHECK(m.weights()[0](0, 0) == doctest::Approx(0.8f));
}

TEST_CASE("two SGD steps differ from one step of doubled gradients") {
  const Dataset toy = separable_dataset(8, 5);
  MlpConfig cfg = toy_config(12, {6}, 3, 9);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
  Eigen::MatrixXf x(12, toy.samples.size());
  std::vector<int> labels;
  for (std::size_t i = 0; i < toy.samples.size(); ++i) {
    for (int d = 0; d < 12; ++d)
      x(d, static_cast<Eigen::Index>(i)) = toy.samples[i].features.values[static_cast<std::size_t>(d)];
    labels.push_back(toy.samples[i].class_id);
  }

  MlpModel a = MlpModel::init(cfg);
  MlpModel::ForwardCache ca;
  const Eigen::MatrixXf la = a.forward(x, true, nullptr, &ca);
  auto ga = a.backward(ca, la, labels, w);
  a.sgd_step(ga.gradients, 0.5f);
  MlpModel::ForwardCache cb;
  const Eigen::MatrixXf lb = a.forward(x, true, nullptr, &cb);
  auto gb = a.backward(cb, lb, labels, w);
  a.sgd_step(gb.gradients, 0.5f);

  MlpModel b = MlpModel::init(cfg);
  MlpModel::ForwardCache cc;
  const Eigen::MatrixXf lc = b.forward(x, true, nullptr, &cc);
  auto gc = b.backward(cc, lc, labels, w);
  MlpModel::Gradients doubled = gc.gradients;
  for (auto& grad : doubled.weights) grad *= 2.0f;
  for (auto& grad : doubled.biases) grad *= 2.0f;
  b.sgd_step(doubled, 0.5f);

  CHECK_FALSE(models_identical(a, b));
}

TEST_CASE("inverted dropout preserves activation expectation") {
  MlpConfig cfg = toy_config(6, {10}, 3, 4);
  cfg.dropout_rate = 0.66;
  cfg.dropout_after_layer = 1;
  const MlpModel m = MlpModel::init(cfg);

  Eigen::MatrixXf x(6, 1);
  x.setOnes();
  const Eigen::MatrixXf infer_logits = m.forward(x, false, nullptr);

  Rng rng(31337);
  Eigen::MatrixXf sum = Eigen::MatrixXf::Zero(3, 1);
  const int draws = 40000;
  for (int i = 0; i < draws; ++i)
    sum += m.forward(x, true, &rng);
  const Eigen::MatrixXf mean = sum / static_cast<float>(draws);
  for (Eigen::Index i = 0; i < 3; ++i) {
    const float reference = infer_logits(i, 0);
    if (std::abs(reference) > 1e-3)
      CHECK(std::abs(mean(i, 0) - reference) / std::abs(reference) < 0.02);
  }

  // infer mode never draws a mask: two calls agree bitwise
  const Eigen::MatrixXf again = m.forward(x, false, nullptr);
  CHECK(std::memcmp(again.data(), infer_logits.data(),
                    3 * sizeof(float)) == 0);
}

TEST_CASE("training reaches 100% on separable data before epoch 200") {
  const Dataset train_set = separable_dataset(30, 42);
  MlpConfig cfg = toy_config(12, {20}, 3, 1);
  cfg.learning_rate = 0.05;
  cfg.batch_size = 16;
  cfg.max_epochs = 200;
  const TrainResult result = train(cfg, train_set, Dataset{});
  REQUIRE(!result.report.epochs.empty());
  bool reached = false;
  for (const auto& epoch : result.report.epochs)
    if (epoch.train_accuracy == 1.0) reached = true;
  CHECK(reached);
  CHECK(result.report.epochs_run <= 200);
}

TEST_CASE("loss threshold semantics: huge threshold stops after epoch 1") {
  const Dataset train_set = separable_dataset(10, 1);
  MlpConfig cfg = toy_config(12, {8}, 3, 1);
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 50;
  cfg.stop_loss_threshold = 1e9;
  const TrainResult result = train(cfg, train_set, Dataset{});
  CHECK(result.report.epochs_run == 1);
  CHECK(result.report.stop_reason == StopReason::loss_threshold);
}

TEST_CASE("training is bit-deterministic in the seed") {
  const Dataset train_set = separable_dataset(12, 3);
  MlpConfig cfg = toy_config(12, {10}, 3, 77);
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 8;
  cfg.dropout_rate = 0.5;
  cfg.dropout_after_layer = 1;
  const TrainResult a = train(cfg, train_set, Dataset{});
  const TrainResult b = train(cfg, train_set, Dataset{});
  CHECK(models_identical(a.model, b.model));
  REQUIRE(a.report.epochs.size() == b.report.epochs.size());
  for (std::size_t i = 0; i < a.report.epochs.size(); ++i)
    CHECK(a.report.epochs[i].mean_loss == b.report.epochs[i].mean_loss);
}

TEST_CASE("lr=0 training never changes the weights") {
  const Dataset train_set = separable_dataset(10, 3);
  MlpConfig cfg = toy_config(12, {6}, 3, 5);
  cfg.learning_rate = 0.0;
  cfg.max_epochs = 4;
  const MlpModel init_model = MlpModel::init(cfg);
  const TrainResult result = train(cfg, train_set, Dataset{});
  CHECK(models_identical(result.model, init_model));
  for (std::size_t i = 1; i < result.report.epochs.size(); ++i)
    CHECK(result.report.epochs[i].train_accuracy ==
          result.report.epochs[0].train_accuracy);
}

TEST_CASE("epoch-mean loss is mostly nonincreasing on separable data") {
  const Dataset train_set = separable_dataset(40, 9);
  MlpConfig cfg = toy_config(12, {16}, 3, 2);
  cfg.learning_rate = 0.02;
  cfg.max_epochs = 60;
  const TrainResult result = train(cfg, train_set, Dataset{});
  int upticks = 0, transitions = 0;
  for (std::size_t i = 6; i < result.report.epochs.size(); ++i) {
    ++transitions;
    if (result.report.epochs[i].mean_loss >
        result.report.epochs[i - 1].mean_loss)
      ++upticks;
  }
  REQUIRE(transitions > 0);
  CHECK(static_cast<double>(upticks) <= 0.05 * static_cast<double>(transitions));
}

TEST_CASE("predict: argmax with lowest-index ties, no hidden state") {
  MlpModel m = MlpModel::with_shape(toy_config(4, {}, 3));
  m.mutable_biases()[0][0] = 0.0f;
  m.mutable_biases()[0][1] = 5.0f;
  m.mutable_biases()[0][2] = 1.0f;
  const std::vector<float> x{0.1f, 0.2f, 0.3f, 0.4f};
  const Prediction p = predict(m, x);
  CHECK(p.class_id == 1);
  CHECK(p.probs.size() == 3);

  const Prediction q = predict(m, x);
  CHECK(q.class_id == p.class_id);
  CHECK(std::memcmp(q.probs.data(), p.probs.data(), 3 * sizeof(float)) == 0);

  // exact tie between classes 0 and 1 resolves to 0
  MlpModel tie = MlpModel::with_shape(toy_config(4, {}, 3));
  tie.mutable_biases()[0][2] = -1.0f;
  CHECK(predict(tie, x).class_id == 0);

  const std::vector<float> wrong(5, 0.0f);
  CHECK_THROWS_WITH_AS(predict(m, wrong), doctest::Contains("DimensionMismatch"),
                       Error);
}

TEST_CASE("model file round-trips bit-exactly") {
  TempDir dir("model");
  MlpConfig cfg = toy_config(30, {16, 8}, 5, 99);
  cfg.dropout_rate = 0.25;
  cfg.dropout_after_layer = 2;
  cfg.stop_loss_threshold = 0.0005;
  cfg.standardized_inputs = true;
  const MlpModel m = MlpModel::init(cfg);
  const std::string path = dir.file("model.rsnm");
  save_model(m, path);
  const MlpModel loaded = load_model(path);
  CHECK(models_identical(m, loaded));
  CHECK(loaded.config().dropout_rate == cfg.dropout_rate);
  CHECK(loaded.config().stop_loss_threshold == cfg.stop_loss_threshold);
  CHECK(loaded.config().standardized_inputs);
  CHECK(loaded.config().seed == cfg.seed);

  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<float> x(30);
    for (float& value : x) value = static_cast<float>(rng.normal());
    const Prediction a = predict(m, x);
    const Prediction d = predict(loaded, x);
    CHECK(a.class_id == d.class_id);
    CHECK(std::memcmp(a.probs.data(), d.probs.data(), 5 * sizeof(float)) == 0);
  }
}

TEST_CASE("model file rejections") {
  TempDir dir("badmodel");
  const MlpModel m = MlpModel::init(toy_config(8, {4}, 3, 1));
  const std::string path = dir.file("m.rsnm");
  save_model(m, path);

  auto bytes = read_bytes(path);

  SUBCASE("bad magic") {
    auto bad = bytes;
    bad[0] = std::byte{'X'};
    write_bytes(dir.file("x.rsnm"), bad);
    CHECK_THROWS_WITH_AS(load_model(dir.file("x.rsnm")),
                         doctest::Contains("BadMagic"), Error);
  }
  SUBCASE("version mismatch") {
    auto bad = bytes;
    bad[4] = std::byte{9};
    write_bytes(dir.file("v.rsnm"), bad);
    CHECK_THROWS_WITH_AS(load_model(dir.file("v.rsnm")),
                         doctest::Contains("VersionMismatch"), Error);
  }
  SUBCASE("truncation") {
    auto bad = bytes;
    bad.resize(bad.size() - 10);
    write_bytes(dir.file("t.rsnm"), bad);
    CHECK_THROWS_WITH_AS(load_model(dir.file("t.rsnm")),
                         doctest::Contains("TruncatedFile"), Error);
  }
  SUBCASE("trailing garbage") {
    auto bad = bytes;
    bad.push_back(std::byte{0});
    write_bytes(dir.file("g.rsnm"), bad);
    CHECK_THROWS_WITH_AS(load_model(dir.file("g.rsnm")),
                         doctest::Contains("ShapeMismatch"), Error);
  }
}

TEST_CASE("config validation") {
  MlpConfig cfg = toy_config(4, {4}, 3);
  cfg.learning_rate = -1.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("BadConfig"), Error);
  cfg = toy_config(4, {4}, 3);
  cfg.dropout_rate = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = toy_config(4, {4}, 3);
  cfg.dropout_rate = 0.5;
  cfg.dropout_after_layer = 2;  // only one hidden layer
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = toy_config(0, {4}, 3);
  CHECK_THROWS_AS(cfg.validate(), Error);
  // lr = 0 is allowed (identity training)
  cfg = toy_config(4, {4}, 3);
  cfg.learning_rate = 0.0;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("train report CSV has one row per epoch") {
  TempDir dir("report");
  const Dataset train_set = separable_dataset(8, 4);
  MlpConfig cfg = toy_config(12, {6}, 3, 5);
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 5;
  const TrainResult result = train(cfg, train_set, Dataset{});
  const std::string path = dir.file("report.csv");
  write_train_report_csv(result.report, path);
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  REQUIRE(std::getline(in, line));
  CHECK(line == "epoch,mean_loss,train_accuracy,val_accuracy");
  while (std::getline(in, line)) ++rows;
  CHECK(rows == result.report.epochs_run);
}
