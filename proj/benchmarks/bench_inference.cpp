#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "rsn/mlp.hpp"
#include "rsn/rng.hpp"

// Dense inference cost across batch sizes. The paper-shaped model is
// memory-bound per sample; batching amortizes the weight traffic.

namespace {

rsn::MlpModel make_model(int input, std::vector<int> hidden, int classes) {
  rsn::MlpConfig cfg;
  cfg.input_dim = input;
  cfg.hidden_layers = std::move(hidden);
  cfg.num_classes = classes;
  cfg.dropout_rate = 0.0;
  cfg.seed = 1;
  return rsn::MlpModel::init(cfg);
}

Eigen::MatrixXf random_inputs(int dim, int count) {
  rsn::Rng rng(3);
  Eigen::MatrixXf x(dim, count);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x.data()[i] = static_cast<float>(rng.normal());
  return x;
}

void PaperShapeInference(benchmark::State& state) {
  const auto batch = static_cast<int>(state.range(0));
  const rsn::MlpModel model = make_model(109350, {200, 200, 200}, 58);
  const Eigen::MatrixXf inputs = random_inputs(109350, batch);
  for (auto _ : state) {
    auto predicted = rsn::predict_batch(model, inputs);
    benchmark::DoNotOptimize(predicted);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(PaperShapeInference)->Arg(1)->Arg(8)->Arg(32)->Arg(64)->Arg(128)
    ->Unit(benchmark::kMillisecond);

void AblationBestShapeInference(benchmark::State& state) {
  const auto batch = static_cast<int>(state.range(0));
  const rsn::MlpModel model = make_model(109350, {20}, 58);
  const Eigen::MatrixXf inputs = random_inputs(109350, batch);
  for (auto _ : state) {
    auto predicted = rsn::predict_batch(model, inputs);
    benchmark::DoNotOptimize(predicted);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(AblationBestShapeInference)->Arg(1)->Arg(64)
    ->Unit(benchmark::kMillisecond);

void SoftmaxColumn(benchmark::State& state) {
  rsn::Rng rng(5);
  Eigen::MatrixXf logits(58, 256);
  for (Eigen::Index i = 0; i < logits.size(); ++i)
    logits.data()[i] = static_cast<float>(rng.normal());
  for (auto _ : state) {
    Eigen::MatrixXf probs = rsn::softmax(logits);
    benchmark::DoNotOptimize(probs);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(SoftmaxColumn);

}  // namespace

BENCHMARK_MAIN();
