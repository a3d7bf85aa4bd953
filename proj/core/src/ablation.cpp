#include "rsn/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "rsn/error.hpp"
#include "rsn/eval.hpp"
#include "rsn/rng.hpp"
#include "rsn/volume_ops.hpp"

namespace rsn {
namespace {

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

AccuracyGrid run_grid(const Dataset& data, const GridSpec& spec,
                      const MlpConfig& base_config) {
  if (data.samples.empty()) fail(errc::empty_dataset, "grid search needs data");
  if (spec.k < 2) fail(errc::bad_k, "k must be >= 2");
  for (int v : spec.layer_counts)
    if (v < 1) fail(errc::bad_config, "layer counts must be >= 1");
  for (int v : spec.node_counts)
    if (v < 1) fail(errc::bad_config, "node counts must be >= 1");

  const std::vector<std::int64_t> counts = data.per_class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > 0 && counts[c] < spec.k)
      std::cerr << "warning: class " << data.class_labels[c] << " has only "
                << counts[c] << " samples for " << spec.k
                << "-fold CV; folds will be filled best-effort\n";

  // One fold assignment shared by every cell, derived from spec.seed only.
  const FoldAssignment folds = stratified_kfold(data, spec.k, spec.seed);

  AccuracyGrid grid;
  grid.layer_counts = spec.layer_counts;
  grid.node_counts = spec.node_counts;
  grid.cells.reserve(spec.layer_counts.size() * spec.node_counts.size());

  for (int layers : spec.layer_counts) {
    for (int nodes : spec.node_counts) {
      GridCell cell;
      cell.layers = layers;
      cell.nodes = nodes;

      MlpConfig cfg = base_config;
      cfg.input_dim = data.feature_dim;
      cfg.num_classes = data.num_classes();
      cfg.hidden_layers.assign(static_cast<std::size_t>(layers), nodes);
      cfg.dropout_rate = 0.0;  // fixed for the whole grid
      cfg.seed = mix_seed(spec.seed, static_cast<std::uint64_t>(layers),
                          static_cast<std::uint64_t>(nodes));

      Dataset no_val;
      no_val.feature_dim = data.feature_dim;
      no_val.class_labels = data.class_labels;
      for (int fold = 0; fold < spec.k; ++fold) {
        const Dataset train_part = fold_subset(data, folds, fold, false);
        const Dataset held_out = fold_subset(data, folds, fold, true);
        const TrainResult trained = train(cfg, train_part, no_val);
        const EvalResult eval = evaluate(trained.model, held_out);
        cell.fold_accuracies.push_back(eval.accuracy);
      }
      cell.mean_accuracy = mean_of(cell.fold_accuracies);
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

void emit_grid(const AccuracyGrid& grid, const std::string& csv_path,
               const std::string& heatmap_path) {
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) fail(errc::io_failure, "cannot create " + csv_path);
  csv << "layers\\nodes";
  for (int n : grid.node_counts) csv << ',' << n;
  csv << '\n';
  char buf[32];
  for (std::size_t l = 0; l < grid.layer_counts.size(); ++l) {
    csv << grid.layer_counts[l];
    for (std::size_t n = 0; n < grid.node_counts.size(); ++n) {
      // round-half-up to 4 decimals
      const double v = grid.cell(static_cast<int>(l), static_cast<int>(n)).mean_accuracy;
      std::snprintf(buf, sizeof(buf), ",%.4f",
                    std::floor(v * 10000.0 + 0.5) / 10000.0);
      csv << buf;
    }
    csv << '\n';
  }
  if (!csv) fail(errc::io_failure, "write failed for " + csv_path);

  double lo = grid.cells.front().mean_accuracy;
  double hi = lo;
  for (const GridCell& c : grid.cells) {
    lo = std::min(lo, c.mean_accuracy);
    hi = std::max(hi, c.mean_accuracy);
  }
  Image2D image;
  image.width = static_cast<int>(grid.node_counts.size());
  image.height = static_cast<int>(grid.layer_counts.size());
  image.pixels.resize(grid.cells.size());
  for (std::size_t l = 0; l < grid.layer_counts.size(); ++l)
    for (std::size_t n = 0; n < grid.node_counts.size(); ++n) {
      const double v = grid.cell(static_cast<int>(l), static_cast<int>(n)).mean_accuracy;
      image.at(static_cast<int>(n), static_cast<int>(l)) =
          hi > lo ? static_cast<float>((v - lo) / (hi - lo)) : 0.0f;
    }
  write_ppm_gray(image, heatmap_path);
}

}  // namespace rsn
