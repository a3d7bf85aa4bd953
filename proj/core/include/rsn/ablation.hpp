#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsn/dataset.hpp"
#include "rsn/mlp.hpp"

namespace rsn {

struct GridSpec {
  std::vector<int> layer_counts{1, 2, 3};
  std::vector<int> node_counts{2, 5, 10, 20, 50, 100, 150, 200};
  int k = 5;
  std::uint64_t seed = 0;
};

struct GridCell {
  int layers = 0;
  int nodes = 0;
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;  // arithmetic mean of fold_accuracies
};

struct AccuracyGrid {
  std::vector<int> layer_counts;
  std::vector<int> node_counts;
  std::vector<GridCell> cells;  // layer-major: cells[l * nodes + n]

  const GridCell& cell(int layer_index, int node_index) const {
    return cells[static_cast<std::size_t>(layer_index) * node_counts.size() +
                 static_cast<std::size_t>(node_index)];
  }
};

// Grid search over (layers x nodes) under stratified k-fold CV. Every cell
// trains with L hidden layers of n nodes, dropout forced to 0, the
// learning rate / batch size / epoch cap / loss-threshold stop taken from
// base_config, and a cell seed derived from (spec.seed, L, n) so cells are
// reproducible in isolation and in any order. Class weighting stays on.
AccuracyGrid run_grid(const Dataset& data, const GridSpec& spec,
                      const MlpConfig& base_config);

// CSV: header row of node counts, one row per layer count, means to four
// decimals. Heatmap: grayscale PPM, accuracy mapped linearly
// [min,max] -> [0,255] (a degenerate range maps to 0).
void emit_grid(const AccuracyGrid& grid, const std::string& csv_path,
               const std::string& heatmap_path);

}  // namespace rsn
