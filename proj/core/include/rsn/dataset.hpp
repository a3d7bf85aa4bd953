#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsn/taxonomy.hpp"
#include "rsn/volume.hpp"
#include "rsn/volume_ops.hpp"

namespace rsn {

struct Sample {
  FeatureVector features;
  int class_id = -1;
  std::string subject_id;
  int component_index = -1;
};

// Labeled samples with a uniform feature dimension. class_labels is the
// taxonomy's deduplicated class table; class ids index into it.
struct Dataset {
  std::vector<Sample> samples;
  int feature_dim = 0;
  std::vector<std::string> class_labels;
  bool standardized = false;  // were features z-scored at assembly time

  int num_classes() const { return static_cast<int>(class_labels.size()); }
  std::vector<std::int64_t> per_class_counts() const;
  std::vector<std::string> subject_ids() const;  // unique, first appearance
};

struct SplitSpec {
  double train_frac = 0.72;
  double val_frac = 0.08;
  double test_frac = 0.20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SubjectSplit {
  Dataset train;
  Dataset val;
  Dataset test;
};

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of_sample;  // per dataset sample, in 0..k-1
};

// One Sample per (subject, component); class ids come from the taxonomy
// entry at the sample's component index. Every stack must have exactly
// the taxonomy's component count and share one grid.
Dataset assemble(std::span<const ComponentStack> stacks,
                 const Taxonomy& taxonomy, bool standardized);

// Splits by subject: all components of a subject land in one partition.
// Partition sizes: val = round(val_frac*N), test = round(test_frac*N),
// train = remainder. Deterministic given the seed; sizes depend only on
// (N, fractions).
SubjectSplit split_by_subject(const Dataset& dataset, const SplitSpec& spec);

// Within each class, samples are shuffled by seed and dealt round-robin;
// per-class fold counts differ by at most 1, and folds partition the data.
FoldAssignment stratified_kfold(const Dataset& dataset, int k,
                                std::uint64_t seed);

Dataset fold_subset(const Dataset& dataset, const FoldAssignment& folds,
                    int fold, bool held_out);

// Desk-scale stand-in for dual-regression maps. Each non-NOISE class gets
// a unit-peak Gaussian blob at a class-specific integer lattice centroid
// (lattice spacing >= 3*blob_sigma), jittered by at most 1 voxel per axis
// per (subject, component), plus i.i.d. noise of sd noise_sigma. NOISE
// components are pure noise of sd max(noise_sigma, 0.3). Deterministic
// given the seed, independent of generation order.
std::vector<ComponentStack> synth_generate(const Taxonomy& taxonomy,
                                           std::array<int, 3> grid,
                                           int subjects, double blob_sigma,
                                           double noise_sigma,
                                           std::uint64_t seed);

// Integer lattice centroid assigned to a class (synth_generate's layout).
// NOISE has no centroid; asking for it is an error.
std::array<int, 3> synth_class_centroid(const Taxonomy& taxonomy,
                                        std::array<int, 3> grid,
                                        double blob_sigma, int class_id);

// Binary cache. Layout: magic "RSND", u32 version, u32 D, u32 N, then per
// sample a u32 class_id followed by D little-endian float32 features; a
// trailer holds the class-label table and per-sample subject/component
// provenance. Round-trips are exact.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace rsn
