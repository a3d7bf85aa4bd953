#include "rsn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "rsn/detail/binary_io.hpp"
#include "rsn/error.hpp"
#include "rsn/rng.hpp"

namespace rsn {
namespace {

constexpr std::uint32_t kDatasetVersion = 1;

struct Lattice {
  int spacing = 0;
  int margin = 0;
  std::array<int, 3> counts{};

  std::int64_t capacity() const {
    return static_cast<std::int64_t>(counts[0]) * counts[1] * counts[2];
  }
};

Lattice make_lattice(std::array<int, 3> grid, double blob_sigma) {
  Lattice lat;
  lat.spacing = std::max(1, static_cast<int>(std::ceil(3.0 * blob_sigma)));
  lat.margin = 2;
  for (int a = 0; a < 3; ++a) {
    const int usable = grid[a] - 1 - 2 * lat.margin;
    lat.counts[a] = usable >= 0 ? usable / lat.spacing + 1 : 0;
  }
  return lat;
}

// Non-NOISE classes take lattice slots in class-id order.
std::vector<int> lattice_slot_of_class(const Taxonomy& taxonomy) {
  std::vector<int> slot(static_cast<std::size_t>(taxonomy.num_classes()), -1);
  int next = 0;
  for (int c = 0; c < taxonomy.num_classes(); ++c)
    if (taxonomy.class_label(c) != "NOISE") slot[static_cast<std::size_t>(c)] = next++;
  return slot;
}

std::array<int, 3> slot_coordinates(const Lattice& lat, int slot) {
  const int ix = slot % lat.counts[0];
  const int iy = (slot / lat.counts[0]) % lat.counts[1];
  const int iz = slot / (lat.counts[0] * lat.counts[1]);
  return {lat.margin + ix * lat.spacing, lat.margin + iy * lat.spacing,
          lat.margin + iz * lat.spacing};
}

}  // namespace

std::vector<std::int64_t> Dataset::per_class_counts() const {
  std::vector<std::int64_t> counts(class_labels.size(), 0);
  for (const Sample& s : samples)
    ++counts[static_cast<std::size_t>(s.class_id)];
  return counts;
}

std::vector<std::string> Dataset::subject_ids() const {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const Sample& s : samples)
    if (seen.insert(s.subject_id).second) ids.push_back(s.subject_id);
  return ids;
}

void SplitSpec::validate() const {
  for (double f : {train_frac, val_frac, test_frac})
    if (!(f >= 0.0 && f <= 1.0))
      fail(errc::bad_split, "fractions must lie in [0,1]");
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    fail(errc::bad_split, "fractions must sum to 1");
}

Dataset assemble(std::span<const ComponentStack> stacks,
                 const Taxonomy& taxonomy, bool standardized) {
  if (stacks.empty()) fail(errc::empty_input, "no component stacks given");
  const int expected = taxonomy.num_components();
  const Volume3D& ref = stacks.front().volumes.front();

  Dataset ds;
  ds.class_labels = taxonomy.classes();
  ds.feature_dim = static_cast<int>(ref.voxel_count());
  ds.standardized = standardized;
  ds.samples.reserve(stacks.size() * static_cast<std::size_t>(expected));

  for (const ComponentStack& stack : stacks) {
    if (static_cast<int>(stack.volumes.size()) != expected)
      fail(errc::component_count_mismatch,
           stack.subject_id + " has " + std::to_string(stack.volumes.size()) +
               " components, taxonomy maps " + std::to_string(expected));
    for (int c = 0; c < expected; ++c) {
      const Volume3D& v = stack.volumes[static_cast<std::size_t>(c)];
      if (v.nx != ref.nx || v.ny != ref.ny || v.nz != ref.nz)
        fail(errc::grid_mismatch,
             stack.subject_id + " component " + std::to_string(c) +
                 " grid differs from " + stacks.front().subject_id);
      Sample s;
      s.features = flatten(v);
      if (standardized) standardize_in_place(s.features.values);
      s.features.source = {stack.subject_id, c};
      s.class_id = taxonomy.class_of_component(c);
      s.subject_id = stack.subject_id;
      s.component_index = c;
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

SubjectSplit split_by_subject(const Dataset& dataset, const SplitSpec& spec) {
  spec.validate();
  std::vector<std::string> subjects = dataset.subject_ids();
  const auto n = static_cast<std::int64_t>(subjects.size());
  if (n < 3) fail(errc::too_few_subjects, "need >= 3 subjects, have " +
                                              std::to_string(n));

  const auto val_n = std::llround(spec.val_frac * static_cast<double>(n));
  const auto test_n = std::llround(spec.test_frac * static_cast<double>(n));
  const auto train_n = n - val_n - test_n;
  if (train_n < 0) fail(errc::bad_split, "rounded partition exceeds subjects");

  Rng rng(spec.seed);
  rng.shuffle(subjects);

  enum Part { kTrain = 0, kVal = 1, kTest = 2 };
  std::unordered_map<std::string, Part> part_of;
  for (std::int64_t i = 0; i < n; ++i) {
    Part p = i < train_n           ? kTrain
             : i < train_n + val_n ? kVal
                                   : kTest;
    part_of.emplace(subjects[static_cast<std::size_t>(i)], p);
  }

  SubjectSplit split;
  for (Dataset* d : {&split.train, &split.val, &split.test}) {
    d->feature_dim = dataset.feature_dim;
    d->class_labels = dataset.class_labels;
    d->standardized = dataset.standardized;
  }
  for (const Sample& s : dataset.samples) {
    switch (part_of.at(s.subject_id)) {
      case kTrain: split.train.samples.push_back(s); break;
      case kVal: split.val.samples.push_back(s); break;
      case kTest: split.test.samples.push_back(s); break;
    }
  }
  return split;
}

FoldAssignment stratified_kfold(const Dataset& dataset, int k,
                                std::uint64_t seed) {
  if (k < 2) fail(errc::bad_k, "k must be >= 2");
  const auto n = dataset.samples.size();
  if (n < static_cast<std::size_t>(k))
    fail(errc::bad_k, "k exceeds the sample count");

  std::vector<std::vector<std::size_t>> by_class(
      static_cast<std::size_t>(dataset.num_classes()));
  for (std::size_t i = 0; i < n; ++i)
    by_class[static_cast<std::size_t>(dataset.samples[i].class_id)].push_back(i);

  FoldAssignment assignment;
  assignment.k = k;
  assignment.fold_of_sample.assign(n, -1);

  Rng rng(seed);
  std::size_t dealt = 0;  // running counter spreads remainders across folds
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t idx : members)
      assignment.fold_of_sample[idx] = static_cast<int>(dealt++ % k);
  }
  return assignment;
}

Dataset fold_subset(const Dataset& dataset, const FoldAssignment& folds,
                    int fold, bool held_out) {
  Dataset out;
  out.feature_dim = dataset.feature_dim;
  out.class_labels = dataset.class_labels;
  out.standardized = dataset.standardized;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i)
    if ((folds.fold_of_sample[i] == fold) == held_out)
      out.samples.push_back(dataset.samples[i]);
  return out;
}

std::array<int, 3> synth_class_centroid(const Taxonomy& taxonomy,
                                        std::array<int, 3> grid,
                                        double blob_sigma, int class_id) {
  const Lattice lat = make_lattice(grid, blob_sigma);
  const std::vector<int> slots = lattice_slot_of_class(taxonomy);
  const int slot = slots.at(static_cast<std::size_t>(class_id));
  if (slot < 0)
    fail(errc::bad_class, "NOISE has no centroid");
  if (slot >= lat.capacity())
    fail(errc::grid_too_small, "lattice cannot hold all classes");
  return slot_coordinates(lat, slot);
}

std::vector<ComponentStack> synth_generate(const Taxonomy& taxonomy,
                                           std::array<int, 3> grid,
                                           int subjects, double blob_sigma,
                                           double noise_sigma,
                                           std::uint64_t seed) {
  if (subjects < 1) fail(errc::empty_input, "need at least one subject");
  const Lattice lat = make_lattice(grid, blob_sigma);
  const std::vector<int> slots = lattice_slot_of_class(taxonomy);
  const int blob_classes =
      static_cast<int>(std::count_if(slots.begin(), slots.end(),
                                     [](int s) { return s >= 0; }));
  if (lat.capacity() < blob_classes)
    fail(errc::grid_too_small,
         "grid " + std::to_string(grid[0]) + "x" + std::to_string(grid[1]) +
             "x" + std::to_string(grid[2]) + " fits " +
             std::to_string(lat.capacity()) + " centroids, need " +
             std::to_string(blob_classes));

  const int box_radius = static_cast<int>(std::ceil(4.0 * blob_sigma));
  const double inv_two_sigma_sq = 1.0 / (2.0 * blob_sigma * blob_sigma);
  const std::size_t nvox = static_cast<std::size_t>(grid[0]) * grid[1] * grid[2];

  std::vector<ComponentStack> stacks(static_cast<std::size_t>(subjects));
  for (int subj = 0; subj < subjects; ++subj) {
    ComponentStack& stack = stacks[static_cast<std::size_t>(subj)];
    char name[32];
    std::snprintf(name, sizeof(name), "synth-%03d", subj);
    stack.subject_id = name;
    stack.volumes.reserve(static_cast<std::size_t>(taxonomy.num_components()));

    for (const LabelEntry& entry : taxonomy.entries()) {
      // Independent stream per (subject, component): generation order and
      // parallel schedules cannot change the data.
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(subj),
                       static_cast<std::uint64_t>(entry.component_index)));
      Volume3D v;
      v.nx = grid[0];
      v.ny = grid[1];
      v.nz = grid[2];
      v.voxels.assign(nvox, 0.0f);

      const int slot = slots[static_cast<std::size_t>(entry.class_id)];
      if (slot < 0) {
        const double sd = std::max(noise_sigma, 0.3);
        for (float& voxel : v.voxels)
          voxel = static_cast<float>(sd * rng.normal());
      } else {
        const std::array<int, 3> c = slot_coordinates(lat, slot);
        const double jx = c[0] + (rng.uniform() * 2.0 - 1.0);
        const double jy = c[1] + (rng.uniform() * 2.0 - 1.0);
        const double jz = c[2] + (rng.uniform() * 2.0 - 1.0);
        if (noise_sigma > 0.0)
          for (float& voxel : v.voxels)
            voxel = static_cast<float>(noise_sigma * rng.normal());
        const int x0 = std::max(0, c[0] - box_radius);
        const int x1 = std::min(grid[0] - 1, c[0] + box_radius);
        const int y0 = std::max(0, c[1] - box_radius);
        const int y1 = std::min(grid[1] - 1, c[1] + box_radius);
        const int z0 = std::max(0, c[2] - box_radius);
        const int z1 = std::min(grid[2] - 1, c[2] + box_radius);
        for (int z = z0; z <= z1; ++z)
          for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
              const double dx = x - jx;
              const double dy = y - jy;
              const double dz = z - jz;
              v.at(x, y, z) += static_cast<float>(
                  std::exp(-(dx * dx + dy * dy + dz * dz) * inv_two_sigma_sq));
            }
      }
      stack.volumes.push_back(std::move(v));
    }
  }
  return stacks;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::io_failure, "cannot create " + path);

  out.write("RSND", 4);
  detail::write_le<std::uint32_t>(out, kDatasetVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.feature_dim));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.samples.size()));
  for (const Sample& s : dataset.samples) {
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.class_id));
    out.write(reinterpret_cast<const char*>(s.features.values.data()),
              static_cast<std::streamsize>(s.features.values.size() * sizeof(float)));
  }
  // Trailer: standardization flag, class-label table, per-sample provenance.
  detail::write_le<std::uint8_t>(out, dataset.standardized ? 1 : 0);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.class_labels.size()));
  for (const std::string& label : dataset.class_labels)
    detail::write_string16(out, label);
  for (const Sample& s : dataset.samples) {
    detail::write_string16(out, s.subject_id);
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.component_index));
  }
  if (!out) fail(errc::io_failure, "write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path);

  detail::expect_magic(in, "RSND");
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kDatasetVersion)
    fail(errc::version_mismatch, "dataset cache version " + std::to_string(version));
  const auto dim = detail::read_le<std::uint32_t>(in);
  const auto count = detail::read_le<std::uint32_t>(in);

  Dataset ds;
  ds.feature_dim = static_cast<int>(dim);
  ds.samples.resize(count);
  for (Sample& s : ds.samples) {
    s.class_id = static_cast<int>(detail::read_le<std::uint32_t>(in));
    s.features.values.resize(dim);
    if (dim > 0 &&
        !in.read(reinterpret_cast<char*>(s.features.values.data()),
                 static_cast<std::streamsize>(dim * sizeof(float))))
      fail(errc::truncated_file, "sample block ends early");
  }
  ds.standardized = detail::read_le<std::uint8_t>(in) != 0;
  const auto num_classes = detail::read_le<std::uint32_t>(in);
  ds.class_labels.resize(num_classes);
  for (std::string& label : ds.class_labels)
    label = detail::read_string16(in);
  for (Sample& s : ds.samples) {
    s.subject_id = detail::read_string16(in);
    s.component_index = static_cast<int>(detail::read_le<std::uint32_t>(in));
    s.features.source = {s.subject_id, s.component_index};
  }
  for (const Sample& s : ds.samples)
    if (s.class_id < 0 || s.class_id >= ds.num_classes())
      fail(errc::bad_class, "cached class id out of range");
  return ds;
}

}  // namespace rsn
