#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rsn/error.hpp"

namespace rsn {

// One real-valued brain volume. Voxels are stored x-fastest:
// index = x + nx*(y + ny*z), matching the on-disk NIfTI layout.
struct Volume3D {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  std::vector<float> voxels;
  std::array<float, 3> spacing{1.0f, 1.0f, 1.0f};  // mm, informational

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(nx) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(ny) * static_cast<std::size_t>(z));
  }

  float at(int x, int y, int z) const { return voxels[index(x, y, z)]; }
  float& at(int x, int y, int z) { return voxels[index(x, y, z)]; }

  void validate() const {
    if (nx < 1 || ny < 1 || nz < 1)
      fail(errc::bad_dims, "volume dimensions must be >= 1");
    if (voxels.size() != voxel_count())
      fail(errc::bad_dims, "voxel count does not match dimensions");
    for (float v : voxels)
      if (!std::isfinite(v))
        fail(errc::non_finite_data, "volume contains NaN or Inf");
  }
};

// All per-subject ICA component maps, in on-disk 4th-dimension order.
// That order is what carries the labels, so it is never permuted.
struct ComponentStack {
  std::string subject_id;
  std::vector<Volume3D> volumes;
  std::string source_path;
};

}  // namespace rsn
