#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rsn/rng.hpp"
#include "rsn/volume.hpp"
#include "rsn/volume_ops.hpp"

namespace rsn::test {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("rsn_test_" + tag + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline std::vector<std::byte> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::byte> data;
  char c;
  while (in.get(c)) data.push_back(static_cast<std::byte>(c));
  return data;
}

inline void write_bytes(const std::string& path,
                        const std::vector<std::byte>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

inline Volume3D random_volume(Rng& rng, int nx, int ny, int nz) {
  Volume3D v;
  v.nx = nx;
  v.ny = ny;
  v.nz = nz;
  v.voxels.resize(v.voxel_count());
  for (float& value : v.voxels) value = static_cast<float>(rng.normal());
  return v;
}

// Independent triple-loop projection oracle.
inline Image2D mip_bruteforce(const Volume3D& v, Axis axis) {
  Image2D img;
  auto fill = [&](int w, int h) {
    img.width = w;
    img.height = h;
    img.pixels.assign(static_cast<std::size_t>(w) * h, 0.0f);
  };
  switch (axis) {
    case Axis::z: {
      fill(v.nx, v.ny);
      for (int y = 0; y < v.ny; ++y)
        for (int x = 0; x < v.nx; ++x) {
          float best = v.at(x, y, 0);
          for (int z = 1; z < v.nz; ++z) best = std::max(best, v.at(x, y, z));
          img.at(x, y) = best;
        }
      break;
    }
    case Axis::x: {
      fill(v.ny, v.nz);
      for (int z = 0; z < v.nz; ++z)
        for (int y = 0; y < v.ny; ++y) {
          float best = v.at(0, y, z);
          for (int x = 1; x < v.nx; ++x) best = std::max(best, v.at(x, y, z));
          img.at(y, z) = best;
        }
      break;
    }
    case Axis::y: {
      fill(v.nx, v.nz);
      for (int z = 0; z < v.nz; ++z)
        for (int x = 0; x < v.nx; ++x) {
          float best = v.at(x, 0, z);
          for (int y = 1; y < v.ny; ++y) best = std::max(best, v.at(x, y, z));
          img.at(x, z) = best;
        }
      break;
    }
  }
  return img;
}

// Byte-swaps a little-endian single-file NIfTI produced by the writer
// (348-byte header + float32 payload), yielding its big-endian twin.
// Offsets follow the standard header table, independent of the parser.
inline std::vector<std::byte> byteswap_nifti_file(std::vector<std::byte> file) {
  auto swap_at = [&](std::size_t offset, std::size_t width, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
      std::reverse(file.begin() + static_cast<std::ptrdiff_t>(offset + i * width),
                   file.begin() + static_cast<std::ptrdiff_t>(offset + (i + 1) * width));
  };
  swap_at(0, 4, 1);     // sizeof_hdr
  swap_at(32, 4, 1);    // extents
  swap_at(36, 2, 1);    // session_error
  swap_at(40, 2, 8);    // dim
  swap_at(56, 4, 3);    // intent_p1..p3
  swap_at(68, 2, 3);    // intent_code, datatype, bitpix
  swap_at(74, 2, 1);    // slice_start
  swap_at(76, 4, 8);    // pixdim
  swap_at(108, 4, 3);   // vox_offset, scl_slope, scl_inter
  swap_at(120, 2, 1);   // slice_end
  swap_at(124, 4, 4);   // cal_max, cal_min, slice_duration, toffset
  swap_at(140, 4, 2);   // glmax, glmin
  swap_at(252, 2, 2);   // qform_code, sform_code
  swap_at(256, 4, 6);   // quaternion and offsets
  swap_at(280, 4, 12);  // srow_x/y/z
  const std::size_t vox_offset = 352;
  const std::size_t n_floats = (file.size() - vox_offset) / 4;
  swap_at(vox_offset, 4, n_floats);
  return file;
}

}  // namespace rsn::test
