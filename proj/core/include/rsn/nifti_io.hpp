#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsn/volume.hpp"

namespace rsn::nifti {

enum class ByteOrder { little, big };

// NIfTI-1 datatype codes supported by the reader.
enum DatatypeCode : std::int16_t {
  kUint8 = 2,
  kInt16 = 4,
  kInt32 = 8,
  kFloat32 = 16,
  kFloat64 = 64,
};

// Parsed view of the fields this pipeline needs from the 348-byte header.
// Values are already byte-swapped to host order; byte_order records what
// the file used.
struct NiftiHeader {
  std::int32_t sizeof_hdr = 348;
  std::array<std::int16_t, 8> dim{};    // dim[0]=rank, dim[1..3]=nx,ny,nz, dim[4]=nt
  std::int16_t datatype_code = 0;
  std::int16_t bitpix = 0;
  std::array<float, 8> pixdim{};
  float vox_offset = 0.0f;
  float scl_slope = 0.0f;
  float scl_inter = 0.0f;
  std::array<char, 4> magic{};          // "n+1\0" or "ni1\0"
  ByteOrder byte_order = ByteOrder::little;

  int rank() const { return dim[0]; }
  int nx() const { return dim[1]; }
  int ny() const { return dim[2]; }
  int nz() const { return dim[3]; }
  int nt() const { return rank() >= 4 ? dim[4] : 1; }
  bool single_file() const { return magic[1] == '+'; }
};

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kSingleFileVoxOffset = 352;

// Parses and validates the fixed 348-byte header. Detects byte order by
// testing sizeof_hdr == 348 natively vs swapped and swaps every multi-byte
// field consistently. NIfTI-2 and Analyze files are rejected.
NiftiHeader parse_header(std::span<const std::byte> bytes);

// Loads a single-file .nii or .nii.gz (gzip detected by the 1F 8B prefix).
// A rank-3 file yields a stack of one volume; rank-4 splits along dim[4].
// Voxel values are raw*scl_slope + scl_inter when scl_slope != 0.
// subject_id is the file name without its .nii/.nii.gz suffix.
ComponentStack read_stack(const std::string& path);

// Writes one volume as single-file NIfTI-1: little-endian float32,
// scl_slope=1, scl_inter=0, vox_offset=352. Reading the file back
// reproduces the voxels bit-exactly.
void write_volume(const Volume3D& volume, const std::string& path);

// Same format with dim[0]=4; one sub-volume per stack component.
void write_stack(const ComponentStack& stack, const std::string& path);

// gzip helpers (DEFLATE with gzip wrapper), exposed so tests can produce
// compressed fixtures for the read path.
std::vector<std::byte> gzip_compress(std::span<const std::byte> data);
std::vector<std::byte> gzip_decompress(std::span<const std::byte> data);

}  // namespace rsn::nifti
