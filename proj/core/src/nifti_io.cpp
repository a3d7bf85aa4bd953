#include "rsn/nifti_io.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

namespace rsn::nifti {
namespace {

// Field offsets inside the 348-byte header (NIfTI-1 standard layout).
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;        // int16[8]
constexpr std::size_t kOffDatatype = 70;   // int16
constexpr std::size_t kOffBitpix = 72;     // int16
constexpr std::size_t kOffPixdim = 76;     // float[8]
constexpr std::size_t kOffVoxOffset = 108; // float
constexpr std::size_t kOffSclSlope = 112;  // float
constexpr std::size_t kOffSclInter = 116;  // float
constexpr std::size_t kOffMagic = 344;     // char[4]

constexpr std::int32_t kNifti2HeaderSize = 540;

template <typename T>
T read_scalar(std::span<const std::byte> bytes, std::size_t offset,
              bool swap) {
  std::array<std::byte, sizeof(T)> raw;
  std::memcpy(raw.data(), bytes.data() + offset, sizeof(T));
  if (swap) std::reverse(raw.begin(), raw.end());
  T value;
  std::memcpy(&value, raw.data(), sizeof(T));
  return value;
}

template <typename T>
void write_scalar(std::vector<std::byte>& buffer, std::size_t offset,
                  T value) {
  // Host is expected little-endian; store explicitly to keep the format
  // little-endian everywhere.
  static_assert(std::endian::native == std::endian::little,
                "writer assumes a little-endian host");
  std::memcpy(buffer.data() + offset, &value, sizeof(T));
}

int bitpix_for(std::int16_t datatype) {
  switch (datatype) {
    case kUint8: return 8;
    case kInt16: return 16;
    case kInt32: return 32;
    case kFloat32: return 32;
    case kFloat64: return 64;
    default: return 0;
  }
}

std::vector<std::byte> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> data(size);
  if (size > 0 &&
      !in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(size)))
    fail(errc::io_failure, "read failed for " + path);
  return data;
}

bool has_gzip_prefix(std::span<const std::byte> data) {
  return data.size() >= 2 && data[0] == std::byte{0x1F} &&
         data[1] == std::byte{0x8B};
}

std::string subject_id_from(const std::string& path) {
  std::string name = std::filesystem::path(path).filename().string();
  for (const char* suffix : {".nii.gz", ".nii"}) {
    const std::size_t len = std::strlen(suffix);
    if (name.size() > len && name.compare(name.size() - len, len, suffix) == 0)
      return name.substr(0, name.size() - len);
  }
  return name;
}

// Decodes nvox scalars starting at `data`, applying byte swap and the
// slope/inter scaling. When slope is 0 or the identity (slope=1, inter=0)
// float32 values are copied bit-exactly.
std::vector<float> decode_voxels(std::span<const std::byte> data,
                                 std::int16_t datatype, bool swap,
                                 float slope, float inter,
                                 std::size_t nvox) {
  std::vector<float> out(nvox);
  const bool apply_scale = slope != 0.0f && !(slope == 1.0f && inter == 0.0f);
  auto scale = [&](double raw) -> float {
    const double value =
        apply_scale ? raw * static_cast<double>(slope) + inter : raw;
    return static_cast<float>(value);
  };
  switch (datatype) {
    case kUint8:
      for (std::size_t i = 0; i < nvox; ++i)
        out[i] = scale(static_cast<double>(
            std::to_integer<std::uint8_t>(data[i])));
      break;
    case kInt16:
      for (std::size_t i = 0; i < nvox; ++i)
        out[i] = scale(read_scalar<std::int16_t>(data, i * 2, swap));
      break;
    case kInt32:
      for (std::size_t i = 0; i < nvox; ++i)
        out[i] = scale(read_scalar<std::int32_t>(data, i * 4, swap));
      break;
    case kFloat32:
      for (std::size_t i = 0; i < nvox; ++i) {
        const float raw = read_scalar<float>(data, i * 4, swap);
        out[i] = apply_scale ? scale(raw) : raw;
      }
      break;
    case kFloat64:
      for (std::size_t i = 0; i < nvox; ++i)
        out[i] = scale(read_scalar<double>(data, i * 8, swap));
      break;
    default:
      fail(errc::unsupported_datatype,
           "datatype code " + std::to_string(datatype));
  }
  return out;
}

// Composes the fixed 348-byte header plus the 4-byte extension indicator.
std::vector<std::byte> make_header_bytes(int nx, int ny, int nz, int nt,
                                         std::array<float, 3> spacing) {
  std::vector<std::byte> buffer(kSingleFileVoxOffset, std::byte{0});
  write_scalar<std::int32_t>(buffer, kOffSizeofHdr, 348);
  const std::int16_t rank = nt > 1 ? 4 : 3;
  write_scalar<std::int16_t>(buffer, kOffDim + 0, rank);
  write_scalar<std::int16_t>(buffer, kOffDim + 2, static_cast<std::int16_t>(nx));
  write_scalar<std::int16_t>(buffer, kOffDim + 4, static_cast<std::int16_t>(ny));
  write_scalar<std::int16_t>(buffer, kOffDim + 6, static_cast<std::int16_t>(nz));
  write_scalar<std::int16_t>(buffer, kOffDim + 8,
                             static_cast<std::int16_t>(rank == 4 ? nt : 1));
  for (int d = 5; d < 8; ++d)
    write_scalar<std::int16_t>(buffer, kOffDim + 2 * d, 1);
  write_scalar<std::int16_t>(buffer, kOffDatatype, kFloat32);
  write_scalar<std::int16_t>(buffer, kOffBitpix, 32);
  write_scalar<float>(buffer, kOffPixdim + 0, 1.0f);  // qfac
  write_scalar<float>(buffer, kOffPixdim + 4, spacing[0]);
  write_scalar<float>(buffer, kOffPixdim + 8, spacing[1]);
  write_scalar<float>(buffer, kOffPixdim + 12, spacing[2]);
  write_scalar<float>(buffer, kOffPixdim + 16, 1.0f);
  write_scalar<float>(buffer, kOffVoxOffset,
                      static_cast<float>(kSingleFileVoxOffset));
  write_scalar<float>(buffer, kOffSclSlope, 1.0f);
  write_scalar<float>(buffer, kOffSclInter, 0.0f);
  buffer[kOffMagic + 0] = std::byte{'n'};
  buffer[kOffMagic + 1] = std::byte{'+'};
  buffer[kOffMagic + 2] = std::byte{'1'};
  buffer[kOffMagic + 3] = std::byte{0};
  return buffer;
}

void write_nifti(const std::vector<const Volume3D*>& volumes,
                 const std::string& path) {
  const Volume3D& first = *volumes.front();
  for (const Volume3D* v : volumes) {
    v->validate();
    if (v->nx != first.nx || v->ny != first.ny || v->nz != first.nz)
      fail(errc::grid_mismatch, "stack volumes disagree on grid size");
  }
  auto buffer = make_header_bytes(first.nx, first.ny, first.nz,
                                  static_cast<int>(volumes.size()),
                                  first.spacing);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::io_failure, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size()));
  for (const Volume3D* v : volumes)
    out.write(reinterpret_cast<const char*>(v->voxels.data()),
              static_cast<std::streamsize>(v->voxels.size() * sizeof(float)));
  if (!out) fail(errc::io_failure, "write failed for " + path);
}

}  // namespace

NiftiHeader parse_header(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderSize)
    fail(errc::too_short, "need 348 header bytes, got " +
                              std::to_string(bytes.size()));

  bool swap = false;
  const auto native = read_scalar<std::int32_t>(bytes, kOffSizeofHdr, false);
  if (native == 348) {
    swap = false;
  } else {
    const auto swapped = read_scalar<std::int32_t>(bytes, kOffSizeofHdr, true);
    if (swapped == 348) {
      swap = true;
    } else if (native == kNifti2HeaderSize || swapped == kNifti2HeaderSize) {
      fail(errc::unsupported_format, "NIfTI-2 files are not supported");
    } else {
      fail(errc::bad_sizeof_hdr,
           "sizeof_hdr is " + std::to_string(native) + ", expected 348");
    }
  }

  NiftiHeader h;
  h.sizeof_hdr = 348;
  h.byte_order = (std::endian::native == std::endian::little) == !swap
                     ? ByteOrder::little
                     : ByteOrder::big;

  std::memcpy(h.magic.data(), bytes.data() + kOffMagic, 4);
  const bool single = std::memcmp(h.magic.data(), "n+1", 4) == 0;
  const bool pair = std::memcmp(h.magic.data(), "ni1", 4) == 0;
  if (!single && !pair)
    fail(errc::bad_magic, "magic is not \"n+1\" or \"ni1\"");

  for (int i = 0; i < 8; ++i)
    h.dim[i] = read_scalar<std::int16_t>(bytes, kOffDim + 2 * i, swap);
  if (h.dim[0] < 1 || h.dim[0] > 7)
    fail(errc::bad_dims, "dim[0] = " + std::to_string(h.dim[0]));
  for (int i = 1; i <= h.dim[0]; ++i)
    if (h.dim[i] < 1)
      fail(errc::bad_dims, "dim[" + std::to_string(i) + "] = " +
                               std::to_string(h.dim[i]));

  h.datatype_code = read_scalar<std::int16_t>(bytes, kOffDatatype, swap);
  h.bitpix = read_scalar<std::int16_t>(bytes, kOffBitpix, swap);
  const int expected_bitpix = bitpix_for(h.datatype_code);
  if (expected_bitpix == 0)
    fail(errc::unsupported_datatype,
         "datatype code " + std::to_string(h.datatype_code));
  if (h.bitpix != expected_bitpix)
    fail(errc::unsupported_datatype,
         "bitpix " + std::to_string(h.bitpix) + " inconsistent with datatype " +
             std::to_string(h.datatype_code));

  for (int i = 0; i < 8; ++i)
    h.pixdim[i] = read_scalar<float>(bytes, kOffPixdim + 4 * i, swap);
  h.vox_offset = read_scalar<float>(bytes, kOffVoxOffset, swap);
  h.scl_slope = read_scalar<float>(bytes, kOffSclSlope, swap);
  h.scl_inter = read_scalar<float>(bytes, kOffSclInter, swap);
  return h;
}

ComponentStack read_stack(const std::string& path) {
  std::vector<std::byte> data = read_file(path);
  if (has_gzip_prefix(data)) data = gzip_decompress(data);

  const NiftiHeader h = parse_header(data);
  if (!h.single_file())
    fail(errc::unsupported_format,
         ".hdr/.img pairs are not supported; use single-file .nii");
  if (h.rank() != 3 && h.rank() != 4)
    fail(errc::bad_dims,
         "expected a 3D or 4D image, got rank " + std::to_string(h.rank()));

  const bool swap =
      (h.byte_order == ByteOrder::little) !=
      (std::endian::native == std::endian::little);
  const std::size_t per_volume = static_cast<std::size_t>(h.nx()) * h.ny() * h.nz();
  const std::size_t nvox = per_volume * static_cast<std::size_t>(h.nt());
  const std::size_t voxel_bytes = static_cast<std::size_t>(h.bitpix / 8);
  const auto offset = static_cast<std::size_t>(h.vox_offset);
  if (h.vox_offset < static_cast<float>(kHeaderSize))
    fail(errc::bad_dims, "vox_offset before end of header");
  if (data.size() < offset + nvox * voxel_bytes)
    fail(errc::truncated_data,
         "file holds " + std::to_string(data.size()) + " bytes, header promises " +
             std::to_string(offset + nvox * voxel_bytes));

  const std::vector<float> all = decode_voxels(
      std::span(data).subspan(offset), h.datatype_code, swap, h.scl_slope,
      h.scl_inter, nvox);
  for (float v : all)
    if (!std::isfinite(v))
      fail(errc::non_finite_data, "voxel data contains NaN or Inf: " + path);

  ComponentStack stack;
  stack.subject_id = subject_id_from(path);
  stack.source_path = path;
  stack.volumes.reserve(static_cast<std::size_t>(h.nt()));
  for (int t = 0; t < h.nt(); ++t) {
    Volume3D v;
    v.nx = h.nx();
    v.ny = h.ny();
    v.nz = h.nz();
    v.spacing = {h.pixdim[1], h.pixdim[2], h.pixdim[3]};
    v.voxels.assign(all.begin() + static_cast<std::ptrdiff_t>(t * per_volume),
                    all.begin() + static_cast<std::ptrdiff_t>((t + 1) * per_volume));
    stack.volumes.push_back(std::move(v));
  }
  return stack;
}

void write_volume(const Volume3D& volume, const std::string& path) {
  write_nifti({&volume}, path);
}

void write_stack(const ComponentStack& stack, const std::string& path) {
  if (stack.volumes.empty())
    fail(errc::empty_input, "stack has no volumes");
  std::vector<const Volume3D*> refs;
  refs.reserve(stack.volumes.size());
  for (const auto& v : stack.volumes) refs.push_back(&v);
  write_nifti(refs, path);
}

std::vector<std::byte> gzip_compress(std::span<const std::byte> data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK)
    fail(errc::io_failure, "deflateInit2 failed");
  std::vector<std::byte> out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) fail(errc::io_failure, "gzip compression failed");
  out.resize(zs.total_out);
  return out;
}

std::vector<std::byte> gzip_decompress(std::span<const std::byte> data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK)
    fail(errc::io_failure, "inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::vector<std::byte> out;
  std::array<std::byte, 1 << 16> chunk;
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      fail(errc::io_failure, "gzip stream is corrupt");
    }
    out.insert(out.end(), chunk.begin(),
               chunk.begin() + (chunk.size() - zs.avail_out));
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace rsn::nifti
