#include "rsn/volume_ops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "rsn/error.hpp"

namespace rsn {
namespace {

void normalize_to_unit_max(Image2D& image) {
  float max_value = 0.0f;
  for (float p : image.pixels) max_value = std::max(max_value, p);
  if (max_value > 0.0f)
    for (float& p : image.pixels) p /= max_value;
}

// Copies src into a width x height canvas, centered (offsets rounded down).
void paste_centered(const Image2D& src, int width, int height,
                    std::vector<float>& dst) {
  const int off_x = (width - src.width) / 2;
  const int off_y = (height - src.height) / 2;
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x)
      dst[static_cast<std::size_t>(y + off_y) * width + (x + off_x)] =
          src.at(x, y);
}

unsigned char quantize(float v) {
  const float clamped = std::clamp(v, 0.0f, 1.0f);
  return static_cast<unsigned char>(std::lround(255.0f * clamped));
}

void write_p6(int width, int height, const std::vector<unsigned char>& rgb,
              const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::io_failure, "cannot create " + path);
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()),
            static_cast<std::streamsize>(rgb.size()));
  if (!out) fail(errc::io_failure, "write failed for " + path);
}

}  // namespace

FeatureVector flatten(const Volume3D& volume) {
  volume.validate();
  FeatureVector f;
  f.values = volume.voxels;
  return f;
}

void standardize_in_place(std::vector<float>& values) {
  if (values.empty()) return;
  double sum = 0.0;
  for (float v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (float v : values) {
    const double d = v - mean;
    sq += d * d;
  }
  const double std_dev = std::sqrt(sq / static_cast<double>(values.size()));
  const double scale = 1.0 / (std_dev + 1e-8);
  for (float& v : values)
    v = static_cast<float>((v - mean) * scale);
}

FeatureVector standardize(const FeatureVector& f) {
  FeatureVector out = f;
  standardize_in_place(out.values);
  return out;
}

Image2D mip(const Volume3D& volume, Axis axis) {
  volume.validate();
  Image2D image;
  switch (axis) {
    case Axis::z:
      image.width = volume.nx;
      image.height = volume.ny;
      image.pixels.assign(static_cast<std::size_t>(image.width) * image.height,
                          -std::numeric_limits<float>::infinity());
      for (int z = 0; z < volume.nz; ++z)
        for (int y = 0; y < volume.ny; ++y)
          for (int x = 0; x < volume.nx; ++x)
            image.at(x, y) = std::max(image.at(x, y), volume.at(x, y, z));
      break;
    case Axis::x:
      image.width = volume.ny;
      image.height = volume.nz;
      image.pixels.assign(static_cast<std::size_t>(image.width) * image.height,
                          -std::numeric_limits<float>::infinity());
      for (int z = 0; z < volume.nz; ++z)
        for (int y = 0; y < volume.ny; ++y)
          for (int x = 0; x < volume.nx; ++x)
            image.at(y, z) = std::max(image.at(y, z), volume.at(x, y, z));
      break;
    case Axis::y:
      image.width = volume.nx;
      image.height = volume.nz;
      image.pixels.assign(static_cast<std::size_t>(image.width) * image.height,
                          -std::numeric_limits<float>::infinity());
      for (int z = 0; z < volume.nz; ++z)
        for (int y = 0; y < volume.ny; ++y)
          for (int x = 0; x < volume.nx; ++x)
            image.at(x, z) = std::max(image.at(x, z), volume.at(x, y, z));
      break;
  }
  return image;
}

RgbImage rgb_composite(const Volume3D& volume) {
  Image2D axial = mip(volume, Axis::z);
  Image2D sagittal = mip(volume, Axis::x);
  Image2D coronal = mip(volume, Axis::y);
  normalize_to_unit_max(axial);
  normalize_to_unit_max(sagittal);
  normalize_to_unit_max(coronal);

  RgbImage out;
  out.width = std::max({axial.width, sagittal.width, coronal.width});
  out.height = std::max({axial.height, sagittal.height, coronal.height});
  const std::size_t count =
      static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
  out.r.assign(count, 0.0f);
  out.g.assign(count, 0.0f);
  out.b.assign(count, 0.0f);
  paste_centered(axial, out.width, out.height, out.r);
  paste_centered(sagittal, out.width, out.height, out.g);
  paste_centered(coronal, out.width, out.height, out.b);
  return out;
}

void write_ppm(const RgbImage& image, const std::string& path) {
  const std::size_t count =
      static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
  if (image.r.size() != count || image.g.size() != count ||
      image.b.size() != count)
    fail(errc::dimension_mismatch, "RGB channel sizes disagree");
  std::vector<unsigned char> rgb(count * 3);
  for (std::size_t i = 0; i < count; ++i) {
    rgb[3 * i + 0] = quantize(image.r[i]);
    rgb[3 * i + 1] = quantize(image.g[i]);
    rgb[3 * i + 2] = quantize(image.b[i]);
  }
  write_p6(image.width, image.height, rgb, path);
}

void write_ppm_gray(const Image2D& image, const std::string& path) {
  const std::size_t count =
      static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
  if (image.pixels.size() != count)
    fail(errc::dimension_mismatch, "pixel count does not match dimensions");
  std::vector<unsigned char> rgb(count * 3);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char value = quantize(image.pixels[i]);
    rgb[3 * i + 0] = value;
    rgb[3 * i + 1] = value;
    rgb[3 * i + 2] = value;
  }
  write_p6(image.width, image.height, rgb, path);
}

}  // namespace rsn
