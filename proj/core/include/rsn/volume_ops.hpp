#pragma once

#include <string>
#include <vector>

#include "rsn/volume.hpp"

namespace rsn {

// Identifies where a feature vector came from.
struct SampleSource {
  std::string subject_id;
  int component_index = -1;
};

// Flattened model input. Length is nx*ny*nz of the originating grid.
struct FeatureVector {
  std::vector<float> values;
  SampleSource source;
};

// Grayscale image, row-major: pixels[y*width + x].
struct Image2D {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  float at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  float& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

// Three channels of identical shape, values in [0,1].
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<float> r, g, b;
};

enum class Axis { x, y, z };

// values[i] = voxels[i] under the x-fastest ordering.
FeatureVector flatten(const Volume3D& volume);

// (f - mean) / (std + 1e-8) with the population std; a constant input
// maps to all zeros. Statistics are accumulated in double.
FeatureVector standardize(const FeatureVector& f);
void standardize_in_place(std::vector<float>& values);

// Maximum intensity projection.
//   axis z (axial):    P(x,y) = max over z, width=nx, height=ny
//   axis x (sagittal): P(y,z) = max over x, width=ny, height=nz
//   axis y (coronal):  P(x,z) = max over y, width=nx, height=nz
Image2D mip(const Volume3D& volume, Axis axis);

// Axial -> red, sagittal -> green, coronal -> blue. Each projection is
// independently max-normalized to [0,1] (an all-zero projection stays
// zero), then zero-padded centered to the common bounding size.
RgbImage rgb_composite(const Volume3D& volume);

// Binary P6, maxval 255, quantized round-half-up, top row first.
void write_ppm(const RgbImage& image, const std::string& path);
// Same container with r=g=b; used for grayscale heatmaps.
void write_ppm_gray(const Image2D& image, const std::string& path);

}  // namespace rsn
