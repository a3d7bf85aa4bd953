#include <benchmark/benchmark.h>

#include <cstdio>
#include <filesystem>

#include "rsn/nifti_io.hpp"
#include "rsn/rng.hpp"
#include "rsn/volume_ops.hpp"

// Data-path costs: parsing, projections, standardization.

namespace {

rsn::Volume3D random_volume(int nx, int ny, int nz) {
  rsn::Rng rng(7);
  rsn::Volume3D v;
  v.nx = nx;
  v.ny = ny;
  v.nz = nz;
  v.voxels.resize(v.voxel_count());
  for (float& value : v.voxels) value = static_cast<float>(rng.normal());
  return v;
}

void MipPaperGrid(benchmark::State& state) {
  const rsn::Volume3D v = random_volume(45, 54, 45);
  for (auto _ : state) {
    rsn::Image2D axial = rsn::mip(v, rsn::Axis::z);
    benchmark::DoNotOptimize(axial);
  }
}
BENCHMARK(MipPaperGrid);

void RgbCompositePaperGrid(benchmark::State& state) {
  const rsn::Volume3D v = random_volume(45, 54, 45);
  for (auto _ : state) {
    rsn::RgbImage image = rsn::rgb_composite(v);
    benchmark::DoNotOptimize(image);
  }
}
BENCHMARK(RgbCompositePaperGrid);

void StandardizePaperVector(benchmark::State& state) {
  const rsn::Volume3D v = random_volume(45, 54, 45);
  const rsn::FeatureVector f = rsn::flatten(v);
  for (auto _ : state) {
    rsn::FeatureVector out = rsn::standardize(f);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(StandardizePaperVector);

void ReadStackPaperGrid(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / "rsn_bench";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "bench.nii").string();
  rsn::ComponentStack stack;
  stack.subject_id = "bench";
  for (int c = 0; c < 10; ++c) stack.volumes.push_back(random_volume(45, 54, 45));
  rsn::nifti::write_stack(stack, path);
  for (auto _ : state) {
    rsn::ComponentStack loaded = rsn::nifti::read_stack(path);
    benchmark::DoNotOptimize(loaded);
  }
  state.SetBytesProcessed(state.iterations() * 10 * 45 * 54 * 45 * 4);
}
BENCHMARK(ReadStackPaperGrid)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
