#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "fishpose/remap.hpp"
#include "fishpose/sphere.hpp"
#include "fishpose/viewpoint.hpp"

using namespace fishpose;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

FisheyeIntrinsics sensorIntrinsics() {
    return FisheyeIntrinsics(600.0, 1224.0, 1024.0, 2448, 2048, 185.0 * kDeg);
}

ImageBuffer noiseImage(int w, int h) {
    ImageBuffer img(w, h, 1);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> val(0.0f, 255.0f);
    for (auto& v : img.data) {
        v = val(rng);
    }
    return img;
}

void BM_BuildPerspectiveGrid(benchmark::State& state) {
    const FisheyeIntrinsics K = sensorIntrinsics();
    const VirtualCamera vcam;
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        SampleGrid grid = buildPerspectiveGrid({0.2, 0.4}, vcam, K, workers);
        benchmark::DoNotOptimize(grid.src_u.data());
    }
}
BENCHMARK(BM_BuildPerspectiveGrid)->Arg(1)->Arg(4)->Arg(8);

void BM_RemapCachedGrid(benchmark::State& state) {
    const FisheyeIntrinsics K = sensorIntrinsics();
    const VirtualCamera vcam;
    const SampleGrid grid = buildPerspectiveGrid({0.2, 0.4}, vcam, K, 4);
    const ImageBuffer src = noiseImage(K.width, K.height);
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        ImageBuffer out = remapImage(src, grid, 0.0f, workers);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(BM_RemapCachedGrid)->Arg(1)->Arg(4)->Arg(8);

void BM_GnomonicForward(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-0.8, 0.8);
    const TangentPoint t0{0.3, -0.4};
    for (auto _ : state) {
        const TangentPlaneCoord p = gnomonicForward({d(rng) * 0.5, -0.4 + d(rng) * 0.5}, t0);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_GnomonicForward);

void BM_ApparentOrientation(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto _ : state) {
        const UnitQuaternion q = apparentOrientation(
            UnitQuaternion::identity(), Vec3{d(rng), d(rng), 2.0});
        benchmark::DoNotOptimize(q);
    }
}
BENCHMARK(BM_ApparentOrientation);

} // namespace

BENCHMARK_MAIN();
