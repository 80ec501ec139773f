/* Copyright 2026 The Flowtrack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Serial reference kernels against their OpenMP counterparts on a 4K frame.
// Thread count follows OMP_NUM_THREADS.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "flowtrack/vision.h"

namespace flowtrack {
namespace {

constexpr int kWidth = 3840;
constexpr int kHeight = 2160;

const ImageBuffer& Rgb() {
  static const ImageBuffer img = [] {
    ImageBuffer out(kWidth, kHeight, 3);
    std::mt19937 rng(1);
    for (auto& v : out.data()) v = static_cast<std::uint8_t>(rng() & 0xff);
    return out;
  }();
  return img;
}

const ImageBuffer& Gray() {
  static const ImageBuffer img = serial::ToGrayscale(Rgb());
  return img;
}

// Second frame: the first shifted by (3, 2) pixels.
const ImageBuffer& ShiftedGray() {
  static const ImageBuffer img = [] {
    const ImageBuffer& g = Gray();
    ImageBuffer out(kWidth, kHeight, 1);
    for (int y = 0; y < kHeight; ++y) {
      for (int x = 0; x < kWidth; ++x) {
        out.at(x, y) = g.at(std::max(x - 3, 0), std::max(y - 2, 0));
      }
    }
    return out;
  }();
  return img;
}

std::vector<Vec2> Points(int n) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> ux(64, kWidth - 64), uy(64, kHeight - 64);
  std::vector<Vec2> pts(n);
  for (auto& p : pts) p = {ux(rng), uy(rng)};
  return pts;
}

const Pyramid& PrevPyramid() {
  static const Pyramid p = BuildPyramid(Gray(), 5);
  return p;
}

const Pyramid& NextPyramid() {
  static const Pyramid p = BuildPyramid(ShiftedGray(), 5);
  return p;
}

template <bool kParallel>
void BM_Grayscale(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(kParallel ? ToGrayscale(Rgb()) : serial::ToGrayscale(Rgb()));
  }
}

template <bool kParallel>
void BM_Pyramid(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(kParallel ? BuildPyramid(Gray(), 5)
                                       : serial::BuildPyramid(Gray(), 5));
  }
}

template <bool kParallel>
void BM_Harris(benchmark::State& state) {
  const IntRect region{1000, 600, 640, 640};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kParallel ? HarrisResponse(Gray(), region, 0.04)
                                       : serial::HarrisResponse(Gray(), region, 0.04));
  }
}

template <bool kParallel>
void BM_Lk(benchmark::State& state) {
  const Pyramid& prev = PrevPyramid();
  const Pyramid& next = NextPyramid();
  const auto pts = Points(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kParallel ? TrackPointsLk(prev, next, pts, LkParams{})
                                       : serial::TrackPointsLk(prev, next, pts, LkParams{}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_Grayscale<false>)->Name("Grayscale/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Grayscale<true>)->Name("Grayscale/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pyramid<false>)->Name("Pyramid/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pyramid<true>)->Name("Pyramid/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Harris<false>)->Name("Harris/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Harris<true>)->Name("Harris/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lk<false>)->Name("Lk/serial")->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lk<true>)->Name("Lk/omp")->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace flowtrack

int main(int argc, char** argv) {
  // Build the shared inputs before any timing starts.
  flowtrack::PrevPyramid();
  flowtrack::NextPyramid();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
