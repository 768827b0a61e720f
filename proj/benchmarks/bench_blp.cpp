#include <benchmark/benchmark.h>

#include <random>

#include "blp/eval.hpp"
#include "blp/pinpoint.hpp"
#include "blp/pipeline.hpp"
#include "blp/predictor.hpp"
#include "blp/synth.hpp"

namespace {

using namespace blp;

std::vector<double> uniform_track(int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(m);
    for (double& x : p) {
        x = u(rng);
    }
    return p;
}

void BM_PinpointInOut(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const UnitGrid grid(TemporalSegment(0, 100), m);
    const auto tracks = ProbabilityTracks::in_out(uniform_track(m, 1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pinpoint_in_out(tracks, grid));
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_PinpointInOut)->RangeMultiplier(2)->Range(4, 256)->Complexity();

void BM_PinpointInOutExhaustive(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const UnitGrid grid(TemporalSegment(0, 100), m);
    const auto tracks = ProbabilityTracks::in_out(uniform_track(m, 1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pinpoint_in_out_exhaustive(tracks, grid));
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_PinpointInOutExhaustive)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_PinpointBoundary(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const UnitGrid grid(TemporalSegment(0, 100), m);
    const auto tracks = ProbabilityTracks::boundary(uniform_track(m, 2), uniform_track(m, 3));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pinpoint_boundary(tracks, grid));
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_PinpointBoundary)->RangeMultiplier(2)->Range(4, 256)->Complexity();

void BM_ExtractFeatures(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    SynthConfig sc;
    sc.num_videos = 1;
    const auto video = generate_dataset(sc).front();
    const UnitGrid grid(TemporalSegment(0, video.length()), m);
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_features(video.signal, grid));
    }
}
BENCHMARK(BM_ExtractFeatures)->Arg(16)->Arg(32)->Arg(64);

void BM_SoftNms(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Detection> dets(n);
    for (auto& d : dets) {
        const double start = 1000.0 * u(rng);
        d.video_id = "v";
        d.segment = TemporalSegment(start, start + 20.0 + 100.0 * u(rng));
        d.label = ClassLabel{1 + static_cast<int>(3 * u(rng))};
        d.score = u(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(nms(dets, NmsConfig{}));
    }
}
BENCHMARK(BM_SoftNms)->Arg(64)->Arg(256)->Arg(1024);

void BM_AveragePrecision(benchmark::State& state) {
    SynthConfig sc;
    sc.num_videos = 50;
    const auto videos = generate_dataset(sc);
    const auto gts = ground_truth_of(videos);
    std::vector<Detection> dets;
    ProposalConfig pc;
    for (const auto& v : videos) {
        for (const auto& p : generate_proposals(v, pc)) {
            dets.push_back({v.id, p, ClassLabel{1}, 0.5, p, 0.0, dets.size()});
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(average_precision(dets, gts, 0.5));
    }
}
BENCHMARK(BM_AveragePrecision);

}  // namespace

BENCHMARK_MAIN();
