/*
 * Copyright (c) 2026 v2isim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "v2isim/channel.hpp"
#include "v2isim/estimators.hpp"
#include "v2isim/harness.hpp"
#include "v2isim/mlp.hpp"
#include "v2isim/ofdm.hpp"
#include "v2isim/rng.hpp"

using namespace v2isim;

namespace {

channel::ChannelModel bench_model() {
    channel::ChannelModel m;
    m.profile.tap_delays = {0, 2, 5};
    m.profile.tap_powers = {0.6, 0.3, 0.1};
    m.profile.tap_doppler_hz = {590.0, 535.0, 417.0};
    m.trajectory.speed_mps = 30.0;
    return m;
}

ComplexVector random_freq(int n, Rng& rng) {
    ComplexVector v(static_cast<std::size_t>(n));
    for (Complex& c : v) {
        c = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    return v;
}

void BM_OfdmModulate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    OfdmConfig cfg{n, n / 4, 2};
    Rng rng(1);
    const ComplexVector x = random_freq(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ofdm::modulate(x, cfg));
    }
}
BENCHMARK(BM_OfdmModulate)->Arg(64)->Arg(256)->Arg(1024);

void BM_OfdmRoundTrip(benchmark::State& state) {
    OfdmConfig cfg{64, 16, 2};
    Rng rng(1);
    const ComplexVector x = random_freq(64, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ofdm::demodulate(ofdm::modulate(x, cfg), cfg));
    }
}
BENCHMARK(BM_OfdmRoundTrip);

void BM_QamMapDemap(benchmark::State& state) {
    Rng rng(2);
    std::vector<std::uint8_t> bits(2048);
    for (auto& b : bits) {
        b = static_cast<std::uint8_t>(rng.next_u64() & 1);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ofdm::qam_demap(ofdm::qam_map(bits, 2)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(bits.size()));
}
BENCHMARK(BM_QamMapDemap);

void BM_ChannelStep(benchmark::State& state) {
    Rng rng(3);
    channel::TrajectoryRealizer realizer(bench_model(), 64, rng);
    long step = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(realizer.at_step(step++));
    }
}
BENCHMARK(BM_ChannelStep);

void BM_LsEstimate(benchmark::State& state) {
    Rng rng(4);
    est::PilotObservation obs;
    obs.pilot = ofdm::generate_pilot(OfdmConfig{64, 16, 2}, 1);
    obs.received = random_freq(64, rng);
    obs.noise_variance = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(est::ls_estimate(obs));
    }
}
BENCHMARK(BM_LsEstimate);

void BM_MmseEstimate(benchmark::State& state) {
    Rng rng(5);
    OfdmConfig cfg{64, 16, 2};
    channel::TrajectoryRealizer realizer(bench_model(), 64, rng);
    std::vector<ComplexVector> gs;
    for (int s = 0; s < 64; ++s) {
        gs.push_back(est::time_domain_channel(channel::effective_cfr(realizer.at_step(s))));
    }
    const est::MmseEstimator mmse(est::sample_covariance(gs), ofdm::generate_pilot(cfg, 1));
    const ComplexVector y = random_freq(64, rng);
    mmse.estimate(y, 0.1);  // build the weights outside the loop
    for (auto _ : state) {
        benchmark::DoNotOptimize(mmse.estimate(y, 0.1));
    }
}
BENCHMARK(BM_MmseEstimate);

void BM_MlpForward(benchmark::State& state) {
    const mlp::MlpNetwork net = mlp::init_network(10, 1, 0.5);
    const std::array<double, 2> input{0.3, -0.8};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mlp::forward(net, input));
    }
}
BENCHMARK(BM_MlpForward);

void BM_MlpSgdStep(benchmark::State& state) {
    mlp::MlpNetwork net = mlp::init_network(10, 1, 0.5);
    mlp::TrainingSample s;
    s.input = {0.3, -0.8};
    s.target = {0.1, 0.4};
    for (auto _ : state) {
        mlp::backward(net, s, 1e-4);
        benchmark::DoNotOptimize(net.w1.data());
    }
}
BENCHMARK(BM_MlpSgdStep);

void BM_DatasetBuild(benchmark::State& state) {
    OfdmConfig cfg{64, 16, 2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(harness::build_dataset(bench_model(), cfg, 10.0, 50, 0, 1));
    }
}
BENCHMARK(BM_DatasetBuild);

}  // namespace

BENCHMARK_MAIN();
