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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "v2isim/errors.hpp"
#include "v2isim/mlp.hpp"
#include "v2isim/rng.hpp"

using namespace v2isim;
using doctest::Approx;

namespace {

mlp::TrainingSample random_sample(Rng& rng, double range = 2.0) {
    mlp::TrainingSample s;
    for (int k = 0; k < 2; ++k) {
        s.input[static_cast<std::size_t>(k)] = rng.uniform(-range, range);
        s.target[static_cast<std::size_t>(k)] = rng.uniform(-range, range);
    }
    return s;
}

// target = A * input, a fixed well-conditioned linear map
std::vector<mlp::TrainingSample> linear_map_dataset(std::size_t count, Rng& rng) {
    std::vector<mlp::TrainingSample> out(count);
    for (mlp::TrainingSample& s : out) {
        s.input = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        s.target = {0.8 * s.input[0] - 0.3 * s.input[1], 0.5 * s.input[0] + 0.2 * s.input[1]};
    }
    return out;
}

}  // namespace

TEST_CASE("sigmoid identities") {
    CHECK(mlp::sigmoid(0.0) == Approx(0.5).epsilon(1e-15));
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double z = rng.uniform(-10.0, 10.0);
        CHECK(std::abs(mlp::sigmoid(z) + mlp::sigmoid(-z) - 1.0) < 1e-12);
        // derivative identity phi' = phi (1 - phi), checked by central differences
        const double h = 1e-6;
        const double fd = (mlp::sigmoid(z + h) - mlp::sigmoid(z - h)) / (2.0 * h);
        CHECK(fd == Approx(mlp::sigmoid(z) * (1.0 - mlp::sigmoid(z))).epsilon(1e-7));
    }
}

TEST_CASE("init_network determinism and shapes") {
    const mlp::MlpNetwork a = mlp::init_network(10, 7, 0.5);
    const mlp::MlpNetwork b = mlp::init_network(10, 7, 0.5);
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);
    CHECK(a.w1.size() == 20);  // 2 x 10
    CHECK(a.w2.size() == 20);  // 10 x 2
    for (double w : a.w1) {
        CHECK(std::abs(w) <= 0.5);
    }
    CHECK_THROWS_AS(mlp::init_network(0, 1, 0.5), InvalidInputError);
}

TEST_CASE("zero-initialized network has the degenerate forward pass") {
    const mlp::MlpNetwork net = mlp::init_network(10, 1, 0.0);
    const mlp::Activations act = mlp::forward(net, {1.7, -0.3});
    for (double h : act.hidden) {
        CHECK(h == Approx(0.5).epsilon(1e-15));
    }
    CHECK(act.output[0] == 0.0);
    CHECK(act.output[1] == 0.0);
}

TEST_CASE("forward pass hand evaluation with one hidden unit") {
    mlp::MlpNetwork net;
    net.n_h = 1;
    net.w1 = {1.0, 0.0};  // input 0 -> hidden with weight 1, input 1 -> hidden with weight 0
    net.w2 = {2.0, 0.0};  // hidden -> output 0 with weight 2
    const mlp::Activations act = mlp::forward(net, {0.0, 123.0});
    CHECK(act.hidden[0] == Approx(0.5).epsilon(1e-15));
    CHECK(act.output[0] == Approx(1.0).epsilon(1e-15));
    CHECK(act.output[1] == 0.0);
}

TEST_CASE("mse_cost arithmetic") {
    CHECK(mlp::mse_cost({1.0, -2.0}, {1.0, -2.0}) == 0.0);
    CHECK(mlp::mse_cost({0.0, 0.0}, {1.0, 0.0}) == Approx(0.5).epsilon(1e-15));
    CHECK(mlp::mse_cost({0.0, -1.0}, {1.0, 1.0}) == Approx(2.5).epsilon(1e-15));
}

TEST_CASE("backward leaves a zero-error network unchanged") {
    Rng rng(5);
    mlp::MlpNetwork net = mlp::init_network(4, 9, 0.5);
    mlp::TrainingSample s;
    s.input = {0.4, -1.2};
    s.target = mlp::forward(net, s.input).output;
    const mlp::MlpNetwork before = net;
    mlp::backward(net, s, 0.1);
    CHECK(net.w1 == before.w1);
    CHECK(net.w2 == before.w2);
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(11);
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        const int n_h = 1 + static_cast<int>(rng.below(16));
        const mlp::MlpNetwork net = mlp::init_network(n_h, rng.next_u64(), 0.5);
        const mlp::TrainingSample s = random_sample(rng);
        worst = std::max(worst, mlp::max_relative_gradient_error(net, s, 1e-6));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("corrupted analytic gradient is detected") {
    Rng rng(13);
    const mlp::MlpNetwork net = mlp::init_network(6, 2, 0.5);
    const mlp::TrainingSample s = random_sample(rng);
    CHECK(mlp::max_relative_gradient_error(net, s, 1e-6, 0.05) > 1e-6);
}

TEST_CASE("numerical gradient specifics") {
    Rng rng(17);
    SUBCASE("zero-error sample has vanishing gradients") {
        mlp::MlpNetwork net = mlp::init_network(5, 3, 0.5);
        mlp::TrainingSample s;
        s.input = {0.2, 0.7};
        s.target = mlp::forward(net, s.input).output;
        const mlp::Gradients g = mlp::numerical_gradient(net, s, 1e-6);
        for (double v : g.w1) {
            CHECK(std::abs(v) < 1e-8);
        }
        for (double v : g.w2) {
            CHECK(std::abs(v) < 1e-8);
        }
    }
    SUBCASE("central differences are exact for the quadratic output weights") {
        // The cost is exactly quadratic in each w2 entry, so the central
        // difference equals the analytic derivative up to rounding.
        const mlp::MlpNetwork net = mlp::init_network(4, 21, 0.5);
        const mlp::TrainingSample s = random_sample(rng);
        const mlp::Gradients analytic = mlp::gradient(net, s);
        const mlp::Gradients numeric = mlp::numerical_gradient(net, s, 1e-4);
        for (std::size_t i = 0; i < analytic.w2.size(); ++i) {
            CHECK(numeric.w2[i] == Approx(analytic.w2[i]).epsilon(1e-9).scale(1.0));
        }
    }
    SUBCASE("non-positive h is rejected") {
        const mlp::MlpNetwork net = mlp::init_network(2, 1, 0.5);
        CHECK_THROWS_AS(mlp::numerical_gradient(net, mlp::TrainingSample{}, 0.0), InvalidInputError);
    }
}

TEST_CASE("one small step decreases the cost") {
    Rng rng(19);
    for (int c = 0; c < 100; ++c) {
        mlp::MlpNetwork net = mlp::init_network(1 + static_cast<int>(rng.below(12)), rng.next_u64(), 0.5);
        const mlp::TrainingSample s = random_sample(rng);
        const double before = mlp::mse_cost(mlp::forward(net, s.input).output, s.target);
        mlp::backward(net, s, 1e-3);
        const double after = mlp::mse_cost(mlp::forward(net, s.input).output, s.target);
        CHECK(after <= before);
        if (before > 1e-10) {
            CHECK(after < before);
        }
    }
}

TEST_CASE("train contract") {
    Rng rng(23);
    const std::vector<mlp::TrainingSample> data = linear_map_dataset(512, rng);
    const std::vector<mlp::TrainingSample> val(data.begin() + 400, data.end());
    const std::vector<mlp::TrainingSample> train_set(data.begin(), data.begin() + 400);

    SUBCASE("zero epochs is the identity") {
        const mlp::MlpNetwork net = mlp::init_network(10, 1, 0.5);
        mlp::TrainConfig cfg;
        cfg.epochs = 0;
        const mlp::TrainResult res = mlp::train(net, train_set, val, cfg);
        CHECK(res.records.empty());
        CHECK(res.final_net.w1 == net.w1);
        CHECK(res.final_net.w2 == net.w2);
    }
    SUBCASE("training is deterministic in the seed") {
        mlp::TrainConfig cfg;
        cfg.epochs = 5;
        cfg.learning_rate = 0.05;
        cfg.seed = 77;
        const mlp::MlpNetwork net = mlp::init_network(10, 77, 0.5);
        const mlp::TrainResult a = mlp::train(net, train_set, val, cfg);
        const mlp::TrainResult b = mlp::train(net, train_set, val, cfg);
        CHECK(a.final_net.w1 == b.final_net.w1);
        CHECK(a.final_net.w2 == b.final_net.w2);
        CHECK(a.best_epoch == b.best_epoch);
    }
    SUBCASE("learns a fixed linear map to below 1e-3 MSE") {
        mlp::TrainConfig cfg;
        cfg.epochs = 200;
        cfg.learning_rate = 0.05;
        cfg.seed = 3;
        const mlp::MlpNetwork net = mlp::init_network(10, 3, 0.5);
        const mlp::TrainResult res = mlp::train(net, train_set, val, cfg);
        REQUIRE(!res.records.empty());
        CHECK(res.records.back().train_mse < 1e-3);
        CHECK(!res.diverged);
    }
    SUBCASE("descent trend at a moderate learning rate") {
        mlp::TrainConfig cfg;
        cfg.epochs = 20;
        cfg.learning_rate = 0.01;
        cfg.seed = 5;
        const mlp::MlpNetwork net = mlp::init_network(10, 5, 0.5);
        const mlp::TrainResult res = mlp::train(net, train_set, val, cfg);
        REQUIRE(res.records.size() == 20);
        CHECK(res.records.back().train_mse <= res.records.front().train_mse);
    }
    SUBCASE("zero-error dataset is a fixed point") {
        mlp::MlpNetwork net = mlp::init_network(6, 9, 0.5);
        std::vector<mlp::TrainingSample> fixed;
        Rng gen(31);
        for (int i = 0; i < 32; ++i) {
            mlp::TrainingSample s;
            s.input = {gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 1.0)};
            s.target = mlp::forward(net, s.input).output;
            fixed.push_back(s);
        }
        mlp::TrainConfig cfg;
        cfg.epochs = 3;
        const mlp::TrainResult res = mlp::train(net, fixed, {}, cfg);
        CHECK(res.final_net.w1 == net.w1);
        CHECK(res.final_net.w2 == net.w2);
    }
    SUBCASE("divergence aborts with the last finite state") {
        std::vector<mlp::TrainingSample> hostile = train_set;
        for (mlp::TrainingSample& s : hostile) {
            s.target = {1e200, -1e200};
        }
        mlp::TrainConfig cfg;
        cfg.epochs = 10;
        cfg.learning_rate = 0.9;
        const mlp::MlpNetwork net = mlp::init_network(10, 1, 0.5);
        const mlp::TrainResult res = mlp::train(net, hostile, {}, cfg);
        CHECK(res.diverged);
        for (double w : res.final_net.w1) {
            CHECK(std::isfinite(w));
        }
        for (double w : res.final_net.w2) {
            CHECK(std::isfinite(w));
        }
    }
}

TEST_CASE("fit_model standardizes and keeps the best validation epoch") {
    Rng rng(37);
    std::vector<mlp::TrainingSample> data = linear_map_dataset(600, rng);
    // Shift and scale the raw features so standardization has work to do.
    for (mlp::TrainingSample& s : data) {
        s.input = {3.0 * s.input[0] + 10.0, 0.5 * s.input[1] - 4.0};
        s.target = {2.0 * s.target[0] - 1.0, s.target[1] + 0.25};
    }
    const std::vector<mlp::TrainingSample> val(data.begin() + 500, data.end());
    const std::vector<mlp::TrainingSample> train_set(data.begin(), data.begin() + 500);

    mlp::TrainConfig cfg;
    cfg.epochs = 60;
    cfg.learning_rate = 0.05;
    cfg.seed = 11;
    const mlp::FitResult fit = mlp::fit_model(train_set, val, 10, cfg);
    CHECK(!fit.diverged);
    CHECK(fit.best_epoch >= 1);
    REQUIRE(fit.records.size() == 60);

    int flagged = 0;
    for (const mlp::EpochRecord& rec : fit.records) {
        if (rec.is_best) {
            ++flagged;
            CHECK(rec.epoch == fit.best_epoch);
        }
    }
    CHECK(flagged == 1);

    double err = 0.0;
    double ref = 0.0;
    for (const mlp::TrainingSample& s : val) {
        const auto out = fit.model.predict(s.input);
        err += (out[0] - s.target[0]) * (out[0] - s.target[0]) +
               (out[1] - s.target[1]) * (out[1] - s.target[1]);
        ref += s.target[0] * s.target[0] + s.target[1] * s.target[1];
    }
    CHECK(err / ref < 1e-2);
}

TEST_CASE("model persistence round trip is value exact") {
    Rng rng(41);
    mlp::TrainedModel model;
    model.net = mlp::init_network(10, 13, 0.5);
    model.input_scale.mean = {0.123456789012345, -7.5};
    model.input_scale.stddev = {2.25, 0.017};
    model.target_scale.mean = {-1e-5, 3.0};
    model.target_scale.stddev = {1.0, 42.0};

    const std::string path = (std::filesystem::temp_directory_path() / "v2isim_model_test.txt").string();
    mlp::save_model(model, path);
    const mlp::TrainedModel loaded = mlp::load_model(path);
    CHECK(loaded.net.n_h == model.net.n_h);
    CHECK(loaded.net.w1 == model.net.w1);
    CHECK(loaded.net.w2 == model.net.w2);
    CHECK(loaded.input_scale.mean == model.input_scale.mean);
    CHECK(loaded.input_scale.stddev == model.input_scale.stddev);
    CHECK(loaded.target_scale.mean == model.target_scale.mean);
    CHECK(loaded.target_scale.stddev == model.target_scale.stddev);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(mlp::load_model("/nonexistent/v2isim-model.txt"), IoError);
}
