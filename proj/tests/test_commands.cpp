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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "v2isim/commands.hpp"
#include "v2isim/config.hpp"
#include "v2isim/csv.hpp"
#include "v2isim/errors.hpp"

using namespace v2isim;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("v2isim_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string check_message(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

RunConfig small_config() {
    RunConfig cfg = default_config();
    cfg.experiment.frames = 20;
    cfg.experiment.snr_grid_db = {5.0, 10.0};
    cfg.experiment.bits_per_point = 20000;
    cfg.mlp.epochs = 5;
    return cfg;
}

}  // namespace

TEST_CASE("config parsing and validation") {
    SUBCASE("defaults validate") {
        CHECK_NOTHROW(validate(default_config()));
    }
    SUBCASE("sections, comments and lists parse") {
        const RunConfig cfg = parse_config_text(
            "# leading comment\n"
            "[ofdm]\n"
            "num_subcarriers = 32   # trailing comment\n"
            "cp_len = 8\n"
            "[channel]\n"
            "tap_delays = 0,1,3\n"
            "tap_powers = 0.5,0.25,0.25\n"
            "tap_doppler_hz = 10, 20, 30\n"
            "[mlp]\n"
            "hidden_units = 4\n"
            "[experiment]\n"
            "snr_db = 0,10\n"
            "estimators = ls, perfect\n");
        CHECK(cfg.ofdm.num_subcarriers == 32);
        CHECK(cfg.channel.profile.tap_delays == std::vector<int>{0, 1, 3});
        CHECK(cfg.channel.profile.tap_doppler_hz == std::vector<double>{10, 20, 30});
        CHECK(cfg.mlp.hidden_units == 4);
        CHECK(cfg.experiment.estimators.size() == 2);
    }
    SUBCASE("violations name the offending key") {
        CHECK(check_message([] { parse_config_text("[ofdm]\ncp_len = 64\n"); }).find("ofdm.cp_len") !=
              std::string::npos);
        CHECK(check_message([] { parse_config_text("[ofdm]\nfoo = 1\n"); }).find("ofdm.foo") !=
              std::string::npos);
        CHECK(check_message([] {
                  parse_config_text("[channel]\ntap_powers = 0.5,0.25,0.1\n");
              }).find("channel.tap_powers") != std::string::npos);
        CHECK(check_message([] { parse_config_text("[mlp]\nlearning_rate = 1.5\n"); })
                  .find("mlp.learning_rate") != std::string::npos);
    }
    SUBCASE("structural errors") {
        CHECK_THROWS_AS(parse_config_text("[nope]\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("key = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[ofdm]\ncp_len\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[ofdm]\ncp_len = 8\ncp_len = 9\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[experiment]\nestimators = ls, magic\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[experiment]\npredict_ahead = 2\n"), ConfigError);
        CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), IoError);
    }
    SUBCASE("infinite dataset SNR is accepted") {
        const RunConfig cfg = parse_config_text("[experiment]\ndataset_snr_db = inf\n");
        CHECK(std::isinf(cfg.experiment.dataset_snr_db));
    }
}

TEST_CASE("cmd_dataset writes the documented format deterministically") {
    TempDir tmp;
    const RunConfig cfg = small_config();
    const std::string path_a = tmp.file("a.csv");
    const std::string path_b = tmp.file("b.csv");
    cli::cmd_dataset(cfg, path_a);
    cli::cmd_dataset(cfg, path_b);
    const std::string a = slurp(path_a);
    CHECK(a == slurp(path_b));

    // Header plus one row per (frame, subcarrier).
    long long rows = 0;
    bool header_found = false;
    std::istringstream in(a);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind('#', 0) == 0) {
            continue;
        }
        if (!header_found) {
            CHECK(line == "in_re,in_im,t_re,t_im,split");
            header_found = true;
            continue;
        }
        ++rows;
    }
    CHECK(rows == static_cast<long long>(cfg.experiment.frames) * cfg.ofdm.num_subcarriers);

    const cli::LoadedDataset loaded = cli::read_dataset_file(path_a);
    CHECK(loaded.samples.size() == static_cast<std::size_t>(rows));
    CHECK(loaded.provenance.snr_db == cfg.experiment.dataset_snr_db);
    CHECK(loaded.provenance.seed == cfg.mlp.seed);
}

TEST_CASE("cmd_train produces a loadable model and the epoch curve") {
    TempDir tmp;
    RunConfig cfg = small_config();
    cfg.mlp.epochs = 8;
    const std::string ds = tmp.file("dataset.csv");
    const std::string model = tmp.file("model.txt");
    const std::string curve = tmp.file("mse_epoch.csv");
    cli::cmd_dataset(cfg, ds);
    cli::cmd_train(cfg, ds, model, curve);

    const mlp::TrainedModel loaded = mlp::load_model(model);
    CHECK(loaded.net.n_h == cfg.mlp.hidden_units);

    std::istringstream in(slurp(curve));
    std::string line;
    std::getline(in, line);
    CHECK(line == "epoch,snr_db,split,nmse,is_best");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == cfg.mlp.epochs * 2);  // train and validation rows per epoch
}

TEST_CASE("cmd_train learns a toy linear-map dataset") {
    TempDir tmp;
    // Hand-written dataset: target = (0.8 in0 - 0.3 in1, 0.5 in0 + 0.2 in1).
    std::ostringstream ds;
    ds << "# snr_db=10\nin_re,in_im,t_re,t_im,split\n";
    Rng rng(5);
    for (int i = 0; i < 1200; ++i) {
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-1.0, 1.0);
        const char* split = i < 840 ? "train" : (i < 1020 ? "validation" : "test");
        ds << csv::fmt17(a) << ',' << csv::fmt17(b) << ',' << csv::fmt17(0.8 * a - 0.3 * b) << ','
           << csv::fmt17(0.5 * a + 0.2 * b) << ',' << split << '\n';
    }
    const std::string ds_path = tmp.file("toy.csv");
    csv::write_file(ds_path, ds.str());

    RunConfig cfg = default_config();
    cfg.mlp.epochs = 200;
    cfg.mlp.learning_rate = 0.05;
    const std::string curve = tmp.file("mse_epoch.csv");
    cli::cmd_train(cfg, ds_path, tmp.file("model.txt"), curve);

    // Last train-split row carries the final NMSE.
    std::istringstream in(slurp(curve));
    std::string line;
    double final_train_nmse = 1.0;
    while (std::getline(in, line)) {
        if (line.rfind("200,", 0) == 0 && line.find(",train,") != std::string::npos) {
            const auto pos = line.find(",train,") + 7;
            final_train_nmse = std::strtod(line.c_str() + pos, nullptr);
        }
    }
    CHECK(final_train_nmse < 1e-3);
}

TEST_CASE("cmd_sweep without the mlp estimator needs no model") {
    TempDir tmp;
    RunConfig cfg = small_config();
    cfg.experiment.estimators = {harness::Estimator::perfect, harness::Estimator::ls,
                                 harness::Estimator::mmse};
    cli::cmd_sweep(cfg, std::nullopt, tmp.file("out"));
    const std::string ber = slurp(tmp.file("out/ber.csv"));
    std::istringstream in(ber);
    std::string line;
    std::getline(in, line);
    CHECK(line == "snr_db,estimator,ber,total_bits,error_bits");
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        rows.push_back(line);
    }
    CHECK(rows.size() == 6);  // 2 SNR points x 3 estimators
    CHECK(std::is_sorted(rows.begin(), rows.end(), [](const std::string& a, const std::string& b) {
        const double sa = std::strtod(a.c_str(), nullptr);
        const double sb = std::strtod(b.c_str(), nullptr);
        if (sa != sb) return sa < sb;
        return a.substr(a.find(',')) < b.substr(b.find(','));
    }));
    CHECK(!fs::exists(tmp.file("out/regression.csv")));

    // Missing model with mlp requested is a config error.
    RunConfig bad = cfg;
    bad.experiment.estimators.push_back(harness::Estimator::mlp);
    CHECK_THROWS_AS(cli::cmd_sweep(bad, std::nullopt, tmp.file("out2")), ConfigError);
}

TEST_CASE("full pipeline is byte-identical across runs") {
    TempDir tmp;
    RunConfig cfg = small_config();
    for (const char* run : {"r1", "r2"}) {
        const fs::path dir = tmp.path / run;
        fs::create_directories(dir);
        cli::cmd_dataset(cfg, (dir / "dataset.csv").string());
        cli::cmd_train(cfg, (dir / "dataset.csv").string(), (dir / "model.txt").string(),
                       (dir / "mse_epoch.csv").string());
        cli::cmd_sweep(cfg, (dir / "model.txt").string(), dir.string());
    }
    for (const char* name : {"dataset.csv", "model.txt", "mse_epoch.csv", "ber.csv", "hist.csv",
                             "regression.csv", "regression_stats.csv"}) {
        CAPTURE(name);
        CHECK(slurp((tmp.path / "r1" / name).string()) == slurp((tmp.path / "r2" / name).string()));
    }
}

TEST_CASE("gradcheck command") {
    const cli::GradcheckReport ok = cli::cmd_gradcheck(1, 100, 1e-6, false);
    CHECK(ok.pass);
    CHECK(ok.max_relative_error < cli::kGradcheckTolerance);

    const cli::GradcheckReport again = cli::cmd_gradcheck(1, 100, 1e-6, false);
    CHECK(again.max_relative_error == ok.max_relative_error);

    const cli::GradcheckReport corrupted = cli::cmd_gradcheck(1, 5, 1e-6, true);
    CHECK(!corrupted.pass);

    CHECK_THROWS_AS(cli::cmd_gradcheck(1, 0, 1e-6, false), InvalidInputError);
}
