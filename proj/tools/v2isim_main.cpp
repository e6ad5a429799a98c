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

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "v2isim/commands.hpp"
#include "v2isim/config.hpp"
#include "v2isim/errors.hpp"

namespace {

v2isim::RunConfig resolve_config(const std::string& config_path,
                                 const std::optional<std::uint64_t>& seed_override) {
    v2isim::RunConfig cfg =
        config_path.empty() ? v2isim::default_config() : v2isim::load_config(config_path);
    if (seed_override) {
        cfg.mlp.seed = *seed_override;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OFDM V2I link-level simulator: channel estimation with LS, MMSE and an MLP predictor"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string out_dir = "out";
    app.add_option("--config", config_path, "INI config file (built-in defaults when omitted)");
    app.add_option("--seed", seed_override, "override the config seed");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    CLI::App* dataset = app.add_subcommand("dataset", "generate the training dataset file");
    std::string dataset_out;
    dataset->add_option("--dataset-out", dataset_out, "dataset path (default <out>/dataset.csv)");

    CLI::App* train = app.add_subcommand("train", "train the MLP on a dataset file");
    std::string train_dataset;
    std::string train_model;
    train->add_option("--dataset", train_dataset, "dataset path (default <out>/dataset.csv)");
    train->add_option("--model", train_model, "model output path (default <out>/model.txt)");

    CLI::App* sweep = app.add_subcommand("sweep", "run the BER sweep and model diagnostics");
    std::string sweep_model;
    sweep->add_option("--model", sweep_model, "trained model path (default <out>/model.txt)");

    CLI::App* gradcheck = app.add_subcommand("gradcheck", "compare analytic and numerical gradients");
    int gc_cases = 100;
    double gc_h = 1e-6;
    bool gc_corrupt = false;
    std::uint64_t gc_seed = 1;
    gradcheck->add_option("--cases", gc_cases, "number of random (network, sample) pairs")
        ->capture_default_str();
    gradcheck->add_option("--fd-step", gc_h, "finite-difference step")->capture_default_str();
    gradcheck->add_option("--gradcheck-seed", gc_seed, "gradcheck stream seed")->capture_default_str();
    gradcheck->add_flag("--corrupt", gc_corrupt, "perturb the analytic gradient (negative control)")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    const std::filesystem::path out(out_dir);
    try {
        if (dataset->parsed()) {
            const v2isim::RunConfig cfg = resolve_config(config_path, seed_override);
            const std::string path = dataset_out.empty() ? (out / "dataset.csv").string() : dataset_out;
            v2isim::cli::cmd_dataset(cfg, path);
            std::cout << "wrote " << path << "\n";
        } else if (train->parsed()) {
            const v2isim::RunConfig cfg = resolve_config(config_path, seed_override);
            const std::string ds = train_dataset.empty() ? (out / "dataset.csv").string() : train_dataset;
            const std::string model = train_model.empty() ? (out / "model.txt").string() : train_model;
            const std::string curve = (out / "mse_epoch.csv").string();
            v2isim::cli::cmd_train(cfg, ds, model, curve);
            std::cout << "wrote " << model << " and " << curve << "\n";
        } else if (sweep->parsed()) {
            const v2isim::RunConfig cfg = resolve_config(config_path, seed_override);
            std::optional<std::string> model;
            if (!sweep_model.empty()) {
                model = sweep_model;
            } else {
                const std::string fallback = (out / "model.txt").string();
                if (std::filesystem::exists(fallback)) {
                    model = fallback;
                }
            }
            v2isim::cli::cmd_sweep(cfg, model, out_dir);
            std::cout << "wrote " << (out / "ber.csv").string() << "\n";
        } else if (gradcheck->parsed()) {
            if (seed_override) {
                gc_seed = *seed_override;
            }
            const v2isim::cli::GradcheckReport report =
                v2isim::cli::cmd_gradcheck(gc_seed, gc_cases, gc_h, gc_corrupt);
            std::cout << "gradcheck: cases=" << report.cases
                      << " max_relative_error=" << report.max_relative_error
                      << " tolerance=" << v2isim::cli::kGradcheckTolerance
                      << (report.pass ? " PASS" : " FAIL") << "\n";
            if (!report.pass) {
                return v2isim::cli::kExitNumerical;
            }
        }
    } catch (const v2isim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return v2isim::cli::kExitConfig;
    } catch (const v2isim::InvalidInputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return v2isim::cli::kExitConfig;
    } catch (const v2isim::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return v2isim::cli::kExitNumerical;
    } catch (const v2isim::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return v2isim::cli::kExitIo;
    }
    return v2isim::cli::kExitOk;
}
