// driftlab: numerical lab for drift-free chunked latent generation.
// Subcommands: check | roundtrip-bench | train | rollout | ablate
// Exit codes: 0 ok, 2 config error, 3 numeric error, 4 check failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "driftlab/lab.hpp"

namespace {

driftlab::ExperimentConfig load_config(const std::string& path, uint64_t seed_override,
                                       bool seed_given) {
    driftlab::ExperimentConfig cfg;
    if (!path.empty()) cfg = driftlab::ExperimentConfig::load(path);
    if (seed_given) {
        cfg.seed = seed_override;
        cfg.validate();
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driftlab: chunked latent generation lab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::string checkpoint_path;
    uint64_t seed_override = 0;
    bool parallel = false;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed_override, "master seed override");
    app.add_flag("--parallel", parallel, "run independent presets concurrently");

    auto* check = app.add_subcommand("check", "run the full invariant suite");
    auto* bench = app.add_subcommand("roundtrip-bench", "codec round-trip error curves");
    auto* train_cmd = app.add_subcommand("train", "two-stage training, writes checkpoint + loss CSV");
    auto* rollout_cmd = app.add_subcommand("rollout", "chunk-wise rollout with drift report");
    rollout_cmd->add_option("--checkpoint", checkpoint_path, "trained field checkpoint");
    auto* ablate = app.add_subcommand("ablate", "four-preset ablation table");

    CLI11_PARSE(app, argc, argv);

    try {
        const bool seed_given = app.count("--seed") > 0;
        const driftlab::ExperimentConfig cfg = load_config(config_path, seed_override, seed_given);

        if (check->parsed()) {
            return driftlab::lab::cmd_check(cfg, std::cout);
        }
        if (bench->parsed()) {
            const auto outputs = driftlab::lab::cmd_roundtrip_bench(cfg, out_dir);
            std::cout << "round-trip curve written to " << outputs.csv_path << "\n";
        }
        if (train_cmd->parsed()) {
            const auto outputs = driftlab::lab::cmd_train(cfg, out_dir);
            std::cout << "checkpoint: " << outputs.checkpoint_path << "\n"
                      << "loss curve: " << outputs.loss_csv_path << "\n";
            for (int stage : {1, 2}) {
                const double first = outputs.result.stage_mean_first_decile(stage);
                const double last = outputs.result.stage_mean_last_decile(stage);
                if (std::isnan(first)) continue;
                std::printf("stage %d: mean loss first decile %.6g, last decile %.6g\n", stage,
                            first, last);
            }
        }
        if (rollout_cmd->parsed()) {
            const auto outputs = driftlab::lab::cmd_rollout(cfg, out_dir, checkpoint_path);
            std::cout << "per-chunk metrics: " << outputs.csv_path << "\n"
                      << "summary: " << outputs.summary_path << "\n";
            for (size_t si = 0; si < outputs.reports.size(); ++si)
                std::printf("scene%zu: background slope %.6g, identity slope %.6g\n", si,
                            outputs.reports[si].background_slope,
                            outputs.reports[si].identity_slope);
        }
        if (ablate->parsed()) {
            const auto outputs = driftlab::lab::cmd_ablate(cfg, out_dir, parallel);
            std::cout << "ablation table: " << outputs.table_path << "\n";
            for (const auto& preset : outputs.table.presets)
                std::printf("%-10s background slope %.6g\n", preset.name.c_str(),
                            preset.mean_background_slope());
        }
        return 0;
    } catch (const driftlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const driftlab::DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const driftlab::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const driftlab::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
}
