#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "driftlab/checks.hpp"
#include "driftlab/codec.hpp"
#include "driftlab/config.hpp"
#include "driftlab/field.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/sampler.hpp"
#include "driftlab/synth.hpp"
#include "driftlab/trainer.hpp"

namespace driftlab::lab {

// Wiring from the experiment config. Every module stream is derived from the
// master seed with (module, purpose) labels, so one seed pins the whole run.
synth::World make_world(const ExperimentConfig& cfg);
LossyCodec make_codec(const ExperimentConfig& cfg);
memory::PoseAdapter make_adapter(const ExperimentConfig& cfg);
FieldShape make_field_shape(const ExperimentConfig& cfg);
VectorField make_initial_field(const ExperimentConfig& cfg);
TrainConfig make_train_config(const ExperimentConfig& cfg);
RolloutConfig make_rollout_config(const ExperimentConfig& cfg);
SamplerConfig make_sampler_config(const ExperimentConfig& cfg);
std::vector<synth::Scene> make_train_scenes(const ExperimentConfig& cfg, const synth::World& world);
std::vector<synth::Scene> make_eval_scenes(const ExperimentConfig& cfg, const synth::World& world);

// Adapts a trained field to the rollout's velocity interface.
ChunkVelocityFn model_fn(const VectorField& field);

// Commands behind the CLI subcommands; tests drive these directly.

int cmd_check(const ExperimentConfig& cfg, std::ostream& out);  // 0 ok, 4 check failure

struct BenchOutputs {
    std::string csv_path;
};
BenchOutputs cmd_roundtrip_bench(const ExperimentConfig& cfg, const std::string& out_dir);

struct TrainOutputs {
    std::string checkpoint_path;
    std::string loss_csv_path;
    TrainResult result;
};
TrainOutputs cmd_train(const ExperimentConfig& cfg, const std::string& out_dir);

struct RolloutOutputs {
    std::string csv_path;
    std::string summary_path;
    std::vector<metrics::DriftReport> reports;  // one per eval scene
    std::vector<RolloutResult> rollouts;
};
// checkpoint_path may be empty: the seeded initial field is used then.
RolloutOutputs cmd_rollout(const ExperimentConfig& cfg, const std::string& out_dir,
                           const std::string& checkpoint_path);

struct AblateOutputs {
    std::string table_path;
    std::string chunks_path;
    std::string summary_path;
    metrics::AblationTable table;
};
AblateOutputs cmd_ablate(const ExperimentConfig& cfg, const std::string& out_dir, bool parallel);

}  // namespace driftlab::lab
