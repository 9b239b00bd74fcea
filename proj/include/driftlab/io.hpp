#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/field.hpp"
#include "driftlab/synth.hpp"
#include "driftlab/trainer.hpp"

namespace driftlab::io {

// shortest-exact text form of a double ("%.17g" trimmed); stable across runs
std::string fmt_double(double x);

// One numeric array per line: "<label> <count> <v0> <v1> ...".
void write_scene_dump(const std::string& path, const synth::World& world,
                      const synth::Scene& scene, uint64_t scene_seed,
                      const std::string& config_hash);

void write_frames_dump(const std::string& path, const std::vector<PixelChunk>& chunks,
                       const std::string& config_hash);

struct CheckpointMeta {
    FieldShape shape;
    uint64_t seed = 0;
    long iterations = 0;
};

// Versioned text checkpoint: header with field sizes, seed and iteration
// count, then the flat parameter array.
void save_checkpoint(const std::string& path, const VectorField& field, const CheckpointMeta& meta);
VectorField load_checkpoint(const std::string& path, const FieldShape& expected,
                            CheckpointMeta* meta = nullptr);

void write_loss_curve(const std::string& path, const TrainResult& result,
                      const std::string& config_hash, uint64_t seed);

}  // namespace driftlab::io
