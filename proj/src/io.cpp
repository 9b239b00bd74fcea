#include "driftlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace driftlab::io {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file " + path);
    return out;
}

void write_array(std::ofstream& out, const std::string& label, const Vec& v) {
    out << label << ' ' << v.size();
    for (double x : v) out << ' ' << fmt_double(x);
    out << '\n';
}

}  // namespace

void write_scene_dump(const std::string& path, const synth::World& world,
                      const synth::Scene& scene, uint64_t scene_seed,
                      const std::string& config_hash) {
    std::ofstream out = open_out(path);
    out << "# driftlab scene dump v1\n";
    out << "# config_hash=" << config_hash << " scene_seed=" << scene_seed << '\n';
    out << "# pixel_dim=" << world.params().pixel_dim << " pose_dim=" << world.params().pose_dim
        << " identity_dim=" << world.params().identity_dim << " frames=" << scene.total_frames()
        << " frames_per_chunk=" << scene.frames_per_chunk << '\n';
    out << "# arrays: background, identity, pose <ell>, frame <ell> (one per line)\n";
    write_array(out, "background", scene.background);
    write_array(out, "identity", scene.identity);
    for (int ell = 0; ell < scene.total_frames(); ++ell)
        write_array(out, "pose " + std::to_string(ell), scene.pose_track.frames[ell]);
    for (int ell = 0; ell < scene.total_frames(); ++ell)
        write_array(out, "frame " + std::to_string(ell), world.render_frame(scene, ell));
}

void write_frames_dump(const std::string& path, const std::vector<PixelChunk>& chunks,
                       const std::string& config_hash) {
    std::ofstream out = open_out(path);
    out << "# driftlab frames dump v1\n";
    out << "# config_hash=" << config_hash << " chunks=" << chunks.size() << '\n';
    out << "# arrays: frame <chunk> <ell> (one per line)\n";
    for (size_t n = 0; n < chunks.size(); ++n)
        for (int f = 0; f < chunks[n].len(); ++f)
            write_array(out, "frame " + std::to_string(n) + " " + std::to_string(f),
                        chunks[n].frames[f]);
}

void save_checkpoint(const std::string& path, const VectorField& field,
                     const CheckpointMeta& meta) {
    std::ofstream out = open_out(path);
    out << "driftlab-checkpoint v1\n";
    out << "dim " << field.shape().dim << " hidden " << field.shape().hidden << '\n';
    out << "seed " << meta.seed << " iterations " << meta.iterations << '\n';
    out << "theta " << field.params().size() << '\n';
    for (double x : field.params()) out << fmt_double(x) << '\n';
}

VectorField load_checkpoint(const std::string& path, const FieldShape& expected,
                            CheckpointMeta* meta) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "driftlab-checkpoint" || version != "v1")
        throw ConfigError("checkpoint " + path + ": unrecognized header");
    std::string key;
    FieldShape shape;
    CheckpointMeta m;
    in >> key >> shape.dim >> key >> shape.hidden;
    in >> key >> m.seed >> key >> m.iterations;
    size_t count = 0;
    in >> key >> count;
    if (!in || key != "theta") throw ConfigError("checkpoint " + path + ": malformed header");
    if (!(shape == expected))
        throw ConfigError("checkpoint " + path + ": field shape (dim=" +
                          std::to_string(shape.dim) + ", hidden=" + std::to_string(shape.hidden) +
                          ") does not match config (dim=" + std::to_string(expected.dim) +
                          ", hidden=" + std::to_string(expected.hidden) + ")");
    VectorField field(shape);
    if (count != field.params().size())
        throw ConfigError("checkpoint " + path + ": parameter count mismatch");
    for (size_t i = 0; i < count; ++i) {
        in >> field.params()[i];
        if (!in) throw ConfigError("checkpoint " + path + ": truncated parameter array");
    }
    m.shape = shape;
    if (meta) *meta = m;
    return field;
}

void write_loss_curve(const std::string& path, const TrainResult& result,
                      const std::string& config_hash, uint64_t seed) {
    std::ofstream out = open_out(path);
    out << "# config_hash=" << config_hash << " seed=" << seed << '\n';
    out << "iteration,stage,loss\n";
    for (const auto& pt : result.curve)
        out << pt.iteration << ',' << pt.stage << ',' << fmt_double(pt.loss) << '\n';
}

}  // namespace driftlab::io
