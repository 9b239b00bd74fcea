#include "driftlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "driftlab/rng.hpp"
#include "driftlab/sampler.hpp"
#include "json.hpp"

namespace driftlab {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (version != 1) throw ConfigError("config: unsupported version " + std::to_string(version));
    if (d < 1 || p < 1 || identity_dim < 1) throw ConfigError("config: dimensions must be >= 1");
    if (T_z < 1 || L < 1 || N < 1) throw ConfigError("config: T_z, L, N must be >= 1");
    if (T_z != L) throw ConfigError("config: the surrogate codec requires T_z == L");
    if (r < 0) throw ConfigError("config: r must be >= 0");
    if (K < 1) throw ConfigError("config: K must be >= 1");
    if (r + K > T_z) throw ConfigError("config: r + K must not exceed T_z");
    if (m < 1 || m > K) throw ConfigError("config: m must lie in [1, K]");
    if (m > L) throw ConfigError("config: m exceeds frames in chunk 1");
    if (!(beta > 0.0)) throw ConfigError("config: beta must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("config: epsilon must lie in (0,1)");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("config: gamma must lie in (0,1]");
    if (noise_sigma < 0.0) throw ConfigError("config: noise_sigma must be >= 0");
    if (S < 1) throw ConfigError("config: S must be >= 1");
    if (hidden < 1) throw ConfigError("config: hidden must be >= 1");
    if (stage1_iters < 0 || stage2_iters < 0)
        throw ConfigError("config: iteration counts must be >= 0");
    if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("config: lr must be positive");
    if (train_scenes < 1 || eval_scenes < 1) throw ConfigError("config: scene counts must be >= 1");
    if (N < 2 && (stage1_iters > 0 || stage2_iters > 0))
        throw ConfigError("config: training needs N >= 2 for adjacent chunk pairs");
    if (perturb_max < 0.0) throw ConfigError("config: perturb_max must be >= 0");
    if (!(augment_magnitude >= 0.0 && augment_magnitude <= 1.0))
        throw ConfigError("config: augment_magnitude must lie in [0,1]");
    if (bench_rounds < 1) throw ConfigError("config: bench_rounds must be >= 1");
    const RolloutMode md = parse_rollout_mode(mode);  // throws on unknown name
    if (md == RolloutMode::sink && r + K + 1 > T_z)
        throw ConfigError("config: sink mode needs a free pad slot (r+K+1 <= T_z)");
    if (!mode_propagates_latents(md) && r < 1)
        throw ConfigError("config: image-space modes need r >= 1");
}

namespace {

template <typename T>
T get_field(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    if (!j.contains("version")) throw ConfigError("config: missing required version tag");

    ExperimentConfig c;
    c.version = get_field(j, "version", c.version);
    c.seed = get_field(j, "seed", c.seed);
    c.d = get_field(j, "d", c.d);
    c.p = get_field(j, "p", c.p);
    c.identity_dim = get_field(j, "identity_dim", c.identity_dim);
    c.T_z = get_field(j, "T_z", c.T_z);
    c.L = get_field(j, "L", c.L);
    c.N = get_field(j, "N", c.N);
    c.r = get_field(j, "r", c.r);
    c.K = get_field(j, "K", c.K);
    c.m = get_field(j, "m", c.m);
    c.augment = get_field(j, "augment", c.augment);
    c.augment_magnitude = get_field(j, "augment_magnitude", c.augment_magnitude);
    c.beta = get_field(j, "beta", c.beta);
    c.epsilon = get_field(j, "epsilon", c.epsilon);
    c.gamma = get_field(j, "gamma", c.gamma);
    c.noise_sigma = get_field(j, "noise_sigma", c.noise_sigma);
    c.S = get_field(j, "S", c.S);
    c.hidden = get_field(j, "hidden", c.hidden);
    c.stage1_iters = get_field(j, "stage1_iters", c.stage1_iters);
    c.stage2_iters = get_field(j, "stage2_iters", c.stage2_iters);
    c.batch_size = get_field(j, "batch_size", c.batch_size);
    c.lr = get_field(j, "lr", c.lr);
    c.train_scenes = get_field(j, "train_scenes", c.train_scenes);
    c.eval_scenes = get_field(j, "eval_scenes", c.eval_scenes);
    c.perturb_max = get_field(j, "perturb_max", c.perturb_max);
    c.mode = get_field(j, "mode", c.mode);
    c.bench_rounds = get_field(j, "bench_rounds", c.bench_rounds);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::canonical() const {
    json j;  // nlohmann objects keep keys sorted, which is the canonical order
    j["version"] = version;
    j["seed"] = seed;
    j["d"] = d;
    j["p"] = p;
    j["identity_dim"] = identity_dim;
    j["T_z"] = T_z;
    j["L"] = L;
    j["N"] = N;
    j["r"] = r;
    j["K"] = K;
    j["m"] = m;
    j["augment"] = augment;
    j["augment_magnitude"] = augment_magnitude;
    j["beta"] = beta;
    j["epsilon"] = epsilon;
    j["gamma"] = gamma;
    j["noise_sigma"] = noise_sigma;
    j["S"] = S;
    j["hidden"] = hidden;
    j["stage1_iters"] = stage1_iters;
    j["stage2_iters"] = stage2_iters;
    j["batch_size"] = batch_size;
    j["lr"] = lr;
    j["train_scenes"] = train_scenes;
    j["eval_scenes"] = eval_scenes;
    j["perturb_max"] = perturb_max;
    j["mode"] = mode;
    j["bench_rounds"] = bench_rounds;
    return j.dump(2) + "\n";
}

std::string ExperimentConfig::hash() const {
    const std::string text = canonical();
    const uint64_t h = rng::fnv1a_bytes(text.data(), text.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace driftlab
