#pragma once

#include "bvae/checkpoint.hpp"
#include "bvae/config.hpp"
#include "bvae/report.hpp"

namespace bvae {

// Conversions between in-memory models and the checkpoint container.
Checkpoint vae_to_checkpoint(const VaeModel& m, const std::string& kind, std::uint64_t seed,
                             std::size_t epochs_trained);
VaeModel vae_from_checkpoint(const Checkpoint& ckpt);
Checkpoint gan_to_checkpoint(const GanModel& m, std::uint64_t seed, std::size_t epochs_trained);
GanModel gan_from_checkpoint(const Checkpoint& ckpt);
Checkpoint predictor_to_checkpoint(const PropertyPredictor& pred);
PropertyPredictor predictor_from_checkpoint(const Checkpoint& ckpt);

struct SynthResult {
    std::string dataset_path, rules_path, synth_config_path;
    double sparsity = 0.0;
    double rule_pass_rate = 0.0;  // percentage
};
SynthResult cmd_synth(const RunConfig& cfg, bool force);

struct TrainResult {
    std::vector<EvalRow> report;
    ReferenceScores refs;
    std::string manifest_path;
    std::string predictor_path;
};
TrainResult cmd_train(const RunConfig& cfg, bool force);

void cmd_generate(const std::string& manifest_path, const std::string& out_csv,
                  std::uint64_t seed, std::size_t count, bool force);

struct EvaluateResult {
    double fid_star = 0.0;
    double kl_score = 0.0;
    double era = 0.0;
    ReferenceScores refs;
};
EvaluateResult cmd_evaluate(const RunConfig& cfg, const std::string& generations_csv,
                            const std::string& out_path, bool force);

void cmd_heatmap(const std::string& csv_path, const std::string& out_path, bool force);

}  // namespace bvae
