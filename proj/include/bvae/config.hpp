#pragma once

#include <optional>
#include <string>

#include "bvae/dataset.hpp"
#include "bvae/losses.hpp"
#include "bvae/models.hpp"
#include "bvae/predictor.hpp"

namespace bvae {

enum class ModelFamily { vanilla, bvae, unbinded, gan };

std::string family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name);

struct EvalOptions {
    std::size_t eval_every = 1;
    std::size_t n_generations = 10000;
    bool bernoulli_mask = false;
};

struct RunPaths {
    std::string dataset;
    std::string rules;
    std::string predictor;
    std::string out;
};

// Everything a run needs, json-loadable. The seed is mandatory: no command
// ever reads wall-clock or environment entropy.
struct RunConfig {
    std::uint64_t seed = 0;
    bool seed_set = false;
    ModelFamily model = ModelFamily::bvae;
    RunPaths paths;
    TrainConfig train;
    LossWeights weights;
    SynthConfig synth;
    EvalOptions eval;
    PredictorConfig predictor;

    void validate_common() const;
    void validate_for_synth() const;
    void validate_for_train() const;
    void validate_for_evaluate() const;
};

RunConfig load_run_config(const std::string& path);

}  // namespace bvae
