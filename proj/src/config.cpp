#include "bvae/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace bvae {

std::string family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::vanilla: return "vanilla";
        case ModelFamily::bvae: return "bvae";
        case ModelFamily::unbinded: return "unbinded";
        case ModelFamily::gan: return "gan";
    }
    throw std::logic_error("family_name: bad enum");
}

ModelFamily family_from_name(const std::string& name) {
    if (name == "vanilla") return ModelFamily::vanilla;
    if (name == "bvae") return ModelFamily::bvae;
    if (name == "unbinded") return ModelFamily::unbinded;
    if (name == "gan") return ModelFamily::gan;
    throw std::invalid_argument("unknown model family '" + name +
                                "' (expected vanilla|bvae|unbinded|gan)");
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }
    if (j.value("version", 0) != 1) throw std::runtime_error(path + ": unsupported config version");

    RunConfig cfg;
    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.seed_set = true;
    }
    if (j.contains("model")) cfg.model = family_from_name(j.at("model").get<std::string>());
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        cfg.paths.dataset = p.value("dataset", "");
        cfg.paths.rules = p.value("rules", "");
        cfg.paths.predictor = p.value("predictor", "");
        cfg.paths.out = p.value("out", "");
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
        cfg.train.lr_mask = t.value("lr_mask", cfg.train.lr_mask);
        cfg.train.lr_ratio = t.value("lr_ratio", cfg.train.lr_ratio);
        cfg.train.lr_vanilla = t.value("lr_vanilla", cfg.train.lr_vanilla);
        cfg.train.lr_gan = t.value("lr_gan", cfg.train.lr_gan);
    }
    if (j.contains("loss_weights")) {
        const auto& w = j.at("loss_weights");
        cfg.weights.lambda_r = w.value("lambda_r", cfg.weights.lambda_r);
        cfg.weights.lambda_m = w.value("lambda_m", cfg.weights.lambda_m);
        cfg.weights.gamma = w.value("gamma", cfg.weights.gamma);
        cfg.weights.beta = w.value("beta", cfg.weights.beta);
    }
    cfg.synth = SynthConfig::defaults();
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        cfg.synth.n = s.value("n", cfg.synth.n);
        cfg.synth.p = s.value("p", cfg.synth.p);
        if (s.contains("groups")) {
            cfg.synth.groups.clear();
            for (const auto& g : s.at("groups"))
                cfg.synth.groups.push_back({g.at("name").get<std::string>(),
                                            g.at("size").get<std::size_t>(),
                                            g.at("min_active").get<std::size_t>(),
                                            g.at("max_active").get<std::size_t>(),
                                            g.at("within_alpha").get<double>(),
                                            g.at("mass_alpha").get<double>()});
        }
    }
    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        cfg.eval.eval_every = e.value("eval_every", cfg.eval.eval_every);
        cfg.eval.n_generations = e.value("n_generations", cfg.eval.n_generations);
        cfg.eval.bernoulli_mask = e.value("bernoulli_mask", cfg.eval.bernoulli_mask);
    }
    if (j.contains("predictor")) {
        const auto& p = j.at("predictor");
        cfg.predictor.epochs = p.value("epochs", cfg.predictor.epochs);
        cfg.predictor.batch_size = p.value("batch_size", cfg.predictor.batch_size);
        cfg.predictor.lr = p.value("lr", cfg.predictor.lr);
    }
    return cfg;
}

void RunConfig::validate_common() const {
    if (!seed_set)
        throw std::invalid_argument("config: seed is mandatory (wall-clock seeding is not done)");
    train.validate();
    weights.validate();
    if (eval.eval_every < 1) throw std::invalid_argument("config: eval_every must be >= 1");
    if (eval.n_generations < 2)
        throw std::invalid_argument("config: n_generations must be >= 2");
    if (predictor.epochs < 1 || predictor.batch_size < 1 || !(predictor.lr > 0.0))
        throw std::invalid_argument("config: bad predictor section");
}

void RunConfig::validate_for_synth() const {
    validate_common();
    synth.validate();
    if (paths.out.empty()) throw std::invalid_argument("config: synth needs paths.out");
}

void RunConfig::validate_for_train() const {
    validate_common();
    if (paths.dataset.empty() || !std::filesystem::exists(paths.dataset))
        throw std::invalid_argument("config: paths.dataset missing or not found: '" +
                                    paths.dataset + "'");
    if (paths.rules.empty() || !std::filesystem::exists(paths.rules))
        throw std::invalid_argument("config: paths.rules missing or not found: '" + paths.rules +
                                    "'");
    if (paths.predictor.empty())
        throw std::invalid_argument("config: paths.predictor is required for train");
    if (paths.out.empty()) throw std::invalid_argument("config: train needs paths.out");
}

void RunConfig::validate_for_evaluate() const {
    validate_common();
    if (paths.dataset.empty() || !std::filesystem::exists(paths.dataset))
        throw std::invalid_argument("config: paths.dataset missing or not found: '" +
                                    paths.dataset + "'");
    if (paths.rules.empty() || !std::filesystem::exists(paths.rules))
        throw std::invalid_argument("config: paths.rules missing or not found: '" + paths.rules +
                                    "'");
    if (paths.predictor.empty() || !std::filesystem::exists(paths.predictor))
        throw std::invalid_argument(
            "config: paths.predictor not found: '" + paths.predictor +
            "'; train a predictor first (the train command writes one)");
}

}  // namespace bvae
