#include "bvae/pipeline.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bvae/heatmap.hpp"
#include "bvae/sha256.hpp"

namespace fs = std::filesystem;

namespace bvae {

namespace {

// Substream tags off the master seed.
constexpr std::uint64_t kTagSplit = 0x73706c74;
constexpr std::uint64_t kTagInit = 0x696e6974;
constexpr std::uint64_t kTagTrain = 0x7472616e;
constexpr std::uint64_t kTagShuffle = 0x73687566;
constexpr std::uint64_t kTagEvalGen = 0x6576676e;
constexpr std::uint64_t kTagCliGen = 0x636c6967;

std::uint64_t family_tag(ModelFamily f) { return static_cast<std::uint64_t>(f) + 1; }

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require_absent_or_force(const fs::path& p, bool force) {
    if (!force && fs::exists(p))
        throw std::runtime_error(p.string() + " already exists (use --force to overwrite)");
}

Matrix take_rows(const Matrix& src, const std::vector<std::size_t>& order, std::size_t start,
                 std::size_t n) {
    Matrix out(n, src.cols());
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = src.row(order[start + i]);
        for (std::size_t j = 0; j < src.cols(); ++j) out(i, j) = r[j];
    }
    return out;
}

void split_rows(std::size_t n, std::uint64_t seed, std::vector<std::size_t>& train_rows,
                std::vector<std::size_t>& val_rows) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng = derive_rng(seed, {kTagSplit});
    rng.shuffle(order);
    const std::size_t n_val = std::max<std::size_t>(1, n / 10);
    val_rows.assign(order.begin(), order.begin() + n_val);
    train_rows.assign(order.begin() + n_val, order.end());
}

}  // namespace

Checkpoint vae_to_checkpoint(const VaeModel& m, const std::string& kind, std::uint64_t seed,
                             std::size_t epochs_trained) {
    Checkpoint c;
    c.seed = seed;
    c.networks.push_back({"encoder", m.enc_spec, m.enc});
    c.networks.push_back({"decoder", m.dec_spec, m.dec});
    c.meta = {{"kind", kind},
              {"latent_dim", std::to_string(m.latent_dim)},
              {"cond_dim", std::to_string(m.cond_dim)},
              {"epochs_trained", std::to_string(epochs_trained)}};
    return c;
}

VaeModel vae_from_checkpoint(const Checkpoint& ckpt) {
    VaeModel m;
    const NamedNetwork& enc = ckpt.network("encoder");
    const NamedNetwork& dec = ckpt.network("decoder");
    m.enc_spec = enc.spec;
    m.enc = enc.params;
    m.dec_spec = dec.spec;
    m.dec = dec.params;
    m.latent_dim = std::stoull(ckpt.meta_value("latent_dim"));
    m.cond_dim = std::stoull(ckpt.meta_value("cond_dim"));
    return m;
}

Checkpoint gan_to_checkpoint(const GanModel& m, std::uint64_t seed, std::size_t epochs_trained) {
    Checkpoint c;
    c.seed = seed;
    c.networks.push_back({"generator", m.gen_spec, m.gen});
    c.networks.push_back({"discriminator", m.disc_spec, m.disc});
    c.meta = {{"kind", "gan"},
              {"noise_dim", std::to_string(m.noise_dim)},
              {"epochs_trained", std::to_string(epochs_trained)}};
    return c;
}

GanModel gan_from_checkpoint(const Checkpoint& ckpt) {
    GanModel m;
    const NamedNetwork& gen = ckpt.network("generator");
    const NamedNetwork& disc = ckpt.network("discriminator");
    m.gen_spec = gen.spec;
    m.gen = gen.params;
    m.disc_spec = disc.spec;
    m.disc = disc.params;
    m.noise_dim = std::stoull(ckpt.meta_value("noise_dim"));
    return m;
}

Checkpoint predictor_to_checkpoint(const PropertyPredictor& pred) {
    Checkpoint c;
    c.seed = pred.seed;
    c.step = pred.epochs_trained;
    c.networks.push_back({"predictor", pred.spec, pred.params});
    std::string mse, var;
    for (std::size_t i = 0; i < pred.val_mse.size(); ++i) {
        if (i) {
            mse += ',';
            var += ',';
        }
        mse += format17(pred.val_mse[i]);
        var += format17(pred.property_var[i]);
    }
    c.meta = {{"kind", "predictor"},
              {"embed_layer", std::to_string(pred.embed_layer)},
              {"epochs_trained", std::to_string(pred.epochs_trained)},
              {"val_mse", mse},
              {"property_var", var}};
    return c;
}

PropertyPredictor predictor_from_checkpoint(const Checkpoint& ckpt) {
    PropertyPredictor pred;
    const NamedNetwork& net = ckpt.network("predictor");
    pred.spec = net.spec;
    pred.params = net.params;
    pred.embed_layer = std::stoull(ckpt.meta_value("embed_layer"));
    pred.epochs_trained = std::stoull(ckpt.meta_value("epochs_trained"));
    pred.seed = ckpt.seed;
    auto parse_list = [](const std::string& s) {
        std::vector<double> out;
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t next = s.find(',', pos);
            if (next == std::string::npos) next = s.size();
            out.push_back(std::stod(s.substr(pos, next - pos)));
            pos = next + 1;
        }
        return out;
    };
    pred.val_mse = parse_list(ckpt.meta_value("val_mse"));
    pred.property_var = parse_list(ckpt.meta_value("property_var"));
    return pred;
}

SynthResult cmd_synth(const RunConfig& cfg, bool force) {
    cfg.validate_for_synth();
    SynthConfig synth = cfg.synth;
    synth.seed = cfg.seed;

    const fs::path out_dir(cfg.paths.out);
    const fs::path dataset_path = out_dir / "dataset.csv";
    const fs::path rules_path = out_dir / "rules.json";
    const fs::path synth_path = out_dir / "synth_config.json";
    require_absent_or_force(dataset_path, force);
    require_absent_or_force(rules_path, force);
    fs::create_directories(out_dir);

    const CompoundDataset data = synth_dataset(synth);
    const RuleSet rules = default_rules(synth);

    save_dataset(data, dataset_path.string());
    write_checksum_sidecar(dataset_path.string());
    save_rules(rules, rules_path.string());
    save_synth_config(synth, synth_path.string());

    SynthResult res;
    res.dataset_path = dataset_path.string();
    res.rules_path = rules_path.string();
    res.synth_config_path = synth_path.string();
    res.sparsity = sparsity(data.ratios);
    res.rule_pass_rate = era(data.ratios, rules);
    std::printf("synth: %zu x %zu dataset, sparsity %.4f, rule pass rate %.2f%%\n",
                data.ratios.rows(), data.ratios.cols(), res.sparsity, res.rule_pass_rate);
    std::printf("synth: wrote %s (+.sha256), %s, %s\n", res.dataset_path.c_str(),
                res.rules_path.c_str(), res.synth_config_path.c_str());
    return res;
}

namespace {

// Per-family training state held by the driver below.
struct FamilyState {
    ModelFamily family;
    // vanilla
    VaeModel vanilla;
    VaeOptimizer vanilla_opt;
    // bvae / unbinded
    BvaeModel bvae;
    BvaeOptimizer bvae_opt;
    // gan
    GanModel gan;
    GanOptimizer gan_opt;
};

FamilyState make_family_state(ModelFamily family, const RunConfig& cfg, std::size_t p) {
    FamilyState s;
    s.family = family;
    Rng init = derive_rng(cfg.seed, {kTagInit, family_tag(family)});
    switch (family) {
        case ModelFamily::vanilla:
            s.vanilla = make_vanilla_vae(p, init);
            s.vanilla_opt = make_vae_optimizer(s.vanilla);
            break;
        case ModelFamily::bvae:
        case ModelFamily::unbinded:
            s.bvae = make_bvae(p, cfg.weights, init);
            s.bvae_opt = make_bvae_optimizer(s.bvae);
            break;
        case ModelFamily::gan:
            s.gan = make_gan(p, init);
            s.gan_opt = make_gan_optimizer(s.gan);
            break;
    }
    return s;
}

void add_network(Checkpoint& c, const std::string& name, const NetworkSpec& spec,
                 const NetworkParams& params) {
    c.networks.push_back({name, spec, params});
}

Checkpoint train_state_checkpoint(const FamilyState& s, const RunConfig& cfg, std::size_t phase,
                                  std::size_t epoch, const Rng& train_rng) {
    Checkpoint c;
    c.seed = cfg.seed;
    c.step = epoch;
    c.rng_state = train_rng.state();
    switch (s.family) {
        case ModelFamily::vanilla:
            add_network(c, "encoder", s.vanilla.enc_spec, s.vanilla.enc);
            add_network(c, "decoder", s.vanilla.dec_spec, s.vanilla.dec);
            c.adam.push_back({"encoder", s.vanilla_opt.enc});
            c.adam.push_back({"decoder", s.vanilla_opt.dec});
            break;
        case ModelFamily::bvae:
        case ModelFamily::unbinded:
            add_network(c, "mask_encoder", s.bvae.mask.enc_spec, s.bvae.mask.enc);
            add_network(c, "mask_decoder", s.bvae.mask.dec_spec, s.bvae.mask.dec);
            add_network(c, "ratio_encoder", s.bvae.ratio.enc_spec, s.bvae.ratio.enc);
            add_network(c, "ratio_decoder", s.bvae.ratio.dec_spec, s.bvae.ratio.dec);
            c.adam.push_back({"mask_encoder", s.bvae_opt.mask.enc});
            c.adam.push_back({"mask_decoder", s.bvae_opt.mask.dec});
            c.adam.push_back({"ratio_encoder", s.bvae_opt.ratio.enc});
            c.adam.push_back({"ratio_decoder", s.bvae_opt.ratio.dec});
            break;
        case ModelFamily::gan:
            add_network(c, "generator", s.gan.gen_spec, s.gan.gen);
            add_network(c, "discriminator", s.gan.disc_spec, s.gan.disc);
            c.adam.push_back({"generator", s.gan_opt.gen});
            c.adam.push_back({"discriminator", s.gan_opt.disc});
            break;
    }
    c.meta = {{"kind", "train_state"},
              {"family", family_name(s.family)},
              {"phase", std::to_string(phase)},
              {"epoch", std::to_string(epoch)}};
    return c;
}

void restore_family_state(FamilyState& s, const Checkpoint& c) {
    switch (s.family) {
        case ModelFamily::vanilla:
            s.vanilla.enc = c.network("encoder").params;
            s.vanilla.dec = c.network("decoder").params;
            s.vanilla_opt.enc = c.adam_state("encoder").state;
            s.vanilla_opt.dec = c.adam_state("decoder").state;
            break;
        case ModelFamily::bvae:
        case ModelFamily::unbinded:
            s.bvae.mask.enc = c.network("mask_encoder").params;
            s.bvae.mask.dec = c.network("mask_decoder").params;
            s.bvae.ratio.enc = c.network("ratio_encoder").params;
            s.bvae.ratio.dec = c.network("ratio_decoder").params;
            s.bvae_opt.mask.enc = c.adam_state("mask_encoder").state;
            s.bvae_opt.mask.dec = c.adam_state("mask_decoder").state;
            s.bvae_opt.ratio.enc = c.adam_state("ratio_encoder").state;
            s.bvae_opt.ratio.dec = c.adam_state("ratio_decoder").state;
            break;
        case ModelFamily::gan:
            s.gan.gen = c.network("generator").params;
            s.gan.disc = c.network("discriminator").params;
            s.gan_opt.gen = c.adam_state("generator").state;
            s.gan_opt.disc = c.adam_state("discriminator").state;
            break;
    }
}

Matrix generate_for_eval(const FamilyState& s, std::size_t count, Rng& rng,
                         bool bernoulli_mask) {
    switch (s.family) {
        case ModelFamily::vanilla: return generate_vanilla(s.vanilla, count, rng);
        case ModelFamily::bvae:
        case ModelFamily::unbinded:
            return generate_bvae(s.bvae, count, rng, bernoulli_mask).compounds;
        case ModelFamily::gan: return generate_gan(s.gan, count, rng);
    }
    throw std::logic_error("generate_for_eval: bad family");
}

void write_manifest(const fs::path& out_dir, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& ckpts,
                    std::size_t p, std::size_t epochs_trained) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["family"] = family_name(cfg.model);
    j["p"] = p;
    j["seed"] = cfg.seed;
    j["epochs_trained"] = epochs_trained;
    j["bernoulli_mask"] = cfg.eval.bernoulli_mask;
    j["checkpoints"] = nlohmann::ordered_json::object();
    for (const auto& [name, file] : ckpts) j["checkpoints"][name] = file;
    j["loss_weights"] = {{"lambda_r", cfg.weights.lambda_r},
                         {"lambda_m", cfg.weights.lambda_m},
                         {"gamma", cfg.weights.gamma},
                         {"beta", cfg.weights.beta}};
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest.json");
    out << j.dump(2) << "\n";
}

}  // namespace

TrainResult cmd_train(const RunConfig& cfg, bool force) {
    cfg.validate_for_train();
    const fs::path out_dir(cfg.paths.out);
    fs::create_directories(out_dir);

    const CompoundDataset data = load_dataset(cfg.paths.dataset);
    const std::size_t p = data.ratios.cols();
    const RuleSet rules = load_rules(cfg.paths.rules, p);

    std::vector<std::size_t> train_rows, val_rows;
    split_rows(data.ratios.rows(), cfg.seed, train_rows, val_rows);

    // Shared, frozen predictor: train it once, reuse across every family.
    PropertyPredictor pred;
    if (fs::exists(cfg.paths.predictor)) {
        pred = predictor_from_checkpoint(load_checkpoint(cfg.paths.predictor));
        if (pred.spec.input_dim != p)
            throw std::runtime_error("predictor expects " + std::to_string(pred.spec.input_dim) +
                                     " components, dataset has " + std::to_string(p));
    } else {
        std::printf("train: training property predictor (%zu epochs)\n", cfg.predictor.epochs);
        pred = train_predictor(data, train_rows, val_rows, cfg.predictor, cfg.seed);
        fs::create_directories(fs::path(cfg.paths.predictor).parent_path());
        save_checkpoint(predictor_to_checkpoint(pred), cfg.paths.predictor);
    }

    const ReferenceScores refs = reference_scores(data, pred, rules, cfg.seed);
    write_references_json(refs, cfg.seed, (out_dir / "references.json").string());

    const Matrix real_emb = embed(pred, data.ratios);
    const Matrix train_x_all = take_rows(data.ratios, train_rows, 0, train_rows.size());
    const Matrix train_m_all = binarize(train_x_all);

    const std::string family = family_name(cfg.model);
    const fs::path state_path = out_dir / "train_state.ckpt";
    const fs::path report_path = out_dir / "report.csv";

    FamilyState state = make_family_state(cfg.model, cfg, p);
    Rng train_rng = derive_rng(cfg.seed, {kTagTrain, family_tag(cfg.model)});
    std::vector<EvalRow> report;
    std::size_t start_phase = cfg.model == ModelFamily::unbinded ? 1 : 2;
    std::size_t start_epoch = 0;

    if (fs::exists(state_path) && !force) {
        const Checkpoint c = load_checkpoint(state_path.string());
        if (c.meta_value("family") != family)
            throw std::runtime_error(state_path.string() + " belongs to family '" +
                                     c.meta_value("family") + "', requested '" + family + "'");
        if (c.seed != cfg.seed)
            throw std::runtime_error(state_path.string() + " was written with seed " +
                                     std::to_string(c.seed));
        restore_family_state(state, c);
        train_rng.set_state(c.rng_state);
        start_phase = std::stoull(c.meta_value("phase"));
        start_epoch = std::stoull(c.meta_value("epoch"));
        if (fs::exists(report_path)) report = read_report_csv(report_path.string());
        std::printf("train: resuming %s at phase %zu epoch %zu\n", family.c_str(), start_phase,
                    start_epoch);
    }

    const std::size_t n_train = train_rows.size();
    std::vector<std::size_t> order(n_train);

    auto run_epoch = [&](std::size_t phase, std::size_t epoch) -> double {
        Rng shuffle_rng =
            derive_rng(cfg.seed, {kTagShuffle, family_tag(cfg.model), phase, epoch});
        for (std::size_t i = 0; i < n_train; ++i) order[i] = i;
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n_train; start += cfg.train.batch_size) {
            const std::size_t n = std::min(cfg.train.batch_size, n_train - start);
            const Matrix xb = take_rows(train_x_all, order, start, n);
            switch (cfg.model) {
                case ModelFamily::vanilla:
                    loss_sum += plain_vae_step(state.vanilla, state.vanilla_opt, xb, 1.0, 0.0,
                                               cfg.train.lr_vanilla, train_rng);
                    break;
                case ModelFamily::bvae: {
                    const Matrix mb = take_rows(train_m_all, order, start, n);
                    loss_sum += bvae_train_step(state.bvae, state.bvae_opt, xb, mb,
                                                cfg.train.lr_mask, cfg.train.lr_ratio, train_rng)
                                    .total;
                    break;
                }
                case ModelFamily::unbinded: {
                    const Matrix mb = take_rows(train_m_all, order, start, n);
                    if (phase == 1) {
                        loss_sum += plain_vae_step(state.bvae.mask, state.bvae_opt.mask, mb,
                                                   cfg.weights.lambda_m, cfg.weights.gamma,
                                                   cfg.train.lr_mask, train_rng);
                    } else {
                        Matrix noise(n, state.bvae.mask.latent_dim);
                        train_rng.fill_normal(noise.data(), noise.size());
                        const Matrix m_tilde =
                            mask_soft_reconstruction(state.bvae.mask, mb, noise);
                        loss_sum += unbinded_ratio_step(state.bvae, state.bvae_opt.ratio, xb,
                                                        m_tilde, cfg.train.lr_ratio, train_rng);
                    }
                    break;
                }
                case ModelFamily::gan: {
                    const GanStepLosses l =
                        gan_train_step(state.gan, state.gan_opt, xb, cfg.train.lr_gan, train_rng);
                    loss_sum += l.d_loss + l.g_loss;
                    break;
                }
            }
            ++batches;
        }
        return loss_sum / static_cast<double>(batches);
    };

    auto eval_and_record = [&](std::size_t epoch) {
        Rng gen_rng = derive_rng(cfg.seed, {kTagEvalGen, family_tag(cfg.model), epoch});
        const Matrix gens =
            generate_for_eval(state, cfg.eval.n_generations, gen_rng, cfg.eval.bernoulli_mask);
        EvalRow row;
        row.epoch = epoch;
        row.model = family;
        row.fid_star = fid_star(real_emb, embed(pred, gens));
        row.kl_score = kl_score(data.properties, predict(pred, gens));
        row.era = era(gens, rules);
        report.push_back(row);
        write_report_csv(report, report_path.string());
        std::printf("[%s] epoch %zu: fid* %.4f kl %.4f era %.2f\n", family.c_str(), epoch,
                    row.fid_star, row.kl_score, row.era);
    };

    // Phase 1 (separately trained pair only): the mask VAE alone, no metrics.
    if (cfg.model == ModelFamily::unbinded && start_phase == 1) {
        for (std::size_t epoch = start_epoch + 1; epoch <= cfg.train.epochs; ++epoch) {
            const double loss = run_epoch(1, epoch);
            std::printf("[%s] mask pretrain epoch %zu/%zu: loss %.5f\n", family.c_str(), epoch,
                        cfg.train.epochs, loss);
            if (epoch == cfg.train.epochs || epoch % cfg.eval.eval_every == 0)
                save_checkpoint(train_state_checkpoint(state, cfg, 1, epoch, train_rng),
                                state_path.string());
        }
        start_phase = 2;
        start_epoch = 0;
        save_checkpoint(train_state_checkpoint(state, cfg, 2, 0, train_rng),
                        state_path.string());
    }

    for (std::size_t epoch = start_epoch + 1; epoch <= cfg.train.epochs; ++epoch) {
        const double loss = run_epoch(2, epoch);
        std::printf("[%s] epoch %zu/%zu: loss %.5f\n", family.c_str(), epoch, cfg.train.epochs,
                    loss);
        if (epoch % cfg.eval.eval_every == 0 || epoch == cfg.train.epochs) {
            eval_and_record(epoch);
            save_checkpoint(train_state_checkpoint(state, cfg, 2, epoch, train_rng),
                            state_path.string());
        }
    }

    // Final per-sub-model checkpoints plus the manifest naming the family.
    std::vector<std::pair<std::string, std::string>> ckpts;
    switch (cfg.model) {
        case ModelFamily::vanilla:
            save_checkpoint(
                vae_to_checkpoint(state.vanilla, "vanilla_vae", cfg.seed, cfg.train.epochs),
                (out_dir / "vanilla_vae.ckpt").string());
            ckpts.emplace_back("vanilla", "vanilla_vae.ckpt");
            break;
        case ModelFamily::bvae:
        case ModelFamily::unbinded:
            save_checkpoint(
                vae_to_checkpoint(state.bvae.mask, "mask_vae", cfg.seed, cfg.train.epochs),
                (out_dir / "mask_vae.ckpt").string());
            save_checkpoint(
                vae_to_checkpoint(state.bvae.ratio, "ratio_vae", cfg.seed, cfg.train.epochs),
                (out_dir / "ratio_vae.ckpt").string());
            ckpts.emplace_back("mask", "mask_vae.ckpt");
            ckpts.emplace_back("ratio", "ratio_vae.ckpt");
            break;
        case ModelFamily::gan:
            save_checkpoint(gan_to_checkpoint(state.gan, cfg.seed, cfg.train.epochs),
                            (out_dir / "gan.ckpt").string());
            ckpts.emplace_back("gan", "gan.ckpt");
            break;
    }
    write_manifest(out_dir, cfg, ckpts, p, cfg.train.epochs);

    TrainResult res;
    res.report = std::move(report);
    res.refs = refs;
    res.manifest_path = (out_dir / "manifest.json").string();
    res.predictor_path = cfg.paths.predictor;
    return res;
}

void cmd_generate(const std::string& manifest_path, const std::string& out_csv,
                  std::uint64_t seed, std::size_t count, bool force) {
    require_absent_or_force(out_csv, force);
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + manifest_path);
    nlohmann::json j;
    in >> j;
    if (j.value("version", 0) != 1)
        throw std::runtime_error(manifest_path + ": unsupported manifest version");
    const ModelFamily family = family_from_name(j.at("family").get<std::string>());
    if (j.at("epochs_trained").get<std::size_t>() == 0)
        throw std::runtime_error(manifest_path + ": model is untrained, refusing to generate");
    const bool bernoulli = j.value("bernoulli_mask", false);
    const fs::path dir = fs::path(manifest_path).parent_path();
    const auto& ckpts = j.at("checkpoints");

    auto load_named = [&](const char* name, const char* expected_kind) {
        if (!ckpts.contains(name))
            throw std::runtime_error(manifest_path + ": family '" + family_name(family) +
                                     "' requires a '" + name + "' checkpoint entry");
        const Checkpoint c =
            load_checkpoint((dir / ckpts.at(name).get<std::string>()).string());
        if (c.meta_value("kind") != expected_kind)
            throw std::runtime_error(manifest_path + ": checkpoint '" + name + "' has kind '" +
                                     c.meta_value("kind") + "', expected '" + expected_kind +
                                     "'");
        return c;
    };

    Rng rng = derive_rng(seed, {kTagCliGen});
    Matrix gens;
    switch (family) {
        case ModelFamily::vanilla: {
            const VaeModel m = vae_from_checkpoint(load_named("vanilla", "vanilla_vae"));
            gens = generate_vanilla(m, count, rng);
            break;
        }
        case ModelFamily::bvae:
        case ModelFamily::unbinded: {
            BvaeModel m;
            m.mask = vae_from_checkpoint(load_named("mask", "mask_vae"));
            m.ratio = vae_from_checkpoint(load_named("ratio", "ratio_vae"));
            gens = generate_bvae(m, count, rng, bernoulli).compounds;
            break;
        }
        case ModelFamily::gan: {
            const GanModel m = gan_from_checkpoint(load_named("gan", "gan"));
            gens = generate_gan(m, count, rng);
            break;
        }
    }
    save_components(gens, out_csv);
    std::printf("generate: wrote %zu rows to %s\n", gens.rows(), out_csv.c_str());
}

EvaluateResult cmd_evaluate(const RunConfig& cfg, const std::string& generations_csv,
                            const std::string& out_path, bool force) {
    cfg.validate_for_evaluate();
    if (!out_path.empty()) require_absent_or_force(out_path, force);

    const CompoundDataset data = load_dataset(cfg.paths.dataset);
    const std::size_t p = data.ratios.cols();
    const RuleSet rules = load_rules(cfg.paths.rules, p);
    const PropertyPredictor pred = predictor_from_checkpoint(load_checkpoint(cfg.paths.predictor));
    const Matrix gens = load_components(generations_csv);
    if (gens.cols() != p)
        throw std::runtime_error(generations_csv + ": " + std::to_string(gens.cols()) +
                                 " components, dataset has " + std::to_string(p));

    EvaluateResult res;
    res.fid_star = fid_star(embed(pred, data.ratios), embed(pred, gens));
    res.kl_score = kl_score(data.properties, predict(pred, gens));
    res.era = era(gens, rules);
    res.refs = reference_scores(data, pred, rules, cfg.seed);

    std::printf("fid_star  %.6f (test %.6f, noise %.6f)\n", res.fid_star, res.refs.fid_test,
                res.refs.fid_noise);
    std::printf("kl_score  %.6f (test %.6f, noise %.6f)\n", res.kl_score, res.refs.kl_test,
                res.refs.kl_noise);
    std::printf("era       %.2f (real %.2f, noise %.2f)\n", res.era, res.refs.era_real,
                res.refs.era_noise);

    if (!out_path.empty()) {
        nlohmann::ordered_json j;
        j["version"] = 1;
        j["generations"] = generations_csv;
        j["fid_star"] = {{"score", res.fid_star},
                         {"test", res.refs.fid_test},
                         {"noise", res.refs.fid_noise}};
        j["kl_score"] = {{"score", res.kl_score},
                         {"test", res.refs.kl_test},
                         {"noise", res.refs.kl_noise}};
        j["era"] = {{"score", res.era},
                    {"real", res.refs.era_real},
                    {"noise", res.refs.era_noise}};
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << j.dump(2) << "\n";
    }
    return res;
}

void cmd_heatmap(const std::string& csv_path, const std::string& out_path, bool force) {
    require_absent_or_force(out_path, force);
    const Matrix x = load_components(csv_path);
    render_heatmap(x, out_path);
    std::printf("heatmap: wrote %zu x %zu image to %s\n", x.rows(), x.cols(), out_path.c_str());
}

}  // namespace bvae
