#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "bvae/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string model;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    std::string out;
    bool force = false;
    std::size_t eval_every = 0;
    std::size_t n_generations = 0;
};

bvae::RunConfig resolve_config(const CommonFlags& f) {
    bvae::RunConfig cfg;
    if (!f.config_path.empty()) cfg = bvae::load_run_config(f.config_path);
    if (f.seed_given) {
        cfg.seed = f.seed;
        cfg.seed_set = true;
    }
    if (!f.model.empty()) cfg.model = bvae::family_from_name(f.model);
    if (f.epochs) cfg.train.epochs = f.epochs;
    if (f.batch_size) cfg.train.batch_size = f.batch_size;
    if (!f.out.empty()) cfg.paths.out = f.out;
    if (f.eval_every) cfg.eval.eval_every = f.eval_every;
    if (f.n_generations) cfg.eval.n_generations = f.n_generations;
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Run configuration JSON");
    cmd->add_option("--seed", f.seed, "Master seed (overrides the config)")
        ->each([&f](const std::string&) { f.seed_given = true; });
    cmd->add_option("--out", f.out, "Output path (overrides the config)");
    cmd->add_flag("--force", f.force, "Overwrite existing outputs / restart training");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse compound generation toolkit: chained-VAE generative models with "
                 "distribution and rule-agreement metrics"};
    app.require_subcommand(1);

    CommonFlags f;

    CLI::App* synth = app.add_subcommand("synth", "Generate the synthetic dataset and rules");
    add_common(synth, f);

    CLI::App* train = app.add_subcommand("train", "Train a model with per-epoch evaluation");
    add_common(train, f);
    train->add_option("--model", f.model, "vanilla|bvae|unbinded|gan");
    train->add_option("--epochs", f.epochs, "Training epochs");
    train->add_option("--batch-size", f.batch_size, "Batch size");
    train->add_option("--eval-every", f.eval_every, "Evaluate every N epochs");
    train->add_option("--n-generations", f.n_generations, "Rows generated per evaluation");

    CLI::App* generate = app.add_subcommand("generate", "Sample compounds from a checkpoint");
    std::string manifest;
    generate->add_option("manifest", manifest, "Run manifest.json")->required();
    add_common(generate, f);
    generate->add_option("--n-generations", f.n_generations, "Rows to generate");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a generations CSV");
    std::string generations_csv;
    evaluate->add_option("generations", generations_csv, "Generations CSV")->required();
    add_common(evaluate, f);

    CLI::App* heatmap = app.add_subcommand("heatmap", "Render a CSV as a grayscale PGM");
    std::string heatmap_csv;
    heatmap->add_option("input", heatmap_csv, "Dataset or generations CSV")->required();
    add_common(heatmap, f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            bvae::cmd_synth(resolve_config(f), f.force);
        } else if (train->parsed()) {
            bvae::cmd_train(resolve_config(f), f.force);
        } else if (generate->parsed()) {
            if (!f.seed_given) throw std::invalid_argument("generate requires --seed");
            if (f.out.empty()) throw std::invalid_argument("generate requires --out");
            const std::size_t count = f.n_generations ? f.n_generations : 10000;
            bvae::cmd_generate(manifest, f.out, f.seed, count, f.force);
        } else if (evaluate->parsed()) {
            bvae::cmd_evaluate(resolve_config(f), generations_csv, f.out, f.force);
        } else if (heatmap->parsed()) {
            if (f.out.empty()) throw std::invalid_argument("heatmap requires --out");
            bvae::cmd_heatmap(heatmap_csv, f.out, f.force);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
