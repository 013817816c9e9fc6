#pragma once

#include "bvae/dataset.hpp"
#include "bvae/network.hpp"

namespace bvae {

struct PredictorConfig {
    std::vector<std::size_t> hidden = {256, 256, 64};  // last entry is the embedding width
    std::size_t epochs = 80;
    std::size_t batch_size = 128;
    double lr = 1e-3;
};

// Fully connected ratios -> properties regressor. Frozen after training; its
// penultimate activations are the embedding space the distribution metrics
// compare in.
struct PropertyPredictor {
    NetworkSpec spec;
    NetworkParams params;
    std::size_t embed_layer = 0;  // layer whose activation is the embedding
    std::uint64_t seed = 0;
    std::size_t epochs_trained = 0;
    std::vector<double> val_mse;       // per property
    std::vector<double> property_var;  // per property, on the validation split

    std::size_t embed_dim() const { return spec.layers[embed_layer].out_dim; }
};

// Squared-error training on train_rows, validation on val_rows.
PropertyPredictor train_predictor(const CompoundDataset& data,
                                  const std::vector<std::size_t>& train_rows,
                                  const std::vector<std::size_t>& val_rows,
                                  const PredictorConfig& cfg, std::uint64_t seed);

Matrix predict(const PropertyPredictor& pred, const Matrix& x);
Matrix embed(const PropertyPredictor& pred, const Matrix& x);

}  // namespace bvae
