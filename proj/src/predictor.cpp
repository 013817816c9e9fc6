#include "bvae/predictor.hpp"

#include <cmath>

#include "bvae/adam.hpp"

namespace bvae {

namespace {

constexpr std::uint64_t kTagPredictor = 0x70726564;

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(rows[i], j);
    return out;
}

}  // namespace

PropertyPredictor train_predictor(const CompoundDataset& data,
                                  const std::vector<std::size_t>& train_rows,
                                  const std::vector<std::size_t>& val_rows,
                                  const PredictorConfig& cfg, std::uint64_t seed) {
    if (cfg.hidden.empty()) throw std::invalid_argument("train_predictor: no hidden layers");
    if (train_rows.empty() || val_rows.empty())
        throw std::invalid_argument("train_predictor: empty split");

    PropertyPredictor pred;
    pred.seed = seed;
    pred.spec.input_dim = data.ratios.cols();
    for (std::size_t h : cfg.hidden) pred.spec.layers.push_back({h, Activation::relu});
    pred.spec.layers.push_back({static_cast<std::size_t>(data.properties.cols()),
                                Activation::linear});
    pred.embed_layer = pred.spec.layers.size() - 2;  // penultimate activation

    Rng rng = derive_rng(seed, {kTagPredictor});
    pred.params = init_params(pred.spec, rng);
    AdamState opt = make_adam_state(pred.spec);

    const Matrix train_x = gather_rows(data.ratios, train_rows);
    const Matrix train_y = gather_rows(data.properties, train_rows);
    const Matrix val_x = gather_rows(data.ratios, val_rows);
    const Matrix val_y = gather_rows(data.properties, val_rows);

    std::vector<std::size_t> order(train_rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t n = std::min(cfg.batch_size, order.size() - start);
            Matrix bx(n, train_x.cols()), by(n, train_y.cols());
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t r = order[start + i];
                for (std::size_t j = 0; j < train_x.cols(); ++j) bx(i, j) = train_x(r, j);
                for (std::size_t j = 0; j < train_y.cols(); ++j) by(i, j) = train_y(r, j);
            }
            ForwardTape tape;
            const Matrix out = mlp_forward(pred.spec, pred.params, bx, &tape);
            // Squared error, summed over properties, averaged over rows.
            Matrix dout(n, out.cols());
            double loss = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double e = out.data()[i] - by.data()[i];
                loss += e * e;
                dout.data()[i] = 2.0 * e / static_cast<double>(n);
            }
            loss /= static_cast<double>(n);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_predictor: training diverged");
            Gradients g = mlp_backward(pred.spec, pred.params, tape, dout);
            adam_step(pred.params, g, opt, cfg.lr);
        }
        pred.epochs_trained = epoch + 1;
    }

    const Matrix val_out = mlp_forward(pred.spec, pred.params, val_x);
    const std::size_t n_props = val_y.cols();
    pred.val_mse.assign(n_props, 0.0);
    pred.property_var.assign(n_props, 0.0);
    for (std::size_t k = 0; k < n_props; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < val_y.rows(); ++i) mean += val_y(i, k);
        mean /= static_cast<double>(val_y.rows());
        double mse = 0.0, var = 0.0;
        for (std::size_t i = 0; i < val_y.rows(); ++i) {
            const double e = val_out(i, k) - val_y(i, k);
            mse += e * e;
            var += (val_y(i, k) - mean) * (val_y(i, k) - mean);
        }
        pred.val_mse[k] = mse / static_cast<double>(val_y.rows());
        pred.property_var[k] = var / static_cast<double>(val_y.rows());
    }
    return pred;
}

Matrix predict(const PropertyPredictor& pred, const Matrix& x) {
    return mlp_forward(pred.spec, pred.params, x);
}

Matrix embed(const PropertyPredictor& pred, const Matrix& x) {
    ForwardTape tape;
    mlp_forward(pred.spec, pred.params, x, &tape);
    return tape.acts[pred.embed_layer + 1];
}

}  // namespace bvae
