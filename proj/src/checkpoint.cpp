#include "bvae/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace bvae {

namespace {

constexpr char kMagic[8] = {'B', 'V', 'C', 'K', '0', '0', '0', '1'};
constexpr char kTrailer[8] = {'B', 'V', 'N', 'D', '0', '0', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes little-endian doubles");

struct Writer {
    std::ofstream out;
    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw std::runtime_error("cannot write " + path);
    }
    void bytes(const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof(v)); }
    void f64(double v) { bytes(&v, sizeof(v)); }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void doubles(const double* p, std::size_t n) { bytes(p, n * sizeof(double)); }
    void matrix(const Matrix& m) {
        u64(m.rows());
        u64(m.cols());
        doubles(m.data(), m.size());
    }
    void dvec(const std::vector<double>& v) {
        u64(v.size());
        doubles(v.data(), v.size());
    }
};

struct Reader {
    std::ifstream in;
    std::string path;
    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw std::runtime_error("cannot read " + p);
    }
    void bytes(void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw std::runtime_error(path + ": truncated checkpoint");
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, sizeof(v));
        return v;
    }
    double f64() {
        double v;
        bytes(&v, sizeof(v));
        return v;
    }
    std::string str() {
        const std::uint64_t n = u64();
        if (n > (1ull << 20)) throw std::runtime_error(path + ": implausible string length");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    Matrix matrix() {
        const std::uint64_t rows = u64();
        const std::uint64_t cols = u64();
        if (rows * cols > (1ull << 30)) throw std::runtime_error(path + ": implausible matrix");
        Matrix m(rows, cols);
        bytes(m.data(), m.size() * sizeof(double));
        return m;
    }
    std::vector<double> dvec() {
        const std::uint64_t n = u64();
        if (n > (1ull << 30)) throw std::runtime_error(path + ": implausible vector");
        std::vector<double> v(n);
        bytes(v.data(), n * sizeof(double));
        return v;
    }
};

}  // namespace

const NamedNetwork& Checkpoint::network(const std::string& name) const {
    for (const auto& n : networks)
        if (n.name == name) return n;
    throw std::runtime_error("checkpoint has no network named '" + name + "'");
}

const NamedAdam& Checkpoint::adam_state(const std::string& name) const {
    for (const auto& a : adam)
        if (a.name == name) return a;
    throw std::runtime_error("checkpoint has no optimizer state named '" + name + "'");
}

std::string Checkpoint::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    throw std::runtime_error("checkpoint has no metadata key '" + key + "'");
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, sizeof(kMagic));
    w.u64(ckpt.seed);
    w.u64(ckpt.step);
    for (std::uint64_t s : ckpt.rng_state) w.u64(s);

    w.u64(ckpt.networks.size());
    for (const auto& net : ckpt.networks) {
        check_params(net.spec, net.params, "save_checkpoint");
        w.str(net.name);
        w.u64(net.spec.input_dim);
        w.u64(net.spec.layers.size());
        for (const auto& l : net.spec.layers) {
            w.u64(l.out_dim);
            w.str(activation_name(l.act));
            w.f64(l.leaky_slope);
        }
        for (std::size_t l = 0; l < net.spec.layers.size(); ++l) {
            w.matrix(net.params.weights[l]);
            w.dvec(net.params.biases[l]);
        }
    }

    w.u64(ckpt.adam.size());
    for (const auto& a : ckpt.adam) {
        w.str(a.name);
        w.u64(a.state.step);
        w.f64(a.state.beta1);
        w.f64(a.state.beta2);
        w.f64(a.state.eps);
        w.u64(a.state.m_w.size());
        for (std::size_t l = 0; l < a.state.m_w.size(); ++l) {
            w.matrix(a.state.m_w[l]);
            w.matrix(a.state.v_w[l]);
            w.dvec(a.state.m_b[l]);
            w.dvec(a.state.v_b[l]);
        }
    }

    w.u64(ckpt.meta.size());
    for (const auto& [k, v] : ckpt.meta) {
        w.str(k);
        w.str(v);
    }
    w.bytes(kTrailer, sizeof(kTrailer));
    if (!w.out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error(path + ": not a checkpoint (bad magic)");

    Checkpoint ckpt;
    ckpt.seed = r.u64();
    ckpt.step = r.u64();
    for (auto& s : ckpt.rng_state) s = r.u64();

    const std::uint64_t n_networks = r.u64();
    for (std::uint64_t i = 0; i < n_networks; ++i) {
        NamedNetwork net;
        net.name = r.str();
        net.spec.input_dim = r.u64();
        const std::uint64_t n_layers = r.u64();
        for (std::uint64_t l = 0; l < n_layers; ++l) {
            LayerSpec ls;
            ls.out_dim = r.u64();
            ls.act = activation_from_name(r.str());
            ls.leaky_slope = r.f64();
            net.spec.layers.push_back(ls);
        }
        for (std::uint64_t l = 0; l < n_layers; ++l) {
            net.params.weights.push_back(r.matrix());
            net.params.biases.push_back(r.dvec());
        }
        check_params(net.spec, net.params, ("load_checkpoint " + net.name).c_str());
        ckpt.networks.push_back(std::move(net));
    }

    const std::uint64_t n_adam = r.u64();
    for (std::uint64_t i = 0; i < n_adam; ++i) {
        NamedAdam a;
        a.name = r.str();
        a.state.step = r.u64();
        a.state.beta1 = r.f64();
        a.state.beta2 = r.f64();
        a.state.eps = r.f64();
        const std::uint64_t n_layers = r.u64();
        for (std::uint64_t l = 0; l < n_layers; ++l) {
            a.state.m_w.push_back(r.matrix());
            a.state.v_w.push_back(r.matrix());
            a.state.m_b.push_back(r.dvec());
            a.state.v_b.push_back(r.dvec());
        }
        ckpt.adam.push_back(std::move(a));
    }

    const std::uint64_t n_meta = r.u64();
    for (std::uint64_t i = 0; i < n_meta; ++i) {
        std::string k = r.str();
        std::string v = r.str();
        ckpt.meta.emplace_back(std::move(k), std::move(v));
    }

    char trailer[8];
    r.bytes(trailer, sizeof(trailer));
    if (std::memcmp(trailer, kTrailer, sizeof(trailer)) != 0)
        throw std::runtime_error(path + ": corrupt checkpoint (bad trailer)");
    return ckpt;
}

}  // namespace bvae
