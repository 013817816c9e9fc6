#include "bvae/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bvae {

namespace {

// Substream tags for the dataset seed.
constexpr std::uint64_t kTagRow = 0x726f77;       // per-row draws
constexpr std::uint64_t kTagProps = 0x70726f70;   // property coefficients

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void SynthConfig::validate() const {
    if (n < 1) throw std::invalid_argument("SynthConfig: n must be >= 1");
    if (p < 1) throw std::invalid_argument("SynthConfig: p must be >= 1");
    if (groups.empty()) throw std::invalid_argument("SynthConfig: at least one group required");
    std::size_t total = 0;
    bool any_active = false;
    for (const auto& g : groups) {
        if (g.size == 0) throw std::invalid_argument("SynthConfig: group '" + g.name + "' is empty");
        if (g.min_active > g.max_active || g.max_active > g.size)
            throw std::invalid_argument("SynthConfig: group '" + g.name + "' has bad active range");
        if (!(g.within_alpha > 0.0) || !(g.mass_alpha > 0.0))
            throw std::invalid_argument("SynthConfig: group '" + g.name +
                                        "' needs positive Dirichlet concentrations");
        if (g.max_active > 0) any_active = true;
        total += g.size;
    }
    if (total != p)
        throw std::invalid_argument("SynthConfig: group sizes sum to " + std::to_string(total) +
                                    ", expected p = " + std::to_string(p));
    if (!any_active)
        throw std::invalid_argument("SynthConfig: every group has max_active = 0");
}

SynthConfig SynthConfig::defaults() {
    SynthConfig cfg;
    cfg.groups = {
        {"polymers", 8, 1, 2, 5.0, 16.0},
        {"fillers", 15, 2, 4, 2.0, 8.0},
        {"oils", 10, 1, 2, 2.0, 3.2},
        {"curatives", 16, 4, 7, 2.0, 4.0},
        {"additives", 50, 6, 12, 1.5, 4.8},
    };
    return cfg;
}

void save_synth_config(const SynthConfig& cfg, const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["n"] = cfg.n;
    j["p"] = cfg.p;
    j["seed"] = cfg.seed;
    j["groups"] = nlohmann::ordered_json::array();
    for (const auto& g : cfg.groups)
        j["groups"].push_back({{"name", g.name},
                               {"size", g.size},
                               {"min_active", g.min_active},
                               {"max_active", g.max_active},
                               {"within_alpha", g.within_alpha},
                               {"mass_alpha", g.mass_alpha}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

SynthConfig load_synth_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("version", 0) != 1)
        throw std::runtime_error(path + ": unsupported synth config version");
    SynthConfig cfg;
    cfg.n = j.at("n").get<std::size_t>();
    cfg.p = j.at("p").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.groups.clear();
    for (const auto& g : j.at("groups"))
        cfg.groups.push_back({g.at("name").get<std::string>(), g.at("size").get<std::size_t>(),
                              g.at("min_active").get<std::size_t>(),
                              g.at("max_active").get<std::size_t>(),
                              g.at("within_alpha").get<double>(),
                              g.at("mass_alpha").get<double>()});
    cfg.validate();
    return cfg;
}

PropertyModel make_property_model(const SynthConfig& cfg) {
    Rng rng = derive_rng(cfg.seed, {kTagProps});
    PropertyModel m;
    m.linear_w.resize(cfg.p);
    m.inter_w.resize(cfg.p);
    for (std::size_t i = 0; i < cfg.p; ++i) m.linear_w[i] = 2.0 * rng.uniform() - 1.0;
    m.linear_c = 0.5;
    for (std::size_t i = 0; i < cfg.p; ++i) m.inter_w[i] = 2.0 * rng.uniform() - 1.0;
    m.inter_c = -0.2;
    // Interaction between the lead components of the two dominant groups.
    m.pair_i = 0;
    std::size_t second_group_start = cfg.groups.front().size;
    m.pair_j = cfg.groups.size() > 1 ? second_group_start : cfg.p - 1;
    m.pair_w = 2.0 + 2.0 * rng.uniform();
    // Saturating response to the second group's total share.
    const std::size_t gi = cfg.groups.size() > 1 ? 1 : 0;
    std::size_t start = 0;
    for (std::size_t g = 0; g < gi; ++g) start += cfg.groups[g].size;
    for (std::size_t i = 0; i < cfg.groups[gi].size; ++i) m.sat_indices.push_back(start + i);
    m.sat_gain = 2.0 + 2.0 * rng.uniform();
    m.sat_scale = 0.5 + rng.uniform();
    m.sat_c = 0.1;
    return m;
}

std::array<double, 3> property_simulate(const double* row, std::size_t p,
                                        const PropertyModel& model) {
    double lin = model.linear_c;
    for (std::size_t i = 0; i < p; ++i) lin += model.linear_w[i] * row[i];
    double inter = model.inter_c;
    for (std::size_t i = 0; i < p; ++i) inter += model.inter_w[i] * row[i];
    inter += model.pair_w * row[model.pair_i] * row[model.pair_j];
    double sat_sum = 0.0;
    for (std::size_t i : model.sat_indices) sat_sum += row[i];
    const double sat = model.sat_c + model.sat_scale * std::tanh(model.sat_gain * sat_sum);
    return {lin, inter, sat};
}

CompoundDataset synth_dataset(const SynthConfig& cfg) {
    cfg.validate();
    const PropertyModel prop_model = make_property_model(cfg);

    CompoundDataset d;
    d.ratios = Matrix(cfg.n, cfg.p);
    d.properties = Matrix(cfg.n, 3);
    std::size_t offset = 0;
    for (const auto& g : cfg.groups) {
        ComponentGroup cg{g.name, {}};
        for (std::size_t i = 0; i < g.size; ++i) cg.indices.push_back(offset + i);
        d.groups.push_back(std::move(cg));
        offset += g.size;
    }

    const std::size_t n_groups = cfg.groups.size();
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(cfg.n); ++r) {
        Rng rng = derive_rng(cfg.seed, {kTagRow, static_cast<std::uint64_t>(r)});
        double* row = d.ratios.row(static_cast<std::size_t>(r));

        // How many components each group activates this row.
        std::vector<std::size_t> counts(n_groups);
        for (std::size_t g = 0; g < n_groups; ++g) {
            const auto& gc = cfg.groups[g];
            counts[g] = gc.min_active + rng.below(gc.max_active - gc.min_active + 1);
        }

        // Mass split across the groups that are active this row.
        std::vector<double> alpha;
        std::vector<std::size_t> active_groups;
        for (std::size_t g = 0; g < n_groups; ++g)
            if (counts[g] > 0) {
                alpha.push_back(cfg.groups[g].mass_alpha);
                active_groups.push_back(g);
            }
        std::vector<double> group_mass(alpha.size());
        rng.dirichlet(alpha, group_mass.data());

        std::size_t start = 0;
        std::vector<std::size_t> pool;
        std::vector<double> within;
        for (std::size_t g = 0, a = 0; g < n_groups; ++g) {
            const auto& gc = cfg.groups[g];
            if (counts[g] > 0) {
                pool.resize(gc.size);
                for (std::size_t i = 0; i < gc.size; ++i) pool[i] = start + i;
                // Partial Fisher-Yates: the first counts[g] entries are the pick.
                for (std::size_t i = 0; i < counts[g]; ++i)
                    std::swap(pool[i], pool[i + rng.below(gc.size - i)]);
                within.assign(counts[g], 0.0);
                rng.dirichlet(std::vector<double>(counts[g], gc.within_alpha), within.data());
                for (std::size_t i = 0; i < counts[g]; ++i)
                    row[pool[i]] = group_mass[a] * within[i];
                ++a;
            }
            start += gc.size;
        }

        const auto props = property_simulate(row, cfg.p, prop_model);
        for (std::size_t k = 0; k < 3; ++k) d.properties(static_cast<std::size_t>(r), k) = props[k];
    }
    return d;
}

Matrix binarize(const Matrix& x) {
    Matrix m(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) m.data()[i] = x.data()[i] > 0.0 ? 1.0 : 0.0;
    return m;
}

double sparsity(const Matrix& x) {
    if (x.size() == 0) return 0.0;
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x.data()[i] == 0.0) ++zeros;
    return static_cast<double>(zeros) / static_cast<double>(x.size());
}

namespace {

void write_csv(const Matrix& x, const Matrix* props, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    std::string header;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        if (j) header += ',';
        header += "component_" + std::to_string(j);
    }
    if (props)
        for (std::size_t k = 0; k < props->cols(); ++k) header += ",prop_" + std::to_string(k);
    out << header << "\n";
    std::string line;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        line.clear();
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (j) line += ',';
            line += format17(x(i, j));
        }
        if (props)
            for (std::size_t k = 0; k < props->cols(); ++k) {
                line += ',';
                line += format17((*props)(i, k));
            }
        out << line << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct CsvData {
    std::size_t p = 0;
    bool has_props = false;
    Matrix components;
    Matrix properties;
};

CsvData read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) names.push_back(tok);
    }
    std::size_t p = 0;
    while (p < names.size() && names[p] == "component_" + std::to_string(p)) ++p;
    if (p == 0) throw std::runtime_error(path + ": header does not start with component_0");
    std::size_t n_props = names.size() - p;
    if (n_props != 0 && n_props != 3)
        throw std::runtime_error(path + ": expected 0 or 3 property columns, found " +
                                 std::to_string(n_props));
    for (std::size_t k = 0; k < n_props; ++k)
        if (names[p + k] != "prop_" + std::to_string(k))
            throw std::runtime_error(path + ": bad property column '" + names[p + k] + "'");

    std::vector<double> comp, props;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        ++rows;
        std::stringstream ss(line);
        std::string tok;
        std::size_t col = 0;
        while (std::getline(ss, tok, ',')) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": row " + std::to_string(rows) +
                                         ": non-numeric value '" + tok + "'");
            }
            if (pos != tok.size())
                throw std::runtime_error(path + ": row " + std::to_string(rows) +
                                         ": non-numeric value '" + tok + "'");
            if (col < p) {
                if (v < 0.0)
                    throw std::runtime_error(path + ": row " + std::to_string(rows) +
                                             ": negative ratio " + tok);
                if (!std::isfinite(v))
                    throw std::runtime_error(path + ": row " + std::to_string(rows) +
                                             ": non-finite ratio");
                comp.push_back(v);
            } else {
                props.push_back(v);
            }
            ++col;
        }
        if (col != names.size())
            throw std::runtime_error(path + ": row " + std::to_string(rows) + " has " +
                                     std::to_string(col) + " values, expected " +
                                     std::to_string(names.size()));
    }
    CsvData out;
    out.p = p;
    out.has_props = n_props == 3;
    out.components = Matrix(rows, p, std::move(comp));
    if (out.has_props) out.properties = Matrix(rows, 3, std::move(props));
    return out;
}

}  // namespace

void save_dataset(const CompoundDataset& d, const std::string& path) {
    write_csv(d.ratios, &d.properties, path);
}

CompoundDataset load_dataset(const std::string& path) {
    CsvData c = read_csv(path);
    if (!c.has_props) throw std::runtime_error(path + ": dataset requires prop_0..prop_2 columns");
    CompoundDataset d;
    d.ratios = std::move(c.components);
    d.properties = std::move(c.properties);
    return d;
}

void save_components(const Matrix& x, const std::string& path) { write_csv(x, nullptr, path); }

Matrix load_components(const std::string& path) {
    CsvData c = read_csv(path);
    return std::move(c.components);
}

}  // namespace bvae
