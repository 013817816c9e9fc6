#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bvae/matrix.hpp"
#include "bvae/rng.hpp"

namespace bvae {

// One block of related components. Components are consecutive; a row
// activates between min_active and max_active of them, gives the active ones
// a Dirichlet(within_alpha) split, and the block as a whole gets a share of
// the row mass drawn from a Dirichlet over the groups' mass_alpha.
struct GroupConfig {
    std::string name;
    std::size_t size = 0;
    std::size_t min_active = 0;
    std::size_t max_active = 0;
    double within_alpha = 1.0;
    double mass_alpha = 1.0;
};

struct SynthConfig {
    std::size_t n = 12000;
    std::size_t p = 99;
    std::uint64_t seed = 2024;
    std::vector<GroupConfig> groups;

    void validate() const;
    // Five blocks over 99 components, tuned for ~80% zero entries with a few
    // dominant blocks, mirroring structured industrial formulations.
    static SynthConfig defaults();
};

void save_synth_config(const SynthConfig& cfg, const std::string& path);
SynthConfig load_synth_config(const std::string& path);

// Coefficients of the three simulated properties, drawn once per seed:
// a linear blend, a blend with one pairwise interaction, and a saturating
// transform of a group sum.
struct PropertyModel {
    std::vector<double> linear_w;
    double linear_c = 0.0;
    std::vector<double> inter_w;
    double inter_c = 0.0;
    std::size_t pair_i = 0, pair_j = 0;
    double pair_w = 0.0;
    std::vector<std::size_t> sat_indices;
    double sat_gain = 0.0, sat_scale = 0.0, sat_c = 0.0;
};

PropertyModel make_property_model(const SynthConfig& cfg);
std::array<double, 3> property_simulate(const double* row, std::size_t p,
                                        const PropertyModel& model);

struct ComponentGroup {
    std::string name;
    std::vector<std::size_t> indices;
};

struct CompoundDataset {
    Matrix ratios;      // n x p, rows sum to 1 before any truncation
    Matrix properties;  // n x 3
    std::vector<ComponentGroup> groups;
};

// Seeded, row-parallel generation; identical output for identical config.
CompoundDataset synth_dataset(const SynthConfig& cfg);

// Exact indicator of strict positivity.
Matrix binarize(const Matrix& x);

// CSV with header component_0..component_{p-1},prop_0,prop_1,prop_2 and
// 17-significant-digit values, so save -> load -> save is byte-identical.
void save_dataset(const CompoundDataset& d, const std::string& path);
CompoundDataset load_dataset(const std::string& path);

// Generations: component columns only.
void save_components(const Matrix& x, const std::string& path);
Matrix load_components(const std::string& path);

double sparsity(const Matrix& x);  // fraction of zero entries

}  // namespace bvae
