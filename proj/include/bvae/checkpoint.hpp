#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bvae/adam.hpp"
#include "bvae/network.hpp"
#include "bvae/rng.hpp"

namespace bvae {

struct NamedNetwork {
    std::string name;
    NetworkSpec spec;
    NetworkParams params;
};

struct NamedAdam {
    std::string name;
    AdamState state;
};

// Versioned binary container: named networks, optional optimizer states (so
// an interrupted run resumes exactly), the RNG seed/state and a step count,
// plus free-form metadata. save -> load -> save is byte-identical.
struct Checkpoint {
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    Rng::State rng_state{};
    std::vector<NamedNetwork> networks;
    std::vector<NamedAdam> adam;
    std::vector<std::pair<std::string, std::string>> meta;

    const NamedNetwork& network(const std::string& name) const;
    const NamedAdam& adam_state(const std::string& name) const;
    std::string meta_value(const std::string& key) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace bvae
