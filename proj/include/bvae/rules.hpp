#pragma once

#include <string>
#include <vector>

#include "bvae/dataset.hpp"
#include "bvae/matrix.hpp"

namespace bvae {

// One domain rule over a set of component indices: either a bound on the
// summed ratio, or a bound on how many of the components are present
// (strictly positive).
struct Rule {
    enum class Kind { sum_bound, presence_bound };

    std::string id;
    Kind kind = Kind::sum_bound;
    std::vector<std::size_t> indices;
    double lo = 0.0;
    double hi = 0.0;
};

struct RuleSet {
    std::vector<Rule> rules;

    void validate(std::size_t p) const;
};

struct RuleCheck {
    bool pass = true;
    std::vector<std::string> violated;  // rule ids
};

RuleCheck check_rules(const double* row, std::size_t p, const RuleSet& rules);

// Stand-in rule set calibrated against the default generator: the dominant
// group stays within its usual share, the second group is capped, at least
// one lead-group component is present, and rows stay sparse.
RuleSet default_rules(const SynthConfig& cfg);

void save_rules(const RuleSet& rules, const std::string& path);
// Rejects rules referencing indices >= p at load time.
RuleSet load_rules(const std::string& path, std::size_t p);

}  // namespace bvae
