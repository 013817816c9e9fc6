#include "bvae/rules.hpp"

#include <fstream>

#include <json.hpp>

namespace bvae {

void RuleSet::validate(std::size_t p) const {
    for (const auto& r : rules) {
        if (r.id.empty()) throw std::invalid_argument("RuleSet: rule without id");
        if (r.indices.empty())
            throw std::invalid_argument("RuleSet: rule '" + r.id + "' has no indices");
        if (!(r.lo <= r.hi))
            throw std::invalid_argument("RuleSet: rule '" + r.id + "' has lo > hi");
        for (std::size_t i : r.indices)
            if (i >= p)
                throw std::invalid_argument("RuleSet: rule '" + r.id + "' references index " +
                                            std::to_string(i) + ", but p = " + std::to_string(p));
    }
}

RuleCheck check_rules(const double* row, std::size_t p, const RuleSet& rules) {
    RuleCheck out;
    for (const auto& r : rules.rules) {
        bool ok = true;
        if (r.kind == Rule::Kind::sum_bound) {
            double sum = 0.0;
            for (std::size_t i : r.indices) sum += row[i];
            ok = r.lo <= sum && sum <= r.hi;
        } else {
            std::size_t count = 0;
            for (std::size_t i : r.indices)
                if (row[i] > 0.0) ++count;
            const double c = static_cast<double>(count);
            ok = r.lo <= c && c <= r.hi;
        }
        if (!ok) {
            out.pass = false;
            out.violated.push_back(r.id);
        }
    }
    (void)p;
    return out;
}

RuleSet default_rules(const SynthConfig& cfg) {
    cfg.validate();
    RuleSet rs;
    std::vector<std::vector<std::size_t>> group_indices;
    std::size_t start = 0;
    for (const auto& g : cfg.groups) {
        std::vector<std::size_t> idx(g.size);
        for (std::size_t i = 0; i < g.size; ++i) idx[i] = start + i;
        group_indices.push_back(std::move(idx));
        start += g.size;
    }
    std::vector<std::size_t> all(cfg.p);
    for (std::size_t i = 0; i < cfg.p; ++i) all[i] = i;

    rs.rules.push_back({cfg.groups[0].name + "-sum", Rule::Kind::sum_bound, group_indices[0],
                        0.2, 0.8});
    if (cfg.groups.size() > 1)
        rs.rules.push_back({cfg.groups[1].name + "-sum", Rule::Kind::sum_bound, group_indices[1],
                            0.0, 0.6});
    rs.rules.push_back({cfg.groups[0].name + "-presence", Rule::Kind::presence_bound,
                        group_indices[0], 1.0, static_cast<double>(cfg.groups[0].size)});
    rs.rules.push_back({"component-count", Rule::Kind::presence_bound, all, 0.0, 30.0});
    return rs;
}

void save_rules(const RuleSet& rules, const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["rules"] = nlohmann::ordered_json::array();
    for (const auto& r : rules.rules)
        j["rules"].push_back(
            {{"id", r.id},
             {"kind", r.kind == Rule::Kind::sum_bound ? "sum" : "presence"},
             {"indices", r.indices},
             {"lo", r.lo},
             {"hi", r.hi}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

RuleSet load_rules(const std::string& path, std::size_t p) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("version", 0) != 1)
        throw std::runtime_error(path + ": unsupported rules version");
    RuleSet rs;
    for (const auto& r : j.at("rules")) {
        Rule rule;
        rule.id = r.at("id").get<std::string>();
        const std::string kind = r.at("kind").get<std::string>();
        if (kind == "sum")
            rule.kind = Rule::Kind::sum_bound;
        else if (kind == "presence")
            rule.kind = Rule::Kind::presence_bound;
        else
            throw std::runtime_error(path + ": unknown rule kind '" + kind + "'");
        rule.indices = r.at("indices").get<std::vector<std::size_t>>();
        rule.lo = r.at("lo").get<double>();
        rule.hi = r.at("hi").get<double>();
        rs.rules.push_back(std::move(rule));
    }
    rs.validate(p);
    return rs;
}

}  // namespace bvae
