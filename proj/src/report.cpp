#include "bvae/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bvae {

namespace {

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_report_csv(const std::vector<EvalRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,model,fid_star,kl_score,era\n";
    for (const auto& r : rows)
        out << r.epoch << ',' << r.model << ',' << format17(r.fid_star) << ','
            << format17(r.kl_score) << ',' << format17(r.era) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<EvalRow> read_report_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "epoch,model,fid_star,kl_score,era")
        throw std::runtime_error(path + ": bad report header");
    std::vector<EvalRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        EvalRow r;
        std::getline(ss, tok, ',');
        r.epoch = std::stoull(tok);
        std::getline(ss, r.model, ',');
        std::getline(ss, tok, ',');
        r.fid_star = std::stod(tok);
        std::getline(ss, tok, ',');
        r.kl_score = std::stod(tok);
        std::getline(ss, tok, ',');
        r.era = std::stod(tok);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_references_json(const ReferenceScores& refs, std::uint64_t seed,
                           const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["seed"] = seed;
    j["fid_star"] = {{"test", refs.fid_test}, {"noise", refs.fid_noise}};
    j["kl_score"] = {{"test", refs.kl_test}, {"noise", refs.kl_noise}};
    j["era"] = {{"real", refs.era_real}, {"noise", refs.era_noise}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

ReferenceScores read_references_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    ReferenceScores refs;
    refs.fid_test = j.at("fid_star").at("test").get<double>();
    refs.fid_noise = j.at("fid_star").at("noise").get<double>();
    refs.kl_test = j.at("kl_score").at("test").get<double>();
    refs.kl_noise = j.at("kl_score").at("noise").get<double>();
    refs.era_real = j.at("era").at("real").get<double>();
    refs.era_noise = j.at("era").at("noise").get<double>();
    return refs;
}

}  // namespace bvae
