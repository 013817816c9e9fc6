#pragma once

#include <string>
#include <vector>

#include "bvae/metrics.hpp"

namespace bvae {

struct EvalRow {
    std::size_t epoch = 0;
    std::string model;
    double fid_star = 0.0;
    double kl_score = 0.0;
    double era = 0.0;
};

void write_report_csv(const std::vector<EvalRow>& rows, const std::string& path);
std::vector<EvalRow> read_report_csv(const std::string& path);

void write_references_json(const ReferenceScores& refs, std::uint64_t seed,
                           const std::string& path);
ReferenceScores read_references_json(const std::string& path);

}  // namespace bvae
