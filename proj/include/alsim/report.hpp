#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "alsim/accumulate.hpp"
#include "alsim/dataset_io.hpp"
#include "alsim/scoring.hpp"

namespace alsim {

// Learning-curve point aggregated across seeds for one strategy.
struct CurveSummary {
    ScorerKind scorer = ScorerKind::kMargin;
    AccumulatorKind accumulator = AccumulatorKind::kMax;
    std::size_t n_labeled = 0;
    double mean_map = 0.0;
    std::optional<double> std_map;  // absent with fewer than two records
    std::size_t seeds = 0;
};

// Groups records by (scorer, accumulator, n_labeled) and reports mean and
// sample standard deviation of mAP. Output is sorted by scorer, accumulator,
// then n_labeled.
std::vector<CurveSummary> summarize(const std::vector<CycleRecord>& records);

// CSV with header `scorer,accumulator,n_labeled,mean_map,std_map,seeds`;
// std_map is left empty when undefined.
void write_summary(const std::vector<CurveSummary>& summaries, std::ostream& out);
void write_summary(const std::vector<CurveSummary>& summaries,
                   const std::filesystem::path& path);

}  // namespace alsim
