#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "alsim/types.hpp"

namespace alsim {

// One active-learning cycle's outcome, as it appears in the report CSV.
struct CycleRecord {
    std::uint64_t seed = 0;
    int cycle = 0;               // 1-based cycle index
    std::size_t requested = 0;   // images asked for this cycle
    std::vector<std::string> selected_ids;
    std::size_t n_labeled = 0;   // labeled-set size after this cycle
    double map = 0.0;
    std::string scorer;
    std::string accumulator;
};

// Ground truth: a single JSON document with categories, image ids, and
// per-image annotations. See README for the exact schema.
DatasetIndex load_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const DatasetIndex& index, const std::filesystem::path& path);

// Predictions: JSON Lines, one object per image, carrying the full D-length
// probability vector per box. Distributions off the simplex by more than
// kProbSumTolerance are rejected; smaller deviations are renormalized.
std::vector<ImagePrediction> load_predictions(const std::filesystem::path& path,
                                              const DatasetIndex& index);
void write_predictions(const std::vector<ImagePrediction>& predictions,
                       const std::filesystem::path& path);

// Report CSV with header `seed,cycle,n_labeled,scorer,accumulator,map`.
// Rows are stably sorted by (seed, cycle); identical input produces
// byte-identical output.
void write_report(const std::vector<CycleRecord>& records, std::ostream& out);
void write_report(const std::vector<CycleRecord>& records, const std::filesystem::path& path);
std::vector<CycleRecord> read_report(const std::filesystem::path& path);

}  // namespace alsim
