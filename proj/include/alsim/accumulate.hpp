#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alsim/scoring.hpp"
#include "alsim/types.hpp"

namespace alsim {

enum class AccumulatorKind {
    kMean,
    kSum,
    kMax,
};

std::string to_string(AccumulatorKind kind);
std::optional<AccumulatorKind> parse_accumulator(const std::string& name);

struct ImageScore {
    std::string image_id;
    double value = 0.0;
    std::size_t n_boxes = 0;  // detections that survived the confidence filter
};

// Scores ordered non-increasing by value, ties broken by ascending image_id.
struct RankedPool {
    std::vector<ImageScore> entries;
};

// Reduces per-box scores to one image score. The empty list is defined as
// 0.0 for every kind, not an error.
double accumulate(const std::vector<BoxScore>& scores, AccumulatorKind kind);

struct PoolScoringOptions {
    ScorerKind scorer = ScorerKind::kMargin;
    AccumulatorKind accumulator = AccumulatorKind::kMax;
    // Detections below this confidence are dropped before scoring; the
    // per-image box count reflects the filtered set.
    double confidence_threshold = 0.05;
    // Value assigned to images with no surviving detections. Such images
    // rank last by default, but may in fact be informative (missed objects),
    // so the value is configurable.
    double empty_image_score = 0.0;
};

// One ImageScore per input image. The random scorer derives an independent
// generator per image from (seed, image_id), so the result is independent
// of evaluation order.
std::vector<ImageScore> score_pool(const std::vector<ImagePrediction>& predictions,
                                   const PoolScoringOptions& options, std::uint64_t seed);

// Deterministic ordering; duplicate image ids are a validation error.
RankedPool rank(std::vector<ImageScore> scores);

// First min(L, |pool|) ids in rank order. An empty pool yields an empty
// selection (experiment termination, not an error).
std::vector<std::string> select_top(const RankedPool& pool, std::size_t L);

}  // namespace alsim
